"""Command-line driver for single runs, convergence studies and scheme comparison.

Settings come from built-in defaults, then an optional JSON config file
(``--config``), then explicit flags.  Every subcommand writes plain CSV with
``%.6e`` numbers plus, for ``solve``, a JSON summary.

Exit codes: 0 success, 2 configuration error, 3 non-convergence,
4 blow-up detected.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .cn_sgm import DEFAULT_MAX_ITER, DEFAULT_TOL
from .diagnostics import DEFAULT_MU_FACTOR
from .errors import KGSError, ParameterError
from .problems import custom_problem, example1, example2, tabulated_field
from .runner import SCHEMES, RunReport, run
from .studies import StudyFailure, compare_study, spatial_study, temporal_study

log = logging.getLogger("kgs_spectral")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NONCONVERGENCE = 3
EXIT_BLOWUP = 4

FMT = "%.6e"

DEFAULTS = {
    "scheme": "cn",
    "example": "example1",
    "alpha": 2.0,
    "tau": 0.01,
    "N": 100,
    "T": None,
    "tol": DEFAULT_TOL,
    "max_iter": DEFAULT_MAX_ITER,
    "kappa2": None,
    "mu_factor": DEFAULT_MU_FACTOR,
    "init": "b_proj",
    "sample_every": 1,
    "snapshot_times": [],
    "out": "out",
    "tau_list": None,
    "n_list": None,
    "tau_ref": None,
    "n_ref": None,
    "initial": None,
    # model coefficients for custom initial data
    "lam": 1.0,
    "kappa1": 1.0,
    "gamma": 1.0,
    "eta": 1.0,
    "a": -20.0,
    "b": 20.0,
}

EXAMPLES = ("example1", "example2", "custom")


class ConfigError(KGSError):
    pass


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return FMT % v
    return str(v)


def write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _float_list(text: str) -> list:
    out = []
    for item in text.replace(",", " ").split():
        if "/" in item:
            num, den = item.split("/", 1)
            out.append(float(num) / float(den))
        else:
            out.append(float(item))
    return out


def _int_list(text: str) -> list:
    return [int(v) for v in text.replace(",", " ").split()]


def load_config(path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config: top level must be an object")
    data = {k.replace("-", "_"): v for k, v in data.items()}
    unknown = sorted(set(data) - set(DEFAULTS))
    if unknown:
        raise ConfigError(f"config: unknown field(s) {', '.join(unknown)}")
    for key in ("tau_list", "snapshot_times"):
        if isinstance(data.get(key), str):
            data[key] = _float_list(data[key])
    if isinstance(data.get("n_list"), str):
        data["n_list"] = _int_list(data["n_list"])
    return data


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(load_config(args.config))
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    validate_config(cfg)
    return cfg


def _require(cond: bool, field_name: str, msg: str):
    if not cond:
        raise ConfigError(f"{field_name}: {msg}")


def validate_config(cfg: dict) -> None:
    _require(cfg["scheme"] in SCHEMES, "scheme", f"must be one of {SCHEMES}")
    _require(cfg["example"] in EXAMPLES, "example", f"must be one of {EXAMPLES}")
    _require(cfg["init"] in ("b_proj", "l2"), "init", "must be b_proj or l2")
    try:
        alpha = float(cfg["alpha"])
        tau = float(cfg["tau"])
        tol = float(cfg["tol"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"numeric field is not a number: {exc}") from exc
    _require(1.0 < alpha <= 2.0, "alpha", "must lie in (1, 2]")
    _require(tau > 0 and math.isfinite(tau), "tau", "must be positive")
    _require(isinstance(cfg["N"], int) and cfg["N"] >= 3, "N", "must be an integer >= 3")
    _require(tol > 0, "tol", "must be positive")
    _require(isinstance(cfg["max_iter"], int) and cfg["max_iter"] >= 1, "max_iter", "must be >= 1")
    _require(isinstance(cfg["mu_factor"], int) and cfg["mu_factor"] >= 2, "mu_factor", "must be an integer >= 2")
    _require(isinstance(cfg["sample_every"], int) and cfg["sample_every"] >= 1, "sample_every", "must be >= 1")
    if cfg["T"] is not None:
        _require(float(cfg["T"]) >= 0, "T", "must be non-negative")
    if cfg["kappa2"] is not None:
        _require(float(cfg["kappa2"]) >= 0, "kappa2", "must be non-negative")
        _require(cfg["example"] != "example1", "kappa2", "example1 has no quartic term")
    if cfg["example"] == "custom":
        _require(cfg["initial"] is not None, "initial", "custom problems need an initial-data CSV")
    if cfg["tau_list"] is not None:
        _require(all(t > 0 for t in cfg["tau_list"]), "tau_list", "step sizes must be positive")
    if cfg["n_list"] is not None:
        _require(all(isinstance(n, int) and n >= 3 for n in cfg["n_list"]), "n_list", "sizes must be integers >= 3")


def _read_initial(path, a: float, b: float):
    """Initial fields from a CSV with columns ``x, re_u, im_u, phi, phi_t``."""
    try:
        data = np.genfromtxt(path, delimiter=",", names=True)
    except OSError as exc:
        raise ConfigError(f"initial: cannot read {path}: {exc}") from exc
    need = ("x", "re_u", "im_u", "phi", "phi_t")
    missing = [c for c in need if c not in (data.dtype.names or ())]
    if missing:
        raise ConfigError(f"initial: missing column(s) {', '.join(missing)}")
    x = data["x"]
    _require(np.all(np.diff(x) > 0), "initial", "x must be strictly increasing")
    _require(x[0] <= a and x[-1] >= b, "initial", "samples must cover the domain")
    return (
        tabulated_field(x, data["re_u"] + 1j * data["im_u"]),
        tabulated_field(x, data["phi"]),
        tabulated_field(x, data["phi_t"]),
    )


def build_problem(cfg: dict):
    alpha = float(cfg["alpha"])
    T = cfg["T"]
    try:
        if cfg["example"] == "example1":
            p = example1(alpha=alpha)
        elif cfg["example"] == "example2":
            p = example2(kappa2=float(cfg["kappa2"] or 0.0), alpha=alpha)
        else:
            u0, phi0, phi1 = _read_initial(cfg["initial"], float(cfg["a"]), float(cfg["b"]))
            p = custom_problem(
                u0, phi0, phi1, alpha=alpha, lam=float(cfg["lam"]), kappa1=float(cfg["kappa1"]),
                kappa2=float(cfg["kappa2"] or 0.0), gamma=float(cfg["gamma"]), eta=float(cfg["eta"]),
                a=float(cfg["a"]), b=float(cfg["b"]),
            )
        if T is not None:
            p = p.with_(T=float(T))
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc
    return p


def _exit_for(record) -> int:
    if record is None:
        return EXIT_OK
    return EXIT_NONCONVERGENCE if record.kind == "non_convergence" else EXIT_BLOWUP


def _study_kwargs(cfg: dict) -> dict:
    return dict(tol=float(cfg["tol"]), max_iter=cfg["max_iter"], init_mode=cfg["init"],
                mu_factor=cfg["mu_factor"])


def write_run_outputs(report: RunReport, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    write_csv(
        out / "invariants.csv",
        ["t", "mass", "energy", "rm", "re", "iters"],
        ([s.t, s.mass, s.energy, s.rm, s.re, s.iterations] for s in report.samples),
    )
    for snap in report.snapshots:
        write_csv(
            out / "snapshots" / f"{FMT % snap.t}.csv",
            ["x", "re_u", "im_u", "abs_u", "phi"],
            zip(snap.x, snap.u.real, snap.u.imag, np.abs(snap.u), np.real(snap.phi)),
        )
    with open(out / "summary.json", "w") as fh:
        json.dump(report.summary(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_solve(cfg: dict) -> int:
    problem = build_problem(cfg)
    T = problem.T
    snaps = [float(t) for t in cfg["snapshot_times"]]
    try:
        report = run(
            problem, cfg["N"], float(cfg["tau"]), T, scheme=cfg["scheme"], tol=float(cfg["tol"]),
            max_iter=cfg["max_iter"], init_mode=cfg["init"], sample_every=cfg["sample_every"],
            snapshot_times=snaps,
        )
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc
    write_run_outputs(report, Path(cfg["out"]))
    if report.blowup is not None:
        log.warning("run stopped at t=%g: %s (%s)", report.blowup.t, report.blowup.kind, report.blowup.detail)
    return _exit_for(report.blowup)


def cmd_converge_time(cfg: dict) -> int:
    _require(cfg["tau_list"] is not None and len(cfg["tau_list"]) >= 1, "tau_list", "give at least one step size")
    problem = build_problem(cfg)
    rows = temporal_study(problem, cfg["N"], cfg["tau_list"], scheme=cfg["scheme"],
                          tau_ref=cfg["tau_ref"], **_study_kwargs(cfg))
    write_csv(
        Path(cfg["out"]) / "convergence.csv",
        ["tau", "err_u_l2", "rate_u", "err_phi_l2", "rate_phi", "err_phi_linf", "rate_linf", "cpu_seconds"],
        ([r.tau, r.err_u_l2, r.rate_u, r.err_phi_l2, r.rate_phi, r.err_phi_linf, r.rate_linf, r.cpu_seconds]
         for r in rows),
    )
    return EXIT_OK


def cmd_converge_space(cfg: dict) -> int:
    _require(cfg["n_list"] is not None and len(cfg["n_list"]) >= 1, "n_list", "give at least one size")
    problem = build_problem(cfg)
    rows = spatial_study(problem, cfg["n_list"], float(cfg["tau"]), scheme=cfg["scheme"],
                         N_ref=cfg["n_ref"], **_study_kwargs(cfg))
    write_csv(
        Path(cfg["out"]) / "space_convergence.csv",
        ["N", "err_u_l2", "err_phi_l2", "err_phi_linf", "cpu_seconds"],
        ([r.N, r.err_u_l2, r.err_phi_l2, r.err_phi_linf, r.cpu_seconds] for r in rows),
    )
    return EXIT_OK


def cmd_compare(cfg: dict) -> int:
    _require(cfg["tau_list"] is not None and len(cfg["tau_list"]) >= 1, "tau_list", "give at least one step size")
    problem = build_problem(cfg)
    rows = compare_study(problem, cfg["N"], cfg["tau_list"], tau_ref=cfg["tau_ref"], **_study_kwargs(cfg))
    write_csv(
        Path(cfg["out"]) / "compare.csv",
        ["scheme", "tau", "error", "err_u_l2", "err_phi_l2", "cpu_seconds", "per_step_seconds", "steps"],
        ([r.scheme, r.tau, r.error, r.err_u_l2, r.err_phi_l2, r.cpu_seconds, r.per_step_seconds, r.steps]
         for r in rows),
    )
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "converge-time": cmd_converge_time,
    "converge-space": cmd_converge_space,
    "compare": cmd_compare,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of settings; flags override it")
    common.add_argument("--scheme", choices=SCHEMES)
    common.add_argument("--example", choices=EXAMPLES)
    common.add_argument("--initial", help="CSV (x, re_u, im_u, phi, phi_t) for --example custom")
    common.add_argument("--alpha", type=float)
    common.add_argument("--tau", type=float)
    common.add_argument("--N", type=int)
    common.add_argument("--T", type=float)
    common.add_argument("--tol", type=float)
    common.add_argument("--max-iter", dest="max_iter", type=int)
    common.add_argument("--kappa2", type=float)
    common.add_argument("--init", choices=("b_proj", "l2"))
    common.add_argument("--mu-factor", dest="mu_factor", type=int)
    common.add_argument("--out", help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="kgs-spectral", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="single run with invariant/snapshot output")
    p.add_argument("--sample-every", dest="sample_every", type=int)
    p.add_argument("--snapshot-times", dest="snapshot_times", type=_float_list,
                   help="times at which to dump fields, e.g. '0 0.5 1'")

    p = sub.add_parser("converge-time", parents=[common], help="temporal convergence table")
    p.add_argument("--tau-list", dest="tau_list", type=_float_list, help="e.g. '0.1 0.05 0.025'")
    p.add_argument("--tau-ref", dest="tau_ref", type=float, help="reference step (default min/10)")

    p = sub.add_parser("converge-space", parents=[common], help="spatial convergence table")
    p.add_argument("--n-list", dest="n_list", type=_int_list, help="e.g. '16 32 64 128'")
    p.add_argument("--n-ref", dest="n_ref", type=int, help="reference degree (default 2*max)")

    p = sub.add_parser("compare", parents=[common], help="error and CPU time of both schemes")
    p.add_argument("--tau-list", dest="tau_list", type=_float_list)
    p.add_argument("--tau-ref", dest="tau_ref", type=float)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StudyFailure as exc:
        print(f"study aborted: {exc}", file=sys.stderr)
        return _exit_for(exc.report.blowup)


if __name__ == "__main__":
    sys.exit(main())
