"""Time-level containers shared by both steppers."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class SpectralState:
    """Expansion coefficients of ``(U, Phi, Psi)`` at time ``t``.

    ``ln_p`` carries the log of the exponential auxiliary variable and is only
    set by the ESAV stepper.
    """

    U: np.ndarray
    Phi: np.ndarray
    Psi: np.ndarray
    t: float = 0.0
    ln_p: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "U", np.asarray(self.U, dtype=complex))
        object.__setattr__(self, "Phi", np.asarray(self.Phi, dtype=float))
        object.__setattr__(self, "Psi", np.asarray(self.Psi, dtype=float))

    def is_finite(self) -> bool:
        ok = np.all(np.isfinite(self.U)) and np.all(np.isfinite(self.Phi)) and np.all(np.isfinite(self.Psi))
        if self.ln_p is not None:
            ok = ok and np.isfinite(self.ln_p)
        return bool(ok)

    def evolve(self, **changes) -> "SpectralState":
        return replace(self, **changes)

    @classmethod
    def zeros(cls, size: int, t: float = 0.0, ln_p: Optional[float] = None) -> "SpectralState":
        return cls(np.zeros(size, complex), np.zeros(size), np.zeros(size), t, ln_p)


@dataclass(frozen=True)
class StepStats:
    iterations: int
    final_residual: float
    wall_time: float
