"""Container for truncated two-mode photon-number distributions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_TAIL_TOL = 1e-12
# rounding allowance when checking the stored mass against the tail tolerance
MASS_SLACK = 1e-12


class CutoffError(ValueError):
    """The Fock cutoff leaves more probability mass out than the tolerance allows."""


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Joint photon-number probabilities ``P(p, q)`` for ``0 <= p, q <= cutoff``.

    ``tail_mass`` is whatever the stored entries leave out of unit total.
    """

    probs: np.ndarray
    tail_tol: float = DEFAULT_TAIL_TOL

    def __post_init__(self):
        probs = np.array(self.probs, dtype=float)
        if probs.ndim != 2 or probs.shape[0] != probs.shape[1] or probs.shape[0] == 0:
            raise ValueError(f"probs must be a nonempty square matrix, got shape {probs.shape}")
        if not np.all(np.isfinite(probs)):
            raise ValueError("probs contains non-finite entries")
        if probs.min() < 0:
            raise ValueError(f"negative probability {probs.min():.3e}")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)
        tail = self.tail_mass
        if tail < -MASS_SLACK:
            raise ValueError(f"entries sum to {1 - tail!r}, above one")
        if tail > self.tail_tol + MASS_SLACK:
            raise CutoffError(
                f"cutoff {self.cutoff} leaves tail mass {tail:.3e} > tolerance {self.tail_tol:.1e}"
            )

    @property
    def cutoff(self) -> int:
        return self.probs.shape[0] - 1

    @property
    def tail_mass(self) -> float:
        return float(1.0 - self.probs.sum())

    def __getitem__(self, idx):
        return self.probs[idx]
