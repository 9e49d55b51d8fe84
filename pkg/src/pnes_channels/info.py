"""Moments, correlation index, Mandel Q and mutual information."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .joint import JointDistribution

VAR_SLACK = 1e-12
TABLE_SUM_TOL = 1e-9


@dataclass(frozen=True)
class Moments:
    mean1: float
    mean2: float
    var1: float
    var2: float
    cov: float

    def __post_init__(self):
        if self.var1 < -VAR_SLACK or self.var2 < -VAR_SLACK:
            raise ValueError(f"negative variance ({self.var1}, {self.var2})")


@dataclass(frozen=True, eq=False)
class SymbolTable:
    """Joint probabilities ``p_ij`` that party 1 infers symbol i and party 2 infers j."""

    probs: np.ndarray

    def __post_init__(self):
        t = np.array(self.probs, dtype=float)
        if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] < 2:
            raise ValueError(f"symbol table must be M x M with M >= 2, got shape {t.shape}")
        if t.min() < 0:
            raise ValueError("symbol probabilities must be nonnegative")
        if abs(t.sum() - 1.0) > TABLE_SUM_TOL:
            raise ValueError(f"symbol probabilities sum to {t.sum()!r}")
        t.setflags(write=False)
        object.__setattr__(self, "probs", t)

    @property
    def M(self) -> int:
        return self.probs.shape[0]


def _probs(J) -> np.ndarray:
    return J.probs if isinstance(J, JointDistribution) else np.asarray(J, dtype=float)


def marginals(J) -> tuple[np.ndarray, np.ndarray]:
    """Photon-number distributions of mode 1 (row sums) and mode 2 (column sums)."""
    P = _probs(J)
    return P.sum(axis=1), P.sum(axis=0)


def moments(J) -> Moments:
    P = _probs(J)
    n1 = np.arange(P.shape[0], dtype=float)
    n2 = np.arange(P.shape[1], dtype=float)
    p1, p2 = P.sum(axis=1), P.sum(axis=0)
    mean1, mean2 = float(n1 @ p1), float(n2 @ p2)
    # central moments directly, avoiding E[n^2] - E[n]^2 cancellation
    d1, d2 = n1 - mean1, n2 - mean2
    return Moments(
        mean1=mean1,
        mean2=mean2,
        var1=float(d1**2 @ p1),
        var2=float(d2**2 @ p2),
        cov=float(d1 @ P @ d2),
    )


def correlation_index(m: Moments) -> float:
    """Pearson correlation of the two photon numbers."""
    if m.var1 <= 0 or m.var2 <= 0:
        raise ValueError("correlation index undefined: a mode has zero photon-number variance")
    return m.cov / math.sqrt(m.var1 * m.var2)


def mandel_q(dist) -> float:
    """``Q = variance / mean - 1`` of a single-mode photon-number distribution."""
    w = np.asarray(dist, dtype=float)
    n = np.arange(w.size, dtype=float)
    norm = w.sum()
    mean = float(n @ w) / norm
    if mean <= 0:
        raise ValueError("Mandel Q is undefined for zero mean photon number")
    var = float((n - mean) ** 2 @ w) / norm
    return var / mean - 1.0


def mutual_information(t) -> float:
    """Mutual information of a symbol table, in bits.

    Terms with ``p_ij = 0`` contribute nothing. Logs are taken separately so
    tiny cells never divide by an underflowed ``q_i r_j``.
    """
    p = t.probs if isinstance(t, SymbolTable) else np.asarray(t, dtype=float)
    q = p.sum(axis=1)
    r = p.sum(axis=0)
    i, j = np.nonzero(p > 0)
    cells = p[i, j]
    total = np.sum(cells * (np.log2(cells) - np.log2(q[i]) - np.log2(r[j])))
    return max(float(total), 0.0)


def binary_entropy(x: float) -> float:
    if x <= 0 or x >= 1:
        return 0.0
    return -(x * math.log2(x) + (1 - x) * math.log2(1 - x))
