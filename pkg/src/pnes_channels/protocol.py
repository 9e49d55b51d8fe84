"""Threshold decoding and capacity optimization.

Each party counts photons and maps the count to a symbol through shared
integer thresholds ``T_1 < ... < T_{M-1}``: symbol 0 for ``n <= T_1``, symbol k
for ``T_k < n <= T_{k+1}``, symbol ``M-1`` for ``n > T_{M-1}``. The capacity is
the mutual information of the resulting symbol table, maximized over every
admissible threshold tuple.
"""

from __future__ import annotations

import bisect
import math
import warnings
from dataclasses import dataclass, field

import numba
import numpy as np

from .info import TABLE_SUM_TOL, SymbolTable, mutual_information
from .joint import DEFAULT_TAIL_TOL, JointDistribution
from .loss import ChannelParams, coincidence_probability, lossy_joint
from .states import StateKind

# a later tuple must beat the incumbent by this much to replace it, which keeps
# the lexicographically smallest optimizer when candidates tie up to rounding
TIE_TOL = 1e-12


class CurvatureWarning(RuntimeWarning):
    """Halving the finite-difference step changed the curvature estimate noticeably."""


@dataclass(frozen=True)
class ThresholdSet:
    thresholds: tuple[int, ...]

    def __post_init__(self):
        t = tuple(int(v) for v in self.thresholds)
        if not t:
            raise ValueError("need at least one threshold")
        if t[0] < 0:
            raise ValueError(f"thresholds must be nonnegative, got {t}")
        if any(b <= a for a, b in zip(t, t[1:])):
            raise ValueError(f"thresholds must be strictly increasing, got {t}")
        object.__setattr__(self, "thresholds", t)

    @property
    def M(self) -> int:
        return len(self.thresholds) + 1

    def __iter__(self):
        return iter(self.thresholds)


@dataclass(frozen=True)
class CapacityResult:
    capacity_bits: float
    best_thresholds: ThresholdSet
    table: SymbolTable = field(repr=False)
    n_evaluated: int


def decode(n: int, t: ThresholdSet) -> int:
    """Symbol index of photon count ``n``."""
    if n < 0:
        raise ValueError(f"photon count must be nonnegative, got {n}")
    return bisect.bisect_left(t.thresholds, n)


def _bin_starts(t: ThresholdSet, cutoff: int) -> list[int]:
    if t.thresholds[-1] >= cutoff:
        raise ValueError(f"thresholds {t.thresholds} must lie below the cutoff {cutoff}")
    return [0] + [T + 1 for T in t.thresholds]


def symbol_table(J: JointDistribution, t: ThresholdSet) -> SymbolTable:
    """Probabilities ``p_ij`` of the two parties inferring symbols ``(i, j)``.

    The bins partition the photon-number lattice, so every entry of ``J`` lands
    in exactly one cell. Any truncated tail mass stays missing, so ``J`` must
    be normalized to within ``TABLE_SUM_TOL``.
    """
    if abs(J.tail_mass) > TABLE_SUM_TOL:
        raise ValueError(
            f"joint distribution misses {J.tail_mass:.3e} of its mass; "
            f"symbol tables need a tail tolerance of at most {TABLE_SUM_TOL:.0e}"
        )
    starts = _bin_starts(t, J.cutoff)
    table = np.add.reduceat(np.add.reduceat(J.probs, starts, axis=0), starts, axis=1)
    return SymbolTable(table)


@numba.njit(cache=True)
def _exhaustive_search(S, n_thresholds, M, tie_tol):
    """Scan every strictly increasing (M-1)-tuple in [0, n_thresholds) in lex order.

    ``S`` is the zero-padded 2-d cumulative sum of the joint distribution, so a
    rectangle of lattice points costs four lookups.
    """
    L = S.shape[0] - 1
    T = np.arange(M - 1)
    best_T = T.copy()
    best = -1.0
    count = 0
    edges = np.empty(M + 1, dtype=np.int64)
    table = np.empty((M, M))
    q = np.empty(M)
    r = np.empty(M)
    inv_ln2 = 1.0 / math.log(2.0)
    while True:
        edges[0] = 0
        for k in range(M - 1):
            edges[k + 1] = T[k] + 1
        edges[M] = L
        for i in range(M):
            q[i] = 0.0
            r[i] = 0.0
        for i in range(M):
            a0, a1 = edges[i], edges[i + 1]
            for j in range(M):
                b0, b1 = edges[j], edges[j + 1]
                v = S[a1, b1] - S[a0, b1] - S[a1, b0] + S[a0, b0]
                if v < 0.0:
                    v = 0.0
                table[i, j] = v
                q[i] += v
                r[j] += v
        info = 0.0
        for i in range(M):
            for j in range(M):
                v = table[i, j]
                if v > 0.0:
                    info += v * (math.log(v) - math.log(q[i]) - math.log(r[j]))
        info *= inv_ln2
        count += 1
        if info > best + tie_tol:
            best = info
            best_T[:] = T
        k = M - 2
        while k >= 0 and T[k] == n_thresholds - (M - 1) + k:
            k -= 1
        if k < 0:
            break
        T[k] += 1
        for j in range(k + 1, M - 1):
            T[j] = T[j - 1] + 1
    return best, best_T, count


def capacity(J: JointDistribution, M: int = 2) -> CapacityResult:
    """Maximize the mutual information over all thresholds ``0 <= T_1 < ... < T_{M-1} < cutoff``.

    The search is exhaustive, roughly ``C(cutoff, M-1)`` tables. Ties go to the
    lexicographically smallest tuple. A distribution concentrated on a single
    lattice point yields zero capacity at ``(0, 1, ..., M-2)``.
    """
    M = int(M)
    if M < 2:
        raise ValueError(f"alphabet size must be at least 2, got {M}")
    if abs(J.tail_mass) > TABLE_SUM_TOL:
        raise ValueError(f"joint distribution misses {J.tail_mass:.3e} of its mass (limit {TABLE_SUM_TOL:.0e})")
    P = J.probs
    if J.cutoff < M - 1:
        # too few lattice points for M-1 distinct thresholds: pad with empty rows
        pad = M - 1 - J.cutoff
        P = np.pad(P, ((0, pad), (0, pad)))
        J = JointDistribution(P, tail_tol=J.tail_tol)
    S = np.zeros((P.shape[0] + 1, P.shape[1] + 1))
    S[1:, 1:] = P.cumsum(axis=0).cumsum(axis=1)
    _, best_T, count = _exhaustive_search(S, J.cutoff, M, TIE_TOL)
    t = ThresholdSet(tuple(int(v) for v in best_T))
    table = symbol_table(J, t)
    return CapacityResult(mutual_information(table), t, table, int(count))


@dataclass(frozen=True)
class SweepRow:
    kind: str
    N: float
    eta: float
    eta1: float
    eta2: float
    capacity_bits: float
    thresholds: tuple[int, ...]
    cutoff: int
    tail_mass: float
    # binary rule with T = floor(received mean photons per mode); None for M > 2
    naive_threshold: int | None = None
    naive_bits: float | None = None


def capacity_point(kind, N: float, channel: ChannelParams, M: int = 2, tail_tol: float = DEFAULT_TAIL_TOL, eta: float | None = None) -> SweepRow:
    """Capacity of one energy-matched state through one channel, as a sweep row."""
    if eta is None:
        eta = channel.overall
    J = lossy_joint(kind, N, channel, tail_tol=tail_tol)
    res = capacity(J, M)
    naive_T = naive_bits = None
    if M == 2:
        naive_T = int(math.floor(channel.eta1 * N / 2.0))
        if naive_T < J.cutoff:
            naive_bits = mutual_information(symbol_table(J, ThresholdSet((naive_T,))))
    return SweepRow(
        kind=StateKind(kind).value,
        N=float(N),
        eta=float(eta),
        eta1=channel.eta1,
        eta2=channel.eta2,
        capacity_bits=res.capacity_bits,
        thresholds=res.best_thresholds.thresholds,
        cutoff=J.cutoff,
        tail_mass=J.tail_mass,
        naive_threshold=naive_T,
        naive_bits=naive_bits,
    )


def capacity_sweep(kind, N_grid, eta_grid, M: int = 2, tail_tol: float = DEFAULT_TAIL_TOL) -> list[SweepRow]:
    """Capacity over a grid of total mean photon numbers and symmetric losses.

    Rows come out in grid order, ``N`` outermost.
    """
    return [
        capacity_point(kind, N, ChannelParams.symmetric(eta), M, tail_tol, eta)
        for N in N_grid
        for eta in eta_grid
    ]


def asymmetric_channel(eta_overall: float, eta1: float, slack: float = 1e-12) -> ChannelParams:
    """Channel with ``sqrt(eta1 eta2) = eta_overall`` for ``eta_overall^2 <= eta1 <= 1``."""
    lo = eta_overall * eta_overall
    if not (lo - slack <= eta1 <= 1.0 + slack):
        raise ValueError(f"eta1={eta1} outside [{lo}, 1] for overall loss {eta_overall}")
    eta1 = min(max(eta1, lo), 1.0)
    if eta1 == eta_overall:
        return ChannelParams.symmetric(eta_overall)
    return ChannelParams(eta1, min(lo / eta1, 1.0))


def asymmetry_sweep(kind, N: float, eta_overall: float, eta1_grid, M: int = 2, tail_tol: float = DEFAULT_TAIL_TOL) -> list[SweepRow]:
    """Capacity as the source moves between the parties at fixed overall loss."""
    channels = [asymmetric_channel(eta_overall, e1) for e1 in eta1_grid]
    return [capacity_point(kind, N, ch, M, tail_tol, eta_overall) for ch in channels]


def _curvature(kind, N, eta, n, delta) -> float:
    eta1 = 0.5 * delta + math.sqrt(0.25 * delta * delta + eta * eta)
    eta2 = eta1 - delta
    if eta1 > 1.0:
        raise ValueError(f"step {delta} pushes eta1 above one at overall loss {eta}")
    fwd = coincidence_probability(kind, N, ChannelParams(eta1, eta2), n)
    bwd = coincidence_probability(kind, N, ChannelParams(eta2, eta1), n)
    mid = coincidence_probability(kind, N, ChannelParams.symmetric(eta), n)
    return (fwd + bwd - 2.0 * mid) / (2.0 * delta * delta)


def coincidence_curvature(kind, N: float, eta: float, n: int, delta: float = 1e-3, rel_tol: float = 1e-2) -> float:
    """Coefficient of ``(eta1 - eta2)^2`` in ``P(n, n)`` at fixed ``sqrt(eta1 eta2) = eta``.

    Symmetric second difference in the asymmetry ``delta = eta1 - eta2``. The
    estimate is repeated at ``delta / 2``; a relative change above ``rel_tol``
    emits :class:`CurvatureWarning`.
    """
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if delta == 0:
        return 0.0
    coarse = _curvature(kind, N, eta, n, delta)
    fine = _curvature(kind, N, eta, n, 0.5 * delta)
    if abs(coarse - fine) > rel_tol * abs(fine) + 1e-9:
        warnings.warn(
            f"curvature estimate unstable at delta={delta}: {coarse:.6g} vs {fine:.6g} at delta/2",
            CurvatureWarning,
            stacklevel=2,
        )
    return coarse
