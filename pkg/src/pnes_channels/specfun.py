"""Series evaluation of the special functions used by the lossy joint distributions.

Only the narrow cases needed downstream are covered: modified Bessel functions
of the first kind with integer order and real argument, and the Gauss
hypergeometric function with equal upper parameters, ``2F1(1+M, 1+M; 1+d; z)``
for integer ``M, d`` and ``0 <= z < 1``.

All series have nonnegative terms, so they are summed by running term ratios.
Partial sums are rescaled whenever they grow large and the scale is carried as a
logarithm, which lets the ``log_*`` variants reach arguments whose values would
overflow a double.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

# partial sums above this are folded into the log scale
_RESCALE = 1e250


class SeriesDivergenceError(ArithmeticError):
    """A series did not reach its relative tolerance within ``max_terms``."""


@dataclass(frozen=True)
class SeriesConfig:
    rel_tol: float = 1e-14
    max_terms: int = 10_000

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise ValueError(f"max_terms must be a positive integer, got {self.max_terms}")


DEFAULT_CONFIG = SeriesConfig()


def log_factorial(n: int) -> float:
    """Natural log of ``n!``."""
    n = int(n)
    if n < 0:
        raise ValueError(f"log_factorial needs n >= 0, got {n}")
    if n < 2:
        return 0.0
    if n < 170:
        # exact integer product, one rounding
        return math.log(math.factorial(n))
    return math.lgamma(n + 1)


def log_factorials(n_max: int) -> np.ndarray:
    """Array ``[ln 0!, ln 1!, ..., ln n_max!]``."""
    return gammaln(np.arange(n_max + 1) + 1.0)


def _positive_series(
    log_first: float, ratio, cfg: SeriesConfig, what: str, ratio_limit: float = 0.0
) -> float:
    """Return ``log(sum_k t_k)`` for ``t_0 = exp(log_first)``, ``t_{k+1} = t_k * ratio(k)``.

    Later ratios are assumed bounded by ``max(ratio(k), ratio_limit)``, which
    bounds the neglected tail by a geometric series.
    """
    total = 1.0
    term = 1.0
    log_scale = log_first
    for k in range(cfg.max_terms):
        r = ratio(k)
        term *= r
        total += term
        if total > _RESCALE:
            total /= _RESCALE
            term /= _RESCALE
            log_scale += math.log(_RESCALE)
        rho = max(r, ratio_limit)
        if rho < 1.0 and term <= cfg.rel_tol * total * (1.0 - rho):
            return log_scale + math.log(total)
        if term == 0.0:
            return log_scale + math.log(total)
    raise SeriesDivergenceError(f"{what} did not converge within {cfg.max_terms} terms")


def log_bessel_i(order: int, x: float, cfg: SeriesConfig = DEFAULT_CONFIG) -> float:
    """Natural log of ``I_order(x)``; ``-inf`` when the value is exactly zero."""
    order = int(order)
    if order < 0:
        raise ValueError(f"order must be a nonnegative integer, got {order}")
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    half = 0.5 * x
    if half == 0.0:
        # covers subnormal x as well, where the leading term would underflow
        return 0.0 if order == 0 else -math.inf
    q = half * half
    log_first = order * math.log(half) - log_factorial(order)
    return _positive_series(
        log_first, lambda k: q / ((k + 1) * (k + 1 + order)), cfg, f"I_{order}({x})"
    )


def bessel_i(order: int, x: float, cfg: SeriesConfig = DEFAULT_CONFIG) -> float:
    r"""Modified Bessel function of the first kind for integer order.

    .. math::
        I_\nu(x) = \sum_{k\ge 0} \frac{(x/2)^{2k+\nu}}{k!\,(k+\nu)!}

    Parameters
    ----------
    order : int
        Nonnegative integer order.
    x : float
        Nonnegative argument. Values up to a few hundred are fine.
    cfg : SeriesConfig
        Stopping tolerance and term cap.

    Raises
    ------
    SeriesDivergenceError
        If the series has not converged after ``cfg.max_terms`` terms.
    """
    return math.exp(log_bessel_i(order, x, cfg))


def log_hyp2f1_equal(M: int, d: int, z: float, cfg: SeriesConfig = DEFAULT_CONFIG) -> float:
    """Natural log of ``2F1(1+M, 1+M; 1+d; z)``."""
    M, d = int(M), int(d)
    if M < 0 or d < 0:
        raise ValueError(f"M and d must be nonnegative integers, got M={M}, d={d}")
    if not 0.0 <= z < 1.0:
        raise ValueError(f"z must lie in [0, 1), got {z}")
    if z == 0.0:
        return 0.0
    a = M + 1
    c = d + 1
    return _positive_series(
        0.0,
        lambda k: (a + k) * (a + k) * z / ((c + k) * (k + 1)),
        cfg,
        f"2F1({a},{a};{c};{z})",
        ratio_limit=z,
    )


def hyp2f1_equal(M: int, d: int, z: float, cfg: SeriesConfig = DEFAULT_CONFIG) -> float:
    r"""``2F1(1+M, 1+M; 1+d; z)`` by its power series.

    .. math::
        \sum_{k\ge 0} \frac{[(1+M)_k]^2}{(1+d)_k\,k!} z^k

    Every term is nonnegative, so the result is at least one.
    """
    return math.exp(log_hyp2f1_equal(M, d, z, cfg))


def log_hyp2f1_equal_grid(
    M: np.ndarray, d: np.ndarray, z: float, cfg: SeriesConfig = DEFAULT_CONFIG
) -> np.ndarray:
    """Vectorized :func:`log_hyp2f1_equal` over integer arrays ``M`` and ``d``."""
    M = np.asarray(M, dtype=float)
    d = np.asarray(d, dtype=float)
    M, d = np.broadcast_arrays(M, d)
    if not 0.0 <= z < 1.0:
        raise ValueError(f"z must lie in [0, 1), got {z}")
    if z == 0.0:
        return np.zeros(M.shape)
    a = M + 1.0
    c = d + 1.0
    total = np.ones(M.shape)
    term = np.ones(M.shape)
    log_scale = np.zeros(M.shape)
    active = np.ones(M.shape, dtype=bool)
    for k in range(cfg.max_terms):
        r = (a + k) ** 2 * z / ((c + k) * (k + 1))
        term = np.where(active, term * r, term)
        total = np.where(active, total + term, total)
        big = total > _RESCALE
        if big.any():
            total = np.where(big, total / _RESCALE, total)
            term = np.where(big, term / _RESCALE, term)
            log_scale = np.where(big, log_scale + math.log(_RESCALE), log_scale)
        rho = np.maximum(r, z)
        done = (rho < 1.0) & (term <= cfg.rel_tol * total * (1.0 - rho))
        active &= ~done
        if not active.any():
            return log_scale + np.log(total)
    raise SeriesDivergenceError(f"2F1 grid did not converge within {cfg.max_terms} terms (z={z})")
