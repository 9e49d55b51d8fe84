"""Propagation of correlated states through independent zero-temperature loss channels.

Two independent routes produce the lossy joint photon-number distribution:

* :func:`thinning_oracle` applies binomial thinning to each arm of any
  Fock-diagonal input. This is the reference everything else is checked
  against.
* :func:`joint_tmc`, :func:`joint_twb` and :func:`joint_tth` evaluate the
  closed forms built on modified Bessel and hypergeometric series.

:func:`kraus_sum_pure` and :func:`kraus_sum_diagonal` expand the Kraus
representation literally. They are cubic-to-sextic in the cutoff and exist only
to cross-check the thinning reduction at tiny cutoffs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, xlogy
from scipy.stats import binom

from .joint import DEFAULT_TAIL_TOL, JointDistribution
from .specfun import log_bessel_i, log_hyp2f1_equal_grid
from .states import StateKind, auto_cutoff, lambda_for_mean, state_parameter, tmc_mandel_q


@dataclass(frozen=True)
class ChannelParams:
    """Transmissivities of the two arms, ``0 < eta <= 1`` (1 means lossless)."""

    eta1: float
    eta2: float

    def __post_init__(self):
        for name in ("eta1", "eta2"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ValueError(f"{name} must lie in (0, 1], got {v}")

    @classmethod
    def symmetric(cls, eta: float) -> "ChannelParams":
        return cls(eta, eta)

    @property
    def overall(self) -> float:
        return math.sqrt(self.eta1 * self.eta2)


def kraus_element(p: int, n: int, i: int, eta: float) -> float:
    """Matrix element ``<p| A_n |i>`` of the single-mode loss map.

    ``A_n = ((1/eta - 1)^(n/2) / sqrt(n!)) a^n eta^(a^dag a / 2)``, so the
    element vanishes unless ``i = p + n``.
    """
    if not 0 < eta <= 1:
        raise ValueError(f"eta must lie in (0, 1], got {eta}")
    if p < 0 or n < 0:
        raise ValueError("p and n must be nonnegative")
    if i != p + n:
        return 0.0
    log_el = (
        xlogy(0.5 * n, (1.0 - eta) / eta)
        - 0.5 * gammaln(n + 1)
        + 0.5 * (p + n) * math.log(eta)
        + 0.5 * (gammaln(p + n + 1) - gammaln(p + 1))
    )
    return float(np.exp(log_el))


def binomial_matrix(cutoff: int, eta: float) -> np.ndarray:
    """``B[n, p] = C(n, p) eta^p (1-eta)^(n-p)``, survival of p out of n photons."""
    n = np.arange(cutoff + 1)
    return binom.pmf(n[None, :], n[:, None], eta)


def thinning_oracle(input_joint: JointDistribution, channel: ChannelParams) -> JointDistribution:
    """Lossy output of a Fock-diagonal two-mode input, one binomial thinning per arm."""
    P = input_joint.probs
    c = input_joint.cutoff
    out = binomial_matrix(c, channel.eta1).T @ P @ binomial_matrix(c, channel.eta2)
    return JointDistribution(np.clip(out, 0.0, None), tail_tol=input_joint.tail_tol)


def _kraus_tensor(cutoff: int, eta: float) -> np.ndarray:
    """``A[p, n, i] = <p|A_n|i>`` for all indices up to ``cutoff``."""
    A = np.zeros((cutoff + 1,) * 3)
    for p in range(cutoff + 1):
        for n in range(cutoff + 1):
            for i in range(cutoff + 1):
                A[p, n, i] = kraus_element(p, n, i, eta)
    return A


def kraus_sum_pure(coefficients, channel: ChannelParams) -> np.ndarray:
    """Diagonal of the evolved pure state ``sum_n c_n |n, n>``, by the full Kraus sum.

    ``P(p,q) = sum_{n,k,i,j} c_i c_j <p|A_n|i> <q|A_k|i> <j|A_n^dag|p> <j|A_k^dag|q>``
    """
    c = np.asarray(coefficients, dtype=float)
    cutoff = c.size - 1
    A1 = _kraus_tensor(cutoff, channel.eta1)
    A2 = _kraus_tensor(cutoff, channel.eta2)
    # matrix elements are real, so <j|A^dag|p> = <p|A|j>
    return np.einsum("i,j,pni,qki,pnj,qkj->pq", c, c, A1, A2, A1, A2, optimize=True)


def kraus_sum_diagonal(input_probs, channel: ChannelParams) -> np.ndarray:
    """Same as :func:`kraus_sum_pure` for a Fock-diagonal mixture ``sum P_ij |i,j><i,j|``.

    Off-diagonal input coherences never reach the output diagonal, so this also
    covers states that are only block-diagonal, such as the two-mode thermal state.
    """
    P = np.asarray(input_probs, dtype=float)
    cutoff = P.shape[0] - 1
    A1 = _kraus_tensor(cutoff, channel.eta1)
    A2 = _kraus_tensor(cutoff, channel.eta2)
    return np.einsum("ij,pni,qkj,pni,qkj->pq", P, A1, A2, A1, A2, optimize=True)


def _grid(cutoff: int):
    p, q = np.indices((cutoff + 1, cutoff + 1))
    return p, q, np.maximum(p, q), np.abs(p - q)


def _log_scaled_bessel_series(d_max: int, u: float) -> np.ndarray:
    """``log S_d(u)`` for d = 0..d_max, where ``S_d(u) = sum_k u^k / (k! (k+d)!)``.

    ``S_d(u) = I_d(2 sqrt u) / u^(d/2)``, and ``S_d(0) = 1/d!`` is the lossless limit.
    """
    d = np.arange(d_max + 1)
    if u == 0.0:
        return -gammaln(d + 1.0)
    arg = 2.0 * math.sqrt(u)
    half_log_u = 0.5 * math.log(u)
    return np.array([log_bessel_i(int(k), arg) - k * half_log_u for k in d])


def joint_tmc(lam: float, channel: ChannelParams, cutoff: int | None = None, tail_tol: float = DEFAULT_TAIL_TOL) -> JointDistribution:
    r"""Lossy pair-coherent state, from the Bessel closed form.

    .. math::
        P(p,q) = \frac{I_{|p-q|}\!\left(2\lambda\sqrt{(1-\eta_1)(1-\eta_2)}\right)}
                      {I_0(2\lambda)\,p!\,q!}
                 \lambda^{p+q}\eta_1^p\eta_2^q
                 (1-\eta_1)^{\frac{q-p}{2}}(1-\eta_2)^{\frac{p-q}{2}}

    The half-integer powers of ``1 - eta`` are merged with the Bessel series so
    that only integer powers remain; this also makes ``eta = 1`` exact.
    """
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    if cutoff is None:
        cutoff = auto_cutoff(StateKind.TMC, lam, tail_tol)
    return JointDistribution(np.exp(_log_joint_tmc(lam, channel, cutoff)), tail_tol=tail_tol)


def _log_joint_tmc(lam, channel, cutoff):
    p, q, M, d = _grid(cutoff)
    if lam == 0:
        return np.where((p == 0) & (q == 0), 0.0, -np.inf)
    a = 1.0 - channel.eta1
    b = 1.0 - channel.eta2
    log_S = _log_scaled_bessel_series(cutoff, lam * lam * a * b)
    # the (p - q) excess photons are lost from whichever arm ends with fewer
    lost = np.where(p >= q, b, a)
    log_p = (
        -log_bessel_i(0, 2.0 * lam)
        - gammaln(p + 1.0)
        - gammaln(q + 1.0)
        + xlogy(p, channel.eta1)
        + xlogy(q, channel.eta2)
        + 2.0 * M * math.log(lam)
        + xlogy(d, lost)
        + log_S[d]
    )
    return log_p


def joint_twb(x: float, channel: ChannelParams, cutoff: int | None = None, tail_tol: float = DEFAULT_TAIL_TOL) -> JointDistribution:
    r"""Lossy twin beam, from the hypergeometric closed form.

    With :math:`M = \max(p,q)`, :math:`m = \min(p,q)`, :math:`d = |p-q|`,
    :math:`z = x^2(1-\eta_1)(1-\eta_2)`:

    .. math::
        P(p,q) = (1-x^2)\left(\tfrac{\eta_1}{1-\eta_1}\right)^p
                 \left(\tfrac{\eta_2}{1-\eta_2}\right)^q z^M \binom{M}{m}
                 {}_2F_1(1+M, 1+M; 1+d; z)

    Assembled as ``eta1^p eta2^q x^(2M) (1-eta1)^(M-p) (1-eta2)^(M-q)`` so no
    negative power of ``1 - eta`` is ever formed.
    """
    if not 0 <= x < 1:
        raise ValueError(f"x must lie in [0, 1), got {x}")
    if cutoff is None:
        cutoff = auto_cutoff(StateKind.TWB, x, tail_tol)
    return JointDistribution(np.exp(_log_joint_twb(x, channel, cutoff)), tail_tol=tail_tol)


def _log_joint_twb(x, channel, cutoff):
    p, q, M, d = _grid(cutoff)
    a = 1.0 - channel.eta1
    b = 1.0 - channel.eta2
    m = M - d
    log_binom_Mm = gammaln(M + 1.0) - gammaln(m + 1.0) - gammaln(d + 1.0)
    log_p = (
        math.log1p(-x * x)
        + xlogy(p, channel.eta1)
        + xlogy(q, channel.eta2)
        + xlogy(2.0 * M, x)
        + xlogy(M - p, a)
        + xlogy(M - q, b)
        + log_binom_Mm
        + log_hyp2f1_equal_grid(M, d, x * x * a * b)
    )
    return log_p


def joint_tth(N: float, channel: ChannelParams, cutoff: int | None = None, tail_tol: float = DEFAULT_TAIL_TOL) -> JointDistribution:
    r"""Lossy two-mode thermal state.

    .. math::
        P(p,q) = \frac{2\,\eta_1^p\eta_2^q N^{p+q}}{[2+N(\eta_1+\eta_2)]^{p+q+1}}\binom{p+q}{p}
    """
    if N < 0:
        raise ValueError(f"N must be nonnegative, got {N}")
    if cutoff is None:
        cutoff = auto_cutoff(StateKind.TTH, N, tail_tol)
    return JointDistribution(np.exp(_log_joint_tth(N, channel, cutoff)), tail_tol=tail_tol)


def _log_joint_tth(N, channel, cutoff):
    p, q, _, _ = _grid(cutoff)
    s = p + q
    log_p = (
        math.log(2.0)
        + xlogy(p, channel.eta1)
        + xlogy(q, channel.eta2)
        + xlogy(s, N)
        - (s + 1.0) * math.log(2.0 + N * (channel.eta1 + channel.eta2))
        + gammaln(s + 1.0) - gammaln(p + 1.0) - gammaln(q + 1.0)
    )
    return log_p


def lossy_joint(kind, mean_total: float, channel: ChannelParams, cutoff: int | None = None, tail_tol: float = DEFAULT_TAIL_TOL) -> JointDistribution:
    """Closed-form lossy distribution of the energy-matched member of ``kind``."""
    kind = StateKind(kind)
    param = state_parameter(kind, mean_total)
    if kind is StateKind.TMC:
        return joint_tmc(param, channel, cutoff, tail_tol)
    if kind is StateKind.TWB:
        return joint_twb(param, channel, cutoff, tail_tol)
    return joint_tth(param, channel, cutoff, tail_tol)


def coincidence_probability(kind, mean_total: float, channel: ChannelParams, n: int) -> float:
    """Closed-form ``P(n, n)``, without building or truncating the full distribution."""
    kind = StateKind(kind)
    param = state_parameter(kind, mean_total)
    log_entry = {
        StateKind.TMC: _log_joint_tmc,
        StateKind.TWB: _log_joint_twb,
        StateKind.TTH: _log_joint_tth,
    }[kind]
    return float(np.exp(log_entry(param, channel, int(n))[n, n]))


def correlation_after_loss(kind, mean_total: float, channel: ChannelParams) -> float:
    """Photon-number correlation index of the lossy state, closed form.

    Thinning scales the covariance by ``eta1 eta2`` and maps each variance to
    ``eta^2 var + eta (1 - eta) mean``. For a photon-number entangled state the
    lossless covariance equals the variance, which gives

        sqrt(eta1 eta2) (1 + Q) / sqrt((1 + eta1 Q)(1 + eta2 Q))

    with Q the lossless single-mode Mandel parameter. The TWB case (Q = N/2) is
    ``(2+N) sqrt(eta1 eta2) / sqrt((2+N eta1)(2+N eta2))``. Only a Poissonian
    marginal would give the energy-independent ``sqrt(eta1 eta2)``; TMC is
    sub-Poissonian, so its lossy correlation does depend on N.
    """
    kind = StateKind(kind)
    if not mean_total > 0:
        raise ValueError("correlation index is undefined for zero energy")
    e1, e2 = channel.eta1, channel.eta2
    root = math.sqrt(e1 * e2)
    N = mean_total
    if kind is StateKind.TMC:
        Q = tmc_mandel_q(lambda_for_mean(N))
        return root * (1.0 + Q) / math.sqrt((1.0 + e1 * Q) * (1.0 + e2 * Q))
    denom = math.sqrt((2.0 + N * e1) * (2.0 + N * e2))
    if kind is StateKind.TWB:
        return (2.0 + N) * root / denom
    return N * root / denom
