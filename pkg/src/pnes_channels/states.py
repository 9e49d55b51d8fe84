"""Correlated two-mode states: TMC (pair-coherent), TWB (twin beam) and TTH (two-mode thermal).

Energies are always the *total* two-mode mean photon number ``N``; each mode
carries ``N / 2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln, xlogy

from .info import mandel_q
from .joint import DEFAULT_TAIL_TOL, MASS_SLACK, CutoffError, JointDistribution
from .specfun import log_bessel_i


class StateKind(str, enum.Enum):
    TMC = "tmc"
    TWB = "twb"
    TTH = "tth"


@dataclass(frozen=True, eq=False)
class PhotonProfile:
    """Schmidt coefficients ``c_0 .. c_cutoff`` of a photon-number entangled state.

    ``parameter`` is lambda for TMC and x for TWB.
    """

    kind: StateKind
    parameter: float
    coefficients: np.ndarray
    tail_tol: float = DEFAULT_TAIL_TOL

    def __post_init__(self):
        kind = StateKind(self.kind)
        if kind is StateKind.TTH:
            raise ValueError("TTH is a mixed state and has no Schmidt profile; use TthSpec")
        c = np.array(self.coefficients, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coefficients must be a nonempty 1-d array")
        if c.min() < 0:
            raise ValueError("Schmidt coefficients must be nonnegative")
        c.setflags(write=False)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "coefficients", c)
        if self.tail_mass > self.tail_tol + MASS_SLACK:
            raise CutoffError(
                f"cutoff {self.cutoff} leaves tail mass {self.tail_mass:.3e} "
                f"> tolerance {self.tail_tol:.1e}"
            )

    @property
    def cutoff(self) -> int:
        return self.coefficients.size - 1

    @property
    def weights(self) -> np.ndarray:
        """Squared coefficients, i.e. the photon-number distribution of either mode."""
        return self.coefficients**2

    @property
    def tail_mass(self) -> float:
        return 1.0 - math.fsum(self.weights)

    def joint(self) -> JointDistribution:
        return JointDistribution(np.diag(self.weights), tail_tol=self.tail_tol)


@dataclass(frozen=True)
class TthSpec:
    mean_total: float

    def __post_init__(self):
        if not self.mean_total >= 0:
            raise ValueError(f"mean_total must be >= 0, got {self.mean_total}")


def auto_cutoff(kind, parameter: float, tail_tol: float = DEFAULT_TAIL_TOL) -> int:
    """Smallest Fock cutoff whose omitted probability mass is at most ``tail_tol``.

    ``parameter`` is lambda (TMC), x (TWB) or the total mean N (TTH). TWB uses
    the exact geometric tail ``x^(2(c+1))``; TMC bounds the tail by a geometric
    series in the decreasing term ratio ``lambda^2/(n+1)^2``; TTH bounds the mass
    outside the square by ``P(p+q > c) = (N/(1+N))^(c+1)``.
    """
    kind = StateKind(kind)
    if not tail_tol > 0:
        raise ValueError(f"tail_tol must be positive, got {tail_tol}")
    if parameter < 0:
        raise ValueError(f"parameter must be nonnegative, got {parameter}")
    if parameter == 0:
        return 0

    if kind is StateKind.TWB:
        if parameter >= 1:
            raise ValueError(f"TWB needs x < 1, got {parameter}")
        log_ratio = 2.0 * math.log(parameter)
    elif kind is StateKind.TTH:
        log_ratio = math.log(parameter) - math.log1p(parameter)
    else:
        log_ratio = None

    if log_ratio is not None:
        c = max(0, math.ceil(math.log(tail_tol) / log_ratio) - 1)
        while math.exp((c + 1) * log_ratio) > tail_tol:
            c += 1
        while c > 0 and math.exp(c * log_ratio) <= tail_tol:
            c -= 1
        return c

    lam = parameter
    log_tol = math.log(tail_tol)
    log_norm = log_bessel_i(0, 2.0 * lam)
    c = 0
    while True:
        rho = lam * lam / (c + 2) ** 2
        if rho < 1.0:
            log_next = 2 * (c + 1) * math.log(lam) - 2 * gammaln(c + 2) - log_norm
            if log_next - math.log1p(-rho) <= log_tol:
                return c
        c += 1


def _resolve_cutoff(kind, parameter, cutoff, tail_tol) -> int:
    if cutoff is None:
        return auto_cutoff(kind, parameter, tail_tol)
    cutoff = int(cutoff)
    if cutoff < 0:
        raise ValueError(f"cutoff must be nonnegative, got {cutoff}")
    return cutoff


def tmc_coefficients(lam: float, cutoff: int | None = None, tail_tol: float = DEFAULT_TAIL_TOL) -> PhotonProfile:
    """Pair-coherent state, ``c_n = lambda^n / (n! sqrt(I_0(2 lambda)))``.

    Raises
    ------
    CutoffError
        If an explicit ``cutoff`` omits more than ``tail_tol`` of the mass.
    """
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    cutoff = _resolve_cutoff(StateKind.TMC, lam, cutoff, tail_tol)
    n = np.arange(cutoff + 1)
    if lam == 0:
        c = (n == 0).astype(float)
    else:
        c = np.exp(n * math.log(lam) - gammaln(n + 1) - 0.5 * log_bessel_i(0, 2.0 * lam))
    return PhotonProfile(StateKind.TMC, float(lam), c, tail_tol)


def twb_coefficients(x: float, cutoff: int | None = None, tail_tol: float = DEFAULT_TAIL_TOL) -> PhotonProfile:
    """Twin beam, ``c_n = sqrt(1 - x^2) x^n``. Omitted mass is exactly ``x^(2(cutoff+1))``."""
    if not 0 <= x < 1:
        raise ValueError(f"x must lie in [0, 1), got {x}")
    cutoff = _resolve_cutoff(StateKind.TWB, x, cutoff, tail_tol)
    n = np.arange(cutoff + 1)
    c = math.sqrt(1.0 - x * x) * np.power(x, n)
    return PhotonProfile(StateKind.TWB, float(x), c, tail_tol)


def tmc_mean_photons(lam: float) -> float:
    """Total mean photon number ``2 lambda I_1(2 lambda) / I_0(2 lambda)``."""
    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    if lam == 0:
        return 0.0
    return 2.0 * lam * math.exp(log_bessel_i(1, 2 * lam) - log_bessel_i(0, 2 * lam))


def twb_mean_photons(x: float) -> float:
    if not 0 <= x < 1:
        raise ValueError(f"x must lie in [0, 1), got {x}")
    return 2.0 * x * x / (1.0 - x * x)


def tmc_mandel_q(lam: float) -> float:
    """Closed-form Mandel Q of either TMC mode; negative for every lambda > 0."""
    if lam <= 0:
        raise ValueError("Mandel Q is undefined for the vacuum")
    ratio = math.exp(log_bessel_i(1, 2 * lam) - log_bessel_i(0, 2 * lam))
    return lam * (1.0 / ratio - ratio) - 1.0


def lambda_for_mean(target_N: float) -> float:
    """Invert :func:`tmc_mean_photons` by bracketing and bisection."""
    if not target_N >= 0 or not math.isfinite(target_N):
        raise ValueError(f"target_N must be finite and nonnegative, got {target_N}")
    if target_N == 0:
        return 0.0
    hi = 1.0
    while tmc_mean_photons(hi) < target_N:
        hi *= 2.0
    lam = brentq(lambda l: tmc_mean_photons(l) - target_N, 0.0, hi, xtol=1e-15, rtol=1e-15, maxiter=500)
    return float(lam)


def x_for_mean(target_N: float) -> float:
    if not target_N >= 0 or not math.isfinite(target_N):
        raise ValueError(f"target_N must be finite and nonnegative, got {target_N}")
    return math.sqrt(target_N / (target_N + 2.0))


def mandel_q_ideal(state) -> float:
    """Single-mode Mandel Q of the lossless state.

    Profiles use their marginal ``c_n^2``; a :class:`TthSpec` uses the thermal
    closed form ``N / 2``.
    """
    if isinstance(state, TthSpec):
        if state.mean_total == 0:
            raise ValueError("Mandel Q is undefined for zero energy")
        return state.mean_total / 2.0
    return mandel_q(state.weights)


def entanglement_entropy(profile: PhotonProfile) -> float:
    """Von Neumann entropy of either partial trace, in bits."""
    w = profile.weights
    w = w[w > 0]
    return float(-np.sum(w * np.log2(w)))


def tth_joint_ideal(spec: TthSpec | float, cutoff: int | None = None, tail_tol: float = DEFAULT_TAIL_TOL) -> JointDistribution:
    """Lossless two-mode thermal distribution.

    ``P(p, q) = C(p+q, p) [N / (2(1+N))]^(p+q) / (1+N)``
    """
    if not isinstance(spec, TthSpec):
        spec = TthSpec(float(spec))
    N = spec.mean_total
    cutoff = _resolve_cutoff(StateKind.TTH, N, cutoff, tail_tol)
    p, q = np.indices((cutoff + 1, cutoff + 1))
    s = p + q
    log_p = (
        gammaln(s + 1.0) - gammaln(p + 1.0) - gammaln(q + 1.0)
        + xlogy(s, N / (2.0 * (1.0 + N)))
        - math.log1p(N)
    )
    return JointDistribution(np.exp(log_p), tail_tol=tail_tol)


def tth_correlation_ideal(spec: TthSpec | float) -> float:
    N = spec.mean_total if isinstance(spec, TthSpec) else float(spec)
    if N <= 0:
        raise ValueError("correlation index is undefined for zero energy")
    return N / (N + 2.0)


def state_parameter(kind, mean_total: float) -> float:
    """Family parameter (lambda, x, or N itself) giving total mean photon number ``mean_total``."""
    kind = StateKind(kind)
    if kind is StateKind.TMC:
        return lambda_for_mean(mean_total)
    if kind is StateKind.TWB:
        return x_for_mean(mean_total)
    return float(mean_total)


def ideal_joint(kind, mean_total: float, cutoff: int | None = None, tail_tol: float = DEFAULT_TAIL_TOL) -> JointDistribution:
    """Lossless joint distribution of an energy-matched member of ``kind``."""
    kind = StateKind(kind)
    param = state_parameter(kind, mean_total)
    if kind is StateKind.TMC:
        return tmc_coefficients(param, cutoff, tail_tol).joint()
    if kind is StateKind.TWB:
        return twb_coefficients(param, cutoff, tail_tol).joint()
    return tth_joint_ideal(TthSpec(param), cutoff, tail_tol)
