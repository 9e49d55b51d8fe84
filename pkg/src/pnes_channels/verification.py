"""Self-checks run by ``pnes-channels verify``.

Each suite sweeps a grid of energies and channel transmissivities and reports
the largest deviation it saw against a fixed tolerance.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .info import correlation_index, mandel_q, marginals, moments
from .loss import (
    ChannelParams,
    correlation_after_loss,
    kraus_sum_diagonal,
    kraus_sum_pure,
    lossy_joint,
    thinning_oracle,
)
from .states import (
    StateKind,
    ideal_joint,
    lambda_for_mean,
    tmc_coefficients,
    tth_joint_ideal,
    twb_coefficients,
    x_for_mean,
)

GRIDS = {
    "default": ((1.0, 5.0, 10.0), (0.6, 0.85, 0.95, 1.0)),
    "quick": ((1.0, 5.0), (0.6, 1.0)),
}

TOLERANCES = {
    "oracle_equivalence": 1e-10,
    "kraus_reduction": 1e-12,
    "normalization": 1e-9,
    "correlation_formula": 1e-8,
    "mandel_rescaling": 1e-8,
}


@dataclass(frozen=True)
class SuiteResult:
    name: str
    max_deviation: float
    tolerance: float
    n_cases: int

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance


def _cases(grid):
    Ns, etas = grid
    for kind in StateKind:
        for N in Ns:
            for e1, e2 in itertools.product(etas, etas):
                yield kind, N, ChannelParams(e1, e2)


def run_suites(grid_name: str = "default", tail_tol: float = 1e-12) -> list[SuiteResult]:
    grid = GRIDS[grid_name]
    dev = {name: 0.0 for name in TOLERANCES}
    count = {name: 0 for name in TOLERANCES}

    ideal_cache = {}
    for kind, N, ch in _cases(grid):
        key = (kind, N)
        if key not in ideal_cache:
            ideal_cache[key] = ideal_joint(kind, N, tail_tol=tail_tol)
        ideal = ideal_cache[key]
        closed = lossy_joint(kind, N, ch, tail_tol=tail_tol)
        oracle = thinning_oracle(ideal, ch)

        dev["oracle_equivalence"] = max(dev["oracle_equivalence"], float(np.abs(closed.probs - oracle.probs).max()))
        dev["normalization"] = max(dev["normalization"], abs(closed.tail_mass), abs(oracle.tail_mass))
        gamma = correlation_index(moments(closed))
        dev["correlation_formula"] = max(dev["correlation_formula"], abs(gamma - correlation_after_loss(kind, N, ch)))
        m1, m2 = marginals(closed)
        q1, q2 = marginals(ideal)
        dev["mandel_rescaling"] = max(
            dev["mandel_rescaling"],
            abs(mandel_q(m1) - ch.eta1 * mandel_q(q1)),
            abs(mandel_q(m2) - ch.eta2 * mandel_q(q2)),
        )
        for name in ("oracle_equivalence", "normalization", "correlation_formula", "mandel_rescaling"):
            count[name] += 1

    dev["kraus_reduction"], count["kraus_reduction"] = kraus_reduction_deviation()
    return [SuiteResult(name, dev[name], TOLERANCES[name], count[name]) for name in TOLERANCES]


def kraus_reduction_deviation(cutoff: int = 8, N: float = 2.0, eta1: float = 0.7, eta2: float = 0.9):
    """Largest gap between binomial thinning and the literal Kraus sum, over all three families.

    Inputs are truncated at ``cutoff`` without renormalizing; both routes see
    the same truncated input.
    """
    ch = ChannelParams(eta1, eta2)
    profiles = [
        tmc_coefficients(lambda_for_mean(N), cutoff, tail_tol=1.0),
        twb_coefficients(x_for_mean(N), cutoff, tail_tol=1.0),
    ]
    worst = 0.0
    for prof in profiles:
        literal = kraus_sum_pure(prof.coefficients, ch)
        thinned = thinning_oracle(prof.joint(), ch).probs
        worst = max(worst, float(np.abs(literal - thinned).max()))
    tth = tth_joint_ideal(N, cutoff, tail_tol=1.0)
    literal = kraus_sum_diagonal(tth.probs, ch)
    worst = max(worst, float(np.abs(literal - thinning_oracle(tth, ch).probs).max()))
    return worst, 3
