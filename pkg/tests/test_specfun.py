import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pnes_channels.specfun import (
    SeriesConfig,
    SeriesDivergenceError,
    bessel_i,
    hyp2f1_equal,
    log_bessel_i,
    log_factorial,
    log_hyp2f1_equal,
    log_hyp2f1_equal_grid,
)

# reference values from mpmath at 40 digits
BESSEL_REFERENCE = [
    (0, 2.0, 2.279585302336067267437),
    (1, 2.0, 1.590636854637329063382),
    (0, 10.0, 2815.716628466254471470),
    (3, 7.5, 142.0614423635916764103),
    (7, 0.3, 3.399613454770164037961e-10),
    (0, 200.0, 2.039687173409724619542e85),
    (12, 50.0, 6.896092465904968774994e19),
]

HYP_REFERENCE = [
    (3, 1, 0.2, 5.391438802083333872611),
    (10, 4, 0.15, 38.94132631145753062990),
    (40, 0, 0.1, 1867263255527.450683578),
    (2, 5, 0.5, 2.619203347029365381764),
]


@pytest.mark.parametrize("n, expected", [(0, 0.0), (1, 0.0), (5, math.log(120))])
def test_log_factorial_examples(n, expected):
    assert log_factorial(n) == pytest.approx(expected, rel=1e-14, abs=0)


@pytest.mark.parametrize("n", [2, 10, 100, 169, 170, 171, 500, 5000])
def test_log_factorial_matches_cumulative_log_sum(n):
    ref = math.fsum(math.log(k) for k in range(2, n + 1))
    assert log_factorial(n) == pytest.approx(ref, rel=1e-14)


def test_log_factorial_rejects_negative():
    with pytest.raises(ValueError):
        log_factorial(-1)


def test_bessel_at_zero():
    assert bessel_i(0, 0.0) == 1.0
    assert bessel_i(1, 0.0) == 0.0
    assert bessel_i(5, 0.0) == 0.0


@pytest.mark.parametrize("order, x, expected", BESSEL_REFERENCE)
def test_bessel_against_reference(order, x, expected):
    assert bessel_i(order, x) == pytest.approx(expected, rel=1e-13)


def test_bessel_spec_examples():
    assert bessel_i(0, 2.0) == pytest.approx(2.279585302, abs=1e-9)
    assert bessel_i(1, 2.0) == pytest.approx(1.590636855, abs=1e-9)


def test_log_bessel_beyond_double_range():
    # I_0(1000) ~ e^1000 / sqrt(2 pi 1000); only the log is representable
    approx = 1000.0 - 0.5 * math.log(2 * math.pi * 1000.0) + math.log1p(1 / 8000.0)
    assert log_bessel_i(0, 1000.0, SeriesConfig(max_terms=100_000)) == pytest.approx(approx, rel=1e-9)


def test_bessel_nonconvergence_is_explicit():
    with pytest.raises(SeriesDivergenceError):
        bessel_i(0, 100.0, SeriesConfig(max_terms=5))


@pytest.mark.parametrize("nu", [1, 2, 5, 10])
@pytest.mark.parametrize("x", [0.1, 1.0, 3.7, 20.0, 150.0])
def test_bessel_recurrence(nu, x):
    lhs = bessel_i(nu - 1, x) - bessel_i(nu + 1, x)
    rhs = 2 * nu / x * bessel_i(nu, x)
    assert lhs == pytest.approx(rhs, rel=1e-10)


@given(st.floats(0.0, 300.0), st.floats(0.0, 300.0))
def test_bessel_zero_order_monotone_and_at_least_one(x, y):
    lo, hi = sorted((x, y))
    assert bessel_i(0, lo) >= 1.0
    assert bessel_i(0, hi) >= bessel_i(0, lo)


@pytest.mark.parametrize("M, d", [(0, 0), (3, 1), (20, 7)])
def test_hyp_at_zero(M, d):
    assert hyp2f1_equal(M, d, 0.0) == 1.0


def test_hyp_closed_forms():
    assert hyp2f1_equal(0, 0, 0.5) == pytest.approx(2.0, rel=1e-13)
    assert hyp2f1_equal(1, 0, 0.5) == pytest.approx(12.0, rel=1e-13)
    for z in (0.1, 0.6, 0.9):
        assert hyp2f1_equal(0, 0, z) == pytest.approx(1 / (1 - z), rel=1e-13)
        assert hyp2f1_equal(1, 0, z) == pytest.approx((1 + z) / (1 - z) ** 3, rel=1e-12)


@pytest.mark.parametrize("M, d, z, expected", HYP_REFERENCE)
def test_hyp_against_reference(M, d, z, expected):
    assert hyp2f1_equal(M, d, z) == pytest.approx(expected, rel=1e-13)


def test_hyp_grid_matches_scalar():
    import numpy as np

    Ms = np.array([0, 1, 5, 30, 30, 80])
    ds = np.array([0, 1, 2, 0, 30, 11])
    grid = log_hyp2f1_equal_grid(Ms, ds, 0.37)
    scalar = [log_hyp2f1_equal(M, d, 0.37) for M, d in zip(Ms, ds)]
    np.testing.assert_allclose(grid, scalar, rtol=1e-13)


def test_hyp_near_one_fails_loudly():
    with pytest.raises(SeriesDivergenceError):
        hyp2f1_equal(5, 0, 0.999999, SeriesConfig(max_terms=1000))


def test_hyp_rejects_z_outside_unit_interval():
    with pytest.raises(ValueError):
        hyp2f1_equal(1, 1, 1.0)


@settings(max_examples=60)
@given(st.integers(0, 60), st.integers(0, 60), st.floats(0.0, 0.8))
def test_hyp_at_least_one(M, d, z):
    assert hyp2f1_equal(M, d, z) >= 1.0


@pytest.mark.parametrize("kwargs", [{"rel_tol": 0.0}, {"max_terms": 0}, {"max_terms": 2.5}])
def test_series_config_validation(kwargs):
    with pytest.raises(ValueError):
        SeriesConfig(**kwargs)
