import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pnes_channels.info import correlation_index, moments
from pnes_channels.joint import CutoffError
from pnes_channels.states import (
    PhotonProfile,
    StateKind,
    TthSpec,
    auto_cutoff,
    entanglement_entropy,
    ideal_joint,
    lambda_for_mean,
    mandel_q_ideal,
    tmc_coefficients,
    tmc_mandel_q,
    tmc_mean_photons,
    tth_correlation_ideal,
    tth_joint_ideal,
    twb_coefficients,
    twb_mean_photons,
    x_for_mean,
)

# mpmath, 40 digits
I0_2 = 2.279585302336067267437
I1_2 = 1.590636854637329063382
TMC_C0_LAMBDA1 = 0.6623264148718883343
TMC_N_LAMBDA1 = 1.395549315928015960
TMC_Q_LAMBDA1 = -0.2646472312416962243


def test_tmc_vacuum():
    prof = tmc_coefficients(0.0)
    assert prof.coefficients[0] == 1.0
    assert np.all(prof.coefficients[1:] == 0)


def test_tmc_first_coefficient():
    prof = tmc_coefficients(1.0)
    assert prof.coefficients[0] == pytest.approx(TMC_C0_LAMBDA1, rel=1e-13)
    assert prof.coefficients[0] == pytest.approx(1 / math.sqrt(I0_2), rel=1e-13)


@pytest.mark.parametrize("lam", [0.3, 1.0, 2.5, 7.0, 25.0])
def test_tmc_normalized_within_tail(lam):
    prof = tmc_coefficients(lam)
    assert 0 <= prof.tail_mass <= 1e-12 + 1e-15


def test_twb_vacuum_and_half():
    assert np.array_equal(twb_coefficients(0.0, 3).coefficients, [1.0, 0, 0, 0])
    c = twb_coefficients(0.5).coefficients
    assert c[0] == pytest.approx(math.sqrt(0.75), rel=1e-15)
    assert c[1] == pytest.approx(0.4330127018922193, rel=1e-15)


def test_explicit_cutoff_too_small_raises():
    with pytest.raises(CutoffError):
        twb_coefficients(0.5, cutoff=5)
    with pytest.raises(CutoffError):
        tmc_coefficients(2.0, cutoff=3)
    with pytest.raises(CutoffError):
        tth_joint_ideal(TthSpec(2.0), cutoff=10)


@pytest.mark.parametrize("bad", [-0.1, 1.0, 1.5])
def test_twb_rejects_bad_x(bad):
    with pytest.raises(ValueError):
        twb_coefficients(bad)


def test_profile_rejects_tth_and_negative():
    with pytest.raises(ValueError):
        PhotonProfile("tth", 1.0, [1.0])
    with pytest.raises(ValueError):
        PhotonProfile("twb", 0.1, [1.0, -0.1])


def test_tmc_mean():
    assert tmc_mean_photons(0.0) == 0.0
    assert tmc_mean_photons(1.0) == pytest.approx(TMC_N_LAMBDA1, rel=1e-13)
    assert tmc_mean_photons(1.0) == pytest.approx(2 * I1_2 / I0_2, rel=1e-13)


@pytest.mark.parametrize("x, N", [(0.0, 0.0), (1 / math.sqrt(2), 2.0), (math.sqrt(10 / 12), 10.0)])
def test_twb_mean(x, N):
    assert twb_mean_photons(x) == pytest.approx(N, rel=1e-13, abs=1e-15)


def test_lambda_for_mean_round_trip():
    assert lambda_for_mean(0.0) == 0.0
    assert lambda_for_mean(TMC_N_LAMBDA1) == pytest.approx(1.0, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-6, 200.0))
def test_lambda_for_mean_inverts(N):
    assert tmc_mean_photons(lambda_for_mean(N)) == pytest.approx(N, rel=1e-11)


@pytest.mark.parametrize("N, x", [(0.0, 0.0), (2.0, 0.7071067811865476), (10.0, 0.9128709291752769)])
def test_x_for_mean(N, x):
    assert x_for_mean(N) == pytest.approx(x, rel=1e-15)


@pytest.mark.parametrize("bad", [-1.0, math.inf, math.nan])
def test_mean_inversions_reject_bad_targets(bad):
    with pytest.raises(ValueError):
        lambda_for_mean(bad)
    with pytest.raises(ValueError):
        x_for_mean(bad)


def test_mandel_q_ideal():
    twb = twb_coefficients(x_for_mean(10.0), tail_tol=1e-15)
    assert mandel_q_ideal(twb) == pytest.approx(5.0, rel=1e-10)
    assert mandel_q_ideal(tmc_coefficients(1.0)) == pytest.approx(TMC_Q_LAMBDA1, rel=1e-10)
    assert tmc_mandel_q(1.0) == pytest.approx(TMC_Q_LAMBDA1, rel=1e-12)
    assert mandel_q_ideal(TthSpec(10.0)) == 5.0
    with pytest.raises(ValueError):
        mandel_q_ideal(TthSpec(0.0))
    with pytest.raises(ValueError):
        mandel_q_ideal(tmc_coefficients(0.0))


@given(st.floats(0.01, 40.0))
@settings(max_examples=40, deadline=None)
def test_tmc_is_sub_poissonian(lam):
    assert tmc_mandel_q(lam) < 0


def test_entanglement_entropy():
    assert entanglement_entropy(twb_coefficients(0.0)) == 0.0
    # thermal marginal with one photon per mode
    prof = twb_coefficients(x_for_mean(2.0), tail_tol=1e-15)
    assert entanglement_entropy(prof) == pytest.approx(2.0, abs=1e-12)


def test_tth_ideal_entries():
    J = tth_joint_ideal(TthSpec(2.0))
    assert J[0, 0] == pytest.approx(1 / 3, rel=1e-14)
    assert J[1, 0] == pytest.approx(1 / 9, rel=1e-14)
    assert J[0, 1] == pytest.approx(1 / 9, rel=1e-14)


def test_tth_correlation_ideal():
    assert tth_correlation_ideal(TthSpec(2.0)) == 0.5
    assert tth_correlation_ideal(1e9) == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(ValueError):
        tth_correlation_ideal(0.0)
    gamma = correlation_index(moments(tth_joint_ideal(6.0)))
    assert gamma == pytest.approx(tth_correlation_ideal(6.0), abs=1e-9)


def test_auto_cutoff_examples():
    assert auto_cutoff("twb", 0.5, 1e-12) == 19
    for kind in StateKind:
        assert auto_cutoff(kind, 0.0) == 0


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(list(StateKind)), st.floats(0.05, 30.0), st.sampled_from([1e-6, 1e-9, 1e-12]))
def test_auto_cutoff_honours_tolerance(kind, N, tol):
    J = ideal_joint(kind, N, tail_tol=tol)
    assert J.tail_mass <= tol + 1e-15


@pytest.mark.parametrize("kind", list(StateKind))
@pytest.mark.parametrize("N", [0.5, 4.0, 15.0])
def test_ideal_mean_matches_target(kind, N):
    m = moments(ideal_joint(kind, N))
    assert m.mean1 + m.mean2 == pytest.approx(N, rel=1e-9)


@pytest.mark.parametrize("kind", ["tmc", "twb"])
def test_ideal_pnes_perfectly_correlated(kind):
    assert correlation_index(moments(ideal_joint(kind, 5.0))) == pytest.approx(1.0, abs=1e-12)
