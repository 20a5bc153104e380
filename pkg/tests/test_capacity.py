"""Shannon 容量、π0、二输入精确值、min C(V) 与容量报告"""
import math

import numpy as np
import pytest

from caplab.errors import ConvergenceError, ParameterError
from caplab.channel import Dmc, Pmf
from caplab.channel.fixtures import (
    bec,
    fig1,
    fig2,
    noiseless,
    random_channel,
    z_channel,
)
from caplab.capacity import (
    binary_input_exact,
    blahut_arimoto,
    feedback_capacity_report,
    min_capacity_subchannels,
    pi0,
    shannon_capacity,
)
from caplab.gallager import maximize_e0

from conftest import LN2, LN3, binary_entropy, grid_pi0


# ========== Shannon 容量 ==========
def test_bsc_capacity(bsc01):
    result = shannon_capacity(bsc01)
    assert result.converged
    assert result.value == pytest.approx(LN2 - binary_entropy(0.1), abs=1e-9)
    assert result.upper >= result.value
    assert result.gap <= 1e-9


def test_noiseless_and_single_output():
    assert shannon_capacity(noiseless(3)).value == pytest.approx(LN3, abs=1e-12)
    assert shannon_capacity(Dmc([[1.0], [1.0]])).value == pytest.approx(0.0, abs=1e-15)


def test_bec_capacity():
    for delta in (0.2, 0.5):
        value = shannon_capacity(bec(delta)).value
        assert value == pytest.approx((1 - delta) * LN2, abs=1e-9)


def test_capacity_unconverged_is_reported(bsc01):
    result = shannon_capacity(Dmc([[0.7, 0.3, 0.0], [0.1, 0.2, 0.7], [0.3, 0.3, 0.4]]),
                              max_iter=2)
    assert not result.converged
    with pytest.raises(ConvergenceError):
        result.require_converged()


def test_blahut_arimoto_warm_start(bsc01):
    info, p, gap, _ = blahut_arimoto(bsc01.matrix, p0=np.array([0.9, 0.1]))
    assert info == pytest.approx(LN2 - binary_entropy(0.1), abs=1e-9)
    assert gap >= 0


# ========== π0 ==========
def test_pi0_noiseless():
    result = pi0(noiseless(3))
    assert result.value == pytest.approx(1 / 3, abs=1e-12)
    np.testing.assert_allclose(result.p_star.probs, [1 / 3] * 3, atol=1e-9)


def test_pi0_fig1(fig1_channel):
    result = pi0(fig1_channel)
    assert result.value == pytest.approx(0.5, abs=1e-12)
    assert result.neg_log_value == pytest.approx(LN2, abs=1e-12)
    assert result.p_star.probs[2] == pytest.approx(0.5, abs=1e-12)
    assert result.gap <= 1e-9


def test_pi0_all_positive(all_positive):
    assert pi0(all_positive).value == pytest.approx(1.0)


def test_pi0_matches_grid_search():
    for seed in range(5):
        w = random_channel(3, 3, seed=seed)
        assert pi0(w).value == pytest.approx(grid_pi0(w, 1e-3), abs=2e-3)


# ========== 二输入精确值 ==========
@pytest.mark.parametrize("delta", [0.1, 0.5, 0.9])
def test_bec_binary_exact(delta):
    exact = binary_input_exact(bec(delta), 1.0)
    assert exact.ceo == pytest.approx((1 - delta) * LN2, abs=1e-9)
    assert exact.cal == pytest.approx(-math.log((1 + delta) / 2), abs=1e-9)


def test_binary_exact_noiseless_z():
    exact = binary_input_exact(z_channel(0.0), 1.0)
    assert exact.cal == pytest.approx(LN2, abs=1e-9)
    assert exact.ceo == pytest.approx(LN2, abs=1e-9)


def test_binary_exact_bsc_is_zero(bsc01):
    exact = binary_input_exact(bsc01, 2.0)
    assert exact.reduced.shape == (2, 1)
    assert exact.cal == pytest.approx(0.0, abs=1e-12)
    assert exact.ceo == pytest.approx(0.0, abs=1e-12)


def test_binary_exact_requires_two_inputs(fig1_channel):
    with pytest.raises(ParameterError):
        binary_input_exact(fig1_channel, 1.0)


# ========== min C(V) ==========
def test_subchannels_noiseless(noiseless2):
    result = min_capacity_subchannels(noiseless2)
    assert result.value == pytest.approx(LN2, abs=1e-4)
    assert result.neg_log_pi0 == pytest.approx(LN2)


def test_subchannels_fig1(fig1_channel):
    result = min_capacity_subchannels(fig1_channel, tol=1e-3)
    assert result.value == pytest.approx(LN2, abs=1e-3)
    assert result.v_star.dominated


# ========== 容量报告 ==========
def test_report_fig1():
    report = feedback_capacity_report(fig1(0.01), 1.0)
    assert report.czero_positive
    assert report.czero_feedback == pytest.approx(LN2, abs=1e-12)
    assert LN2 < report.calf_exact < LN3
    assert report.calf_exact == report.calf_upper
    assert report.calf_lower <= report.calf_upper + 1e-9
    assert report.converged


def test_report_fig2_ambiguous_bound():
    report = feedback_capacity_report(fig2(0.01, 0.05), 1.0)
    assert not report.czero_positive
    assert report.calf_exact is None
    assert report.calf_upper == pytest.approx(-math.log(0.95), rel=1e-15)
    assert report.calf_upper < report.cutoff_rate
    assert report.ceo_positive
    assert report.ceo_feedback == pytest.approx(report.shannon_c)


def test_report_all_positive_is_zero(all_positive):
    report = feedback_capacity_report(all_positive, 1.0)
    assert report.czero_feedback == 0.0
    assert report.ceo_feedback == 0.0
    assert report.calf_upper == 0.0
    assert report.calf_lower == 0.0
    assert report.feedback_lower_bound == 0.0


def test_report_reuses_results(bsc01):
    e0_result = maximize_e0(1.0, bsc01)
    report = feedback_capacity_report(bsc01, 1.0, e0_result=e0_result)
    assert report.cutoff_rate == e0_result.cutoff_rate
    assert set(report.to_dict()) >= {"shannon_c", "calf_upper", "calf_lower"}


def test_report_rejects_rho(bsc01):
    with pytest.raises(ParameterError):
        feedback_capacity_report(bsc01, 0.0)
