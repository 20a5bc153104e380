"""Gallager E0、截止率、Rényi 熵与猜测不等式"""
import math

import numpy as np
import pytest

from caplab.errors import ParameterError
from caplab.channel import Dmc, Pmf
from caplab.channel.fixtures import bsc, epsilon_noise, fig1, noiseless, random_channel
from caplab.gallager import (
    arikan_bound_check,
    cutoff_rate,
    e0,
    e0_derivative_at_zero,
    e0_limit_diagnostics,
    escort,
    kkt_residual,
    maximize_e0,
    maximize_renyi_difference,
    renyi_report,
    uniform_epsilon_noise_e0_bound,
)
from caplab.capacity import shannon_capacity

from conftest import LN2, LN3, binary_entropy


# ========== E0 ==========
def test_e0_noiseless(noiseless2, uniform2):
    assert e0(1.0, uniform2, noiseless2) == pytest.approx(LN2, abs=1e-14)


def test_e0_bsc_closed_form(bsc01, uniform2):
    expected = LN2 - math.log(1 + 2 * math.sqrt(0.09))
    assert e0(1.0, uniform2, bsc01) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.2231, abs=1e-4)


def test_e0_at_zero_rho(fig1_channel):
    assert e0(0.0, Pmf(np.array([0.2, 0.3, 0.5])), fig1_channel) == 0.0


def test_e0_large_rho_is_finite(fig1_channel):
    value = e0(1e3, Pmf.uniform(3), fig1_channel)
    assert math.isfinite(value)
    assert 0 < value / 1e3 < LN3


def test_e0_rejects_bad_input(bsc01):
    with pytest.raises(ParameterError):
        e0(-1.0, Pmf.uniform(2), bsc01)
    with pytest.raises(ValueError):
        e0(1.0, Pmf.uniform(3), bsc01)


def test_kkt_residual(bsc01, uniform2, noiseless2):
    residual, _ = kkt_residual(1.0, uniform2, bsc01)
    assert residual <= 1e-12
    residual, slack = kkt_residual(1.0, Pmf(np.array([1.0, 0.0])), bsc01)
    assert slack[1] > 0
    assert residual > 0
    residual, _ = kkt_residual(1.0, uniform2, noiseless2)
    assert residual == pytest.approx(0.0, abs=1e-15)


# ========== 最大化 ==========
def test_maximize_bsc(bsc01):
    result = maximize_e0(1.0, bsc01)
    assert result.converged
    np.testing.assert_allclose(result.p_star.probs, [0.5, 0.5], atol=1e-9)
    assert result.cutoff_rate == pytest.approx(LN2 - math.log(1.6), abs=1e-9)


def test_maximize_fig1_noiseless_limit():
    result = maximize_e0(1.0, fig1(0.0))
    assert result.cutoff_rate == pytest.approx(LN3, abs=1e-9)
    np.testing.assert_allclose(result.p_star.probs, [1 / 3] * 3, atol=1e-9)


def test_single_input_channel():
    w = Dmc([[0.3, 0.7]])
    result = maximize_e0(2.0, w)
    assert result.e0_value == pytest.approx(0.0, abs=1e-15)
    np.testing.assert_array_equal(result.p_star.probs, [1.0])


def test_maximize_satisfies_certificate():
    w = random_channel(4, 3, seed=5)
    result = maximize_e0(1.5, w)
    _, slack = kkt_residual(1.5, result.p_star, w)
    assert result.converged
    assert np.all(slack <= 1e-8)
    assert result.e0_value >= e0(1.5, Pmf.uniform(4), w) - 1e-12


def test_value_gap_certifies_starting_point():
    for seed in range(5):
        w = random_channel(3, 4, seed=seed)
        opt = maximize_e0(1.0, w)
        start = maximize_e0(1.0, w, max_iter=0, restarts=0)
        assert start.e0_value == pytest.approx(e0(1.0, Pmf.uniform(3), w), abs=1e-12)
        assert start.value_gap >= 0
        assert opt.e0_value <= start.e0_value + start.value_gap + 1e-9
        assert opt.value_gap <= 1e-6


def test_gap_tolerance_large_rho(fig1_channel):
    rho = 1000.0
    s = 0.9 ** (1 / (1 + rho)) + 0.1 ** (1 / (1 + rho))
    expected = -(1 + rho) * math.log(s) + rho * math.log(2 + s ** ((1 + rho) / rho))
    result = maximize_e0(rho, fig1_channel, gap_tol=1e-4, restarts=0)
    assert result.converged
    assert result.value_gap <= 1e-4
    assert result.e0_value <= expected + 1e-9
    assert result.e0_value >= expected - 1e-4


def test_maximize_is_deterministic_across_threads(default_config):
    w = random_channel(4, 4, seed=3)
    default_config.runtime.threads = 1
    a = maximize_e0(0.7, w)
    default_config.runtime.threads = 4
    b = maximize_e0(0.7, w)
    assert a.e0_value == b.e0_value
    np.testing.assert_array_equal(a.p_star.probs, b.p_star.probs)


def test_cutoff_rate_helper(bsc01):
    assert cutoff_rate(1.0, bsc01) == pytest.approx(LN2 - math.log(1.6), abs=1e-9)


# ========== ρ 的两端 ==========
def test_small_rho_approaches_capacity(bsc01):
    c = LN2 - binary_entropy(0.1)
    assert c == pytest.approx(0.36800, abs=1e-5)
    assert maximize_e0(1e-3, bsc01).cutoff_rate == pytest.approx(c, abs=1e-3)


def test_large_rho_approaches_neg_log_pi0(fig1_channel):
    assert maximize_e0(100.0, fig1_channel).cutoff_rate == pytest.approx(LN2, abs=0.05)


def test_limit_diagnostics_monotone():
    w = random_channel(3, 3, seed=2)
    diag = e0_limit_diagnostics(w, [0.5, 1.0, 2.0])
    assert diag.monotone
    assert list(diag.table["rho"]) == [0.5, 1.0, 2.0]
    assert (diag.table["gap_to_capacity"] >= -1e-9).all()
    with pytest.raises(ParameterError):
        e0_limit_diagnostics(w, [1.0, 0.5])


def test_derivative_at_zero_is_mutual_information(bsc01, uniform2):
    slope = e0_derivative_at_zero(uniform2, bsc01)
    assert slope == pytest.approx(shannon_capacity(bsc01).value, abs=1e-4)


def test_epsilon_noise_closed_form_is_lower_bound():
    for eps in (0.1, 0.01):
        w = epsilon_noise(eps)
        for xi in (0.5, 2.0, 10.0):
            bound = uniform_epsilon_noise_e0_bound(xi, eps, 3)
            assert e0(xi, Pmf.uniform(3), w) >= bound - 1e-12


# ========== Rényi 熵 ==========
def test_renyi_uniform_entropy():
    for rho in (0.3, 1.0, 4.0):
        report = renyi_report(rho, Pmf.uniform(5), noiseless(5))
        assert report.h_renyi_x == pytest.approx(math.log(5), abs=1e-12)
        assert report.h_renyi_x_given_y == pytest.approx(0.0, abs=1e-12)


def test_renyi_difference_matches_cutoff(bsc01):
    best = maximize_renyi_difference(1.0, bsc01)
    assert best.report.difference == pytest.approx(best.e0_result.cutoff_rate, abs=1e-9)
    report = renyi_report(1.0, Pmf(np.array([0.3, 0.7])), bsc01)
    assert report.difference <= best.report.difference + 1e-12


def test_escort_identity():
    w = random_channel(3, 3, seed=8)
    p = Pmf(np.array([0.2, 0.5, 0.3]))
    q = escort(p, 1.0 / 2.0)
    difference = renyi_report(1.0, p, w).difference
    assert difference == pytest.approx(e0(1.0, q, w) / 1.0, abs=1e-12)


# ========== 猜测不等式 ==========
def test_arikan_single_row():
    check = arikan_bound_check(np.array([[0.4, 0.6]]), np.array([[1, 1]]), 1.0)
    assert check.lhs == pytest.approx(1.0)
    assert check.holds


def test_arikan_uniform_joint():
    p_xy = np.full((2, 2), 0.25)
    g = np.array([[1, 2], [2, 1]])
    assert arikan_bound_check(p_xy, g, 1.0).holds


def test_arikan_random_guessing_orders():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        p_xy = rng.dirichlet(np.ones(9)).reshape(3, 3)
        g = np.column_stack([rng.permutation(3) + 1 for _ in range(3)])
        assert arikan_bound_check(p_xy, g, 2.0).holds


def test_arikan_rejects_non_permutation():
    with pytest.raises(ValueError):
        arikan_bound_check(np.full((2, 2), 0.25), np.array([[1, 1], [1, 2]]), 1.0)
