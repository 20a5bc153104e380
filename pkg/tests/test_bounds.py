"""Forney 界、常组分界、反馈下界与排序核对"""
import math

import numpy as np
import pytest

from caplab.errors import ParameterError, SizeCapError
from caplab.channel import Dmc, Pmf
from caplab.channel.fixtures import bec, bsc, fig1, fig2, noiseless, random_channel
from caplab.capacity import feedback_capacity_report, pi0, shannon_capacity
from caplab.gallager import maximize_e0
from caplab.bounds import (
    BoundKind,
    BoundValue,
    E0Curve,
    bound_comparison_report,
    compare_random,
    const_comp_bounds,
    const_comp_ceo_bound,
    feedback_lower_bound,
    forney_cal_rho_bound,
    forney_ceo_bound,
    forney_variational_form,
    max_entropy_coupling,
    maximize_forney,
    n_letter_forney,
    r_star,
    solve_const_comp_cal,
)

from conftest import LN2, LN3


# ========== Forney 界 ==========
def test_forney_ceo_closed_forms(noiseless3, all_positive):
    assert forney_ceo_bound(Pmf.uniform(3), noiseless3) == pytest.approx(LN3, abs=1e-12)
    for delta in (0.1, 0.5):
        assert forney_ceo_bound(Pmf.uniform(2), bec(delta)) == pytest.approx(
            (1 - delta) * LN2, abs=1e-12)
    value = forney_ceo_bound(Pmf(np.array([0.3, 0.7])), all_positive)
    assert value == pytest.approx(0.0)


def test_forney_cal_rho_closed_forms(noiseless3, bec05):
    for rho in (0.5, 1.0, 3.0):
        assert forney_cal_rho_bound(rho, Pmf.uniform(3), noiseless3) == pytest.approx(
            LN3, abs=1e-12)
    assert forney_cal_rho_bound(1.0, Pmf.uniform(2), bec05) == pytest.approx(
        -math.log(0.75), abs=1e-12)
    assert forney_cal_rho_bound(50.0, Pmf.uniform(2), bsc(0.2)) == pytest.approx(0.0)


def test_forney_variational_form(bec05):
    value, q = forney_variational_form(1.0, Pmf.uniform(2), bec05)
    assert value == pytest.approx(-math.log(0.75), abs=1e-12)
    np.testing.assert_allclose(q.probs, np.array([0.125, 0.5, 0.125]) / 0.75,
                               atol=1e-12)


def test_variational_form_identity_on_random_channels():
    rng = np.random.default_rng(1)
    for seed in range(10):
        w = random_channel(3, 4, seed=seed)
        p = Pmf(rng.dirichlet(np.ones(3)))
        for rho in (0.5, 2.0):
            value, _ = forney_variational_form(rho, p, w)
            assert value == pytest.approx(forney_cal_rho_bound(rho, p, w), abs=1e-12)


def test_maximize_forney(noiseless3, bec05):
    assert maximize_forney(1.0, noiseless3).value == pytest.approx(LN3, abs=1e-9)
    best = maximize_forney(1.0, bec05)
    assert best.value == pytest.approx(-math.log(0.75), abs=1e-8)
    assert best.kind is BoundKind.LOWER
    np.testing.assert_allclose(best.p_used.probs, [0.5, 0.5], atol=1e-3)


def test_maximize_forney_below_cutoff(fig1_channel):
    best = maximize_forney(1.0, fig1_channel)
    assert best.value <= maximize_e0(1.0, fig1_channel).cutoff_rate + 1e-9


def test_n_letter_forney(noiseless2, bec05):
    assert n_letter_forney(1.0, noiseless2, 1).value == pytest.approx(LN2, abs=1e-12)
    single = forney_cal_rho_bound(1.0, Pmf.uniform(2), bec05)
    product = n_letter_forney(1.0, bec05, 2, mode="product")
    assert product.value == pytest.approx(single, abs=1e-12)
    assert product.name == "forney_cal_rho_n2"


def test_n_letter_exhaustive_grows():
    w = random_channel(2, 3, seed=4)
    one = n_letter_forney(1.0, w, 1).value
    two = n_letter_forney(1.0, w, 2).value
    assert two >= one - 1e-12


def test_n_letter_guards(noiseless3):
    with pytest.raises(SizeCapError):
        n_letter_forney(1.0, noiseless3, 3)
    with pytest.raises(ParameterError):
        n_letter_forney(1.0, noiseless3, 1, mode="greedy")


# ========== 常组分界 ==========
def test_bound_value_rejects_negative_residual():
    with pytest.raises(ParameterError):
        BoundValue(name="x", value=1.0, residual=-1e-3)


def test_coupling_marginals():
    p = np.array([0.5, 0.5])
    q = np.array([0.25, 0.5, 0.25])
    mask = bec(0.5).positive
    coupling = max_entropy_coupling(p, q, mask)
    np.testing.assert_allclose(coupling.joint.sum(axis=1), p, atol=1e-10)
    np.testing.assert_allclose(coupling.joint.sum(axis=0), q, atol=1e-10)
    assert np.all(coupling.joint[~mask] == 0)


def test_const_comp_ceo_forced(noiseless3):
    p = Pmf(np.array([0.2, 0.3, 0.5]))
    bound = const_comp_ceo_bound(p, noiseless3)
    entropy = -float(np.sum(p.probs * np.log(p.probs)))
    assert bound.value == pytest.approx(entropy, abs=1e-9)


def test_const_comp_cal_dominates_forney(bec05):
    ceo, cal = const_comp_bounds(1.0, Pmf.uniform(2), bec05)
    assert cal.value >= -math.log(0.75) - 1e-7
    assert ceo.value >= forney_ceo_bound(Pmf.uniform(2), bec05) - 1e-9
    assert cal.residual >= 0


def test_const_comp_ceo_dominates_forney_random():
    rng = np.random.default_rng(2)
    for seed in range(10):
        w = random_channel(3, 3, seed=seed)
        p = Pmf(rng.dirichlet(np.ones(3)))
        assert const_comp_ceo_bound(p, w).value >= forney_ceo_bound(p, w) - 1e-9


def test_const_comp_cal_solution_is_dominated():
    w = random_channel(3, 3, seed=6)
    sol = solve_const_comp_cal(1.0, Pmf.uniform(3), w)
    assert sol.v.dominated
    assert sol.v_prime.dominated
    assert sol.fw_gap >= 0
    assert sol.value <= shannon_capacity(w).upper + sol.fw_gap + 1e-7


# ========== 反馈下界 ==========
def test_r_star_noiseless():
    for k in (2, 3):
        rs = r_star(1.0, noiseless(k), xi_max=1e3)
        assert rs.value >= 0.999 * math.log(k)


def test_r_star_small_rho_approaches_capacity(bsc01):
    rs = r_star(1e-4, bsc01, xi_min=1e-5)
    assert rs.value == pytest.approx(shannon_capacity(bsc01).value, abs=0.01)


def test_r_star_single_input():
    assert r_star(1.0, Dmc([[0.4, 0.6]])).value == 0.0


def test_feedback_bound_fig1(fig1_channel):
    fb = feedback_lower_bound(1.0, fig1_channel)
    rs = r_star(1.0, fig1_channel)
    report = feedback_capacity_report(fig1_channel, 1.0)
    assert fb.value == pytest.approx(rs.value)
    assert fb.value <= report.calf_exact + 1e-7
    assert fb.value >= pi0(fig1_channel).neg_log_value - 0.01


def test_feedback_bound_fig2():
    w = fig2(0.01, 0.1)
    fb = feedback_lower_bound(1.0, w)
    rs = r_star(1.0, w)
    report = feedback_capacity_report(w, 1.0)
    expected = rs.value / (1 + rs.value / -math.log(0.9))
    assert fb.value == pytest.approx(expected, rel=1e-12)
    assert 0 < fb.value < report.calf_upper


def test_e0_curve_shared_across_rho(default_config):
    w = fig2(0.01, 0.1)
    curve = E0Curve(w)
    rhos = (0.5, 1.0, 2.0)
    shared = [r_star(rho, w, curve=curve).value for rho in rhos]
    fresh = [r_star(rho, w).value for rho in rhos]
    assert shared == pytest.approx(fresh, abs=1e-6)
    assert len(curve) > default_config.solver.xi_grid_points

    cached = len(curve)
    assert r_star(1.0, w, curve=curve).value == shared[1]
    assert len(curve) == cached
    with pytest.raises(ParameterError):
        r_star(1.0, fig1(0.1), curve=curve)


def test_feedback_bound_all_positive(all_positive):
    assert feedback_lower_bound(1.0, all_positive).value == 0.0


# ========== 排序核对 ==========
def test_comparison_fig1():
    result = bound_comparison_report(1.0, fig1(0.01))
    assert result.ok, result.violations
    table = result.table.set_index("name")
    assert table.loc["merged_cutoff", "value_nats"] <= LN2 + 1e-9
    merged = table.loc["merged_cutoff", "value_nats"]
    assert merged < table.loc["calf_upper", "value_nats"]
    assert {"forney_ceo", "const_comp_cal"} <= set(result.table["tag"])


def test_comparison_noiseless(noiseless2):
    result = bound_comparison_report(1.0, noiseless2)
    assert result.ok, result.violations
    table = result.table.set_index("name")["value_nats"]
    for name in ("shannon_c", "cutoff_rate", "calf_upper", "neg_log_pi0",
                 "forney_cal_rho_max", "forney_cal_rho[uniform]",
                 "const_comp_ceo[uniform]"):
        assert table[name] == pytest.approx(LN2, abs=1e-6), name


def test_compare_random_small():
    table = compare_random(2, rhos=(0.5, 1.0))
    assert list(table.columns) == ["seed", "rho", "rows", "violations", "messages"]
    assert list(table["seed"]) == [0, 0, 1, 1]
    assert list(table["rho"]) == [0.5, 1.0, 0.5, 1.0]
    assert int(table["violations"].sum()) == 0
