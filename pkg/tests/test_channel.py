"""信道表示、结构分析与化简"""
import json
import math

import numpy as np
import pytest

from caplab.errors import ChannelValidationError, ParameterError, SizeCapError
from caplab.channel import (
    Dmc,
    Pmf,
    ambiguous_output_upper_bound,
    binary_input_reduce,
    channel_graph,
    check_factorization,
    closest_type,
    conditional_type,
    disjoint_support_pairs,
    dump_channel,
    enumerate_conditional_types,
    enumerate_types,
    epsilon_noise_level,
    cutoff_positive,
    erasure_positive,
    find_alternating_cycle,
    get_channel,
    has_positive_zero_error,
    in_shell,
    info_functionals,
    load_channel,
    load_channel_file,
    merge_equivalent_outputs,
    message_set,
    mutual_information,
    parse_channel_string,
    product_channel,
    q_star,
    type_of,
    TypeClass,
)
from caplab.channel.fixtures import bsc, fig1, fig2, noiseless, random_channel
from caplab.channel.product import all_sequences

from conftest import LN2


# ========== 校验与读写 ==========
def test_identity_file_is_noiseless():
    w = load_channel(json.dumps({"matrix": [[1, 0], [0, 1]]}))
    assert w.shape == (2, 2)
    assert w.input_labels == ("0", "1")
    np.testing.assert_array_equal(w.matrix, np.eye(2))


def test_fig1_file_is_valid(tmp_path):
    path = tmp_path / "fig1.json"
    path.write_text(json.dumps({"matrix": [[0.9, 0.1, 0], [0.1, 0.9, 0], [0, 0, 1]]}))
    w = load_channel_file(path)
    assert w.shape == (3, 3)
    assert w.matrix[2, 2] == 1.0


def test_row_sum_rejected():
    with pytest.raises(ChannelValidationError, match="1.1"):
        Dmc([[0.5, 0.6]])


def test_negative_entry_rejected():
    with pytest.raises(ChannelValidationError):
        Dmc([[1.2, -0.2], [0.5, 0.5]])


def test_ragged_and_empty_matrices_rejected():
    with pytest.raises(ChannelValidationError, match="ragged"):
        load_channel(json.dumps({"matrix": [[1.0], [0.5, 0.5]]}))
    with pytest.raises(ChannelValidationError, match="empty input"):
        load_channel(json.dumps({"matrix": []}))
    with pytest.raises(ChannelValidationError):
        load_channel("not json")


def test_missing_file_raises():
    with pytest.raises(FileNotFoundError):
        load_channel_file("/nonexistent/channel.json")


def test_small_row_drift_is_normalized():
    w = Dmc([[0.5, 0.5 + 1e-10], [0.0, 1.0]])
    assert abs(w.matrix[0].sum() - 1.0) < 1e-15


def test_serialization_keeps_structural_zeros(fig1_channel):
    doc = json.loads(dump_channel(fig1_channel))
    assert doc["matrix"][0][2] == 0
    again = load_channel(dump_channel(fig1_channel))
    assert again.support_sets == fig1_channel.support_sets
    assert again.output_labels == fig1_channel.output_labels


def test_pmf_validation():
    with pytest.raises(ChannelValidationError):
        Pmf(np.array([0.5, 0.6]))
    with pytest.raises(ChannelValidationError):
        Pmf(np.array([]))
    assert Pmf.uniform(4).support == frozenset(range(4))


# ========== 结构 ==========
def test_bec_supports_and_graph(bec05):
    assert bec05.support_sets == (frozenset({0}), frozenset({0, 1}), frozenset({1}))
    assert channel_graph(bec05).acyclic
    assert find_alternating_cycle(bec05) is None


def test_fig2_supports_and_cycle(fig2_channel):
    assert fig2_channel.support_sets == (frozenset({0, 1, 2}), frozenset({0, 1, 2}),
                                         frozenset({2}))
    # 输出 0、1 共享全部输入，x0-y0-x1-y1 构成交替环
    assert not channel_graph(fig2_channel).acyclic
    cycle = find_alternating_cycle(fig2_channel)
    assert cycle is not None and len(cycle) >= 2


def test_noiseless_is_zero_epsilon_noise():
    assert epsilon_noise_level(noiseless(4)) == 0.0


def test_epsilon_noise_level_of_fixture():
    w = get_channel("epsnoise", eps=0.05)
    assert epsilon_noise_level(w) == pytest.approx(0.05)


def test_epsilon_noise_undefined_without_matching_labels():
    w = Dmc([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5]], input_labels=("a", "b"))
    assert epsilon_noise_level(w) is None


# ========== 信息量 ==========
def test_identity_information(uniform2):
    f = info_functionals(uniform2, np.eye(2), np.eye(2))
    assert f.mutual_information == pytest.approx(LN2)
    assert f.conditional_entropy == 0.0
    assert f.entropy == pytest.approx(LN2)


def test_degenerate_input_has_no_information():
    info = mutual_information(Pmf(np.array([1.0, 0.0])), bsc(0.3))
    assert info == pytest.approx(0.0, abs=1e-15)


def test_conditional_divergence_two_terms(uniform2):
    f = info_functionals(uniform2, bsc(0.1), bsc(0.2))
    expected = 0.1 * math.log(0.1 / 0.2) + 0.9 * math.log(0.9 / 0.8)
    assert f.conditional_divergence == pytest.approx(expected, abs=1e-12)


def test_divergence_infinite_off_support(uniform2):
    f = info_functionals(uniform2, np.array([[0.5, 0.5], [0.0, 1.0]]), np.eye(2))
    assert math.isinf(f.conditional_divergence)


# ========== 合并、分解与化简 ==========
def test_fig1_outputs_merge(fig1_channel):
    merged = merge_equivalent_outputs(fig1_channel)
    assert merged.channel.shape == (3, 2)
    assert merged.groups == ((0, 1), (2,))
    assert merged.merge_map == (0, 0, 1)
    np.testing.assert_allclose(merged.channel.matrix, [[1, 0], [1, 0], [0, 1]])


def test_distinct_supports_unchanged(bec05):
    merged = merge_equivalent_outputs(bec05)
    assert not merged.changed
    np.testing.assert_array_equal(merged.channel.matrix, bec05.matrix)


def test_bsc_merges_to_single_output(bsc01):
    merged = merge_equivalent_outputs(bsc01).channel
    assert merged.shape == (2, 1)
    np.testing.assert_allclose(merged.matrix, [[1.0], [1.0]])


def test_never_seen_output_dropped():
    merged = merge_equivalent_outputs(Dmc([[0.5, 0.0, 0.5], [0.0, 0.0, 1.0]]))
    assert merged.merge_map[1] is None
    assert merged.channel.output_size == 2


def test_factorization(z01, bsc01, noiseless2):
    f = check_factorization(z01)
    assert f is not None
    xs, ys = np.nonzero(z01.positive)
    np.testing.assert_allclose(f.a[xs] * f.b[ys], z01.matrix[xs, ys])
    assert check_factorization(bsc01) is None
    f = check_factorization(noiseless2)
    np.testing.assert_allclose(f.a[[0, 1]] * f.b[[0, 1]], [1.0, 1.0])


def test_binary_input_reduce(bsc01, z01, bec05):
    assert binary_input_reduce(bsc01).shape == (2, 1)
    np.testing.assert_array_equal(binary_input_reduce(z01).matrix, z01.matrix)
    np.testing.assert_array_equal(binary_input_reduce(bec05).matrix, bec05.matrix)
    with pytest.raises(ParameterError):
        binary_input_reduce(noiseless(3))


# ========== 乘积信道与型 ==========
def test_product_channel(bsc01):
    assert product_channel(bsc01, 1) is bsc01
    w2 = product_channel(bsc01, 2)
    assert w2.shape == (4, 4)
    assert w2.matrix[0, 0] == pytest.approx(0.81)
    assert w2.input_labels[1] == "0,1"


def test_product_channel_cap():
    with pytest.raises(SizeCapError):
        product_channel(Dmc(np.full((10, 10), 0.1)), 8)


def test_type_enumeration():
    assert {t.counts for t in enumerate_types(2, 2)} == {(2, 0), (1, 1), (0, 2)}
    assert TypeClass((1, 1)).shell_size() == 2
    assert TypeClass((2, 2)).shell_size() == 6
    assert type_of([0, 1, 1, 0], 2) == TypeClass((2, 2))


def test_conditional_type_and_message_set():
    v = conditional_type([0, 0], [0, 1], 2, 2)
    np.testing.assert_array_equal(v.counts, [[1, 1], [0, 0]])
    np.testing.assert_allclose(v.conditional_probs()[0], [0.5, 0.5])
    assert message_set(np.array([[0, 0], [0, 1]]), [0, 1], v) == [0]


@pytest.mark.parametrize("x", [(0, 0, 1), (1, 0, 2), (2, 2, 2)])
def test_conditional_types_partition_outputs(x):
    ys = all_sequences(3, 3)
    shells = enumerate_conditional_types(type_of(x, 3), 3)
    assert len(set(shells)) == len(shells)
    assert sum(v.shell_size() for v in shells) == 3 ** 3
    for v in shells:
        members = [tuple(y) for y in ys if in_shell(y, v, x)]
        assert len(members) == v.shell_size()
        for y in members:
            assert conditional_type(x, y, 3, 3) == v
    for y in ys:
        v = conditional_type(x, y, 3, 3)
        assert v in shells
        assert in_shell(y, v, x)
        assert sum(in_shell(y, u, x) for u in shells) == 1


def test_closest_type():
    assert closest_type(Pmf(np.array([0.5, 0.5])), 4).counts == (2, 2)
    assert closest_type([0.7, 0.3], 4).counts == (3, 1)
    # 等距时取字典序最小
    assert closest_type([0.5, 0.5], 3).counts == (1, 2)


# ========== 零误差谓词、q* 与模糊输出 ==========
def test_zero_error_predicates(fig1_channel, fig2_channel, all_positive):
    assert disjoint_support_pairs(fig1_channel) == [(0, 2), (1, 2)]
    assert has_positive_zero_error(fig1_channel)
    assert not has_positive_zero_error(fig2_channel)
    assert erasure_positive(fig2_channel)
    assert not erasure_positive(all_positive)


def test_cutoff_positive(fig1_channel, all_positive):
    assert cutoff_positive(fig1_channel)
    assert cutoff_positive(all_positive)
    assert not cutoff_positive(Dmc([[0.3, 0.7], [0.3, 0.7]]))


def test_q_star_fig1(fig1_channel):
    qs = q_star(fig1_channel)
    assert qs.value == 1.0
    assert fig1_channel.matrix[qs.x1, sorted(qs.y0)].sum() == pytest.approx(1.0)


def test_q_star_fig2():
    qs = q_star(fig2(0.01, 0.1))
    assert qs.value == 0.1
    assert (qs.x0, qs.x1, qs.y0) == (0, 2, frozenset({2}))


def test_q_star_all_positive(all_positive):
    assert q_star(all_positive).value == 0.0


def test_ambiguous_output_bound(fig2_channel, noiseless2, all_positive):
    assert ambiguous_output_upper_bound(fig2_channel, 1.0) == pytest.approx(
        -math.log(1 - 0.05), rel=1e-15)
    assert ambiguous_output_upper_bound(fig2_channel, 2.0) == pytest.approx(
        -math.log(0.95) / 2)
    assert math.isinf(ambiguous_output_upper_bound(noiseless2, 1.0))
    assert ambiguous_output_upper_bound(all_positive, 1.0) == 0.0
    with pytest.raises(ParameterError):
        ambiguous_output_upper_bound(fig2_channel, 0.0)


# ========== 内置信道 ==========
def test_channel_string_parsing():
    w = parse_channel_string("fig1:eps=0.01")
    np.testing.assert_array_equal(w.matrix, fig1(0.01).matrix)
    assert parse_channel_string("noiseless:k=4").shape == (4, 4)
    with pytest.raises(ParameterError, match="未知的信道"):
        parse_channel_string("nosuch")
    with pytest.raises(ParameterError):
        parse_channel_string("bsc:p")


def test_random_channel_is_seeded():
    a = random_channel(3, 4, seed=11)
    b = random_channel(3, 4, seed=11)
    np.testing.assert_array_equal(a.matrix, b.matrix)
    assert a.positive.any(axis=1).all()
