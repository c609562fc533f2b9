import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bstlab.errors import BstLabError
from bstlab.reference_model import (ReferenceModel, build_reference,
                                    exact_common_path_probability,
                                    interleave_bound,
                                    interleave_bound_direct, opt_lower_bound,
                                    rho, unified_bound)

sequences = st.integers(min_value=1, max_value=63).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(st.integers(min_value=1, max_value=n), min_size=1,
                 max_size=100)))


def test_build_n3():
    m = build_reference(3)
    assert m.root == 2
    assert int(m.left[2]) == 1 and int(m.right[2]) == 3
    assert [int(m.depth[k]) for k in (2, 1, 3)] == [0, 1, 1]


def test_build_n15_fig_shape():
    m = build_reference(15)
    assert m.root == 8
    assert {int(m.left[8]), int(m.right[8])} == {4, 12}


def test_build_n0_errors():
    with pytest.raises(BstLabError):
        build_reference(0)


def test_record_access_increments_n3():
    m = build_reference(3)
    incs = [m.record_access(k) for k in (1, 3, 1, 3)]
    assert incs == [0, 1, 1, 1]
    assert m.ib_total == 3


def test_first_access_increment_zero():
    for n in (1, 6, 31):
        m = build_reference(n)
        assert m.record_access((n + 1) // 2) == 0


def test_repeat_access_ib_zero():
    m = build_reference(3)
    assert [m.record_access(1) for _ in range(3)] == [0, 0, 0]
    assert m.ib_total == 0


def test_record_access_out_of_range():
    m = build_reference(3)
    with pytest.raises(BstLabError) as e:
        m.record_access(4)
    assert e.value.code == "key-out-of-range"


def test_interleave_bound_single_access():
    assert interleave_bound([5], 9).total == 0


def test_interleave_bound_alternating():
    assert interleave_bound([1, 3, 1, 3], 3).total == 3


def test_interleave_bound_sequential_pass_matches_direct():
    keys = list(range(1, 8))
    assert interleave_bound(keys, 7).total == interleave_bound_direct(keys, 7)


@settings(max_examples=300, deadline=None)
@given(sequences)
def test_replay_ib_equals_direct_ib(case):
    n, keys = case
    assert interleave_bound(keys, n).total == interleave_bound_direct(keys, n)


@settings(max_examples=100, deadline=None)
@given(sequences)
def test_repeat_of_previous_access_adds_zero(case):
    n, keys = case
    doubled = [k for key in keys for k in (key, key)]
    trace = interleave_bound(doubled, n)
    assert all(v == 0 for v in trace.per_access_increment[1::2])


def test_opt_lower_bound_m_dominates():
    assert opt_lower_bound([1] * 10, 100) == 10


def test_opt_lower_bound_alternating_small():
    assert opt_lower_bound([1, 3, 1, 3], 3) == max(4, 3 / 2 - 3)


def test_opt_lower_bound_ib_side():
    keys = [1, 3] * 100
    ib = interleave_bound(keys, 4).total
    assert opt_lower_bound(keys, 4) == max(200.0, ib / 2 - 4)


def test_root_path_fully_preferred_after_access():
    m = build_reference(31)
    m.record_access(11)
    path = m.root_preferred_path()
    assert path[-1] == 11 or 11 in path


def test_rho_values():
    assert rho(4) == 1.0
    assert rho(1024) == pytest.approx(0.01953125)
    with pytest.raises(BstLabError):
        rho(1)


def test_exact_common_path_probability():
    assert exact_common_path_probability(2) == 1
    assert exact_common_path_probability(3) == Fraction(2, 3)
    assert exact_common_path_probability(7) == Fraction(10, 21)


def test_exact_probability_brute_force_small():
    for n in (2, 3, 6, 10, 15):
        m = build_reference(n)
        anc = 0
        for y in range(1, n + 1):
            u = int(m.parent[y])
            while u:
                anc += 1
                u = int(m.parent[u])
        assert exact_common_path_probability(n) == Fraction(anc,
                                                            n * (n - 1) // 2)


def test_exact_probability_approaches_rho():
    # for a full tree of height h the ratio is about (h-2)/h, slowly -> 1
    ratios = []
    for h in (8, 12, 15):
        n = 2 ** h - 1
        ratios.append(float(exact_common_path_probability(n)) / rho(n))
    assert ratios == sorted(ratios)
    assert abs(ratios[-1] - 13 / 15) < 0.01
    assert ratios[-1] > 0.85


def test_full_tree_closed_form():
    h = 5
    n = 2 ** h - 1
    total = sum((2 ** l) * l for l in range(h))
    assert exact_common_path_probability(n) == Fraction(total,
                                                        n * (n - 1) // 2)


def test_unified_bound_examples():
    assert unified_bound([5, 5], 9)[1] == pytest.approx(1.0)
    assert unified_bound([5, 6], 9)[1] == pytest.approx(math.log2(3))
    assert unified_bound([1, 9, 2], 9)[2] == pytest.approx(2.0)
    assert unified_bound([4], 9)[0] == pytest.approx(math.log2(11))


def test_preferred_path_decomposition_fresh():
    m = build_reference(7)
    assert sorted(m.preferred_path_decomposition()) == [[k] for k in
                                                        range(1, 8)]


def test_preferred_path_decomposition_after_access_1():
    m = build_reference(7)
    m.record_access(1)
    paths = {frozenset(p) for p in m.preferred_path_decomposition()}
    assert paths == {frozenset(s) for s in ({4, 2, 1}, {3}, {5}, {6}, {7})}


def test_preferred_path_decomposition_fig_state():
    m = build_reference(15)
    for k in (15, 9, 1, 5):
        m.record_access(k)
    paths = {frozenset(p) for p in m.preferred_path_decomposition()}
    want = {frozenset(s) for s in ({8, 4, 6, 5}, {12, 10, 9}, {2, 1},
                                   {14, 15}, {3}, {7}, {11}, {13})}
    assert paths == want


@settings(max_examples=100, deadline=None)
@given(sequences)
def test_decomposition_partitions_universe(case):
    n, keys = case
    m = build_reference(n)
    for k in keys:
        m.record_access(k)
    paths = m.preferred_path_decomposition()
    flat = sorted(k for p in paths for k in p)
    assert flat == list(range(1, n + 1))


def test_sequential_lemma_properties_small():
    # after the first access, the root's preferred path reaches a leaf of P,
    # and no leaf enters it before its own access
    n = 64
    m = build_reference(n)
    accessed = set()
    for key in range(1, n + 1):
        m.record_access(key)
        accessed.add(key)
        path = m.root_preferred_path()
        assert m.is_leaf(path[-1])
        for u in path:
            if m.is_leaf(u):
                assert u in accessed
