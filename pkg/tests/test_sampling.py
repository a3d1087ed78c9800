import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from askm import (
    BadSampleSize,
    RowSampler,
    TooManySubsets,
    draw_sample,
    enumeration_oracle,
    expected_selected_residual_sq,
    make_rng,
    normalize_system,
    select_max_violation,
)
from askm.sampling import SampleDraw, selection_weights


def residual_problem(r):
    """Diagonal system whose positive residual at x = 0 is ``r``."""
    r = np.asarray(r, dtype=float)
    return normalize_system(np.eye(len(r)), -r)


def test_full_sample_is_everything():
    rng = make_rng(0)
    for _ in range(5):
        assert draw_sample(5, 5, rng).indices.tolist() == [0, 1, 2, 3, 4]


def test_bad_sample_size():
    with pytest.raises(BadSampleSize):
        draw_sample(5, 0, make_rng(0))
    with pytest.raises(BadSampleSize):
        RowSampler(5, 6)


def test_single_row_frequencies():
    s, rng = RowSampler(5, 1), make_rng(1)
    counts = Counter(int(s.draw(rng).indices[0]) for _ in range(100_000))
    for i in range(5):
        assert abs(counts[i] / 100_000 - 0.2) <= 0.01


def test_pair_frequencies():
    s, rng = RowSampler(3, 2), make_rng(2)
    counts = Counter(tuple(s.draw(rng).indices.tolist()) for _ in range(30_000))
    assert set(counts) == {(0, 1), (0, 2), (1, 2)}
    for c in counts.values():
        assert abs(c / 30_000 - 1 / 3) <= 0.02


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 40), st.data())
def test_draw_is_sorted_distinct_subset(m, data):
    beta = data.draw(st.integers(1, m))
    s, rng = RowSampler(m, beta), make_rng(data.draw(st.integers(0, 2**32)))
    for _ in range(5):
        idx = s.draw(rng).indices
        assert len(set(idx.tolist())) == beta
        assert np.all(np.diff(idx) > 0) or beta == 1
        assert idx.min() >= 0 and idx.max() < m


def test_draw_deterministic():
    a = [RowSampler(20, 4).draw(make_rng(9, 3)).indices.tolist() for _ in range(2)]
    assert a[0] == a[1]
    s1, s2 = RowSampler(20, 4), RowSampler(20, 4)
    r1, r2 = make_rng(9, 3), make_rng(9, 3)
    assert [s1.draw(r1).indices.tolist() for _ in range(10)] == [s2.draw(r2).indices.tolist() for _ in range(10)]


def test_sample_draw_length_checked():
    with pytest.raises(BadSampleSize):
        SampleDraw(np.array([0, 1]), 3)


def test_select_examples():
    p = normalize_system(np.eye(3), np.zeros(3))
    x = np.array([1.0, 3.0, 2.0])
    sel = select_max_violation(p, x, SampleDraw(np.array([0, 1, 2]), 3))
    assert (sel.row_index, sel.violation) == (1, 3.0)
    sel = select_max_violation(p, x, SampleDraw(np.array([0, 2]), 2))
    assert (sel.row_index, sel.violation) == (2, 2.0)


def test_select_all_satisfied_picks_lowest():
    p = normalize_system(np.eye(3), np.ones(3))
    sel = select_max_violation(p, np.zeros(3), SampleDraw(np.array([1, 2]), 2))
    assert (sel.row_index, sel.violation) == (1, 0.0)


def test_select_ties_pick_lowest():
    p = residual_problem([2.0, 2.0, 1.0])
    sel = select_max_violation(p, np.zeros(3), SampleDraw(np.array([0, 1, 2]), 3))
    assert sel.row_index == 0


def test_expectation_hand_example():
    p = residual_problem([0.0, 1.0, 2.0])
    # subsets {0,1},{0,2},{1,2} select 1, 2, 2 -> (1 + 4 + 4)/3
    assert expected_selected_residual_sq(p, np.zeros(3), 2) == pytest.approx(3.0, abs=1e-15)
    assert enumeration_oracle(p, np.zeros(3), 2) == pytest.approx(3.0, abs=1e-15)


def test_expectation_extremes():
    r = np.array([0.5, 0.0, 3.0, 1.0])
    p = residual_problem(r)
    assert expected_selected_residual_sq(p, np.zeros(4), 4) == pytest.approx(9.0)
    assert expected_selected_residual_sq(p, np.zeros(4), 1) == pytest.approx(np.mean(r**2))
    sat = normalize_system(np.eye(4), np.ones(4))
    assert expected_selected_residual_sq(sat, np.zeros(4), 2) == 0.0
    assert enumeration_oracle(sat, np.zeros(4), 2) == 0.0


def test_oracle_matches_six_three(random_system):
    p = random_system(6, 3, feasible=False)
    y = np.random.default_rng(0).standard_normal(3)
    assert abs(enumeration_oracle(p, y, 3) - expected_selected_residual_sq(p, y, 3)) <= 1e-12


def test_oracle_guard():
    p = residual_problem(np.ones(40))
    with pytest.raises(TooManySubsets):
        enumeration_oracle(p, np.zeros(40), 20)


@pytest.mark.parametrize("m", [1, 2, 7, 30])
def test_weights_match_binomials(m):
    from math import comb
    for beta in range(1, m + 1):
        w = selection_weights(m, beta)
        exact = [comb(beta - 1 + k, beta - 1) / comb(m, beta) for k in range(m - beta + 1)]
        np.testing.assert_allclose(w, exact, rtol=1e-12)
        assert w.sum() == pytest.approx(1.0, abs=1e-12)


def test_weights_large_m_finite():
    w = selection_weights(10_000, 37)
    assert np.all(np.isfinite(w)) and w.sum() == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=2, max_size=15))
def test_monotone_in_beta_and_bounded(r):
    p = residual_problem(r)
    full = float(np.sum(np.maximum(r, 0) ** 2))
    vals = [expected_selected_residual_sq(p, np.zeros(len(r)), b) for b in range(1, len(r) + 1)]
    assert all(b >= a - 1e-12 for a, b in itertools.pairwise(vals))
    for beta, v in enumerate(vals, start=1):
        # max over a sample is at most the sum over it
        assert v <= beta / len(r) * full * (1 + 1e-12) + 1e-15
