import itertools
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from itervote.model import StructureError
from itervote.uncertainty import (BeliefBall, Metric, UnsupportedMetric,
                                  all_subsets, ball_enumerate, ball_size,
                                  distance, feasible_tie_sets, possible_winners,
                                  score_range, threshold_winners,
                                  tie_set_feasible)

CW = (Metric.LINF, Metric.MULTIPLICATIVE)
RADII = (F(0), F(1, 4), F(1, 2), F(1), F(2))


def test_score_ranges():
    b = BeliefBall((45, 40, 15), Metric.MULTIPLICATIVE, F(1, 5))
    assert score_range(b, 0).lo == F(75, 2) and score_range(b, 0).hi == 54
    b = BeliefBall((1, 5), Metric.LINF, 2)
    assert (score_range(b, 0).lo, score_range(b, 0).hi) == (0, 3)
    atomic = BeliefBall((7, 3), Metric.MULTIPLICATIVE, F(1, 2), atomic=True)
    assert (score_range(atomic, 0).lo, score_range(atomic, 0).hi) == (4, 11)
    with pytest.raises(UnsupportedMetric):
        score_range(BeliefBall((1, 2), Metric.L1, 1), 0)


def test_distance_metrics():
    assert distance(Metric.L1, (10, 9, 7, 6), (8, 9, 8, 8)) == 5
    assert distance(Metric.LINF, (10, 9), (8, 10)) == 2
    assert distance(Metric.MULTIPLICATIVE, (10, 4), (12, 4)) == F(1, 5)
    assert distance(Metric.MULTIPLICATIVE, (0, 4), (1, 4)) == float("inf")


def test_intro_possible_winners():
    b = BeliefBall((45, 40, 15), Metric.MULTIPLICATIVE, F(1, 5))
    assert possible_winners(b) == {0, 1}
    assert threshold_winners(b) == {0, 1}


def test_l1_tieability_examples():
    s1 = BeliefBall((10, 9, 7, 6), Metric.L1, 5)
    s2 = BeliefBall((10, 6, 6, 6), Metric.L1, 5)
    assert possible_winners(s1) == {0, 1, 2, 3}
    assert not any({2, 3} <= T for T in feasible_tie_sets(s1))
    for x, y in itertools.combinations(range(4), 2):
        assert any({x, y} <= T for T in feasible_tie_sets(s2))
    with pytest.raises(UnsupportedMetric):
        threshold_winners(s1)


def test_tie_set_argument_errors():
    b = BeliefBall((1, 2), Metric.LINF, 1)
    with pytest.raises(StructureError):
        tie_set_feasible(b, [])
    with pytest.raises(StructureError):
        tie_set_feasible(b, [5])
    with pytest.raises(StructureError):
        BeliefBall((F(1, 2), 1), Metric.LINF, 1, atomic=True)
    with pytest.raises(StructureError):
        BeliefBall((1, 1), Metric.LINF, -1)


def _lp_tie_margin(center, metric, r, T):
    """Largest gap between the tie level and the outside candidates (LP)."""
    m = len(center)
    # variables: x_0..x_{m-1}, t, delta, d_0..d_{m-1}
    n = 2 * m + 2
    cost = np.zeros(n)
    cost[m + 1] = -1
    a_eq, b_eq, a_ub, b_ub = [], [], [], []
    for c in range(m):
        row = np.zeros(n)
        if c in T:
            row[c], row[m] = 1, -1
            a_eq.append(row), b_eq.append(0)
        else:
            row[c], row[m], row[m + 1] = 1, -1, 1
            a_ub.append(row), b_ub.append(0)
    bounds = [(0, None)] * m + [(None, None), (-1, 1)] + [(0, None)] * m
    s = [float(x) for x in center]
    rr = float(r)
    for c in range(m):
        if metric is Metric.LINF:
            bounds[c] = (max(0.0, s[c] - rr), s[c] + rr)
        elif metric is Metric.MULTIPLICATIVE:
            bounds[c] = (s[c] / (1 + rr), s[c] * (1 + rr))
        else:
            for sign in (1, -1):
                row = np.zeros(n)
                row[c], row[m + 2 + c] = sign, -1
                a_ub.append(row), b_ub.append(sign * s[c])
    if metric is Metric.L1:
        row = np.zeros(n)
        row[m + 2:] = 1
        a_ub.append(row), b_ub.append(rr)
    res = linprog(cost, A_ub=np.array(a_ub) if a_ub else None, b_ub=b_ub or None,
                  A_eq=np.array(a_eq), b_eq=b_eq, bounds=bounds, method="highs")
    if res.status != 0:
        return None
    return -res.fun if len(T) < m else 1.0


scores = st.lists(st.integers(0, 24).map(lambda k: F(k, 2)), min_size=2, max_size=4)


@settings(max_examples=150, deadline=None)
@given(scores, st.sampled_from(Metric), st.sampled_from(RADII))
def test_nonatomic_tie_sets_match_lp(center, metric, r):
    ball = BeliefBall(tuple(center), metric, r)
    for T in all_subsets(ball.m):
        margin = _lp_tie_margin(center, metric, r, T)
        expected = margin is not None and margin > 1e-9
        assert tie_set_feasible(ball, T) == expected, (center, metric, r, sorted(T), margin)


def test_nonatomic_threshold_equivalence_exhaustive():
    grid = [F(k, 2) for k in range(0, 13)]
    for metric in CW:
        for r in RADII:
            for center in itertools.product(grid, repeat=3):
                b = BeliefBall(center, metric, r)
                assert possible_winners(b) == threshold_winners(b), (center, metric, r)


def test_atomic_linf_threshold_equivalence_exhaustive():
    for r in (0, F(1, 2), 1, 2, F(5, 2), 3):
        for center in itertools.product(range(7), repeat=3):
            b = BeliefBall(center, Metric.LINF, r, atomic=True)
            assert possible_winners(b) == threshold_winners(b), (center, r)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 40).map(lambda k: F(k, 4)), min_size=2, max_size=5),
       st.sampled_from(CW), st.sampled_from(RADII))
def test_possible_winners_can_share_a_tie(center, metric, r):
    ball = BeliefBall(tuple(center), metric, r)
    W = possible_winners(ball)
    ties = feasible_tie_sets(ball)
    for x, y in itertools.combinations(sorted(W), 2):
        assert any({x, y} <= T for T in ties)


def test_ball_enumerate_matches_distance_filter():
    for metric in (Metric.L1, Metric.LINF):
        for center in [(3, 0, 2), (1, 1, 1, 1), (0,)]:
            for r in (0, 1, 2, F(5, 2)):
                b = BeliefBall(center, metric, r, atomic=True)
                got = list(ball_enumerate(b))
                assert len(got) == len(set(got)) == ball_size(b)
                k = int(r)
                box = itertools.product(*(range(max(0, x - k), x + k + 1) for x in center))
                want = {p for p in box if distance(metric, p, center) <= r}
                assert set(got) == want


def test_l1_lattice_count():
    # interior ball in Z^m of radius k has sum_j 2^j C(m,j) C(k,j) points
    from math import comb
    for m in (1, 2, 3, 4):
        for k in range(4):
            b = BeliefBall((10,) * m, Metric.L1, k, atomic=True)
            assert ball_size(b) == sum(2**j * comb(m, j) * comb(k, j) for j in range(m + 1))


def test_enumerate_needs_atomic():
    with pytest.raises(UnsupportedMetric):
        list(ball_enumerate(BeliefBall((1, 2), Metric.LINF, 1)))
