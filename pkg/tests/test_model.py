from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from itervote.model import (Behavior, Population, PreferenceOrder, ScoreVector,
                            StructureError, UtilityScale, VoterType, as_rat,
                            is_eps_valid, mass_table, scores_of, truthful_profile,
                            winner, winner_fractional)

A, B, C, D = range(4)


def test_as_rat_parses_exact_forms():
    assert as_rat("3/10") == F(3, 10)
    assert as_rat("1.5") == F(3, 2)
    assert as_rat(7) == 7
    with pytest.raises(StructureError):
        as_rat("1/0")
    with pytest.raises(StructureError):
        as_rat(0.5)
    with pytest.raises(StructureError):
        as_rat(True)


def test_preference_order_ranks():
    q = PreferenceOrder((C, B, A))
    assert q.rank(C) == 1 and q.rank(A) == 3
    assert q.at_rank(2) == B
    assert q.prefers(B, A) and not q.prefers(A, B)
    assert q.best_of({A, B}) == B and q.worst_of({B, C}) == B
    with pytest.raises(StructureError):
        PreferenceOrder((0, 0, 1))


def test_utility_scale_fit_and_default():
    q = PreferenceOrder((C, B, A, D))
    assert UtilityScale((3, 4, 5, 0)).fits(q)
    assert not UtilityScale((5, 4, 3, 0)).fits(q)
    assert UtilityScale.default_for(q).values == (1, 2, 3, 0)
    with pytest.raises(StructureError):
        UtilityScale((1, 1, 2))
    with pytest.raises(StructureError):
        VoterType(q, utilities=UtilityScale((5, 4, 3, 0)))


def test_radius_schedule():
    vt = VoterType(PreferenceOrder((0, 1)), 1, r_schedule=(1, F(1, 2), 0))
    assert [vt.radius_at(t) for t in range(5)] == [1, F(1, 2), 0, 0, 0]
    with pytest.raises(StructureError):
        VoterType(PreferenceOrder((0, 1)), 1, r_schedule=(F(1, 2), 1))
    with pytest.raises(StructureError):
        VoterType(PreferenceOrder((0, 1)), -1)


def test_winner_respects_tiebreak():
    assert winner(ScoreVector((5, 5, 1))) == 0
    assert winner(ScoreVector((5, 5, 1), tiebreak=(1, 0, 2))) == 1
    assert winner(ScoreVector((3, 7, 7))) == 1
    assert winner(ScoreVector((F(1, 3),))) == 0


@given(st.lists(st.integers(0, 20), min_size=1, max_size=6), st.randoms())
def test_fractional_tiebreak_matches_lexicographic(scores, rnd):
    tb = list(range(len(scores)))
    rnd.shuffle(tb)
    s = ScoreVector(tuple(scores), tuple(tb))
    assert winner(s) == winner_fractional(s)


def test_population_atomic_scores():
    q = PreferenceOrder((B, A, C, D))
    pop = Population.atomic([VoterType(q, 1), VoterType(PreferenceOrder((C, B, A, D)), 4)],
                            (9, 4, 0, 10))
    assert scores_of((B, C), pop).s == (9, 5, 1, 10)
    assert truthful_profile(pop) == (B, C)
    assert pop.is_atomic and pop.unit_weight == 1
    with pytest.raises(StructureError):
        scores_of((B,), pop)
    with pytest.raises(StructureError):
        is_eps_valid((B, C), pop)


def test_population_nonatomic_blocks():
    q = PreferenceOrder((C, B, A))
    pop = Population.nonatomic([(VoterType(q, F(1, 5)), F(3, 10))], F(1, 10), (45, 40, 15))
    assert pop.n_units == 3
    assert pop.mass_of_type(0) == F(3, 10)
    s = scores_of((C, C, B), pop)
    assert s.s == (45, F(401, 10), F(152, 10))
    assert mass_table((C, C, B), pop) == {(0, B): F(1, 10), (0, C): F(2, 10)}
    assert is_eps_valid({(0, C): F(2, 10)}, pop)
    assert not is_eps_valid({(0, C): F(1, 20)}, pop)
    with pytest.raises(StructureError):
        Population.nonatomic([(VoterType(q), F(1, 4))], F(1, 10))


def test_behavior_flags():
    assert Behavior.WEAK_LD.is_ld and Behavior.STRICT_LD.is_ld
    assert not Behavior.WCR.is_ld
