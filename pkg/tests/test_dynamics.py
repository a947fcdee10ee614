from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from itervote.batch import BatchSpec, generate
from itervote.dynamics import (Game, MoveKind, Outcome, RunConfig, Scheduler,
                               _Activation, check_truthful_invariants,
                               classify_move, is_equilibrium, run, step)
from itervote.model import (Behavior, Population, PreferenceOrder, StructureError,
                            VoterType, scores_of)
from itervote.uncertainty import Metric

A, B, C, D = range(4)
Q = PreferenceOrder


def intro_game():
    block = VoterType(Q((C, B, A)), F(1, 5))
    pop = Population.nonatomic([(block, F(1, 100))], F(1, 100), (45, 40, 15))
    return Game(pop, Metric.MULTIPLICATIVE)


def flaw_game():
    pop = Population.atomic([VoterType(Q((C, A, B, D)), 2), VoterType(Q((D, A, B, C)), 2)],
                            (5, 3, 4, 1))
    return Game(pop, Metric.L1)


def swap_game(known=True):
    pop = Population.atomic([VoterType(Q((B, C, A)), 0), VoterType(Q((C, B, A)), 0)], (1, 0, 0))
    return Game(pop, Metric.LINF, known_tiebreak=known)


def test_classify_move():
    q = Q((C, B, A))
    assert classify_move(q, C, B) is MoveKind.COMPROMISE
    assert classify_move(q, A, C) is MoveKind.OPPORTUNITY
    with pytest.raises(StructureError):
        classify_move(q, B, B)


def test_intro_single_step():
    g = intro_game()
    act = _Activation(Scheduler(), 1)
    new, moves = step(g, (C,), act, None, RunConfig(), 0)
    assert new == (B,)
    assert moves[0].kind is MoveKind.COMPROMISE
    again, none = step(g, new, act, None, RunConfig(), 1)
    assert again == new and none == []
    tr = run(g)
    assert tr.outcome is Outcome.EQUILIBRIUM and len(tr.moves) == 1


def test_is_equilibrium_examples():
    pop = Population.atomic([VoterType(Q((A,)))], (0,))
    assert is_equilibrium((A,), Game(pop, Metric.LINF)) == (True, None)
    rigid = Population.nonatomic([(VoterType(Q((C, B, A)), 0), 1)], 1, (45, 40, 14))
    assert is_equilibrium((C,), Game(rigid, Metric.LINF))[0]
    ok, witness = is_equilibrium((C,), intro_game())
    assert not ok and witness == (0, frozenset({B}))


def test_simultaneous_swap_cycles():
    tr = run(swap_game(), (B, C), Scheduler("all"))
    assert tr.outcome is Outcome.CYCLE and tr.period == 2
    assert tr.states[tr.cycle_start][1] == tr.final
    tr = run(swap_game(), (B, C), Scheduler("round_robin"))
    assert tr.outcome is Outcome.EQUILIBRIUM
    assert run(swap_game(known=False), (B, C), Scheduler("all")).outcome is Outcome.EQUILIBRIUM


def test_step_limit():
    tr = run(swap_game(), (B, C), Scheduler("all"), RunConfig(step_limit=1))
    assert tr.outcome is Outcome.STEP_LIMIT and tr.steps == 1
    with pytest.raises(StructureError):
        RunConfig(step_limit=0)
    with pytest.raises(StructureError):
        RunConfig(weak_ld_policy="greedy")


def test_flaw_example_trace():
    g = flaw_game()
    tr = run(g, (A, D), Scheduler("first"))
    got = [(mv.mover, mv.src, mv.dst, mv.kind) for mv in tr.moves]
    assert got == [(1, D, A, MoveKind.COMPROMISE), (0, A, C, MoveKind.OPPORTUNITY)]
    assert tr.winner_scores == [6, 7, 6]
    assert not tr.winner_score_monotone()
    assert tr.outcome is Outcome.EQUILIBRIUM
    assert not check_truthful_invariants(tr, g).applicable
    forced = check_truthful_invariants(tr, g, force=True)
    assert forced.violated("C") and forced.violated("B")


def test_truthful_invariants_vacuous_without_moves():
    g = intro_game()
    tr = run(g, (B,))
    assert not tr.moves
    assert not check_truthful_invariants(tr, g).applicable   # start is not truthful
    pop = Population.nonatomic([(VoterType(Q((A, B, C)), 1), 1)], 1, (45, 40, 15))
    g = Game(pop, Metric.LINF)
    tr = run(g)
    rep = check_truthful_invariants(tr, g)
    assert rep.applicable and rep.holds and not tr.moves


def test_scripted_scheduler_order():
    g = swap_game()
    tr = run(g, (B, C), Scheduler("scripted", script=((1,), (0,))), RunConfig(step_limit=5))
    assert tr.moves[0].mover == 1
    with pytest.raises(StructureError):
        Scheduler("scripted")
    with pytest.raises(StructureError):
        Scheduler("sometimes")


def test_weak_ld_adversarial_policy():
    pop = Population.nonatomic([(VoterType(Q((C, A, B, D)), F(1, 2), Behavior.WEAK_LD), 1)], 1,
                               (0, 0, 1, 0))
    g = Game(pop, Metric.LINF, filter_dominated=False)
    tr = run(g, (D,), config=RunConfig(weak_ld_policy="adversarial"))
    assert tr.moves[0].dst == B


def test_radius_schedule_is_part_of_state():
    vt = VoterType(Q((C, B, A)), 1, r_schedule=(10, 10, 0))
    pop = Population.nonatomic([(vt, 1)], 1, (45, 40, 15))
    g = Game(pop, Metric.LINF)
    assert g.response((C,), 0, t=0) == {B}
    assert g.response((C,), 0, t=2) == {C}
    assert run(g).outcome is Outcome.EQUILIBRIUM


def test_runs_are_deterministic():
    spec = BatchSpec(1, seed=11)
    case = generate(spec, 0)
    t1 = run(case.game, case.initial, case.scheduler, case.config)
    t2 = run(case.game, case.initial, case.scheduler, case.config)
    assert t1.moves == t2.moves and t1.states == t2.states


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_nonatomic_ld_never_cycles(seed):
    case = generate(BatchSpec(1, seed=seed), 0)
    tr = run(case.game, case.initial, case.scheduler, case.config)
    assert tr.outcome is Outcome.EQUILIBRIUM
    assert is_equilibrium(tr.final, case.game)[0]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_atomic_singleton_ld_never_cycles(seed):
    spec = BatchSpec(1, seed=seed, mode="atomic", m_range=(2, 4), types_range=(2, 5),
                     schedulers=("round_robin", "random", "first"),
                     metrics=("linf", "multiplicative", "l1"))
    case = generate(spec, 0)
    tr = run(case.game, case.initial, case.scheduler, case.config)
    assert tr.outcome is Outcome.EQUILIBRIUM


def test_scores_after_each_move():
    g = flaw_game()
    tr = run(g, (A, D), Scheduler("first"))
    for mv, (_, prof) in zip(tr.moves, tr.states[1:]):
        assert mv.scores_after == scores_of(prof, g.population).s


def test_atomic_weak_ld_can_cycle():
    # a non-pivotal voter may leave a tie for a hopeless candidate; both sides
    # of each move are checked against the enumeration oracle
    from itervote.oracle import Relation, oracle_relation
    a, b, d = range(3)

    def game(behavior):
        pop = Population.atomic([VoterType(Q((d, b, a)), 0, behavior),
                                 VoterType(Q((a, d, b)), 0, behavior)], (5, 3, 3))
        return Game(pop, Metric.LINF)

    g = game(Behavior.WEAK_LD)
    sched = Scheduler("scripted", script=((1,), (0,)))
    tr = run(g, (d, d), sched, RunConfig(weak_ld_policy="adversarial"))
    assert tr.outcome is Outcome.CYCLE and tr.period == 4
    for mv, (t, prof) in zip(tr.moves, tr.states):
        v = g.view(prof, mv.mover, t)
        assert oracle_relation(v, mv.dst, mv.src, Relation.DOMINATES)
        assert not any(oracle_relation(v, z, mv.dst, Relation.DOMINATES)
                       for z in range(3) if z != mv.dst)
    assert run(game(Behavior.STRICT_LD), (d, d), sched).outcome is Outcome.EQUILIBRIUM
