"""Iterative play: schedulers, steps, runs, equilibrium and cycle detection."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .model import (Population, PreferenceOrder, StructureError,
                    VoterType, as_rat, scores_of, truthful_profile, winner)
from .strategy import ViewPoint, make_view, response
from .uncertainty import BeliefBall, Metric, possible_winners

RNG_ALGORITHM = "numpy.random.PCG64"
DEFAULT_STEP_LIMIT = 10_000


@dataclass(frozen=True)
class Game:
    """A population together with the belief model its voters use.

    ``known_tiebreak`` makes voters assume the realized tie-breaker instead
    of treating every tie-breaker as possible.
    """

    population: Population
    metric: Metric
    known_tiebreak: bool = False
    filter_dominated: bool = True

    @property
    def m(self) -> int:
        return self.population.m

    def view(self, profile: Sequence[int], unit: int, t: int = 0, scores=None) -> ViewPoint:
        pop = self.population
        s = scores_of(profile, pop) if scores is None else scores
        tb = pop.tiebreak if self.known_tiebreak else None
        return make_view(s, profile[unit], pop.type_of(unit), self.metric,
                         pop.is_atomic, t, tb)

    def response(self, profile: Sequence[int], unit: int, t: int = 0, scores=None):
        vt = self.population.type_of(unit)
        view = self.view(profile, unit, t, scores)
        return response(view, vt.behavior, vt.utilities, self.filter_dominated)


def responses(game: Game, profile: Sequence[int], t: int = 0) -> dict[int, frozenset]:
    """Response sets of every voter/block that wants to change its vote."""
    pop = game.population
    s = scores_of(profile, pop)
    memo: dict[tuple[int, int], frozenset] = {}
    out = {}
    for u, c in enumerate(profile):
        key = (pop.unit_type[u], c)
        if key not in memo:
            memo[key] = game.response(profile, u, t, s)
        R = memo[key]
        if R != frozenset({c}):
            out[u] = R
    return out


def is_equilibrium(profile: Sequence[int], game: Game, t: int = 0):
    """``(True, None)`` at a voting equilibrium, else ``(False, (unit, moves))``."""
    pop = game.population
    s = scores_of(profile, pop)
    memo = {}
    for u, c in enumerate(profile):
        key = (pop.unit_type[u], c)
        if key not in memo:
            memo[key] = game.response(profile, u, t, s)
        if memo[key] != frozenset({c}):
            return False, (u, memo[key])
    return True, None


class MoveKind(enum.Enum):
    OPPORTUNITY = "opportunity"
    COMPROMISE = "compromise"


def classify_move(prefs: PreferenceOrder, src: int, dst: int) -> MoveKind:
    if src == dst:
        raise StructureError("a move must change the vote")
    return MoveKind.OPPORTUNITY if prefs.prefers(dst, src) else MoveKind.COMPROMISE


SCHEDULER_KINDS = ("round_robin", "random", "first", "group", "all", "scripted")
SINGLETON_KINDS = ("round_robin", "random", "first")


@dataclass(frozen=True)
class Scheduler:
    """Who gets to move at each step.

    ``round_robin``, ``random`` and ``first`` activate one voter with a move;
    ``group`` activates each voter with a move independently with
    probability ``p`` (at least one); ``all`` activates every voter with a
    move; ``scripted`` cycles through explicit mover sets.
    """

    kind: str = "round_robin"
    p: Fraction = Fraction(1, 2)
    script: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        if self.kind not in SCHEDULER_KINDS:
            raise StructureError(f"unknown scheduler {self.kind!r}")
        object.__setattr__(self, "p", as_rat(self.p))
        if self.kind == "scripted":
            if not self.script:
                raise StructureError("scripted scheduler needs a script")
            object.__setattr__(self, "script", tuple(tuple(s) for s in self.script))

    @property
    def singleton(self) -> bool:
        return self.kind in SINGLETON_KINDS


@dataclass(frozen=True)
class RunConfig:
    step_limit: int = DEFAULT_STEP_LIMIT
    seed: int = 0
    detect_cycles: bool = True
    weak_ld_policy: str = "random"  # or "adversarial": lowest-ranked member

    def __post_init__(self):
        if self.step_limit < 1:
            raise StructureError("step limit must be at least 1")
        if self.weak_ld_policy not in ("random", "adversarial"):
            raise StructureError(f"unknown weak-LD policy {self.weak_ld_policy!r}")


@dataclass(frozen=True)
class MoveRecord:
    t: int
    mover: int
    src: int
    dst: int
    kind: MoveKind
    scores_after: tuple[Fraction, ...]


class Outcome(enum.Enum):
    EQUILIBRIUM = "equilibrium"
    CYCLE = "cycle"
    STEP_LIMIT = "step_limit"


@dataclass
class Trace:
    initial: tuple[int, ...]
    moves: list[MoveRecord] = field(default_factory=list)
    # one entry per distinct visited state: (step that produced it, profile)
    states: list[tuple[int, tuple[int, ...]]] = field(default_factory=list)
    scores: list[tuple[Fraction, ...]] = field(default_factory=list)
    winners: list[int] = field(default_factory=list)
    winner_scores: list[Fraction] = field(default_factory=list)
    possible_winner_sets: list[frozenset] | None = None
    outcome: Outcome = Outcome.STEP_LIMIT
    period: int | None = None
    cycle_start: int | None = None
    steps: int = 0

    @property
    def final(self) -> tuple[int, ...]:
        return self.states[-1][1]

    def max_moves_per_unit(self) -> int:
        counts = Counter(mv.mover for mv in self.moves)
        return max(counts.values(), default=0)

    def winner_score_monotone(self) -> bool:
        w = self.winner_scores
        return all(b >= a for a, b in zip(w, w[1:]))


def uniform_radius(pop: Population) -> bool:
    keys = {(vt.r, vt.r_schedule) for vt in (pop.type_of(u) for u in range(pop.n_units))}
    return len(keys) <= 1


def common_possible_winners(game: Game, scores, t: int) -> frozenset:
    """Possible winners under the shared radius, seen from the full scores."""
    pop = game.population
    vt = pop.type_of(0)
    ball = BeliefBall(tuple(scores), game.metric, vt.radius_at(t), atomic=False)
    return possible_winners(ball)


def _state_key(profile, pop: Population, t: int, schedule_len: int):
    if pop.is_atomic:
        key = tuple(profile)
    else:
        key = tuple(sorted(Counter(zip(pop.unit_type, profile)).items()))
    if schedule_len:
        key = (key, min(t, schedule_len - 1))
    return key


def _pick_target(R: frozenset, vt: VoterType, rng, policy: str) -> int:
    if len(R) == 1:
        return next(iter(R))
    if policy == "adversarial":
        return vt.prefs.worst_of(R)
    opts = sorted(R)
    return opts[int(rng.integers(len(opts)))]


class _Activation:
    def __init__(self, scheduler: Scheduler, n_units: int):
        self.sched = scheduler
        self.pointer = 0
        self.k = 0
        self.n = n_units

    def choose(self, movers: list[int], rng) -> list[int]:
        kind = self.sched.kind
        if kind == "first":
            return [movers[0]]
        if kind == "random":
            return [movers[int(rng.integers(len(movers)))]]
        if kind == "round_robin":
            after = [u for u in movers if u >= self.pointer]
            u = after[0] if after else movers[0]
            self.pointer = (u + 1) % max(self.n, 1)
            return [u]
        if kind == "all":
            return list(movers)
        if kind == "group":
            p = float(self.sched.p)
            picked = [u for u, x in zip(movers, rng.random(len(movers))) if x < p]
            return picked or [movers[int(rng.integers(len(movers)))]]
        script = self.sched.script
        chosen = set(script[self.k % len(script)])
        self.k += 1
        return [u for u in movers if u in chosen]


def step(game: Game, profile: Sequence[int], activation: _Activation, rng,
         config: RunConfig, t: int):
    """One round: activated voters respond to the same pre-step state.

    Returns ``(new_profile, moves)``; ``moves`` is empty at an equilibrium
    or when no activated voter has a move.
    """
    pop = game.population
    resp = responses(game, profile, t)
    if not resp:
        return tuple(profile), []
    movers = sorted(resp)
    new = list(profile)
    picks = []
    for u in activation.choose(movers, rng):
        dst = _pick_target(resp[u], pop.type_of(u), rng, config.weak_ld_policy)
        new[u] = dst
        picks.append((u, profile[u], dst))
    s_after = scores_of(new, pop).s
    moves = [MoveRecord(t + 1, u, src, dst,
                        classify_move(pop.type_of(u).prefs, src, dst), s_after)
             for u, src, dst in picks]
    return tuple(new), moves


def run(game: Game, initial: Sequence[int] | None = None,
        scheduler: Scheduler | None = None, config: RunConfig | None = None) -> Trace:
    """Iterate until equilibrium, an exact state recurrence, or the step limit."""
    pop = game.population
    scheduler = scheduler or Scheduler()
    config = config or RunConfig()
    profile = tuple(truthful_profile(pop) if initial is None else initial)
    scores_of(profile, pop)  # shape check
    rng = np.random.default_rng(config.seed)
    activation = _Activation(scheduler, pop.n_units)
    schedule_len = max((len(vt.r_schedule) for vt in pop.types if vt.r_schedule), default=0)
    track_w = uniform_radius(pop) and not pop.is_atomic and pop.n_units > 0

    trace = Trace(initial=profile)
    if track_w:
        trace.possible_winner_sets = []

    def record(t, prof):
        sv = scores_of(prof, pop)
        trace.states.append((t, prof))
        trace.scores.append(sv.s)
        w = winner(sv)
        trace.winners.append(w)
        trace.winner_scores.append(sv.s[w])
        if track_w:
            trace.possible_winner_sets.append(common_possible_winners(game, sv.s, t))

    record(0, profile)
    seen = {_state_key(profile, pop, 0, schedule_len): 0}
    outcome = None
    t = 0
    while t < config.step_limit:
        if not responses(game, profile, t):
            outcome = Outcome.EQUILIBRIUM
            break
        new, moves = step(game, profile, activation, rng, config, t)
        t += 1
        if new == profile:
            continue
        trace.moves.extend(moves)
        profile = new
        record(t, profile)
        if config.detect_cycles:
            key = _state_key(profile, pop, t, schedule_len)
            if key in seen:
                outcome = Outcome.CYCLE
                trace.cycle_start = seen[key]
                trace.period = len(trace.states) - 1 - seen[key]
                break
            seen[key] = len(trace.states) - 1
    if outcome is None:
        eq, _ = is_equilibrium(profile, game, t)
        outcome = Outcome.EQUILIBRIUM if eq else Outcome.STEP_LIMIT
    trace.outcome = outcome
    trace.steps = t
    return trace


@dataclass(frozen=True)
class TruthfulReport:
    applicable: bool
    holds: bool
    violations: tuple[tuple[str, int], ...] = ()  # (property, state index)
    reason: str = ""

    @property
    def first_violation(self):
        return self.violations[0] if self.violations else None

    def violated(self, prop: str) -> bool:
        return any(p == prop for p, _ in self.violations)


def check_truthful_invariants(trace: Trace, game: Game, force: bool = False) -> TruthfulReport:
    """Check the four truthful-start properties along a trace.

    (A) the shared possible-winner set never grows; (B) the winner's score
    never decreases; (C) every move is a compromise; (D) every vote is its
    owner's favorite possible winner or not a possible winner at all.
    Preconditions are a shared radius (or shared nonincreasing schedule), a
    nonatomic population and a truthful start; ``force`` checks anyway and
    then uses balls around the full scores for atomic voters too.
    """
    pop = game.population
    if not force:
        if pop.is_atomic:
            return TruthfulReport(False, True, reason="atomic population")
        if not uniform_radius(pop):
            return TruthfulReport(False, True, reason="voters do not share r")
        if tuple(trace.initial) != truthful_profile(pop):
            return TruthfulReport(False, True, reason="initial state is not truthful")
    if pop.n_units == 0:
        return TruthfulReport(True, True)
    found = []
    Ws = [common_possible_winners(game, s, t) for (t, _), s in zip(trace.states, trace.scores)]
    for k, ((t, prof), W) in enumerate(zip(trace.states, Ws)):
        if k > 0:
            if not W <= Ws[k - 1]:
                found.append(("A", k))
            if trace.winner_scores[k] < trace.winner_scores[k - 1]:
                found.append(("B", k))
            if any(mv.kind is MoveKind.OPPORTUNITY for mv in trace.moves if mv.t == t):
                found.append(("C", k))
        for u, c in enumerate(prof):
            prefs = pop.type_of(u).prefs
            if c in W and c != prefs.best_of(W):
                found.append(("D", k))
                break
    return TruthfulReport(True, not found, tuple(found))
