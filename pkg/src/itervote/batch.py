"""Seeded Monte-Carlo batches of random games."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .dynamics import (DEFAULT_STEP_LIMIT, Game, RunConfig, Scheduler,
                       check_truthful_invariants, run)
from .model import Behavior, Population, PreferenceOrder, StructureError, VoterType
from .uncertainty import Metric

COLUMNS = ("game_id", "m", "types", "metric", "scheduler", "steps", "outcome",
           "max_moves_per_voter", "winner_score_monotone", "truthful_invariants")

R_GRID = (Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(2))


@dataclass(frozen=True)
class BatchSpec:
    """Bounds for random games; every game is a function of (seed, game id)."""

    games: int
    seed: int
    mode: str = "nonatomic"
    m_range: tuple[int, int] = (2, 5)
    types_range: tuple[int, int] = (1, 6)
    r_grid: tuple[Fraction, ...] = R_GRID
    metrics: tuple[str, ...] = ("linf", "multiplicative")
    behaviors: tuple[str, ...] = ("weak_ld", "strict_ld")
    epsilon: Fraction = Fraction(1, 4)
    max_blocks_per_type: int = 8
    schedulers: tuple[str, ...] = ("group",)
    step_limit: int = DEFAULT_STEP_LIMIT
    weak_ld_policy: str = "adversarial"
    initial: str = "random"        # or "truthful"
    uniform_r: bool = False        # one radius for every type
    decreasing_r: bool = False     # shared nonincreasing schedule (needs uniform_r)
    base_max: int = 4              # base scores drawn from [0, base_max]
    leaders: int = 0               # this many candidates get base_max extra base score

    def __post_init__(self):
        if self.games < 0:
            raise StructureError("games must be nonnegative")
        if self.mode not in ("atomic", "nonatomic"):
            raise StructureError("mode must be atomic or nonatomic")
        lo, hi = self.m_range
        if not 1 <= lo <= hi or not 1 <= self.types_range[0] <= self.types_range[1]:
            raise StructureError("empty generator bounds")
        if not (self.r_grid and self.metrics and self.behaviors and self.schedulers):
            raise StructureError("r grid, metrics, behaviors and schedulers must be nonempty")
        if self.initial not in ("random", "truthful"):
            raise StructureError("initial must be random or truthful")


@dataclass
class GameCase:
    game: Game
    initial: tuple[int, ...]
    scheduler: Scheduler
    config: RunConfig
    n_types: int
    info: dict = field(default_factory=dict)


def _pick(rng, seq):
    return seq[int(rng.integers(len(seq)))]


def generate(spec: BatchSpec, game_id: int) -> GameCase:
    rng = np.random.default_rng([spec.seed, game_id])
    m = int(rng.integers(spec.m_range[0], spec.m_range[1] + 1))
    n_types = int(rng.integers(spec.types_range[0], spec.types_range[1] + 1))
    metric = Metric(_pick(rng, spec.metrics))
    shared_r = _pick(rng, spec.r_grid)
    schedule = None
    if spec.decreasing_r:
        lower = sorted((x for x in spec.r_grid if x <= shared_r), reverse=True)
        schedule = (shared_r, *sorted((_pick(rng, lower) for _ in range(2)), reverse=True))
    types = []
    for _ in range(n_types):
        prefs = PreferenceOrder(tuple(int(c) for c in rng.permutation(m)))
        r = shared_r if spec.uniform_r else _pick(rng, spec.r_grid)
        types.append(VoterType(prefs, r, Behavior(_pick(rng, spec.behaviors)),
                               r_schedule=schedule))
    base = [int(x) for x in rng.integers(0, spec.base_max + 1, size=m)]
    for c in rng.permutation(m)[:spec.leaders]:
        base[c] += spec.base_max
    if spec.mode == "nonatomic":
        blocks = [(vt, spec.epsilon * int(rng.integers(1, spec.max_blocks_per_type + 1)))
                  for vt in types]
        pop = Population.nonatomic(blocks, spec.epsilon, base)
    else:
        pop = Population.atomic(types, base)
    if spec.initial == "truthful":
        initial = tuple(pop.type_of(u).prefs.top() for u in range(pop.n_units))
    else:
        initial = tuple(int(c) for c in rng.integers(0, m, size=pop.n_units))
    kind = _pick(rng, spec.schedulers)
    p = _pick(rng, (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1)))
    scheduler = Scheduler(kind, p) if kind != "scripted" else Scheduler("round_robin")
    config = RunConfig(step_limit=spec.step_limit, seed=int(rng.integers(2**31)),
                       weak_ld_policy=spec.weak_ld_policy)
    return GameCase(Game(pop, metric), initial, scheduler, config, n_types)


def run_one(spec: BatchSpec, game_id: int) -> dict:
    case = generate(spec, game_id)
    trace = run(case.game, case.initial, case.scheduler, case.config)
    rep = check_truthful_invariants(trace, case.game)
    return {
        "game_id": game_id,
        "m": case.game.m,
        "types": case.n_types,
        "metric": case.game.metric.value,
        "scheduler": case.scheduler.kind,
        "steps": trace.steps,
        "outcome": trace.outcome.value,
        "max_moves_per_voter": trace.max_moves_per_unit(),
        "winner_score_monotone": trace.winner_score_monotone(),
        "truthful_invariants": "n/a" if not rep.applicable else ("hold" if rep.holds else
                                                                 "violated"),
    }


def _run_range(args) -> list[dict]:
    spec, ids = args
    return [run_one(spec, g) for g in ids]


def run_batch(spec: BatchSpec, jobs: int = 1) -> list[dict]:
    """Rows ordered by game id, identical for any ``jobs``."""
    ids = list(range(spec.games))
    if jobs > 1 and len(ids) > 1:
        shards = [(spec, ids[k::jobs]) for k in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = [r for part in pool.map(_run_range, shards) for r in part]
    else:
        rows = _run_range((spec, ids))
    return sorted(rows, key=lambda r: r["game_id"])


def rows_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: str(v).lower() if isinstance(v, bool) else v for k, v in row.items()})
    return buf.getvalue()


def summarize(rows: list[dict]) -> dict:
    out: dict = {"games": len(rows)}
    for row in rows:
        out[row["outcome"]] = out.get(row["outcome"], 0) + 1
    out["max_steps"] = max((r["steps"] for r in rows), default=0)
    out["max_moves_per_voter"] = max((r["max_moves_per_voter"] for r in rows), default=0)
    out["truthful_violations"] = sum(r["truthful_invariants"] == "violated" for r in rows)
    return out
