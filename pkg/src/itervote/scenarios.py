"""Scenario files, trace output and the built-in instance library.

A scenario is UTF-8 JSON. Rationals are integer literals or ``"p/q"``
strings; JSON floats are rejected, as are unknown fields. Candidates and
voters are referred to by name everywhere in the file.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from .dynamics import (RNG_ALGORITHM, Game, Outcome, RunConfig, Scheduler,
                       Trace, check_truthful_invariants, run)
from .model import (Behavior, Population, PreferenceOrder, StructureError,
                    UtilityScale, VoterType, as_rat)
from .oracle import SearchSpace, equilibrium_census
from .strategy import make_view, response, s_dominates, wcr_values
from .uncertainty import Metric, feasible_tie_sets, possible_winners


class ScenarioError(StructureError):
    """A scenario file or dictionary is malformed."""


# -- rational helpers ------------------------------------------------------------

def rat(x, what: str = "value") -> Fraction:
    if isinstance(x, float):
        raise ScenarioError(f"{what}: floats are not exact, write {x!r} as \"p/q\"")
    try:
        return as_rat(x)
    except StructureError as exc:
        raise ScenarioError(f"{what}: {exc}") from exc


def dump_rat(x: Fraction):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _reject_float(text):
    raise ScenarioError(f"float literal {text} not allowed; use an integer or \"p/q\"")


# -- schema ----------------------------------------------------------------------

@dataclass(frozen=True)
class VoterSpec:
    name: str
    prefs: tuple[str, ...]
    r: Fraction = Fraction(0)
    behavior: str = "strict_ld"
    utilities: tuple[Fraction, ...] | None = None  # per candidate, in declaration order
    count: int | None = None        # atomic
    mass: Fraction | None = None    # nonatomic
    r_schedule: tuple[Fraction, ...] | None = None


@dataclass(frozen=True)
class Probe:
    """A single belief computation checked against expected values."""

    voter: str
    scores: tuple[Fraction, ...]
    vote: str | None = None          # atomic views remove this vote from the center
    utilities: tuple[Fraction, ...] | None = None
    untieable_pairs: tuple[tuple[str, str], ...] | None = None
    possible_winners: tuple[str, ...] | None = None
    wcr: dict | None = None
    response: str | None = None
    dominates: tuple[dict, ...] | None = None


@dataclass(frozen=True)
class Expected:
    outcome: str | None = None
    period: int | None = None
    final_scores: tuple[Fraction, ...] | None = None
    score_cycle: tuple[tuple[Fraction, ...], ...] | None = None
    moves_prefix: tuple[dict, ...] | None = None
    equilibrium_count: int | None = None
    winner_score_decreases: bool | None = None
    truthful_invariants: dict | None = None
    probes: tuple[Probe, ...] | None = None


@dataclass(frozen=True)
class Scenario:
    name: str
    mode: str
    candidates: tuple[str, ...]
    voters: tuple[VoterSpec, ...]
    metric: str = "linf"
    base_scores: tuple[Fraction, ...] | None = None
    tiebreak: tuple[str, ...] | None = None
    belief_tiebreak: str = "neutral"
    epsilon: Fraction | None = None
    initial: Any = "truthful"
    scheduler: dict | None = None
    step_limit: int | None = None
    weak_ld_policy: str | None = None
    search_space: dict | None = None
    description: str | None = None
    expected: Expected | None = None

    # -- derived objects --

    def index(self, name: str) -> int:
        try:
            return self.candidates.index(name)
        except ValueError:
            raise ScenarioError(f"unknown candidate {name!r}") from None

    def units(self) -> list[tuple[int, str]]:
        """(voter spec index, unit label) per voter or block, in order."""
        out = []
        for k, v in enumerate(self.voters):
            n = self.unit_count(v)
            out.extend((k, v.name if n == 1 else f"{v.name}#{q + 1}") for q in range(n))
        return out

    def unit_count(self, v: VoterSpec) -> int:
        if self.mode == "atomic":
            return 1 if v.count is None else v.count
        return int(v.mass / self.epsilon)

    def voter_type(self, v: VoterSpec) -> VoterType:
        prefs = PreferenceOrder(tuple(self.index(c) for c in v.prefs))
        u = UtilityScale(v.utilities) if v.utilities is not None else None
        return VoterType(prefs, v.r, Behavior(v.behavior), u, v.r_schedule)

    def population(self) -> Population:
        tb = tuple(self.index(c) for c in self.tiebreak) if self.tiebreak else None
        base = self.base_scores or (0,) * len(self.candidates)
        if self.mode == "atomic":
            voters = [self.voter_type(v) for v in self.voters for _ in range(self.unit_count(v))]
            return Population.atomic(voters, base, tb)
        return Population.nonatomic([(self.voter_type(v), v.mass) for v in self.voters],
                                    self.epsilon, base, tb)

    def game(self, filter_dominated: bool = True) -> Game:
        return Game(self.population(), Metric(self.metric),
                    known_tiebreak=self.belief_tiebreak == "known",
                    filter_dominated=filter_dominated)

    def initial_profile(self) -> tuple[int, ...]:
        if self.initial == "truthful":
            return tuple(self.index(self.voters[k].prefs[0]) for k, _ in self.units())
        return tuple(self.index(c) for c in self.initial)

    def make_scheduler(self) -> Scheduler:
        spec = dict(self.scheduler or {"kind": "round_robin"})
        script = spec.get("script")
        if script is not None:
            labels = self.units()
            lookup: dict[str, list[int]] = {}
            for u, (k, label) in enumerate(labels):
                lookup.setdefault(label, []).append(u)
                if label != self.voters[k].name:
                    lookup.setdefault(self.voters[k].name, []).append(u)
            try:
                script = tuple(tuple(sorted(u for name in group for u in lookup[name]))
                               for group in script)
            except KeyError as exc:
                raise ScenarioError(f"scheduler script names unknown voter {exc}") from None
        return Scheduler(spec["kind"], spec.get("p", Fraction(1, 2)), script)

    def space(self) -> SearchSpace:
        pop = self.population()
        allowed = []
        ss = self.search_space or {}
        for k, _ in self.units():
            names = ss.get(self.voters[k].name)
            allowed.append(frozenset(range(pop.m)) if names is None
                           else frozenset(self.index(c) for c in names))
        return SearchSpace(tuple(allowed))

    def voter_named(self, name: str) -> VoterSpec:
        for v in self.voters:
            if v.name == name:
                return v
        raise ScenarioError(f"unknown voter {name!r}")


# -- parsing ---------------------------------------------------------------------

def _fields(cls) -> set[str]:
    return {f.name for f in dataclasses.fields(cls)}


def _strict(d: dict, cls, where: str) -> None:
    if not isinstance(d, dict):
        raise ScenarioError(f"{where}: expected an object")
    unknown = set(d) - _fields(cls)
    if unknown:
        raise ScenarioError(f"{where}: unknown field(s) {sorted(unknown)}")


def _rats(xs, what):
    if not isinstance(xs, list):
        raise ScenarioError(f"{what}: expected a list")
    return tuple(rat(x, what) for x in xs)


def _probe_from(d, where) -> Probe:
    _strict(d, Probe, where)
    return Probe(
        voter=d["voter"],
        scores=_rats(d["scores"], f"{where}.scores"),
        vote=d.get("vote"),
        utilities=_rats(d["utilities"], f"{where}.utilities") if "utilities" in d else None,
        untieable_pairs=tuple(tuple(p) for p in d["untieable_pairs"]) if "untieable_pairs" in d else None,
        possible_winners=tuple(d["possible_winners"]) if "possible_winners" in d else None,
        wcr={k: rat(v, f"{where}.wcr") for k, v in d["wcr"].items()} if "wcr" in d else None,
        response=d.get("response"),
        dominates=tuple(dict(x) for x in d["dominates"]) if "dominates" in d else None,
    )


def _expected_from(d) -> Expected:
    _strict(d, Expected, "expected")
    kw: dict[str, Any] = {}
    for key in ("outcome", "period", "equilibrium_count", "winner_score_decreases"):
        if key in d:
            kw[key] = d[key]
    if "final_scores" in d:
        kw["final_scores"] = _rats(d["final_scores"], "expected.final_scores")
    if "score_cycle" in d:
        kw["score_cycle"] = tuple(_rats(s, "expected.score_cycle") for s in d["score_cycle"])
    if "moves_prefix" in d:
        kw["moves_prefix"] = tuple(dict(m) for m in d["moves_prefix"])
    if "truthful_invariants" in d:
        kw["truthful_invariants"] = dict(d["truthful_invariants"])
    if "probes" in d:
        kw["probes"] = tuple(_probe_from(p, f"expected.probes[{k}]")
                             for k, p in enumerate(d["probes"]))
    if kw.get("outcome") not in (None, *(o.value for o in Outcome)):
        raise ScenarioError(f"unknown expected outcome {kw['outcome']!r}")
    return Expected(**kw)


def _voter_from(d, k) -> VoterSpec:
    where = f"voters[{k}]"
    _strict(d, VoterSpec, where)
    for req in ("name", "prefs"):
        if req not in d:
            raise ScenarioError(f"{where}: missing {req!r}")
    if d.get("behavior", "strict_ld") not in (b.value for b in Behavior):
        raise ScenarioError(f"{where}: unknown behavior {d['behavior']!r}")
    count = d.get("count")
    if count is not None and (not isinstance(count, int) or isinstance(count, bool) or count < 1):
        raise ScenarioError(f"{where}: count must be a positive integer")
    return VoterSpec(
        name=str(d["name"]),
        prefs=tuple(d["prefs"]),
        r=rat(d.get("r", 0), f"{where}.r"),
        behavior=d.get("behavior", "strict_ld"),
        utilities=_rats(d["utilities"], f"{where}.utilities") if "utilities" in d else None,
        count=count,
        mass=rat(d["mass"], f"{where}.mass") if "mass" in d else None,
        r_schedule=_rats(d["r_schedule"], f"{where}.r_schedule") if "r_schedule" in d else None,
    )


def from_dict(d: dict) -> Scenario:
    _strict(d, Scenario, "scenario")
    for req in ("name", "mode", "candidates", "voters"):
        if req not in d:
            raise ScenarioError(f"missing field {req!r}")
    sched = d.get("scheduler")
    if sched is not None:
        if not isinstance(sched, dict) or set(sched) - {"kind", "p", "script"}:
            raise ScenarioError("scheduler: expected {kind, p, script}")
        sched = dict(sched)
        if "p" in sched:
            sched["p"] = rat(sched["p"], "scheduler.p")
        if "script" in sched:
            sched["script"] = tuple(tuple(g) for g in sched["script"])
    sc = Scenario(
        name=str(d["name"]),
        mode=d["mode"],
        candidates=tuple(d["candidates"]),
        voters=tuple(_voter_from(v, k) for k, v in enumerate(d["voters"])),
        metric=d.get("metric", "linf"),
        base_scores=_rats(d["base_scores"], "base_scores") if "base_scores" in d else None,
        tiebreak=tuple(d["tiebreak"]) if "tiebreak" in d else None,
        belief_tiebreak=d.get("belief_tiebreak", "neutral"),
        epsilon=rat(d["epsilon"], "epsilon") if "epsilon" in d else None,
        initial=d.get("initial", "truthful") if d.get("initial", "truthful") == "truthful"
        else tuple(d["initial"]),
        scheduler=sched,
        step_limit=d.get("step_limit"),
        weak_ld_policy=d.get("weak_ld_policy"),
        search_space={k: tuple(v) for k, v in d["search_space"].items()}
        if "search_space" in d else None,
        description=d.get("description"),
        expected=_expected_from(d["expected"]) if "expected" in d else None,
    )
    validate(sc)
    return sc


def validate(sc: Scenario) -> None:
    """Check cross references; raise :class:`ScenarioError` with the reason."""
    if sc.mode not in ("atomic", "nonatomic"):
        raise ScenarioError(f"mode must be atomic or nonatomic, got {sc.mode!r}")
    if len(set(sc.candidates)) != len(sc.candidates) or not sc.candidates:
        raise ScenarioError("candidate names must be unique and nonempty")
    try:
        Metric(sc.metric)
    except ValueError:
        raise ScenarioError(f"unknown metric {sc.metric!r}") from None
    if sc.weak_ld_policy not in (None, "random", "adversarial"):
        raise ScenarioError("weak_ld_policy must be 'random' or 'adversarial'")
    if sc.belief_tiebreak not in ("neutral", "known"):
        raise ScenarioError("belief_tiebreak must be 'neutral' or 'known'")
    if sc.base_scores is not None and len(sc.base_scores) != len(sc.candidates):
        raise ScenarioError("base_scores needs one entry per candidate")
    if sc.tiebreak is not None and sorted(sc.tiebreak) != sorted(sc.candidates):
        for c in sc.tiebreak:
            sc.index(c)
        raise ScenarioError("tiebreak must list every candidate once")
    names = [v.name for v in sc.voters]
    if len(set(names)) != len(names):
        raise ScenarioError("voter names must be unique")
    for v in sc.voters:
        for c in v.prefs:
            sc.index(c)
        if sorted(v.prefs) != sorted(sc.candidates):
            raise ScenarioError(f"voter {v.name!r}: prefs must rank every candidate once")
        if v.utilities is not None:
            if len(v.utilities) != len(sc.candidates):
                raise ScenarioError(f"voter {v.name!r}: one utility per candidate")
            if not UtilityScale(v.utilities).fits(PreferenceOrder(tuple(sc.index(c) for c in v.prefs))):
                raise ScenarioError(f"voter {v.name!r}: utilities do not fit the preference order")
        if sc.mode == "atomic":
            if v.mass is not None:
                raise ScenarioError(f"voter {v.name!r}: atomic voters take a count, not a mass")
        else:
            if v.count is not None or v.mass is None:
                raise ScenarioError(f"voter {v.name!r}: nonatomic voters need a mass")
            if sc.epsilon is None:
                raise ScenarioError("nonatomic scenarios need epsilon")
            q = v.mass / sc.epsilon
            if q.denominator != 1 or q <= 0:
                raise ScenarioError(
                    f"voter {v.name!r}: mass {v.mass} is not a positive multiple of epsilon {sc.epsilon}")
    if sc.mode == "atomic" and sc.epsilon is not None:
        raise ScenarioError("atomic scenarios have no epsilon")
    if sc.initial != "truthful":
        if len(sc.initial) != len(sc.units()):
            raise ScenarioError(f"initial lists {len(sc.initial)} votes for {len(sc.units())} voters")
        for c in sc.initial:
            sc.index(c)
    for name, cands in (sc.search_space or {}).items():
        sc.voter_named(name)
        for c in cands:
            sc.index(c)
    try:
        sc.make_scheduler()
        sc.population()
    except ScenarioError:
        raise
    except StructureError as exc:
        raise ScenarioError(str(exc)) from exc


def load(path) -> Scenario:
    text = Path(path).read_text(encoding="utf-8")
    return loads(text)


def loads(text: str) -> Scenario:
    try:
        d = json.loads(text, parse_float=_reject_float)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc}") from exc
    return from_dict(d)


# -- serialization ---------------------------------------------------------------

def _plain(x):
    if isinstance(x, Fraction):
        return dump_rat(x)
    if isinstance(x, (tuple, list)):
        return [_plain(v) for v in x]
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if dataclasses.is_dataclass(x):
        return {f.name: _plain(getattr(x, f.name)) for f in dataclasses.fields(x)
                if getattr(x, f.name) is not None}
    return x


def to_dict(sc: Scenario) -> dict:
    d = _plain(sc)
    if d.get("belief_tiebreak") == "neutral":
        del d["belief_tiebreak"]
    return d


def dumps(sc: Scenario) -> str:
    return json.dumps(to_dict(sc), indent=2, ensure_ascii=False) + "\n"


def canonicalize(text: str) -> str:
    return dumps(loads(text))


def save(sc: Scenario, path) -> None:
    Path(path).write_text(dumps(sc), encoding="utf-8")


def scenario_hash(sc: Scenario) -> str:
    return hashlib.sha256(dumps(sc).encode("utf-8")).hexdigest()


# -- execution -------------------------------------------------------------------

def run_config(sc: Scenario, **overrides) -> RunConfig:
    kw = {}
    if sc.step_limit is not None:
        kw["step_limit"] = sc.step_limit
    if sc.weak_ld_policy is not None:
        kw["weak_ld_policy"] = sc.weak_ld_policy
    kw.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**kw)


def execute(sc: Scenario, config: RunConfig | None = None,
            scheduler: Scheduler | None = None) -> tuple[Game, Trace]:
    game = sc.game()
    trace = run(game, sc.initial_profile(), scheduler or sc.make_scheduler(),
                config or run_config(sc))
    return game, trace


def trace_jsonl(sc: Scenario, trace: Trace, config: RunConfig, scheduler: Scheduler) -> str:
    names = sc.candidates
    labels = [label for _, label in sc.units()]
    header = {
        "record": "header",
        "scenario": sc.name,
        "scenario_hash": scenario_hash(sc),
        "seed": config.seed,
        "rng": RNG_ALGORITHM,
        "config": {"step_limit": config.step_limit, "detect_cycles": config.detect_cycles,
                   "weak_ld_policy": config.weak_ld_policy},
        "scheduler": {"kind": scheduler.kind, "p": dump_rat(scheduler.p),
                      **({"script": [list(g) for g in scheduler.script]} if scheduler.script else {})},
        "initial": [names[c] for c in trace.initial],
        "initial_scores": [dump_rat(x) for x in trace.scores[0]],
    }
    lines = [header]
    for mv in trace.moves:
        lines.append({
            "record": "move", "t": mv.t, "mover": labels[mv.mover],
            "from": names[mv.src], "to": names[mv.dst], "class": mv.kind.value,
            "scores_after": [dump_rat(x) for x in mv.scores_after],
        })
    lines.append({"record": "outcome", "outcome": trace.outcome.value, "steps": trace.steps,
                  "period": trace.period, "cycle_start": trace.cycle_start,
                  "final": [names[c] for c in trace.final]})
    return "".join(json.dumps(x, ensure_ascii=False) + "\n" for x in lines)


def score_csv(sc: Scenario, trace: Trace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", *sc.candidates, "winner"])
    for (t, _), s, win in zip(trace.states, trace.scores, trace.winners):
        w.writerow([t, *(dump_rat(x) for x in s), sc.candidates[win]])
    return buf.getvalue()


# -- expectations ----------------------------------------------------------------

@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""
    step: int | None = None   # first diverging step, when it applies


def _first_divergence(got, want) -> int | None:
    for k, (a, b) in enumerate(zip(got, want)):
        if a != b:
            return k
    if len(got) < len(want):
        return len(got)
    return None


def _probe_checks(sc: Scenario, game: Game, probe: Probe, k: int) -> list[Check]:
    out = []
    v = sc.voter_named(probe.voter)
    vt = sc.voter_type(v)
    if probe.utilities is not None:
        vt = dataclasses.replace(vt, utilities=UtilityScale(probe.utilities))
    atomic = sc.mode == "atomic"
    if atomic and probe.vote is None:
        raise ScenarioError(f"probe {k}: atomic probes need the voter's vote")
    vote = sc.index(probe.vote) if probe.vote is not None else vt.prefs.top()
    tb = game.population.tiebreak if game.known_tiebreak else None
    view = make_view(probe.scores, vote, vt, game.metric, atomic, 0, tb)
    tag = f"probe[{k}]"
    names = sc.candidates
    if probe.untieable_pairs is not None:
        ties = feasible_tie_sets(view.ball)
        bad = sorted(tuple(names[c] for c in (x, y)) for x in range(view.m)
                     for y in range(x + 1, view.m)
                     if not any({x, y} <= T for T in ties))
        want = sorted(tuple(sorted(p, key=sc.index)) for p in probe.untieable_pairs)
        out.append(Check(f"{tag}.untieable_pairs", bad == want, f"got {bad}, want {want}"))
    if probe.possible_winners is not None:
        got = sorted(names[c] for c in possible_winners(view.ball))
        want = sorted(probe.possible_winners)
        out.append(Check(f"{tag}.possible_winners", got == want, f"got {got}, want {want}"))
    if probe.wcr is not None:
        vals = wcr_values(view, vt.utility())
        for c, want in probe.wcr.items():
            got = vals[sc.index(c)]
            out.append(Check(f"{tag}.wcr[{c}]", got == want, f"got {got}, want {want}"))
    if probe.response is not None:
        got = response(view, vt.behavior, vt.utility(), game.filter_dominated)
        want = frozenset({sc.index(probe.response)})
        out.append(Check(f"{tag}.response", got == want,
                         f"got {sorted(names[c] for c in got)}, want {probe.response}"))
    for dk, spec in enumerate(probe.dominates or ()):
        got = s_dominates(view, sc.index(spec["x"]), sc.index(spec["y"]))
        out.append(Check(f"{tag}.dominates[{spec['x']},{spec['y']}]", got == spec["holds"],
                         f"got {got}, want {spec['holds']}"))
    return out


def check_expectations(sc: Scenario, game: Game, trace: Trace | None,
                       census: bool = True) -> list[Check]:
    """Compare a run (and optional census and probes) with ``sc.expected``."""
    exp = sc.expected
    if exp is None:
        return []
    checks: list[Check] = []
    names = sc.candidates
    labels = [label for _, label in sc.units()]
    if trace is not None:
        if exp.outcome is not None:
            ok = trace.outcome.value == exp.outcome
            checks.append(Check("outcome", ok, f"got {trace.outcome.value}, want {exp.outcome}",
                                None if ok else trace.steps))
        if exp.period is not None:
            checks.append(Check("period", trace.period == exp.period,
                                f"got {trace.period}, want {exp.period}"))
        if exp.score_cycle is not None:
            got = [tuple(s) for s in trace.scores[:len(exp.score_cycle)]]
            k = _first_divergence(got, list(exp.score_cycle))
            checks.append(Check("score_cycle", k is None,
                                "" if k is None else
                                f"state {k}: got {[dump_rat(x) for x in got[k]] if k < len(got) else None},"
                                f" want {[dump_rat(x) for x in exp.score_cycle[k]]}",
                                None if k is None else k))
        if exp.final_scores is not None:
            ok = tuple(trace.scores[-1]) == exp.final_scores
            checks.append(Check("final_scores", ok,
                                f"got {[dump_rat(x) for x in trace.scores[-1]]}",
                                None if ok else len(trace.states) - 1))
        if exp.moves_prefix is not None:
            got = [{"mover": labels[m.mover], "from": names[m.src], "to": names[m.dst],
                    "class": m.kind.value} for m in trace.moves[:len(exp.moves_prefix)]]
            want = [dict(m) for m in exp.moves_prefix]
            k = _first_divergence(got, want)
            checks.append(Check("moves_prefix", k is None,
                                "" if k is None else f"move {k}: got {got[k] if k < len(got) else None}, want {want[k]}",
                                None if k is None else k + 1))
        if exp.winner_score_decreases is not None:
            w = trace.winner_scores
            drops = [k for k in range(1, len(w)) if w[k] < w[k - 1]]
            got = bool(drops)
            checks.append(Check("winner_score_decreases", got == exp.winner_score_decreases,
                                f"decreases at states {drops}", drops[0] if drops else None))
        if exp.truthful_invariants is not None:
            spec = exp.truthful_invariants
            rep = check_truthful_invariants(trace, game, force=bool(spec.get("force", False)))
            if "holds" in spec:
                first = rep.first_violation
                checks.append(Check("truthful_invariants.holds",
                                    rep.applicable and rep.holds == spec["holds"],
                                    f"applicable={rep.applicable} violations={list(rep.violations)}",
                                    None if first is None else first[1]))
            for prop in spec.get("violated", ()):
                checks.append(Check(f"truthful_invariants.violated[{prop}]", rep.violated(prop),
                                    f"violations={list(rep.violations)}"))
    if census and exp.equilibrium_count is not None:
        eqs = equilibrium_census(game, sc.space())
        checks.append(Check("equilibrium_count", len(eqs) == exp.equilibrium_count,
                            f"got {len(eqs)}: {[[names[c] for c in p] for p in eqs[:5]]}"))
    for k, probe in enumerate(exp.probes or ()):
        checks.extend(_probe_checks(sc, game, probe, k))
    return checks


# -- built-in library ------------------------------------------------------------

def _wcr_noeq_nonatomic() -> dict:
    cs = ["c1", "c2", "c3"]
    w = []
    for c in cs:
        others = [x for x in cs if x != c]
        w.append({"name": f"w{c[1]}", "prefs": [c, "b", "a", "d", *others], "r": 6,
                  "behavior": "wcr", "mass": "6/5"})
    return {
        "name": "wcr-noeq-nonatomic",
        "description": "Six candidates, four WCR types, no voting equilibrium.",
        "mode": "nonatomic",
        "candidates": ["a", "b", "c1", "c2", "c3", "d"],
        "base_scores": [12, 6, 0, 0, 0, 12],
        "metric": "linf",
        "epsilon": "3/10",
        "voters": [{"name": "v", "prefs": ["b", "a", *cs, "d"], "r": 2, "behavior": "wcr",
                    "mass": "3/2"}, *w],
        "search_space": {"v": ["a", "b"], "w1": ["c1", "b"], "w2": ["c2", "b"],
                         "w3": ["c3", "b"]},
        "expected": {"equilibrium_count": 0},
    }


def _wcr_atomic(name: str, d_score: int, expected: dict) -> dict:
    return {
        "name": name,
        "mode": "atomic",
        "candidates": ["a", "b", "c", "d"],
        "base_scores": [9, 4, 0, d_score],
        "metric": "linf",
        "voters": [{"name": "i", "prefs": ["b", "a", "c", "d"], "r": 1, "behavior": "wcr"},
                   {"name": "j", "prefs": ["c", "b", "a", "d"], "r": 4, "behavior": "wcr"}],
        "initial": ["b", "c"],
        "scheduler": {"kind": "scripted", "script": [["i"], ["j"]]},
        "step_limit": 40,
        "expected": expected,
    }


_CYCLE = [[9, 5, 1, 9], [10, 4, 1, 9], [10, 5, 0, 9], [9, 6, 0, 9], [9, 5, 1, 9]]


def _builtin_dicts() -> dict[str, dict]:
    lib = {
        "intro-45-40-15": {
            "name": "intro-45-40-15",
            "description": "Poll at 45/40/15; a small block of c-supporters compromises on b.",
            "mode": "nonatomic",
            "candidates": ["a", "b", "c"],
            "base_scores": [45, 40, 15],
            "metric": "multiplicative",
            "epsilon": "1/100",
            "voters": [{"name": "c-fans", "prefs": ["c", "b", "a"], "r": "1/5",
                        "behavior": "strict_ld", "mass": "1/100"}],
            "expected": {
                "outcome": "equilibrium",
                "moves_prefix": [{"mover": "c-fans", "from": "c", "to": "b",
                                  "class": "compromise"}],
                "final_scores": [45, "4001/100", 15],
                "probes": [{"voter": "c-fans", "scores": [45, 40, 15],
                            "possible_winners": ["a", "b"], "response": "b"}],
            },
        },
        "wcr-noeq-nonatomic": _wcr_noeq_nonatomic(),
        "wcr-cycle-atomic": _wcr_atomic("wcr-cycle-atomic", 9, {
            "outcome": "cycle", "period": 4, "score_cycle": _CYCLE, "equilibrium_count": 0}),
        "wcr-noeq-atomic": _wcr_atomic("wcr-noeq-atomic", 10, {"equilibrium_count": 0}),
        "l1-tieability": {
            "name": "l1-tieability",
            "description": "Under l1 the possible winners do not determine which pairs can tie.",
            "mode": "nonatomic",
            "candidates": ["a", "b", "c", "d"],
            "base_scores": [10, 9, 6, 6],
            "metric": "l1",
            "epsilon": 1,
            "voters": [{"name": "i", "prefs": ["c", "b", "a", "d"], "r": 5, "behavior": "wcr",
                        "utilities": [3, 4, 5, 0], "mass": 1}],
            "expected": {
                "moves_prefix": [{"mover": "i", "from": "c", "to": "b", "class": "compromise"}],
                "probes": [
                    {"voter": "i", "scores": [10, 9, 7, 6],
                     "possible_winners": ["a", "b", "c", "d"],
                     "untieable_pairs": [["c", "d"]],
                     "wcr": {"a": 4, "b": 3, "c": 4, "d": 4}, "response": "b"},
                    {"voter": "i", "scores": [10, 6, 6, 6], "untieable_pairs": [],
                     "wcr": {"a": 5, "b": 5, "c": 4, "d": 5}, "response": "c"},
                    {"voter": "i", "scores": [10, 9, 7, 6], "utilities": [3, 4, 5, "5/2"],
                     "wcr": {"b": 2, "c": "3/2"}, "response": "c"},
                ],
            },
        },
        "flaw-example": {
            "name": "flaw-example",
            "description": "From a non-truthful start an opportunity move lowers the winner's score.",
            "mode": "atomic",
            "candidates": ["a", "b", "c", "d"],
            "base_scores": [5, 3, 4, 1],
            "metric": "l1",
            "voters": [{"name": "i", "prefs": ["c", "a", "b", "d"], "r": 2},
                       {"name": "j", "prefs": ["d", "a", "b", "c"], "r": 2}],
            "initial": ["a", "d"],
            "scheduler": {"kind": "first"},
            "expected": {
                "outcome": "equilibrium",
                "moves_prefix": [
                    {"mover": "j", "from": "d", "to": "a", "class": "compromise"},
                    {"mover": "i", "from": "a", "to": "c", "class": "opportunity"}],
                "winner_score_decreases": True,
                "truthful_invariants": {"force": True, "violated": ["C"]},
                "probes": [{"voter": "i", "scores": [6, 3, 4, 2], "vote": "a",
                            "dominates": [{"x": "c", "y": "a", "holds": False}]},
                           {"voter": "i", "scores": [7, 3, 4, 1], "vote": "a",
                            "dominates": [{"x": "c", "y": "a", "holds": True}]}],
            },
        },
        "weak-ld-atomic-cycle": {
            "name": "weak-ld-atomic-cycle",
            "description": "Two atomic weak-LD voters with r = 0 cycle one move at a time: "
                           "a voter who cannot affect the winner may still leave a tie.",
            "mode": "atomic",
            "candidates": ["a", "b", "d"],
            "base_scores": [5, 3, 3],
            "metric": "linf",
            "voters": [{"name": "i", "prefs": ["d", "b", "a"], "behavior": "weak_ld"},
                       {"name": "j", "prefs": ["a", "d", "b"], "behavior": "weak_ld"}],
            "initial": ["d", "d"],
            "scheduler": {"kind": "scripted", "script": [["j"], ["i"]]},
            "weak_ld_policy": "adversarial",
            "step_limit": 50,
            "expected": {
                "outcome": "cycle", "period": 4,
                "score_cycle": [[5, 3, 5], [5, 4, 4], [5, 5, 3], [5, 4, 4], [5, 3, 5]],
                "moves_prefix": [
                    {"mover": "j", "from": "d", "to": "b", "class": "compromise"},
                    {"mover": "i", "from": "d", "to": "b", "class": "compromise"},
                    {"mover": "j", "from": "b", "to": "d", "class": "opportunity"},
                    {"mover": "i", "from": "b", "to": "d", "class": "opportunity"}],
            },
        },
        "simultaneous-swap": _swap("all", {"outcome": "cycle", "period": 2}),
        "simultaneous-swap-singleton": _swap("round_robin", {"outcome": "equilibrium"}),
    }
    family = to_dict(truthful_uniform_r(12))  # a member whose run moves three times
    family["name"] = "truthful-uniform-r"
    lib["truthful-uniform-r"] = family
    return lib


def _swap(kind: str, expected: dict) -> dict:
    return {
        "name": "simultaneous-swap" if kind == "all" else "simultaneous-swap-singleton",
        "description": "Two voters who both move at once keep trading places.",
        "mode": "atomic",
        "candidates": ["a", "b", "c"],
        "base_scores": [1, 0, 0],
        "metric": "linf",
        "belief_tiebreak": "known",
        "voters": [{"name": "x", "prefs": ["b", "c", "a"], "r": 0},
                   {"name": "y", "prefs": ["c", "b", "a"], "r": 0}],
        "initial": ["b", "c"],
        "scheduler": {"kind": kind},
        "step_limit": 50,
        "expected": expected,
    }


def truthful_uniform_r(seed: int, decreasing: bool | None = None) -> Scenario:
    """Random nonatomic LD game with one shared radius and a truthful start.

    With ``decreasing`` (chosen at random when ``None``) every type follows
    the same nonincreasing radius schedule instead.
    """
    rng = np.random.default_rng(seed)
    m = int(rng.integers(3, 6))
    names = [chr(ord("a") + k) for k in range(m)]
    n_types = int(rng.integers(1, 7))
    grid = [Fraction(1, 8), Fraction(1, 4), Fraction(1, 2), Fraction(1)]
    r = grid[int(rng.integers(len(grid)))]
    if decreasing is None:
        decreasing = bool(rng.integers(2))
    schedule = None
    if decreasing:
        steps = sorted((grid[int(k)] for k in rng.integers(0, len(grid), size=3)), reverse=True)
        schedule = [r, *(x for x in steps if x <= r)]
    metric = ["linf", "multiplicative"][int(rng.integers(2))]
    eps = Fraction(1, 4)
    voters = []
    for k in range(n_types):
        v = {"name": f"t{k}", "prefs": [names[c] for c in rng.permutation(m)],
             "r": dump_rat(r), "behavior": ["weak_ld", "strict_ld"][int(rng.integers(2))],
             "mass": dump_rat(eps * int(rng.integers(1, 9)))}
        if schedule is not None:
            v["r_schedule"] = [dump_rat(x) for x in schedule]
        voters.append(v)
    base = [int(x) for x in rng.integers(0, 5, size=m)]
    for c in rng.permutation(m)[:2]:  # two front-runners make compromises likely
        base[int(c)] += 4
    return from_dict({
        "name": f"truthful-uniform-r-{seed}",
        "description": "Generated truthful-start game; all types share one radius.",
        "mode": "nonatomic",
        "candidates": names,
        "base_scores": base,
        "metric": metric,
        "epsilon": dump_rat(eps),
        "voters": voters,
        "scheduler": {"kind": "group", "p": "1/2"},
        "expected": {"outcome": "equilibrium", "truthful_invariants": {"holds": True}},
    })


def builtin_names() -> list[str]:
    return list(_builtin_dicts())


def builtin(name: str) -> Scenario:
    lib = _builtin_dicts()
    if name not in lib:
        raise ScenarioError(f"unknown built-in scenario {name!r}; known: {sorted(lib)}")
    return from_dict(lib[name])


def resolve(ref: str) -> Scenario:
    """A built-in name or a path to a scenario file."""
    if ref in _builtin_dicts():
        return builtin(ref)
    p = Path(ref)
    if not p.exists():
        raise ScenarioError(f"no built-in scenario or file named {ref!r}")
    return load(p)
