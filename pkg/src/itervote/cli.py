"""Command line interface: ``itervote <command> ...``.

Exit codes: 0 equilibrium / check passed, 1 expectation or check failed,
2 usage or load error, 3 cycle detected, 4 step limit reached.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import scenarios as sc_mod
from .batch import BatchSpec, rows_csv, run_batch, summarize
from .dynamics import Outcome, RunConfig, Scheduler, SCHEDULER_KINDS
from .model import StructureError, scores_of
from .oracle import (BoundExceeded, Family, SearchSpace, census_size,
                     cross_validate, equilibrium_census)
from .strategy import dominating_set, wcr_values
from .uncertainty import Metric

EXIT_OK, EXIT_FAIL, EXIT_ERROR, EXIT_CYCLE, EXIT_LIMIT = 0, 1, 2, 3, 4
OUTCOME_EXIT = {Outcome.EQUILIBRIUM: EXIT_OK, Outcome.CYCLE: EXIT_CYCLE,
                Outcome.STEP_LIMIT: EXIT_LIMIT}


def _rat(text: str) -> Fraction:
    return sc_mod.rat(text, "argument")


def _scenario(args) -> sc_mod.Scenario:
    sc = sc_mod.resolve(args.scenario)
    changes = {}
    if getattr(args, "epsilon", None) is not None:
        changes["epsilon"] = _rat(args.epsilon)
    if getattr(args, "metric_override", None) is not None:
        changes["metric"] = args.metric_override
    if changes:
        sc = dataclasses.replace(sc, **changes)
        sc_mod.validate(sc)
    return sc


def _config(args, sc) -> RunConfig:
    return sc_mod.run_config(sc, seed=args.seed, step_limit=args.step_limit,
                             weak_ld_policy=args.weak_ld_policy)


def _scheduler(args, sc) -> Scheduler:
    if args.scheduler is None:
        return sc.make_scheduler()
    p = _rat(args.p) if args.p is not None else Fraction(1, 2)
    return Scheduler(args.scheduler, p)


def _report(checks) -> bool:
    ok = True
    for c in checks:
        step = "" if c.ok or c.step is None else f" (first divergence at step {c.step})"
        print(f"  [{'pass' if c.ok else 'FAIL'}] {c.name}{step}{'' if c.ok else ': ' + c.detail}")
        ok &= c.ok
    return ok


def cmd_run(args) -> int:
    sc = _scenario(args)
    config = _config(args, sc)
    sched = _scheduler(args, sc)
    game, trace = sc_mod.execute(sc, config, sched)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{sc.name}.trace.jsonl").write_text(
        sc_mod.trace_jsonl(sc, trace, config, sched), encoding="utf-8")
    (out / f"{sc.name}.scores.csv").write_text(sc_mod.score_csv(sc, trace), encoding="utf-8")
    print(f"{sc.name}: {trace.outcome.value} after {trace.steps} steps, {len(trace.moves)} moves"
          + (f", period {trace.period}" if trace.period else ""))
    if args.expect:
        if sc.expected is None:
            print("  no expectations recorded for this scenario")
            return EXIT_FAIL
        return EXIT_OK if _report(sc_mod.check_expectations(sc, game, trace)) else EXIT_FAIL
    return OUTCOME_EXIT[trace.outcome]


def cmd_check(args) -> int:
    sc = _scenario(args)
    game = sc.game()
    pop = game.population
    if args.profile is None:
        profile = sc.initial_profile()
    else:
        names = [x.strip() for x in args.profile.split(",")]
        if len(names) != pop.n_units:
            raise StructureError(f"profile has {len(names)} votes, scenario has {pop.n_units} voters")
        profile = tuple(sc.index(c) for c in names)
    s = scores_of(profile, pop)
    cands = sc.candidates
    print(f"scores: {[sc_mod.dump_rat(x) for x in s.s]}")
    stable = True
    seen = set()
    for u, (k, label) in enumerate(sc.units()):
        key = (pop.unit_type[u], profile[u])
        if key in seen:
            continue
        seen.add(key)
        vt = pop.type_of(u)
        view = game.view(profile, u, 0, s)
        R = game.response(profile, u, 0, s)
        moves = R != frozenset({profile[u]})
        stable &= not moves
        line = f"{label} on {cands[profile[u]]}: response {{{', '.join(cands[c] for c in sorted(R))}}}"
        if vt.behavior.is_ld:
            D = dominating_set(view, profile[u], game.filter_dominated)
            if D:
                line += f"; dominated by {sorted(cands[c] for c in D)}"
        else:
            vals = wcr_values(view, vt.utility())
            line += "; wcr " + ", ".join(f"{cands[c]}={sc_mod.dump_rat(v)}" for c, v in enumerate(vals))
        print(("  MOVES " if moves else "  stays ") + line)
    print("stable" if stable else "not stable")
    return EXIT_OK if stable else EXIT_FAIL


def cmd_census(args) -> int:
    sc = _scenario(args)
    game = sc.game()
    space = sc.space() if args.space == "scenario" else SearchSpace.full(game.population)
    print(f"{sc.name}: {census_size(game, space)} profiles")
    eqs = equilibrium_census(game, space, limit=args.limit, jobs=args.jobs)
    names = [[sc.candidates[c] for c in p] for p in eqs]
    print(f"{len(eqs)} equilibria")
    for p in names:
        print("  " + ",".join(p))
    if args.out:
        Path(args.out).write_text(json.dumps({"scenario": sc.name, "count": len(eqs),
                                              "equilibria": names}, indent=2) + "\n")
    if args.expect_count is not None and len(eqs) != args.expect_count:
        print(f"expected {args.expect_count} equilibria, found {len(eqs)}")
        return EXIT_FAIL
    return EXIT_OK


def _ints(text):
    return tuple(int(x) for x in text.split(","))


def cmd_cross_validate(args) -> int:
    fam = Family(ms=_ints(args.m), max_score=args.max_score,
                 radii=tuple(_rat(x) for x in args.radii.split(",")),
                 metrics=tuple(Metric(x) for x in args.metrics.split(",")),
                 canonical=not args.all_centers)
    t0 = time.time()
    rep = cross_validate(fam, jobs=args.jobs)
    print(f"{rep.balls} balls, {rep.checks} checks, {len(rep.mismatches)} mismatches, "
          f"{len(rep.notes)} notes ({time.time() - t0:.1f}s)")
    for mm in rep.mismatches[:20]:
        print("  MISMATCH " + mm.reproducer())
    for mm in rep.notes[:args.show_notes]:
        print("  note " + mm.reproducer())
    if args.out:
        Path(args.out).write_text(json.dumps({
            "balls": rep.balls, "checks": rep.checks,
            "mismatches": [dataclasses.asdict(m) for m in rep.mismatches],
            "notes": [dataclasses.asdict(m) for m in rep.notes]}, indent=2) + "\n")
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_verify(args) -> int:
    names = args.names or sc_mod.builtin_names()
    ok = True
    for name in names:
        sc = sc_mod.builtin(name)
        game, trace = sc_mod.execute(sc)
        print(f"{name}: {trace.outcome.value} after {trace.steps} steps")
        ok &= _report(sc_mod.check_expectations(sc, game, trace))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_batch(args) -> int:
    spec = BatchSpec(
        games=args.games, seed=args.seed, mode=args.mode,
        m_range=_ints(args.m_range), types_range=_ints(args.types_range),
        r_grid=tuple(_rat(x) for x in args.r_grid.split(",")),
        metrics=tuple(args.metrics.split(",")), behaviors=tuple(args.behaviors.split(",")),
        epsilon=_rat(args.epsilon), schedulers=tuple(args.schedulers.split(",")),
        step_limit=args.step_limit, weak_ld_policy=args.weak_ld_policy,
        initial=args.initial, uniform_r=args.uniform_r, decreasing_r=args.decreasing_r,
        base_max=args.base_max, leaders=args.leaders)
    rows = run_batch(spec, jobs=args.jobs)
    text = rows_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    print(json.dumps(summarize(rows)), file=sys.stderr)
    return EXIT_OK


def cmd_list(args) -> int:
    for name in sc_mod.builtin_names():
        print(name)
    return EXIT_OK


def cmd_show(args) -> int:
    sys.stdout.write(sc_mod.dumps(sc_mod.resolve(args.scenario)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="itervote",
                                 description="Iterative Plurality voting under strict uncertainty.")
    sub = ap.add_subparsers(dest="command", required=True)

    def scenario_args(p, run_flags=False):
        p.add_argument("scenario", help="built-in name or path to a scenario JSON file")
        p.add_argument("--epsilon", help="override the block size (nonatomic)")
        p.add_argument("--metric-override", choices=[m.value for m in Metric])
        if run_flags:
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--step-limit", type=int)
            p.add_argument("--scheduler", choices=SCHEDULER_KINDS)
            p.add_argument("--p", help="activation probability for the group scheduler")
            p.add_argument("--weak-ld-policy", choices=("random", "adversarial"))

    p = sub.add_parser("run", help="run a scenario and write trace files")
    scenario_args(p, run_flags=True)
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--expect", action="store_true", help="compare with recorded expectations")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("check", help="stability report for one profile")
    scenario_args(p)
    p.add_argument("--profile", help="comma-separated votes, one per voter/block")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("census", help="list every equilibrium of a finite profile space")
    scenario_args(p)
    p.add_argument("--space", choices=("scenario", "full"), default="scenario")
    p.add_argument("--limit", type=int, default=10**6)
    p.add_argument("--expect-count", type=int)
    p.add_argument("--out")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("cross-validate", help="closed forms vs enumeration oracle")
    p.add_argument("--m", default="2,3,4")
    p.add_argument("--max-score", type=int, default=8)
    p.add_argument("--radii", default="0,1,2,3")
    p.add_argument("--metrics", default="linf,multiplicative,l1")
    p.add_argument("--all-centers", action="store_true", help="do not reduce to sorted centers")
    p.add_argument("--show-notes", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_cross_validate)

    p = sub.add_parser("verify", help="run built-in scenarios against their expectations")
    p.add_argument("names", nargs="*")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("batch", help="Monte-Carlo batch of random games (CSV)")
    p.add_argument("--games", type=int, default=100)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--mode", choices=("nonatomic", "atomic"), default="nonatomic")
    p.add_argument("--m-range", default="2,5")
    p.add_argument("--types-range", default="1,6")
    p.add_argument("--r-grid", default="0,1/4,1/2,1,2")
    p.add_argument("--metrics", default="linf,multiplicative")
    p.add_argument("--behaviors", default="weak_ld,strict_ld")
    p.add_argument("--epsilon", default="1/4")
    p.add_argument("--schedulers", default="group")
    p.add_argument("--step-limit", type=int, default=10_000)
    p.add_argument("--weak-ld-policy", choices=("random", "adversarial"), default="adversarial")
    p.add_argument("--initial", choices=("random", "truthful"), default="random")
    p.add_argument("--uniform-r", action="store_true")
    p.add_argument("--decreasing-r", action="store_true")
    p.add_argument("--base-max", type=int, default=4)
    p.add_argument("--leaders", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("list", help="list built-in scenarios")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("show", help="print a scenario as canonical JSON")
    p.add_argument("scenario")
    p.set_defaults(func=cmd_show)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (StructureError, BoundExceeded, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
