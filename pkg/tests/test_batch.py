import csv
import io

import pytest

from itervote.batch import COLUMNS, BatchSpec, generate, rows_csv, run_batch, summarize
from itervote.model import StructureError


def test_empty_batch_is_header_only():
    rows = run_batch(BatchSpec(0, seed=1))
    assert rows == []
    assert rows_csv(rows) == ",".join(COLUMNS) + "\n"
    assert summarize(rows)["games"] == 0


def test_batch_is_independent_of_jobs():
    spec = BatchSpec(12, seed=7, schedulers=("group", "random", "round_robin"))
    assert rows_csv(run_batch(spec, jobs=1)) == rows_csv(run_batch(spec, jobs=3))


def test_games_depend_only_on_seed_and_id():
    a = generate(BatchSpec(5, seed=2), 3)
    b = generate(BatchSpec(500, seed=2), 3)
    assert a.initial == b.initial and a.game.population == b.game.population
    assert generate(BatchSpec(5, seed=3), 3).initial != a.initial or \
        generate(BatchSpec(5, seed=3), 3).game.population != a.game.population


def test_csv_columns_and_summary():
    rows = run_batch(BatchSpec(20, seed=4, initial="truthful", uniform_r=True, leaders=2))
    parsed = list(csv.DictReader(io.StringIO(rows_csv(rows))))
    assert [int(r["game_id"]) for r in parsed] == list(range(20))
    assert {r["winner_score_monotone"] for r in parsed} <= {"true", "false"}
    assert {r["truthful_invariants"] for r in parsed} <= {"hold", "violated"}
    s = summarize(rows)
    assert s["games"] == 20 and s.get("equilibrium", 0) == 20


def test_decreasing_schedule_is_nonincreasing():
    case = generate(BatchSpec(1, seed=9, uniform_r=True, decreasing_r=True), 0)
    for vt in case.game.population.types:
        sch = vt.r_schedule
        assert list(sch) == sorted(sch, reverse=True)


@pytest.mark.parametrize("kw", [dict(games=-1), dict(mode="quantum"), dict(m_range=(3, 2)),
                                dict(metrics=()), dict(initial="sincere")])
def test_spec_validation(kw):
    base = dict(games=1, seed=0)
    base.update(kw)
    with pytest.raises(StructureError):
        BatchSpec(**base)
