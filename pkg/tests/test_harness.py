import json
import math

import numpy as np
import pytest

from circdesign.designs import cw_spec, dcc_spec, dopt_spec
from circdesign.harness import (
    REFERENCE_ROWS,
    WORKERS_ENV,
    BatchResult,
    DesignRecord,
    RecordError,
    default_workers,
    iteration_ratio,
    load_records,
    read_batch_csv,
    record_from_report,
    reference_row,
    reproduce_tables,
    run_batch,
    spec_from_record,
    table_specs,
    write_batch_csv,
    write_records,
)
from circdesign.solver import SolverConfig, solve


def _solved(spec, seed=0):
    r = solve(spec, SolverConfig(max_time=30.0, seed=seed))
    assert r.solved
    return r


def test_record_key_order_and_roundtrip(tmp_path):
    rec = record_from_report(cw_spec(13, 3), _solved(cw_spec(13, 3)))
    assert list(rec.to_dict()) == ["family", "n", "k", "rows", "seed", "iterations",
                                   "time_s", "verified", "lineage"]
    pair = record_from_report(dopt_spec(9, 3, 5), _solved(dopt_spec(9, 3, 5)))
    assert list(pair.to_dict())[:4] == ["family", "n", "alpha", "beta"]
    path = tmp_path / "d.jsonl"
    assert write_records([rec, pair], path) == 2
    back = load_records(path)
    assert [b.to_dict() for b in back] == [rec.to_dict(), pair.to_dict()]
    assert spec_from_record(back[1]) == dopt_spec(9, 3, 5)


def test_write_appends_and_overwrites(tmp_path):
    rec = DesignRecord("cw", 3, [[1, 0, 0]], k=1)
    path = tmp_path / "d.jsonl"
    write_records([rec], path)
    write_records([rec], path)
    assert len(path.read_text().splitlines()) == 2
    write_records([rec], path, append=False)
    assert len(path.read_text().splitlines()) == 1


def test_no_timing_writes_null(tmp_path):
    rec = DesignRecord("cw", 3, [[0, 1, 0]], k=1, time_s=0.25)
    assert json.loads(rec.to_json(timing=False))["time_s"] is None
    assert json.loads(rec.to_json())["time_s"] == 0.25
    assert " " not in rec.to_json()


def test_unverified_refused(tmp_path):
    with pytest.raises(RecordError):
        write_records([DesignRecord("cw", 3, [[1, 0, 0]], k=1, verified=False)],
                      tmp_path / "x.jsonl")


def test_load_reverifies(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text(DesignRecord("cw", 3, [[1, 1, 0]], k=1).to_json() + "\n")
    with pytest.raises(RecordError):
        load_records(path)
    assert len(load_records(path, verify=False)) == 1
    path.write_text("{not json\n")
    with pytest.raises(RecordError):
        load_records(path)
    path.write_text('{"family":"cw"}\n')
    with pytest.raises(RecordError):
        load_records(path)
    path.write_text(DesignRecord("cw", 3, [[1, 0, 0]], k=5).to_json() + "\n")
    with pytest.raises(RecordError):
        load_records(path)


def test_negative_cw_record(tmp_path):
    path = tmp_path / "neg.jsonl"
    write_records([DesignRecord("cw", 3, [[0, -1, 0]], k=1)], path)
    assert load_records(path)[0].rows == [[0, -1, 0]]


def test_default_workers(monkeypatch):
    monkeypatch.delenv(WORKERS_ENV, raising=False)
    assert default_workers() == 1
    monkeypatch.setenv(WORKERS_ENV, "4")
    assert default_workers() == 4
    monkeypatch.setenv(WORKERS_ENV, "x")
    assert default_workers() == 1
    monkeypatch.setenv(WORKERS_ENV, "0")
    assert default_workers() == 1


def test_batch_averages_over_solved():
    res = run_batch(dcc_spec(7), tries=4, time_limit=30, base_seed=3, workers=1)
    assert res.solved == 4 and res.tries == 4 and res.label == "(7,1,1)"
    assert [r.seed for r in res.reports] == [3, 4, 5, 6]
    assert res.avg_iterations == pytest.approx(np.mean([r.iterations for r in res.reports]))
    none = run_batch(dopt_spec(25, 7, 7), tries=2, time_limit=30, workers=1, max_iters=2)
    assert none.solved == 0 and none.avg_time_s is None and none.avg_iterations is None


def test_workers_do_not_change_results():
    spec = dcc_spec(9)
    one = run_batch(spec, tries=6, time_limit=60, workers=1)
    many = run_batch(spec, tries=6, time_limit=60, workers=8)
    assert [(r.seed, r.iterations, r.status) for r in one.reports] == \
           [(r.seed, r.iterations, r.status) for r in many.reports]
    assert all(np.array_equal(a.solution, b.solution) for a, b in zip(one.reports, many.reports))
    assert one.avg_iterations == many.avg_iterations


def test_csv_roundtrip(tmp_path):
    rows = [BatchResult("dopt", (9, 3, 5), 10, 10, 0.1 + 0.2, 2356.8),
            BatchResult("dopt", (99, 1, 19), 10, 0, None, None)]
    path = tmp_path / "b.csv"
    write_batch_csv(rows, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "parameters,solved,avg_time_s,avg_iterations"
    assert lines[2] == '"(99,1,19)",0,--,--'
    assert read_batch_csv(path, "dopt", 10) == rows


def test_reference_tables():
    assert set(REFERENCE_ROWS) == {"dopt", "dcc", "cw"}
    assert reference_row("cw", (13, 3))[1] == 10
    with pytest.raises(KeyError):
        reference_row("cw", (12345, 1))
    assert all(s.n <= 9 for s in table_specs("dopt", max_n=9))
    assert all(s.k <= 3 for s in table_specs("cw", max_k=3))
    with pytest.raises(ValueError):
        table_specs("nope")


def test_iteration_ratio():
    r = BatchResult("cw", (13, 3), 10, 10, 1.0, 50.0)
    assert iteration_ratio(r, 100.0) == 0.5
    assert math.isnan(iteration_ratio(r, None))
    assert math.isnan(iteration_ratio(BatchResult("cw", (13, 3), 10, 0, None, None), 5.0))


def test_reproduce_small_rows(tmp_path):
    out = tmp_path / "dcc.csv"
    results = reproduce_tables("dcc", scale=1 / 360, out=out, tries=3, max_n=7, workers=1)
    assert results and all(r.solved == 3 for r in results)
    assert read_batch_csv(out, "dcc", 3) == results
