"""Batch runs, reference tables and persistence of found designs.

Designs are stored one JSON object per line::

    {"family":"cw","n":13,"k":3,"rows":[[...]],"seed":7,"iterations":172,
     "time_s":0.05,"verified":true,"lineage":null}

``dopt`` and ``dcc`` records carry ``"alpha"`` and ``"beta"`` (the actual row
sums) instead of ``"k"``.  Batch summaries are CSV with the header
``parameters,solved,avg_time_s,avg_iterations``.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

from circdesign.designs import DesignSpec, InvalidSpecError, spec_for, validate, verify_exact
from circdesign.solver import SolveReport, SolverConfig, solve

__all__ = [
    "WORKERS_ENV",
    "REFERENCE_ROWS",
    "RecordError",
    "DesignRecord",
    "BatchResult",
    "default_workers",
    "spec_from_record",
    "record_from_report",
    "write_records",
    "load_records",
    "run_trials",
    "run_batch",
    "table_specs",
    "reproduce_tables",
    "write_batch_csv",
    "read_batch_csv",
    "iteration_ratio",
    "reference_row",
]

WORKERS_ENV = "CIRCDESIGN_WORKERS"

# (parameters, solved of 10, average seconds, average iterations); 3600 s per try
REFERENCE_ROWS: dict[str, list[tuple[tuple[int, ...], int, float | None, float | None]]] = {
    "dopt": [
        ((3, 1, 3), 10, 0.00, 3.4),
        ((5, 3, 3), 10, 0.00, 6.6),
        ((7, 1, 5), 9, 0.01, 12.7),
        ((9, 3, 5), 10, 0.19, 398.3),
        ((13, 1, 7), 7, 0.13, 349.7),
        ((13, 5, 5), 7, 0.16, 403.6),
        ((15, 3, 7), 10, 0.24, 591.8),
        ((19, 5, 7), 10, 0.81, 1999.1),
        ((21, 1, 9), 8, 1.36, 3424.9),
        ((23, 3, 9), 8, 2.02, 5097.1),
        ((25, 7, 7), 10, 4.64, 11668.6),
        ((27, 5, 9), 9, 116.50, 297617.0),
        ((31, 1, 11), 10, 187.63, 460501.0),
        ((33, 3, 11), 8, 553.44, 1380160.0),
        ((33, 7, 9), 8, 810.97, 2025880.0),
        ((37, 5, 11), 3, 1885.47, 4399507.0),
        ((41, 9, 9), 1, 586.87, 1352777.0),
        ((43, 1, 13), 0, None, None),
        ((43, 7, 11), 1, 1207.20, 2737865.0),
    ],
    "dcc": [
        ((1, 1, 1), 10, 0.00, 1.7),
        ((3, 1, 1), 10, 0.01, 33.6),
        ((5, 1, 1), 10, 0.00, 5.9),
        ((7, 1, 1), 8, 0.01, 35.8),
        ((9, 1, 1), 10, 0.01, 35.2),
        ((11, 1, 1), 10, 0.04, 89.2),
        ((13, 1, 1), 9, 0.10, 222.2),
        ((15, 1, 1), 10, 0.10, 241.8),
        ((17, 1, 1), 10, 0.22, 549.3),
        ((19, 1, 1), 10, 1.68, 4162.5),
        ((21, 1, 1), 10, 1.97, 4764.0),
        ((23, 1, 1), 10, 2.26, 5533.2),
        ((25, 1, 1), 9, 16.08, 40468.1),
        ((27, 1, 1), 10, 76.10, 192706.0),
        ((29, 1, 1), 10, 91.82, 223875.0),
        ((31, 1, 1), 10, 428.61, 1028850.0),
        ((33, 1, 1), 10, 849.84, 2070120.0),
        ((35, 1, 1), 4, 2354.52, 5864880.0),
        ((37, 1, 1), 2, 1883.67, 4603068.0),
        ((39, 1, 1), 1, 2536.40, 5916197.0),
    ],
    "cw": [
        ((1, 1), 10, 0.00, 1.5), ((2, 1), 10, 0.00, 1.4), ((3, 1), 8, 0.00, 3.1),
        ((4, 1), 10, 0.00, 5.6), ((5, 1), 9, 0.00, 4.0), ((6, 1), 10, 0.00, 4.1),
        ((7, 1), 10, 0.00, 3.3), ((8, 1), 10, 0.00, 3.5), ((9, 1), 10, 0.00, 4.0),
        ((10, 1), 10, 0.00, 4.5), ((11, 1), 10, 0.00, 4.0), ((12, 1), 10, 0.00, 3.8),
        ((13, 1), 10, 0.00, 4.7), ((14, 1), 10, 0.00, 3.8), ((15, 1), 10, 0.00, 5.7),
        ((16, 1), 10, 0.00, 6.0), ((17, 1), 10, 0.00, 5.7), ((18, 1), 10, 0.00, 4.6),
        ((19, 1), 10, 0.00, 7.0), ((20, 1), 10, 0.00, 6.2), ((21, 1), 10, 0.00, 6.3),
        ((22, 1), 10, 0.00, 8.2), ((23, 1), 10, 0.00, 6.9), ((24, 1), 10, 0.00, 6.2),
        ((25, 1), 10, 0.00, 4.8), ((26, 1), 10, 0.00, 5.2), ((27, 1), 10, 0.00, 6.1),
        ((28, 1), 10, 0.00, 6.7), ((29, 1), 10, 0.00, 8.7), ((30, 1), 10, 0.00, 7.9),
        ((4, 2), 9, 0.00, 5.1), ((6, 2), 10, 0.00, 8.1), ((7, 2), 10, 0.09, 328.9),
        ((8, 2), 7, 0.02, 81.4), ((10, 2), 10, 0.04, 180.5), ((12, 2), 10, 0.05, 211.7),
        ((14, 2), 10, 0.16, 649.2), ((16, 2), 7, 0.09, 373.0), ((18, 2), 6, 0.03, 110.5),
        ((20, 2), 7, 0.30, 1213.9), ((21, 2), 10, 0.32, 1165.9), ((22, 2), 3, 0.02, 67.7),
        ((24, 2), 8, 0.13, 506.5), ((26, 2), 2, 0.03, 101.0), ((28, 2), 9, 0.19, 703.3),
        ((30, 2), 5, 0.07, 232.6), ((13, 3), 10, 0.05, 172.0), ((24, 3), 2, 10.93, 42967.5),
        ((26, 3), 10, 1.89, 7162.3), ((21, 4), 10, 11.47, 45012.3), ((28, 4), 10, 15.89, 60377.3),
        ((31, 1), 10, 0.00, 9.0), ((32, 1), 10, 0.00, 9.8), ((33, 1), 10, 0.00, 9.4),
        ((34, 1), 10, 0.00, 9.7), ((35, 1), 10, 0.00, 8.5), ((36, 1), 10, 0.00, 8.3),
        ((37, 1), 10, 0.00, 11.7), ((38, 1), 10, 0.00, 6.2), ((39, 1), 10, 0.00, 9.9),
        ((40, 1), 10, 0.00, 10.5), ((41, 1), 10, 0.00, 11.8), ((42, 1), 10, 0.00, 11.8),
        ((43, 1), 10, 0.00, 9.1), ((44, 1), 10, 0.00, 8.7), ((45, 1), 10, 0.00, 9.7),
        ((46, 1), 10, 0.00, 14.5), ((47, 1), 10, 0.00, 9.3), ((48, 1), 10, 0.00, 10.9),
        ((49, 1), 10, 0.00, 11.9), ((50, 1), 10, 0.00, 13.4), ((51, 1), 10, 0.00, 11.7),
        ((52, 1), 10, 0.00, 16.3), ((53, 1), 10, 0.01, 17.8), ((54, 1), 10, 0.00, 16.2),
        ((55, 1), 10, 0.00, 14.7), ((56, 1), 10, 0.00, 10.4), ((57, 1), 10, 0.00, 15.9),
        ((58, 1), 10, 0.00, 11.6), ((59, 1), 10, 0.00, 12.4), ((60, 1), 10, 0.00, 16.1),
        ((32, 2), 9, 0.25, 984.3), ((34, 2), 4, 0.06, 211.8), ((35, 2), 6, 0.14, 516.3),
        ((36, 2), 5, 0.09, 359.4), ((38, 2), 2, 0.11, 398.0), ((40, 2), 7, 0.34, 1287.3),
        ((42, 2), 10, 0.60, 2265.0), ((44, 2), 2, 0.06, 241.0), ((46, 2), 1, 0.02, 65.0),
        ((48, 2), 8, 0.21, 798.0), ((49, 2), 10, 1.36, 5031.0), ((50, 2), 2, 0.05, 201.5),
        ((52, 2), 0, None, None), ((54, 2), 3, 0.14, 491.7), ((56, 2), 8, 0.29, 1098.4),
        ((58, 2), 3, 0.01, 44.3), ((60, 2), 3, 0.28, 1082.0), ((39, 3), 10, 5.72, 22158.7),
        ((48, 3), 1, 13.29, 52189.0), ((52, 3), 10, 3.92, 14888.2),
        ((31, 4), 10, 422.45, 1652410.0), ((42, 4), 10, 132.12, 504622.0),
        ((56, 4), 10, 59.63, 225106.0), ((31, 5), 10, 23.10, 90731.5),
        ((33, 5), 10, 334.83, 1306620.0), ((48, 6), 8, 607.04, 2365024.0),
        ((52, 6), 3, 2314.49, 8309650.0), ((57, 7), 2, 482.54, 1812060.0),
    ],
}


class RecordError(ValueError):
    """A persisted design record is malformed or does not verify."""


def default_workers() -> int:
    """Worker count from ``$CIRCDESIGN_WORKERS``, else 1."""
    raw = os.environ.get(WORKERS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass
class DesignRecord:
    family: str
    n: int
    rows: list[list[int]]
    k: int | None = None
    alpha: int | None = None
    beta: int | None = None
    seed: int | None = None
    iterations: int | None = None
    time_s: float | None = None
    verified: bool = True
    lineage: dict | None = None

    def to_dict(self, timing: bool = True) -> dict:
        out: dict = {"family": self.family, "n": self.n}
        if self.family == "cw":
            out["k"] = self.k
        else:
            out["alpha"] = self.alpha
            out["beta"] = self.beta
        out["rows"] = [[int(x) for x in row] for row in self.rows]
        out["seed"] = self.seed
        out["iterations"] = self.iterations
        out["time_s"] = self.time_s if timing else None
        out["verified"] = self.verified
        out["lineage"] = self.lineage
        return out

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), separators=(",", ":"))

    @classmethod
    def from_dict(cls, d: dict) -> "DesignRecord":
        try:
            family = d["family"]
            n = int(d["n"])
            rows = [[int(x) for x in row] for row in d["rows"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise RecordError(f"malformed record: {exc}") from exc
        return cls(
            family=family,
            n=n,
            rows=rows,
            k=d.get("k"),
            alpha=d.get("alpha"),
            beta=d.get("beta"),
            seed=d.get("seed"),
            iterations=d.get("iterations"),
            time_s=d.get("time_s"),
            verified=bool(d.get("verified", False)),
            lineage=d.get("lineage"),
        )


def spec_from_record(rec: DesignRecord) -> DesignSpec:
    """Spec matching a record; the CW row-sum sign is read off the data."""
    if rec.family == "cw":
        sign = -1 if rec.rows and sum(rec.rows[0]) < 0 else 1
        return spec_for("cw", rec.n, k=rec.k, sign=sign)
    return spec_for(rec.family, rec.n, alpha=rec.alpha, beta=rec.beta)


def record_from_report(spec: DesignSpec, report: SolveReport) -> DesignRecord:
    if not report.solved:
        raise ValueError("only solved reports become records")
    check = verify_exact(spec, report.solution)
    if not check:  # pragma: no cover - the solver only returns verified designs
        raise RecordError(f"solution failed re-verification: {check.reason}")
    rows = report.solution.tolist()
    rec = DesignRecord(spec.family, spec.n, rows, seed=report.seed,
                       iterations=report.iterations, time_s=report.wall_time)
    if spec.family == "cw":
        rec.k = spec.k
    else:
        rec.alpha, rec.beta = spec.alpha[0], spec.alpha[1]
    return rec


def write_records(records: Iterable[DesignRecord], path, append: bool = True,
                  timing: bool = True) -> int:
    """Append (or write) verified records as JSONL; returns the number written."""
    records = list(records)
    for rec in records:
        if not rec.verified:
            raise RecordError("refusing to persist an unverified record")
    mode = "a" if append else "w"
    with open(path, mode, encoding="utf-8") as fh:
        for rec in records:
            fh.write(rec.to_json(timing) + "\n")
    return len(records)


def load_records(path, verify: bool = True) -> list[DesignRecord]:
    """Read a JSONL file of records, re-verifying each one exactly."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = DesignRecord.from_dict(json.loads(line))
            except json.JSONDecodeError as exc:
                raise RecordError(f"{path}:{lineno}: {exc}") from exc
            if verify:
                try:
                    spec = spec_from_record(rec)
                except InvalidSpecError as exc:
                    raise RecordError(f"{path}:{lineno}: {exc}") from exc
                check = verify_exact(spec, rec.rows)
                if not check:
                    raise RecordError(f"{path}:{lineno}: {check.reason}")
            out.append(rec)
    return out


@dataclass
class BatchResult:
    family: str
    parameters: tuple[int, ...]
    tries: int
    solved: int
    avg_time_s: float | None
    avg_iterations: float | None
    reports: list[SolveReport] = field(default_factory=list, compare=False, repr=False)

    @property
    def label(self) -> str:
        return "(" + ",".join(str(p) for p in self.parameters) + ")"


def _trial(args) -> SolveReport:
    spec, cfg = args
    return solve(spec, cfg)


def run_trials(spec: DesignSpec, configs: list[SolverConfig],
               workers: int | None = None) -> list[SolveReport]:
    """Solve once per config, up to ``workers`` at a time; reports keep config order."""
    workers = default_workers() if workers is None else max(1, int(workers))
    if workers == 1 or len(configs) <= 1:
        return [solve(spec, cfg) for cfg in configs]
    with ProcessPoolExecutor(max_workers=min(workers, len(configs))) as pool:
        return list(pool.map(_trial, [(spec, cfg) for cfg in configs]))


def run_batch(spec: DesignSpec, tries: int = 10, time_limit: float = 60.0,
              base_seed: int = 0, workers: int | None = None,
              max_iters: int | None = None) -> BatchResult:
    """Independent trials with seeds ``base_seed + i``; averages are over solved trials."""
    validate(spec)
    configs = [SolverConfig(max_time=time_limit, max_iters=max_iters, seed=base_seed + i)
               for i in range(tries)]
    reports = run_trials(spec, configs, workers)
    solved = [r for r in reports if r.solved]
    avg_t = avg_it = None
    if solved:
        avg_t = sum(r.wall_time for r in solved) / len(solved)
        avg_it = sum(r.iterations for r in solved) / len(solved)
    return BatchResult(spec.family, spec.params, tries, len(solved), avg_t, avg_it, reports)


def table_specs(which: str, max_n: int | None = None,
                max_k: int | None = None) -> list[DesignSpec]:
    """Specs of the reference table rows, optionally filtered by size."""
    if which not in REFERENCE_ROWS:
        raise ValueError(f"unknown table {which!r}; expected dopt, dcc or cw")
    specs = []
    for params, *_ in REFERENCE_ROWS[which]:
        n = params[0]
        if max_n is not None and n > max_n:
            continue
        if which == "cw":
            if max_k is not None and params[1] > max_k:
                continue
            specs.append(spec_for("cw", n, k=params[1]))
        else:
            specs.append(spec_for(which, n, alpha=params[1], beta=params[2]))
    return specs


def reproduce_tables(which: str, scale: float = 1.0, out=None, *, tries: int = 10,
                     base_seed: int = 0, workers: int | None = None,
                     max_n: int | None = None, max_k: int | None = None) -> list[BatchResult]:
    """Rerun a reference table with a per-try limit of ``3600 * scale`` seconds."""
    time_limit = 3600.0 * scale
    results = [run_batch(spec, tries, time_limit, base_seed, workers)
               for spec in table_specs(which, max_n, max_k)]
    if out is not None:
        write_batch_csv(results, out)
    return results


def _fmt(x: float | None) -> str:
    return "--" if x is None else repr(float(x))


def write_batch_csv(results: Iterable[BatchResult], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["parameters", "solved", "avg_time_s", "avg_iterations"])
        for r in results:
            writer.writerow([r.label, r.solved, _fmt(r.avg_time_s), _fmt(r.avg_iterations)])


def read_batch_csv(path, family: str, tries: int) -> list[BatchResult]:
    """Parse a batch CSV; ``family`` and ``tries`` are not part of the file."""
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            params = tuple(int(p) for p in row["parameters"].strip("()").split(","))
            avg_t = None if row["avg_time_s"] == "--" else float(row["avg_time_s"])
            avg_it = None if row["avg_iterations"] == "--" else float(row["avg_iterations"])
            out.append(BatchResult(family, params, tries, int(row["solved"]), avg_t, avg_it))
    return out


def iteration_ratio(result: BatchResult, reference: float | None) -> float:
    """``avg_iterations / reference``, or NaN when either side is missing."""
    if result.avg_iterations is None or reference in (None, 0):
        return math.nan
    return result.avg_iterations / reference


def reference_row(which: str, params: tuple[int, ...]):
    for row in REFERENCE_ROWS[which]:
        if row[0] == tuple(params):
            return row
    raise KeyError(params)

