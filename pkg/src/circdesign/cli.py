"""Command line entry point.

Exit codes: 0 success, 1 nothing found / verification failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys

from circdesign.constructions import (
    ConstructionError,
    cw_weight,
    double_cw,
    find_disjoint_shift,
    zero_interleave,
)
from circdesign.designs import InvalidSpecError, spec_for, verify_exact
from circdesign.harness import (
    DesignRecord,
    RecordError,
    default_workers,
    record_from_report,
    reproduce_tables,
    run_batch,
    write_records,
)
from circdesign.oracle import BudgetExceededError, enumerate_designs

EXIT_OK, EXIT_NOT_FOUND, EXIT_USAGE = 0, 1, 2


class InputError(ValueError):
    pass


def _read_designs(path: str) -> list[tuple[list[list[int]], dict | None]]:
    """Load designs from a record (JSON/JSONL) or a bare JSON array of entries."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(str(exc)) from exc
    try:
        docs = [json.loads(text)]
    except json.JSONDecodeError:
        try:
            docs = [json.loads(line) for line in text.splitlines() if line.strip()]
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: not JSON or JSONL ({exc})") from exc
    out = []
    for doc in docs:
        if isinstance(doc, dict):
            if "rows" not in doc:
                raise InputError(f"{path}: record without 'rows'")
            out.append((doc["rows"], doc))
        elif isinstance(doc, list) and doc and all(isinstance(x, int) for x in doc):
            out.append(([doc], None))
        elif isinstance(doc, list) and doc and all(isinstance(r, list) for r in doc):
            out.append((doc, None))
        else:
            raise InputError(f"{path}: expected a record, a vector or a list of vectors")
    if not out:
        raise InputError(f"{path}: no designs found")
    for rows, _ in out:
        if not rows or any(not all(isinstance(x, int) for x in r) for r in rows):
            raise InputError(f"{path}: design entries must be integers")
        if len({len(r) for r in rows}) != 1:
            raise InputError(f"{path}: members differ in length")
    return out


def _single_row(path: str) -> tuple[list[int], dict | None]:
    rows, rec = _read_designs(path)[0]
    if len(rows) != 1:
        raise InputError(f"{path}: expected a single sequence, got {len(rows)}")
    return rows[0], rec


def _spec_for_data(family, rows, rec, args):
    n = len(rows[0])
    rec = rec or {}
    if family == "cw":
        k = args.k if args.k is not None else rec.get("k")
        if k is None:
            energy = sum(x * x for x in rows[0])
            k = math.isqrt(energy)
        sign = -1 if sum(rows[0]) < 0 else 1
        return spec_for("cw", n, k=k, sign=sign)
    if len(rows) != 2:
        raise InvalidSpecError(f"{family} designs have two members, got {len(rows)}")
    alpha = args.alpha if args.alpha is not None else rec.get("alpha", sum(rows[0]))
    beta = args.beta if args.beta is not None else rec.get("beta", sum(rows[1]))
    return spec_for(family, n, alpha=alpha, beta=beta)


def cmd_search(args) -> int:
    spec = spec_for(args.family, args.n, k=args.k, alpha=args.alpha, beta=args.beta,
                    sign=args.sign)
    workers = args.workers if args.workers is not None else default_workers()
    result = run_batch(spec, args.tries, args.time_limit, args.seed, workers, args.max_iters)
    records = [record_from_report(spec, r) for r in result.reports if r.solved]
    for r in result.reports:
        print(f"seed={r.seed} {r.status} iterations={r.iterations} time={r.wall_time:.3f}s")
    print(f"{spec.family} {spec.label}: solved {result.solved}/{result.tries}")
    if args.out and records:
        write_records(records, args.out, append=True, timing=not args.no_timing)
    elif records and not args.out:
        for rec in records:
            print(rec.to_json(timing=not args.no_timing))
    return EXIT_OK if records else EXIT_NOT_FOUND


def cmd_verify(args) -> int:
    entries = _read_designs(args.file)
    failures = 0
    for i, (rows, rec) in enumerate(entries):
        family = args.family or (rec or {}).get("family")
        if family is None:
            raise InputError("--family is required for bare vectors")
        try:
            spec = _spec_for_data(family, rows, rec, args)
        except InvalidSpecError as exc:
            print(f"[{i}] FAIL: {exc}")
            failures += 1
            continue
        check = verify_exact(spec, rows)
        if check:
            print(f"[{i}] OK {spec.family} {spec.label}")
        else:
            print(f"[{i}] FAIL {spec.family} {spec.label}: {check.reason}")
            failures += 1
    return EXIT_OK if failures == 0 else EXIT_NOT_FOUND


def _emit(rec: DesignRecord, out: str | None) -> None:
    if out:
        write_records([rec], out, append=False)
    else:
        print(rec.to_json())


def cmd_construct(args) -> int:
    if args.construction == "double":
        a, _ = _single_row(args.in_a)
        b, _ = _single_row(args.in_b)
        k = args.k if args.k is not None else cw_weight(a)
        w = double_cw(a, b, k)
        lineage = {"construction": "double", "from": [args.in_a, args.in_b]}
        _emit(DesignRecord("cw", w.size, [w.tolist()], k=2 * k, lineage=lineage), args.out)
        return EXIT_OK
    if args.construction == "interleave":
        a, _ = _single_row(args.input)
        w = zero_interleave(a, args.p)
        lineage = {"construction": "interleave", "from": [args.input], "p": args.p}
        _emit(DesignRecord("cw", w.size, [w.tolist()], k=cw_weight(a), lineage=lineage),
              args.out)
        return EXIT_OK
    a, _ = _single_row(args.input)
    found = find_disjoint_shift(a)
    if found is None:
        print("no cyclic shift with disjoint support")
        return EXIT_NOT_FOUND
    t, shifted = found
    print(f"t={t}")
    if args.out:
        k = cw_weight(a)
        lineage = {"construction": "shift", "from": [args.input], "t": t}
        write_records([DesignRecord("cw", shifted.size, [shifted.tolist()], k=k,
                                    lineage=lineage)], args.out, append=False)
    else:
        print(json.dumps(shifted.tolist(), separators=(",", ":")))
    return EXIT_OK


def cmd_batch(args) -> int:
    results = reproduce_tables(args.table, args.scale, args.out, tries=args.tries,
                               base_seed=args.seed, workers=args.workers,
                               max_n=args.max_n, max_k=args.max_k)
    for r in results:
        t = "--" if r.avg_time_s is None else f"{r.avg_time_s:.2f}"
        it = "--" if r.avg_iterations is None else f"{r.avg_iterations:.1f}"
        print(f"{r.label:>12} {r.solved:>3}/{r.tries} {t:>10} {it:>12}")
    return EXIT_OK


def cmd_oracle(args) -> int:
    spec = spec_for(args.family, args.n, k=args.k, alpha=args.alpha, beta=args.beta,
                    sign=args.sign)
    designs = enumerate_designs(spec, args.limit, max_bits=args.max_bits)
    lines = []
    for e in designs:
        rec = DesignRecord(spec.family, spec.n, e.tolist())
        if spec.family == "cw":
            rec.k = spec.k
        else:
            rec.alpha, rec.beta = spec.alpha
        lines.append(rec.to_json())
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.writelines(line + "\n" for line in lines)
    else:
        for line in lines:
            print(line)
    print(f"{spec.family} {spec.label}: {len(designs)} designs", file=sys.stderr)
    return EXIT_OK if designs else EXIT_NOT_FOUND


def _family_params(p: argparse.ArgumentParser, positional: bool = False) -> None:
    if positional:
        p.add_argument("family", choices=["cw", "dopt", "dcc"])
    p.add_argument("--n", type=int, required=True, help="order")
    _param_flags(p)


def _param_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, help="CW weight root (weight k^2)")
    p.add_argument("--alpha", type=int, help="row sum of the first member (dopt/dcc)")
    p.add_argument("--beta", type=int, help="row sum of the second member (dopt/dcc)")
    p.add_argument("--sign", type=int, choices=[1, -1], default=1, help="CW row-sum sign")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="circdesign",
        description="Douglas-Rachford search for circulant combinatorial designs.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search", help="search for a design with seeded restarts")
    p.add_argument("family", choices=["cw", "dopt", "dcc"])
    p.add_argument("--n", type=int, required=True)
    _param_flags(p)
    p.add_argument("--tries", type=int, default=1)
    p.add_argument("--time-limit", type=float, default=60.0, help="seconds per try")
    p.add_argument("--max-iters", type=int)
    p.add_argument("--seed", type=int, default=0, help="seed of the first try")
    p.add_argument("--workers", type=int, help="parallel tries (default $CIRCDESIGN_WORKERS or 1)")
    p.add_argument("--out", help="append found designs to this JSONL file")
    p.add_argument("--no-timing", action="store_true",
                   help="write time_s as null so reruns are byte-identical")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("verify", help="exactly verify designs stored in a file")
    p.add_argument("--family", choices=["cw", "dopt", "dcc"])
    p.add_argument("--file", required=True)
    _param_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("construct", help="build new CW matrices from known ones")
    csub = p.add_subparsers(dest="construction", required=True)
    c = csub.add_parser("double", help="CW(n,k^2) pair with disjoint supports -> CW(2n,4k^2)")
    c.add_argument("--in-a", required=True)
    c.add_argument("--in-b", required=True)
    c.add_argument("--k", type=int)
    c.add_argument("--out")
    c = csub.add_parser("interleave", help="CW(n,k^2) -> CW(np,k^2) by zero interleaving")
    c.add_argument("--in", dest="input", required=True)
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--out")
    c = csub.add_parser("find-shift", help="smallest cyclic shift with disjoint support")
    c.add_argument("--in", dest="input", required=True)
    c.add_argument("--out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("batch", help="rerun a reference table at reduced time scale")
    p.add_argument("--table", choices=["dopt", "dcc", "cw"], required=True)
    p.add_argument("--scale", type=float, default=1 / 60, help="fraction of 3600 s per try")
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--tries", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int)
    p.add_argument("--max-n", type=int)
    p.add_argument("--max-k", type=int)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("oracle", help="exhaustive enumeration for tiny parameters")
    osub = p.add_subparsers(dest="oracle_command", required=True)
    e = osub.add_parser("enumerate")
    e.add_argument("--family", choices=["cw", "dopt", "dcc"], required=True)
    _family_params(e)
    e.add_argument("--limit", type=int)
    e.add_argument("--max-bits", type=float, default=30.0)
    e.add_argument("--out")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InvalidSpecError, ConstructionError, InputError, RecordError,
            BudgetExceededError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
