"""One test per acceptance criterion; each records a PASS/FAIL line for the summary."""

import time

import numpy as np
import pytest

from circdesign.constructions import double_cw, find_disjoint_shift, zero_interleave
from circdesign.core import autocorrelation_sum, periodic_correlation
from circdesign.designs import (
    build_dcc_hadamard,
    build_dopt_matrix,
    cw_spec,
    dcc_spec,
    dopt_row_sums,
    dopt_spec,
    ehlich_bound,
    exact_determinant,
    verify_exact,
)
from circdesign.harness import iteration_ratio, record_from_report, reference_row, run_batch, write_records
from circdesign.oracle import enumerate_designs, solver_soundness_check
from circdesign.projections import project_alphabet, project_autocorrelation, project_rowsum
from circdesign.solver import SolverConfig, solve
from circdesign.spectral import dft, idft
from conftest import ACCEPTANCE_LINES


def _report(num, name, failures, detail=""):
    ok = not failures
    line = f"C{num} {'PASS' if ok else 'FAIL'} {name}"
    if detail:
        line += f" ({detail})"
    if failures:
        line += ": " + "; ".join(failures[:5])
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_c1_golden_vectors(golden):
    start = time.perf_counter()
    cases = [
        ("CW(13,9)", cw_spec(13, 3), [golden["cw13"]]),
        ("DOPT n=9", dopt_spec(9, 3, 5), [golden["dopt9_a"], golden["dopt9_b"]]),
        ("DCC n=9", dcc_spec(9, int(golden["dcc9_a"].sum()), int(golden["dcc9_b"].sum())),
         [golden["dcc9_a"], golden["dcc9_b"]]),
        ("CW(63,16) a", cw_spec(63, 4), [golden["cw63_a"]]),
        ("CW(63,16) b", cw_spec(63, 4), [golden["cw63_b"]]),
        ("CW(126,64) w", cw_spec(126, 8), [golden["cw126_w"]]),
        ("CW(99,25) a", cw_spec(99, 5), [golden["cw99_a"]]),
        ("CW(99,25) b", cw_spec(99, 5), [golden["cw99_b"]]),
        ("CW(198,100) w", cw_spec(198, 10), [golden["cw198_w"]]),
        ("CW(28,16)", cw_spec(28, 4), [golden["cw28_a"]]),
        ("CW(196,16)", cw_spec(196, 4), [golden["cw196_w"]]),
    ]
    failures = [f"{name}: {check.reason}" for name, spec, rows in cases
                if not (check := verify_exact(spec, rows))]
    elapsed = time.perf_counter() - start
    if elapsed >= 1.0:
        failures.append(f"took {elapsed:.2f}s")
    _report(1, "golden-vector verification", failures, f"{len(cases)} designs, {elapsed:.3f}s")


def test_c2_construction_fidelity(golden):
    failures = []
    for a, k, w in [("cw63_a", 4, "cw126_w"), ("cw99_a", 5, "cw198_w")]:
        t, b = find_disjoint_shift(golden[a])
        if not np.array_equal(double_cw(golden[a], b, k), golden[w]):
            failures.append(f"double_cw({a}) != {w}")
        if not np.array_equal(double_cw(golden[a], golden[a.replace("_a", "_b")], k), golden[w]):
            failures.append(f"double_cw on stored pair != {w}")
    if not np.array_equal(zero_interleave(golden["cw28_a"], 7), golden["cw196_w"]):
        failures.append("zero_interleave(cw28, 7) != cw196")
    _report(2, "construction fidelity", failures)


C3_ROWS = ([("cw", cw_spec(13, 3))]
           + [("dopt", dopt_spec(n, a, b)) for n, a, b in [(3, 1, 3), (5, 3, 3), (9, 3, 5)]]
           + [("dcc", dcc_spec(n)) for n in range(1, 16, 2)])


@pytest.mark.slow
def test_c3_solver_success():
    failures, details = [], []
    for table, spec in C3_ROWS:
        res = run_batch(spec, tries=10, time_limit=60.0, base_seed=0)
        ref = reference_row(table, spec.params)[3]
        ratio = iteration_ratio(res, ref)
        details.append(f"{table}{res.label} {res.solved}/10 it={res.avg_iterations}")
        if res.solved < 8:
            failures.append(f"{table}{res.label} solved {res.solved}/10")
        elif not 0.01 <= ratio <= 100:
            failures.append(f"{table}{res.label} iteration ratio {ratio:.3g}")
    print("\n".join(details))
    _report(3, "solver success at desk scale", failures, f"{len(C3_ROWS)} rows")


def _same(xs, ys):
    return len(xs) == len(ys) and all(np.array_equal(x, y) for x, y in zip(xs, ys))


def test_c4_oracle_equivalence():
    failures = []
    for spec in [dcc_spec(5), dopt_spec(3, 1, 3), cw_spec(7, 2)]:
        try:
            rep = solver_soundness_check(spec, trials=10, cfg=SolverConfig(max_time=60.0))
        except AssertionError as exc:
            failures.append(str(exc))
            continue
        if rep.solved == 0:
            failures.append(f"{spec.family}{spec.label}: no solutions to compare")
        if not _same(enumerate_designs(spec), enumerate_designs(spec, prune=False)):
            failures.append(f"{spec.family}{spec.label}: pruned != unpruned")
    _report(4, "oracle equivalence", failures)


def test_c5_spectral_suite(golden):
    rng = np.random.default_rng(5)
    failures = []
    for n in (13, 63, 99, 128):
        for _ in range(100):
            a = rng.uniform(-1, 1, n)
            z = dft(a)
            if abs(np.linalg.norm(z) - np.linalg.norm(a)) > 1e-10:
                failures.append(f"isometry n={n}")
            if np.max(np.abs(idft(z) - a)) > 1e-10:
                failures.append(f"round-trip n={n}")
            corr = periodic_correlation(a, a)
            if np.max(np.abs(np.abs(z) ** 2 - dft(corr) / np.sqrt(n))) > 1e-9:
                failures.append(f"correlation theorem n={n}")
    flat = np.abs(dft(golden["cw13"])) ** 2
    if np.max(np.abs(flat - 9 / 13)) > 1e-9:
        failures.append("CW(13,9) spectrum not flat at 9/13")
    _report(5, "spectral suite", sorted(set(failures)), "400 sequences")


def _random_member(spec, rng):
    """A random point of the autocorrelation set built directly in the frequency domain."""
    n, m, tau = spec.n, spec.m, spec.tau
    w = rng.dirichlet(np.ones(m), size=n).T  # split of each tau_s among members
    w = (w + np.roll(w[:, ::-1], 1, axis=1)) / 2  # same split at s and n - s
    phase = rng.uniform(0, 2 * np.pi, size=(m, n))
    phase = (phase - np.roll(phase[:, ::-1], 1, axis=1)) / 2  # odd phase -> real sequence
    if n % 2 == 0:
        phase[:, n // 2] = rng.choice([0.0, np.pi], size=m)
    phase[:, 0] = rng.choice([0.0, np.pi], size=m)
    z = np.sqrt(w * tau) * np.exp(1j * phase)
    return np.real(idft(z, axis=1))


def test_c6_projector_suite():
    rng = np.random.default_rng(6)
    tol = 1e-8
    failures = []
    for spec in [cw_spec(13, 3), dopt_spec(9, 3, 5), dcc_spec(9)]:
        c = spec.constraints
        shape = (spec.m, spec.n)
        for _ in range(100):
            x = rng.normal(scale=2.0, size=shape)
            pa = project_alphabet(x, c.alphabet)
            if not c.alphabet.contains(pa):
                failures.append("alphabet membership")
            if not np.array_equal(project_alphabet(pa, c.alphabet), pa):
                failures.append("alphabet idempotence")
            pr = project_rowsum(x, c.alpha)
            if np.max(np.abs(pr.sum(axis=1) - c.alpha)) > tol:
                failures.append("rowsum membership")
            if np.max(np.abs(project_rowsum(pr, c.alpha) - pr)) > tol:
                failures.append("rowsum idempotence")
            feasible = x - ((x.sum(axis=1) - c.alpha) / spec.n)[:, None]
            if np.max(np.abs(project_rowsum(feasible, c.alpha) - feasible)) > tol:
                failures.append("rowsum fixed point")
            pc = project_autocorrelation(x, c.tau)
            if np.max(np.abs(autocorrelation_sum(pc) - np.asarray(spec.v))) > tol:
                failures.append("autocorrelation membership")
            if np.max(np.abs(project_autocorrelation(pc, c.tau) - pc)) > tol:
                failures.append("autocorrelation idempotence")
            member = _random_member(spec, rng)
            if np.max(np.abs(autocorrelation_sum(member) - np.asarray(spec.v))) > tol:
                failures.append("random member construction")
            if np.max(np.abs(project_autocorrelation(member, c.tau) - member)) > tol:
                failures.append("autocorrelation fixed point")
    _report(6, "projector suite", sorted(set(failures)), "3 specs x 100 inputs per property")


def test_c7_matrix_certificates(golden):
    failures = []
    for n in (3, 5, 7, 9):
        alpha, beta = dopt_row_sums(n)[0]
        r = solve(dopt_spec(n, alpha, beta), SolverConfig(max_time=60.0, seed=0))
        if not r.solved:
            failures.append(f"DOPT n={n}: no design found")
            continue
        det = exact_determinant(build_dopt_matrix(*r.solution))
        if abs(det) != ehlich_bound(n):
            failures.append(f"DOPT n={n}: |det|={abs(det)} != {ehlich_bound(n)}")
    if abs(exact_determinant(build_dopt_matrix(golden["dopt9_a"], golden["dopt9_b"]))) != ehlich_bound(9):
        failures.append("stored DOPT n=9 pair misses the bound")
    for n in range(1, 10, 2):
        r = solve(dcc_spec(n), SolverConfig(max_time=60.0, seed=0))
        if not r.solved:
            failures.append(f"DCC n={n}: no design found")
            continue
        H = build_dcc_hadamard(*r.solution)
        if not np.array_equal(H @ H.T, (2 * n + 2) * np.eye(2 * n + 2, dtype=np.int64)):
            failures.append(f"DCC n={n}: HH^T != (2n+2)I")
    _report(7, "matrix certificates", failures)


def test_c8_reproducibility(tmp_path):
    failures = []
    for spec in [cw_spec(13, 3), dcc_spec(11), dopt_spec(9, 3, 5)]:
        blobs = []
        for run, workers in [("a", 1), ("b", 1), ("c", 8)]:
            res = run_batch(spec, tries=4, time_limit=60.0, base_seed=7, workers=workers)
            path = tmp_path / f"{spec.family}{spec.n}_{run}.jsonl"
            write_records([record_from_report(spec, r) for r in res.reports if r.solved],
                          path, append=False, timing=False)
            blobs.append(path.read_bytes())
        if not blobs[0]:
            failures.append(f"{spec.family}{spec.label}: nothing solved")
        if blobs[0] != blobs[1]:
            failures.append(f"{spec.family}{spec.label}: two runs differ")
        if blobs[0] != blobs[2]:
            failures.append(f"{spec.family}{spec.label}: workers 1 vs 8 differ")
    _report(8, "reproducibility", failures)
