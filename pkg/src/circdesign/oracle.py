"""Exhaustive enumeration of tiny designs, used as ground truth for the solver."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from circdesign.designs import DesignSpec, verify_exact
from circdesign.solver import SolverConfig, solve

__all__ = [
    "BudgetExceededError",
    "SoundnessError",
    "SoundnessReport",
    "search_bits",
    "enumerate_designs",
    "solver_soundness_check",
]

MAX_BITS = 30


class BudgetExceededError(ValueError):
    """The search space is larger than the configured budget."""


class SoundnessError(AssertionError):
    """The solver returned something the oracle does not know about."""


def search_bits(spec: DesignSpec) -> float:
    """``log2`` of the raw search-space size."""
    return sum(
        math.log2(spec.alphabet.values(j, s).size)
        for j in range(spec.m)
        for s in range(spec.n)
    )


def _candidates(spec: DesignSpec) -> list[list[int]]:
    out = []
    for j in range(spec.m):
        for s in range(spec.n):
            vals = spec.alphabet.values(j, s)
            if not np.all(vals == np.round(vals)):
                raise ValueError("oracle enumeration needs an integer alphabet")
            out.append([int(x) for x in vals])
    return out


def enumerate_designs(
    spec: DesignSpec,
    limit: int | None = None,
    *,
    prune: bool = True,
    max_bits: float = MAX_BITS,
) -> list[np.ndarray]:
    """All designs for ``spec`` in lexicographic order, as ``(m, n)`` int arrays.

    Entries are ordered member by member, each alphabet ascending.  With
    ``prune`` the search cuts branches whose partial row sums or partial
    energy can no longer reach the targets; both cuts are exact bounds.
    """
    bits = search_bits(spec)
    if bits > max_bits:
        raise BudgetExceededError(
            f"search space 2^{bits:.1f} exceeds the budget 2^{max_bits}"
        )
    cands = _candidates(spec)
    m, n = spec.m, spec.n
    found: list[np.ndarray] = []

    if not prune:
        for flat in itertools.product(*cands):
            e = np.array(flat, dtype=np.int64).reshape(m, n)
            if verify_exact(spec, e):
                found.append(e)
                if limit is not None and len(found) >= limit:
                    break
        return found

    total = m * n
    # bounds on what the positions after index i can still contribute
    rest_min = [0] * (total + 1)
    rest_max = [0] * (total + 1)
    rest_emin = [0] * (total + 1)
    rest_emax = [0] * (total + 1)
    for i in range(total - 1, -1, -1):
        c = cands[i]
        sq = [x * x for x in c]
        last_of_member = (i + 1) % n == 0
        rest_min[i] = min(c) + (0 if last_of_member else rest_min[i + 1])
        rest_max[i] = max(c) + (0 if last_of_member else rest_max[i + 1])
        rest_emin[i] = min(sq) + rest_emin[i + 1]
        rest_emax[i] = max(sq) + rest_emax[i + 1]
    alpha = spec.alpha
    v0 = spec.v[0]
    flat = [0] * total

    def search(i: int, row_partial: int, energy: int) -> bool:
        if i == total:
            e = np.array(flat, dtype=np.int64).reshape(m, n)
            if verify_exact(spec, e):
                found.append(e)
                return limit is not None and len(found) >= limit
            return False
        j, s = divmod(i, n)
        if s == 0:
            row_partial = 0
        for x in cands[i]:
            ps = row_partial + x
            en = energy + x * x
            if s == n - 1:
                if ps != alpha[j]:
                    continue
            elif not rest_min[i + 1] <= alpha[j] - ps <= rest_max[i + 1]:
                continue
            if not rest_emin[i + 1] <= v0 - en <= rest_emax[i + 1]:
                continue
            flat[i] = x
            if search(i + 1, ps, en):
                return True
        return False

    search(0, 0, 0)
    return found


@dataclass
class SoundnessReport:
    trials: int
    solved: int
    oracle_size: int
    solutions: list[np.ndarray] = field(default_factory=list)


def solver_soundness_check(
    spec: DesignSpec, trials: int = 10, cfg: SolverConfig | None = None
) -> SoundnessReport:
    """Run ``trials`` seeded solves and check each solution is in the oracle set.

    Seeds are ``cfg.seed + i``.  Raises :class:`SoundnessError` on any
    solution the enumeration does not contain.
    """
    cfg = cfg or SolverConfig(max_time=60.0)
    known = {e.tobytes() for e in enumerate_designs(spec)}
    report = SoundnessReport(trials, 0, len(known))
    for i in range(trials):
        trial_cfg = SolverConfig(
            epsilon=cfg.epsilon,
            max_time=cfg.max_time,
            max_iters=cfg.max_iters,
            seed=cfg.seed + i,
            check_interval=cfg.check_interval,
        )
        result = solve(spec, trial_cfg)
        if not result.solved:
            continue
        sol = result.solution.astype(np.int64)
        if sol.tobytes() not in known:
            raise SoundnessError(
                f"seed {trial_cfg.seed} returned {sol.tolist()}, not in the oracle set"
            )
        report.solved += 1
        report.solutions.append(sol)
    return report
