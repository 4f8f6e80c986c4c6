"""Douglas-Rachford search on the three-set product space.

The iterate ``x`` is a ``(3, m, n)`` array, one block per constraint set.
Each step computes

    a = P_D(x)            (blockwise average, the "shadow")
    b = P_C(2a - x)       (alphabet / row-sum / spectrum projections per block)
    x <- x + b - a

The shadow is rounded onto the alphabet and checked exactly; only that exact
check ends a run successfully.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from circdesign.designs import DesignSpec, to_int_ensemble, validate, verify_exact
from circdesign.projections import Constraints, _project_autocorrelation, project_C

__all__ = [
    "SolverConfig",
    "SolveReport",
    "random_initial_state",
    "dra_step",
    "residual",
    "certify",
    "solve",
]

log = logging.getLogger(__name__)

SOLVED = "solved"
TIMEOUT = "timeout"
ITERATION_CAP = "iteration-cap"


@dataclass(frozen=True)
class SolverConfig:
    """Stopping rule and randomness of a single run.

    ``max_time`` and ``max_iters`` may each be ``None`` (unbounded) but not
    both.  ``check_interval`` is the number of iterations between exact
    certification attempts.
    """

    epsilon: float = 1e-7
    max_time: float | None = 60.0
    max_iters: int | None = None
    seed: int = 0
    check_interval: int = 1
    record_trace: bool = False

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.check_interval < 1:
            raise ValueError(f"check_interval must be >= 1, got {self.check_interval}")
        if self.max_time is None and self.max_iters is None:
            raise ValueError("set max_time, max_iters or both")
        if self.max_time is not None and self.max_time < 0:
            raise ValueError("max_time must be nonnegative")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass
class SolveReport:
    status: str
    iterations: int
    wall_time: float
    residual_final: float
    seed: int
    solution: np.ndarray | None = None
    residual_trace: list[float] = field(default_factory=list)

    @property
    def solved(self) -> bool:
        return self.status == SOLVED


def random_initial_state(spec: DesignSpec, rng: np.random.Generator) -> np.ndarray:
    """Diagonal start ``(y, y, y)`` with ``y`` uniform on ``[-1, 1]``."""
    y = rng.uniform(-1.0, 1.0, size=(spec.m, spec.n))
    return np.stack([y, y, y])


def dra_step(x: np.ndarray, constraints: Constraints) -> tuple[np.ndarray, np.ndarray]:
    """One step of the iteration; returns ``(x_next, shadow)``.

    The shadow is the common block of ``P_D(x)``.
    """
    shadow = x.mean(axis=0)
    b = project_C(2.0 * shadow - x, constraints)
    return x + b - shadow, shadow


def residual(shadow: np.ndarray, constraints: Constraints) -> float:
    """Distance between ``(P1 q, P1 q, P1 q)`` and ``(P1 q, P2 q, P3 q)``.

    Zero exactly when rounding the shadow onto the alphabet already satisfies
    the row-sum and spectrum projections.
    """
    q = np.asarray(shadow, dtype=np.float64)
    if q.ndim == 1:
        q = q[np.newaxis, :]
    p1 = constraints.alphabet.nearest(q)
    p2 = q + ((constraints.alpha - q.sum(axis=1)) / q.shape[1])[:, np.newaxis]
    p3 = _project_autocorrelation(
        q, constraints._sqrt_tau, constraints.tol_zero, constraints.tol_sym
    )
    # first term P1 q - P1 q is identically zero
    return math.sqrt(float(np.sum((p1 - p2) ** 2) + np.sum((p1 - p3) ** 2)))


def certify(shadow, spec: DesignSpec) -> np.ndarray | None:
    """Round the shadow onto the alphabet; return it as integers if it is a design."""
    q = np.asarray(shadow, dtype=np.float64)
    if q.ndim == 1:
        q = q[np.newaxis, :]
    if q.shape != (spec.m, spec.n):
        return None
    ints = to_int_ensemble(spec.alphabet.nearest(q))
    if ints is None or not verify_exact(spec, ints):
        return None
    return ints


def solve(spec: DesignSpec, cfg: SolverConfig | None = None) -> SolveReport:
    """Run one seeded trajectory until a design is certified or a limit is hit."""
    cfg = cfg or SolverConfig()
    validate(spec)
    constraints = spec.constraints
    rng = np.random.default_rng(cfg.seed)
    x = random_initial_state(spec, rng)

    start = time.perf_counter()
    deadline = None if cfg.max_time is None else start + cfg.max_time
    trace: list[float] = []
    last_rounded = None
    res = math.inf
    it = 0
    status = None
    solution = None
    while status is None:
        it += 1
        shadow = x.mean(axis=0)
        if it % cfg.check_interval == 0:
            res = residual(shadow, constraints)
            if cfg.record_trace:
                trace.append(res)
            rounded = constraints.alphabet.nearest(shadow)
            if last_rounded is None or not np.array_equal(rounded, last_rounded):
                last_rounded = rounded
                ints = to_int_ensemble(rounded)
                if ints is not None and verify_exact(spec, ints):
                    solution, status = ints, SOLVED
                    break
            elif res < cfg.epsilon:
                log.debug("residual %.3g below epsilon without a design at iteration %d", res, it)
        b = project_C(2.0 * shadow - x, constraints)
        x = x + b - shadow
        if cfg.max_iters is not None and it >= cfg.max_iters:
            status = ITERATION_CAP
        elif deadline is not None and time.perf_counter() >= deadline:
            status = TIMEOUT

    if not math.isfinite(res):
        res = residual(x.mean(axis=0), constraints)
    elapsed = time.perf_counter() - start
    log.debug("%s %s seed=%d: %s after %d iterations (%.3fs)",
              spec.family, spec.label, cfg.seed, status, it, elapsed)
    return SolveReport(status, it, elapsed, res, int(cfg.seed), solution, trace)
