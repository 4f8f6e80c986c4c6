"""Douglas-Rachford search for circulant combinatorial designs.

Circulant weighing matrices, D-optimal designs of circulant type and Hadamard
matrices with two circulant cores are all described by sequences whose
periodic autocorrelations sum to a prescribed vector.  This package finds such
sequences with a projection algorithm, certifies them in exact integer
arithmetic and grows new designs from known ones.
"""

from circdesign.core import (
    autocorrelation_sum,
    check_power_sum_condition,
    cyclic_shift,
    periodic_correlation,
    row_sum,
    support,
)
from circdesign.designs import (
    DesignSpec,
    circulant,
    cw_spec,
    dcc_spec,
    dopt_row_sums,
    dopt_spec,
    verify_exact,
)
from circdesign.solver import SolveReport, SolverConfig, solve

__all__ = [
    "DesignSpec",
    "SolveReport",
    "SolverConfig",
    "autocorrelation_sum",
    "check_power_sum_condition",
    "circulant",
    "cw_spec",
    "cyclic_shift",
    "dcc_spec",
    "dopt_row_sums",
    "dopt_spec",
    "periodic_correlation",
    "row_sum",
    "solve",
    "support",
    "verify_exact",
]

__version__ = "0.1.0"
