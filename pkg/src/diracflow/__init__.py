"""Exact flow-equation series for the energy-separating form of the Dirac
Hamiltonian, with finite matrix models as a numerical oracle."""
from .algebra import (
    Generator,
    NonConvergent,
    OperatorExpr,
    ParityMismatch,
    Word,
    anticommutator,
    beta,
    commutator,
    convolve_decay4,
    dagger,
    gen,
    integrate_s,
    kappa_slice,
    limit_s_infinity,
    mul,
    normalize,
    one,
    parity_split,
    substitute_generator,
    zero,
)
from .expoly import ExpPoly
from .grammar import ParseError, parse, render
from .series import (
    SeriesTable,
    bp_flow_series,
    hnw_series,
    hnw_time_dependent,
    kernel_coefficients,
    omega_series,
    omega_u_limit,
    omega_u_series,
    q_series,
    r_table,
)

__version__ = "0.1.0"

__all__ = [
    "ExpPoly",
    "Generator",
    "NonConvergent",
    "OperatorExpr",
    "ParityMismatch",
    "ParseError",
    "SeriesTable",
    "Word",
    "anticommutator",
    "beta",
    "bp_flow_series",
    "commutator",
    "convolve_decay4",
    "dagger",
    "gen",
    "hnw_series",
    "hnw_time_dependent",
    "integrate_s",
    "kappa_slice",
    "kernel_coefficients",
    "limit_s_infinity",
    "mul",
    "normalize",
    "omega_series",
    "omega_u_limit",
    "omega_u_series",
    "one",
    "parity_split",
    "parse",
    "q_series",
    "r_table",
    "render",
    "substitute_generator",
    "zero",
]
