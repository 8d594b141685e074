"""Guessing, reconstruction and factorization of linear differential operators
from truncated power series, working modulo primes first."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .modarith import QQ, PrimeContext, default_primes, prime_family, rational_reconstruct  # noqa: F401
from .series import TruncSeries, ParametricSeries, apply_operator, series_from_ode  # noqa: F401
from .diffop import (  # noqa: F401
    DDW,
    THETA,
    DiffOperator,
    Point,
    adjoint,
    classify_singularity,
    formal_log_solutions,
    local_exponents,
    multiply,
    p_curvature,
    right_divide,
    symmetric_power,
)
from .guess import apparent_degree, fit_ode_formula, guess_ode, infer_minimal_order  # noqa: F401
from .factor import alpha_sweep, factorize, frobenius_family, infer_scheme  # noqa: F401
from .elliptic import ansatz_solve, elliptic_series, verify_membership  # noqa: F401
from .multiprime import reconstruct_from_operators, reconstruct_operator  # noqa: F401
