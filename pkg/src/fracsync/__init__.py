"""Fractional-order chaotic systems: simulation, synchronization, stability and a chaotic stream cipher."""

__version__ = "0.1.0"

from .analysis import classify_error, matignon_verdict, proposition_audit, stability_report
from .cipher import CipherSession, ExplicitKeys, SeededKeys, TrajectoryKeys, get_codec, secure_exchange
from .core import SolverConfig, Trajectory, abm_solve, gamma_fn, mittag_leffler, rl_integral
from .coupling import (
    build_control,
    cancellation_residual,
    closed_loop_of,
    make_scheme,
    simulate_coupled,
    simulate_diagonal,
)
from .systems import registry_lookup, rossler_system, t_system
