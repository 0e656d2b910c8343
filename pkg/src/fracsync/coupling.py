"""Drive/response coupling with cancellation control and linear error feedback.

The response carries a control ``u = w(drive, response) + A e`` where ``w``
removes every nonlinear and cross term from the error dynamics and ``A`` is a
gain matrix. What remains is the linear error system ``D^alpha e = (L + A) e``.

Scenarios: ``tt`` couples two T systems; ``rt`` drives a T system with a
Rossler system. Modes: ``sync`` (``e = response - drive``) and ``anti``
(``e = response + drive``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .core import SolverConfig, Trajectory, abm_solve, as_orders
from .errors import ConfigurationError, DomainError
from .systems import PAPER_ORDERS, SystemDef, rossler_system, t_system

__all__ = [
    "GAIN_VARIANTS",
    "MODES",
    "SCENARIOS",
    "ClosedLoopDiagonal",
    "CouplingScheme",
    "build_control",
    "cancellation_residual",
    "closed_loop_of",
    "closed_loop_matrix",
    "gain_matrix",
    "make_scheme",
    "open_loop_matrix",
    "simulate_coupled",
    "simulate_diagonal",
]

SCENARIOS = ("tt", "rt")
MODES = ("sync", "anti")
GAIN_VARIANTS = ("paper", "corrected", "stabilized")


@dataclass(frozen=True)
class CouplingScheme:
    drive: SystemDef
    response: SystemDef
    scenario: str
    mode: str
    gains: str = "paper"
    k: Tuple[float, float, float] = (1.0, 1.0, 1.0)
    orders: Tuple[float, ...] = PAPER_ORDERS

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigurationError(f"unknown scenario {self.scenario!r}")
        if self.mode not in MODES:
            raise ConfigurationError(f"unknown mode {self.mode!r}")
        if self.gains not in GAIN_VARIANTS:
            raise ConfigurationError(f"unknown gain variant {self.gains!r}")
        if self.drive.dimension != 3 or self.response.dimension != 3:
            raise ConfigurationError("coupling needs three-dimensional drive and response")
        k = tuple(float(v) for v in self.k)
        if len(k) != 3 or not all(v > 0 for v in k):
            raise ConfigurationError(f"stabilizing gains must be 3 positive reals, got {self.k}")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "orders", tuple(as_orders(self.orders, 3).tolist()))

    @property
    def name(self) -> str:
        return f"{self.scenario}-{self.mode}"

    @property
    def sign(self) -> float:
        """``e = response + sign * drive``."""
        return -1.0 if self.mode == "sync" else 1.0

    def error(self, drive_state, response_state) -> np.ndarray:
        return np.asarray(response_state, dtype=float) + self.sign * np.asarray(drive_state, dtype=float)


def make_scheme(
    name: str,
    gains: str = "paper",
    k: Sequence[float] = (1.0, 1.0, 1.0),
    orders: Sequence[float] = PAPER_ORDERS,
    t_params=None,
    rossler_params=None,
) -> CouplingScheme:
    """Build a scheme from a name such as ``"tt-sync"`` or ``"rt-anti"``."""
    try:
        scenario, mode = name.split("-")
    except ValueError:
        raise ConfigurationError(f"scheme name must look like 'tt-sync', got {name!r}") from None
    if scenario not in SCENARIOS or mode not in MODES:
        raise ConfigurationError(
            f"unknown scheme {name!r}; choose from tt-sync, tt-anti, rt-sync, rt-anti"
        )
    response = t_system(t_params)
    drive = response if scenario == "tt" else rossler_system(rossler_params)
    return CouplingScheme(drive, response, scenario, mode, gains, tuple(k), tuple(orders))


def _params(scheme: CouplingScheme):
    p = dict(scheme.response.params)
    if scheme.scenario == "rt":
        p.update(scheme.drive.params)
    return p


def open_loop_matrix(scheme: CouplingScheme) -> np.ndarray:
    """Linear part ``L`` of the error system once the cancellation terms act."""
    p = _params(scheme)
    a1, b1, c1 = p["a1"], p["b1"], p["c1"]
    if scheme.scenario == "tt":
        return np.array([[-a1, a1, 0.0], [c1 - a1, 0.0, 0.0], [0.0, 0.0, -b1]])
    a2, c2 = p["a2"], p["c2"]
    return np.array(
        [[-a1, a1 - 1.0, -1.0], [c1 - a1 + 1.0, a2, 0.0], [0.0, 0.0, -(b1 + c2)]]
    )


def gain_matrix(scheme: CouplingScheme) -> np.ndarray:
    """Feedback matrix ``A`` in ``v = A e``.

    ``paper`` is the published matrix. For ``tt`` its first row ``[0, a1, 0]``
    does not yield the published closed loop; ``corrected`` uses
    ``[2 a1, -a1, 0]`` which does. For ``rt`` both variants coincide.
    ``stabilized`` sets ``A = -diag(k) - L`` so that ``D^alpha e_i = -k_i e_i``.
    """
    p = _params(scheme)
    a1, b1, c1 = p["a1"], p["b1"], p["c1"]
    if scheme.gains == "stabilized":
        return -np.diag(scheme.k) - open_loop_matrix(scheme)
    if scheme.scenario == "tt":
        row1 = [0.0, a1, 0.0] if scheme.gains == "paper" else [2 * a1, -a1, 0.0]
        return np.array([row1, [-(c1 - a1), c1, 0.0], [0.0, 0.0, 2 * b1]])
    c2 = p["c2"]
    return np.array(
        [[2 * a1, -(a1 - 1.0), 1.0], [-(c1 - a1 + 1.0), 0.0, 0.0], [0.0, 0.0, 2 * b1 + c2]]
    )


def closed_loop_matrix(scheme: CouplingScheme) -> np.ndarray:
    """The error system actually realised by the controller, ``L + A``."""
    return open_loop_matrix(scheme) + gain_matrix(scheme)


@dataclass(frozen=True)
class ClosedLoopDiagonal:
    """Decoupled error dynamics ``D^{alpha_i} e_i = lambda_i e_i``."""

    eigenvalues: Tuple[float, float, float]
    orders: Tuple[float, ...] = field(default=PAPER_ORDERS)

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", tuple(float(v) for v in self.eigenvalues))
        object.__setattr__(self, "orders", tuple(as_orders(self.orders, len(self.eigenvalues)).tolist()))


def closed_loop_of(scheme: CouplingScheme) -> ClosedLoopDiagonal:
    """The claimed diagonal closed loop.

    ``tt``: ``(a1, c1, b1)``; ``rt``: ``(a1, a2, b1)``; stabilized: ``-k``.
    Under ``tt``/``paper`` gains this is what is claimed, not what the
    controller realises; see :func:`cancellation_residual`.
    """
    p = _params(scheme)
    if scheme.gains == "stabilized":
        lam = tuple(-v for v in scheme.k)
    elif scheme.scenario == "tt":
        lam = (p["a1"], p["c1"], p["b1"])
    else:
        lam = (p["a1"], p["a2"], p["b1"])
    return ClosedLoopDiagonal(lam, scheme.orders)


def _cancellation(scheme: CouplingScheme, d, r) -> np.ndarray:
    p = _params(scheme)
    a1, b1, c1 = p["a1"], p["b1"], p["c1"]
    x1, y1, z1 = d
    x2, y2, z2 = r
    if scheme.scenario == "tt":
        if scheme.mode == "sync":
            return np.array([0.0, a1 * (x2 * z2 - x1 * z1), x1 * y1 - x2 * y2])
        return np.array([0.0, a1 * (x2 * z2 + x1 * z1), -x1 * y1 - x2 * y2])

    a2, b2, c2 = p["a2"], p["b2"], p["c2"]
    # the x2*z2 term cancels the response's own nonlinearity, whose coefficient is a1
    if scheme.mode == "sync":
        return np.array(
            [
                -a1 * (y1 - x1) - y2 - z2,
                -(c1 - a1) * x1 + x2 + a1 * x2 * z2 + a2 * y2,
                b2 - x2 * y2 + b1 * z1 + z1 * x1 - c2 * z2,
            ]
        )
    return np.array(
        [
            -a1 * (x1 - y1) - y2 - z2,
            (c1 - a1) * x1 + x2 + a1 * x2 * z2 + a2 * y2,
            -b2 - x2 * y2 - b1 * z1 - z1 * x1 - c2 * z2,
        ]
    )


def build_control(scheme: CouplingScheme, drive_state, response_state) -> np.ndarray:
    """Control vector ``u`` applied to the response."""
    d = np.asarray(drive_state, dtype=float)
    r = np.asarray(response_state, dtype=float)
    if d.shape != (3,) or r.shape != (3,):
        raise DomainError("drive and response states must have 3 components")
    if not (np.all(np.isfinite(d)) and np.all(np.isfinite(r))):
        raise DomainError("states must be finite")
    return _cancellation(scheme, d, r) + gain_matrix(scheme) @ scheme.error(d, r)


def cancellation_residual(scheme: CouplingScheme, drive_state, response_state, t: float = 0.0) -> np.ndarray:
    """Controlled error derivative minus the claimed diagonal field.

    Zero (to rounding) whenever the controller reproduces
    :func:`closed_loop_of`. For ``tt`` under ``paper`` gains the first
    component equals ``2 a1 (e2 - e1)``.
    """
    d = np.asarray(drive_state, dtype=float)
    r = np.asarray(response_state, dtype=float)
    e_dot = scheme.response(t, r) + build_control(scheme, d, r) + scheme.sign * scheme.drive(t, d)
    lam = np.array(closed_loop_of(scheme).eigenvalues)
    return e_dot - lam * scheme.error(d, r)


def simulate_coupled(
    scheme: CouplingScheme,
    drive_x0,
    response_x0,
    config: SolverConfig,
) -> Tuple[Trajectory, Trajectory, Trajectory]:
    """Integrate drive and controlled response as one 6-dimensional system.

    The drive evolves autonomously. Returns ``(drive, response, error)``
    trajectories sharing one grid and status.
    """
    d0 = np.asarray(drive_x0, dtype=float)
    r0 = np.asarray(response_x0, dtype=float)
    if d0.shape != (3,) or r0.shape != (3,):
        raise DomainError("initial conditions must have 3 components")
    drive, response = scheme.drive, scheme.response

    def joint(t, s):
        d, r = s[:3], s[3:]
        return np.concatenate([drive(t, d), response(t, r) + build_control(scheme, d, r)])

    orders = scheme.orders + scheme.orders
    joint_traj = abm_solve(joint, orders, np.concatenate([d0, r0]), config)
    times = joint_traj.times
    ds = joint_traj.states[:, :3].copy()
    rs = joint_traj.states[:, 3:].copy()
    es = rs + scheme.sign * ds

    def wrap(states):
        return Trajectory(times.copy(), states, joint_traj.status, joint_traj.diverged_at)

    return wrap(ds), wrap(rs), wrap(es)


def simulate_diagonal(closed: ClosedLoopDiagonal, e0, config: SolverConfig) -> Trajectory:
    """Integrate ``D^{alpha_i} e_i = lambda_i e_i``."""
    lam = np.array(closed.eigenvalues)
    e0 = np.asarray(e0, dtype=float)
    if e0.shape != lam.shape:
        raise DomainError(f"e0 must have {lam.size} components")
    return abm_solve(lambda t, e: lam * e, closed.orders, e0, config)
