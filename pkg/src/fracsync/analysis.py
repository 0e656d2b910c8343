"""Stability verdicts and empirical convergence checks for error dynamics."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .core import DIVERGED, Trajectory, as_orders
from .coupling import CouplingScheme, closed_loop_of
from .errors import DomainError

__all__ = [
    "BOUNDED_NONZERO",
    "CONVERGED",
    "DIVERGED_VERDICT",
    "MARGINAL",
    "STABLE",
    "UNSTABLE",
    "ConvergenceClassification",
    "StabilityReport",
    "classify_error",
    "matignon_verdict",
    "proposition_audit",
    "stability_report",
]

STABLE = "stable"
UNSTABLE = "unstable"
MARGINAL = "marginal"

CONVERGED = "converged-to-zero"
BOUNDED_NONZERO = "bounded-nonzero"
DIVERGED_VERDICT = "diverged"

ARG_TOL = 1e-12


def matignon_verdict(lam: complex, alpha: float) -> str:
    """Asymptotic stability of ``D^alpha e = lam e`` for ``alpha`` in (0, 1].

    Stable iff ``|arg(lam)| > alpha*pi/2``; equality (within 1e-12) and
    ``lam == 0`` are marginal.
    """
    alpha = float(alpha)
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    lam = complex(lam)
    if lam == 0:
        return MARGINAL
    gap = abs(cmath.phase(lam)) - alpha * math.pi / 2.0
    if abs(gap) <= ARG_TOL:
        return MARGINAL
    return STABLE if gap > 0 else UNSTABLE


@dataclass(frozen=True)
class StabilityReport:
    eigenvalues: Tuple[complex, ...]
    orders: Tuple[float, ...]
    verdicts: Tuple[str, ...]

    @property
    def overall(self) -> str:
        if all(v == STABLE for v in self.verdicts):
            return STABLE
        return UNSTABLE if UNSTABLE in self.verdicts else MARGINAL

    def as_dict(self) -> dict:
        def num(z):
            z = complex(z)
            return z.real if z.imag == 0 else str(z)

        return {
            "components": [
                {"lambda": num(lam), "alpha": a, "verdict": v}
                for lam, a, v in zip(self.eigenvalues, self.orders, self.verdicts)
            ],
            "overall": self.overall,
        }


def stability_report(eigenvalues, orders) -> StabilityReport:
    eigenvalues = tuple(complex(v) for v in eigenvalues)
    if len(eigenvalues) != len(orders):
        raise DomainError(
            f"got {len(eigenvalues)} eigenvalues but {len(orders)} orders"
        )
    orders = tuple(as_orders(orders).tolist())
    verdicts = tuple(matignon_verdict(lam, a) for lam, a in zip(eigenvalues, orders))
    return StabilityReport(eigenvalues, orders, verdicts)


def proposition_audit(scheme: CouplingScheme) -> StabilityReport:
    """Stability of the claimed closed loop of ``scheme``.

    Depends only on the scheme (scenario, gains, parameters, orders), never
    on initial conditions. With the published gains every eigenvalue is
    positive and the verdict is unstable.
    """
    closed = closed_loop_of(scheme)
    return stability_report(closed.eigenvalues, closed.orders)


@dataclass(frozen=True)
class ConvergenceClassification:
    verdict: str
    tail_sup: float
    tolerance: float
    tail_fraction: float
    tail_growing: bool
    status: str

    @property
    def converged(self) -> bool:
        return self.verdict == CONVERGED


def classify_error(
    traj: Trajectory,
    tolerance: float = 1e-3,
    tail_fraction: float = 0.25,
    divergence_threshold: float = 1e12,
) -> ConvergenceClassification:
    """Classify an error trajectory by the sup-norm over its final stretch.

    The tail is the last ``tail_fraction`` of the stored grid points.
    ``tail_growing`` is true when the max-norm rises strictly at every tail
    step.
    """
    if not (0.0 < tail_fraction <= 1.0):
        raise DomainError(f"tail_fraction must lie in (0, 1], got {tail_fraction}")
    if len(traj) == 0:
        raise DomainError("cannot classify an empty trajectory")
    n = len(traj)
    start = min(n - 1, int(math.floor((1.0 - tail_fraction) * (n - 1))))
    norms = np.max(np.abs(traj.states[start:]), axis=1)
    tail_sup = float(np.max(norms))
    growing = bool(norms.size > 1 and np.all(np.diff(norms) > 0))

    if traj.status == DIVERGED or not math.isfinite(tail_sup) or tail_sup > divergence_threshold:
        verdict = DIVERGED_VERDICT
    elif tail_sup < tolerance:
        verdict = CONVERGED
    else:
        verdict = BOUNDED_NONZERO
    return ConvergenceClassification(verdict, tail_sup, tolerance, tail_fraction, growing, traj.status)
