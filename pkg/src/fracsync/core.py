"""Numerical substrate for Caputo-type systems.

Gamma function, a Mittag-Leffler series, a Riemann-Liouville quadrature and the
fractional Adams-Bashforth-Moulton predictor-corrector for systems whose
components carry individual orders in (0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.signal import fftconvolve

from .errors import ConvergenceError, DomainError, NumericError

__all__ = [
    "COMPLETED",
    "DIVERGED",
    "SolverConfig",
    "Trajectory",
    "abm_solve",
    "as_orders",
    "corrector_weights",
    "gamma_fn",
    "mittag_leffler",
    "predictor_weights",
    "rl_integral",
]

COMPLETED = "completed"
DIVERGED = "diverged"

VectorField = Callable[[float, np.ndarray], np.ndarray]

ML_MAX_TERMS = 10_000
ML_REL_TOL = 1e-16


def gamma_fn(x: float) -> float:
    """Gamma function for positive finite arguments."""
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"gamma_fn requires a positive finite argument, got {x!r}")
    return math.gamma(x)


def mittag_leffler(alpha: float, z: float) -> float:
    """One-parameter Mittag-Leffler function ``E_alpha(z)`` by direct series.

    Terms are formed in log space so that ``Gamma(alpha*k + 1)`` never
    overflows. Summation stops once a term drops below ``1e-16`` relative to
    the partial sum.

    Raises
    ------
    ConvergenceError
        If the series has not converged after 10,000 terms. Large negative
        arguments also lose accuracy to cancellation well before that;
        keep ``|z|`` moderate.
    """
    alpha = float(alpha)
    z = float(z)
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    if not math.isfinite(z):
        raise DomainError(f"z must be finite, got {z}")
    if z == 0.0:
        return 1.0

    logz = math.log(abs(z))
    negative = z < 0.0
    terms = [1.0]
    total = 1.0
    prev = 1.0
    for k in range(1, ML_MAX_TERMS):
        log_mag = k * logz - math.lgamma(alpha * k + 1.0)
        if log_mag > 700.0:
            raise ConvergenceError(
                f"Mittag-Leffler series terms overflow for alpha={alpha}, z={z}; reduce |z|"
            )
        mag = math.exp(log_mag)
        term = -mag if negative and k % 2 else mag
        terms.append(term)
        total += term
        # term magnitudes are unimodal in k; only stop on the decreasing side
        if mag < prev and mag <= ML_REL_TOL * abs(total):
            return math.fsum(terms)
        prev = mag
    raise ConvergenceError(
        f"Mittag-Leffler series for alpha={alpha}, z={z} did not converge in {ML_MAX_TERMS} terms"
    )


def predictor_weights(alpha: float, n_max: int) -> np.ndarray:
    """Unscaled product-rectangle weights ``(m+1)^a - m^a`` for ``m = 0..n_max``."""
    m = np.arange(n_max + 1, dtype=float)
    return (m + 1.0) ** alpha - m**alpha


def corrector_weights(alpha: float, n: int) -> np.ndarray:
    """Unscaled product-trapezoid weights ``a_{j,n+1}`` for ``j = 0..n``.

    Multiply by ``h^alpha / Gamma(alpha + 2)`` to obtain the quadrature
    weights; the weight of the new point ``j = n+1`` is 1.
    """
    a1 = alpha + 1.0
    w = np.empty(n + 1)
    w[0] = n**a1 - (n - alpha) * (n + 1.0) ** alpha
    if n >= 1:
        m = (n - np.arange(1, n + 1)).astype(float)
        w[1:] = (m + 2.0) ** a1 + m**a1 - 2.0 * (m + 1.0) ** a1
    return w


def rl_integral(beta: float, samples: Sequence[float], step_h: float) -> np.ndarray:
    """Riemann-Liouville integral of order ``beta`` of uniformly sampled data.

    Product-rectangle rule with left-endpoint samples, i.e. the same weights
    the ABM predictor uses::

        I^beta x(t_n) ~ h^beta / Gamma(beta+1) * sum_{j<n} ((n-j)^beta - (n-j-1)^beta) x_j

    The convolution is evaluated with an FFT so that fine grids stay cheap.
    """
    beta = float(beta)
    if not (beta > 0.0 and math.isfinite(beta)):
        raise DomainError(f"beta must be positive, got {beta}")
    if step_h <= 0.0:
        raise DomainError(f"step_h must be positive, got {step_h}")
    x = np.asarray(samples, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise DomainError("rl_integral needs a non-empty 1-D series")
    n = x.size
    out = np.zeros(n)
    if n == 1:
        return out
    w = predictor_weights(beta, n - 2)
    conv = fftconvolve(x[:-1], w)[: n - 1]
    out[1:] = step_h**beta / gamma_fn(beta + 1.0) * conv
    return out


def as_orders(orders: Sequence[float], dimension: Optional[int] = None) -> np.ndarray:
    """Validate a vector of fractional orders, one per component, each in (0, 1]."""
    alpha = np.atleast_1d(np.asarray(orders, dtype=float))
    if alpha.ndim != 1 or alpha.size == 0:
        raise DomainError("orders must be a non-empty vector")
    if not np.all((alpha > 0.0) & (alpha <= 1.0)):
        raise DomainError(f"every order must lie in (0, 1], got {alpha.tolist()}")
    if dimension is not None and alpha.size != dimension:
        raise DomainError(f"expected {dimension} orders, got {alpha.size}")
    return alpha


@dataclass(frozen=True)
class SolverConfig:
    """Fixed-step settings for :func:`abm_solve`.

    ``memory_window`` truncates the history convolution to the most recent
    steps (short-memory principle). ``None`` keeps the full history.
    """

    step_h: float
    n_steps: int
    corrector_sweeps: int = 1
    divergence_threshold: float = 1e12
    memory_window: Optional[int] = None

    def __post_init__(self):
        if not (self.step_h > 0.0 and math.isfinite(self.step_h)):
            raise DomainError(f"step_h must be positive and finite, got {self.step_h}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise DomainError(f"n_steps must be a positive integer, got {self.n_steps}")
        if int(self.corrector_sweeps) != self.corrector_sweeps or self.corrector_sweeps < 1:
            raise DomainError("corrector_sweeps must be >= 1")
        if not self.divergence_threshold > 0.0:
            raise DomainError("divergence_threshold must be positive")
        if self.memory_window is not None and self.memory_window < 1:
            raise DomainError("memory_window must be >= 1 when given")

    @classmethod
    def from_horizon(cls, step_h: float, t_end: float, **kwargs) -> "SolverConfig":
        if not t_end > 0.0:
            raise DomainError(f"horizon must be positive, got {t_end}")
        return cls(step_h=step_h, n_steps=max(1, int(round(t_end / step_h))), **kwargs)

    @property
    def horizon(self) -> float:
        return self.step_h * self.n_steps


@dataclass(frozen=True)
class Trajectory:
    """Solver output on the grid ``t_j = j*h``.

    ``states`` has one row per stored grid point. A diverged run keeps only the
    rows before the first state whose norm crossed the threshold, and
    ``diverged_at`` holds that step index.
    """

    times: np.ndarray
    states: np.ndarray
    status: str = COMPLETED
    diverged_at: Optional[int] = None

    def __post_init__(self):
        self.times.setflags(write=False)
        self.states.setflags(write=False)

    @property
    def completed(self) -> bool:
        return self.status == COMPLETED

    @property
    def dimension(self) -> int:
        return self.states.shape[1]

    def __len__(self):
        return self.times.shape[0]

    def component(self, i: int) -> np.ndarray:
        return self.states[:, i]


def abm_solve(
    field: VectorField,
    orders: Sequence[float],
    x0: Sequence[float],
    config: SolverConfig,
) -> Trajectory:
    """Integrate ``D^{alpha_i} x_i = f_i(t, x)`` with the fractional ABM scheme.

    Every component keeps its own order and hence its own weight sequences;
    the history convolution is done for all components at once.

    Returns a :class:`Trajectory`; crossing ``config.divergence_threshold`` (or
    overflowing) ends the run with status ``"diverged"`` rather than raising.

    Raises
    ------
    NumericError
        If the field returns NaN; ``err.step`` is the offending step.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float)).copy()
    d = x0.size
    alpha = as_orders(orders, d)
    if not np.all(np.isfinite(x0)):
        raise DomainError("initial condition must be finite")
    h = float(config.step_h)
    N = int(config.n_steps)
    window = config.memory_window
    threshold = config.divergence_threshold

    # b[m] = (m+1)^a - m^a ; c[m] = (m+2)^{a+1} + m^{a+1} - 2(m+1)^{a+1}
    m = np.arange(N + 1, dtype=float)[:, None]
    b = (m + 1.0) ** alpha - m**alpha
    a1 = alpha + 1.0
    c = (m + 2.0) ** a1 + m**a1 - 2.0 * (m + 1.0) ** a1
    pred_scale = np.array([h**a / math.gamma(a + 1.0) for a in alpha])
    corr_scale = np.array([h**a / math.gamma(a + 2.0) for a in alpha])

    times = h * np.arange(N + 1)
    X = np.empty((N + 1, d))
    F = np.empty((N + 1, d))
    X[0] = x0

    def evaluate(t, x, step):
        fx = np.asarray(field(t, x), dtype=float)
        if fx.shape != (d,):
            raise DomainError(f"field returned shape {fx.shape}, expected ({d},)")
        if np.isnan(fx).any():
            raise NumericError(f"vector field produced NaN at step {step} (t={t})", step=step)
        return fx

    def diverged(x):
        return not np.all(np.isfinite(x)) or np.max(np.abs(x)) > threshold

    F[0] = evaluate(times[0], x0, 0)
    for n in range(N):
        lo = 0 if window is None else max(0, n + 1 - window)
        pred_hist = np.einsum("jd,jd->d", b[n - lo :: -1], F[lo : n + 1])
        xp = x0 + pred_scale * pred_hist

        # j = 0 carries the boundary weight; it leaves the window once lo > 0
        corr_hist = np.zeros(d)
        if lo == 0:
            corr_hist += (n**a1 - (n - alpha) * (n + 1.0) ** alpha) * F[0]
        j0 = max(lo, 1)
        if j0 <= n:
            corr_hist += np.einsum("jd,jd->d", c[n - j0 :: -1], F[j0 : n + 1])

        t_next = times[n + 1]
        x_next = xp
        for _ in range(config.corrector_sweeps):
            if diverged(x_next):
                break
            x_next = x0 + corr_scale * (evaluate(t_next, x_next, n + 1) + corr_hist)

        if diverged(x_next):
            return Trajectory(
                times=times[: n + 1].copy(),
                states=X[: n + 1].copy(),
                status=DIVERGED,
                diverged_at=n + 1,
            )
        X[n + 1] = x_next
        fx = evaluate(t_next, x_next, n + 1)
        if not np.all(np.isfinite(fx)):
            return Trajectory(
                times=times[: n + 1].copy(),
                states=X[: n + 1].copy(),
                status=DIVERGED,
                diverged_at=n + 1,
            )
        F[n + 1] = fx

    return Trajectory(times=times, states=X, status=COMPLETED)
