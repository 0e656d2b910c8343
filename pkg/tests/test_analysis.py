import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracsync.analysis import (
    BOUNDED_NONZERO,
    CONVERGED,
    DIVERGED_VERDICT,
    MARGINAL,
    STABLE,
    UNSTABLE,
    classify_error,
    matignon_verdict,
    proposition_audit,
    stability_report,
)
from fracsync.core import COMPLETED, DIVERGED, SolverConfig, Trajectory, mittag_leffler
from fracsync.coupling import ClosedLoopDiagonal, make_scheme, simulate_coupled, simulate_diagonal
from fracsync.errors import DomainError


@pytest.mark.parametrize(
    "lam, alpha, verdict",
    [(-1, 0.8, STABLE), (2.1, 0.9, UNSTABLE), (1j, 0.9, STABLE), (0, 0.9, MARGINAL), (1j, 1.0, MARGINAL)],
)
def test_matignon_examples(lam, alpha, verdict):
    assert matignon_verdict(lam, alpha) == verdict


def test_matignon_sector_boundary():
    alpha = 0.6
    edge = complex(math.cos(alpha * math.pi / 2), math.sin(alpha * math.pi / 2))
    assert matignon_verdict(edge, alpha) == MARGINAL
    assert matignon_verdict(edge * complex(math.cos(1e-6), math.sin(1e-6)), alpha) == STABLE
    assert matignon_verdict(edge * complex(math.cos(-1e-6), math.sin(-1e-6)), alpha) == UNSTABLE


@settings(max_examples=200)
@given(st.floats(min_value=-1e6, max_value=1e6).filter(lambda v: v != 0), st.floats(min_value=0.01, max_value=0.99))
def test_matignon_real_axis(lam, alpha):
    assert matignon_verdict(lam, alpha) == (STABLE if lam < 0 else UNSTABLE)


def test_report_overall():
    assert stability_report([-1, -2], [0.5, 0.9]).overall == STABLE
    assert stability_report([-1, 2], [0.5, 0.9]).overall == UNSTABLE
    assert stability_report([-1, 0], [0.5, 0.9]).overall == MARGINAL
    with pytest.raises(DomainError):
        stability_report([1, 2], [0.5])


def test_audit_paper_gains_unstable():
    for name in ("tt-sync", "tt-anti", "rt-sync", "rt-anti"):
        rep = proposition_audit(make_scheme(name, "paper"))
        assert rep.verdicts == (UNSTABLE, UNSTABLE, UNSTABLE)
        assert rep.overall == UNSTABLE
    assert [z.real for z in proposition_audit(make_scheme("tt-sync")).eigenvalues] == [2.1, 30.0, 0.6]
    assert [z.real for z in proposition_audit(make_scheme("rt-sync")).eigenvalues] == [2.1, 0.2, 0.6]


def test_audit_stabilized():
    assert proposition_audit(make_scheme("tt-sync", "stabilized")).overall == STABLE


def test_audit_depends_only_on_scheme():
    import inspect

    assert list(inspect.signature(proposition_audit).parameters) == ["scheme"]
    s = make_scheme("rt-anti", "paper", orders=(0.7, 0.7, 0.7))
    before = proposition_audit(s)
    simulate_coupled(s, [1.0, 2.0, 3.0], [-4.0, 0.0, 0.5], SolverConfig(0.01, 10))
    assert proposition_audit(s) == before
    # parameters do matter
    other = make_scheme("rt-anti", "paper", orders=(0.7, 0.7, 0.7), t_params={"a1": -1.0, "b1": 0.6, "c1": 30.0})
    assert proposition_audit(other).verdicts[0] == STABLE


def _traj(states, status=COMPLETED):
    states = np.asarray(states, dtype=float).reshape(len(states), -1)
    return Trajectory(np.arange(len(states)) * 0.1, states, status)


def test_classify_zero():
    c = classify_error(_traj(np.zeros((100, 3))), 1e-6)
    assert c.verdict == CONVERGED and c.tail_sup == 0.0


def test_classify_diverged_status():
    c = classify_error(_traj(np.ones((10, 3)), status=DIVERGED))
    assert c.verdict == DIVERGED_VERDICT


def test_classify_tail_fraction_domain():
    with pytest.raises(DomainError):
        classify_error(_traj(np.zeros((5, 1))), tail_fraction=0.0)
    with pytest.raises(DomainError):
        classify_error(_traj(np.zeros((5, 1))), tail_fraction=1.5)


def test_classify_growth_against_mittag_leffler():
    tr = simulate_diagonal(ClosedLoopDiagonal((2.1,), (0.9,)), [1.0], SolverConfig.from_horizon(0.005, 5.0))
    c = classify_error(tr, 1e-3)
    assert c.verdict in (BOUNDED_NONZERO, DIVERGED_VERDICT)
    assert c.tail_sup > 1.0 and c.tail_growing
    assert c.tail_sup == pytest.approx(mittag_leffler(0.9, 2.1 * 5.0**0.9), rel=1e-2)


def test_classify_stabilized_run():
    s = make_scheme("tt-sync", "stabilized")
    _, _, e = simulate_coupled(s, [0.01] * 3, [0.5] * 3, SolverConfig.from_horizon(0.005, 20.0))
    c = classify_error(e, 1e-3)
    # decay is algebraic: tail sits at 0.49 E_0.5(-15^0.5) ~ 0.069
    oracle = 0.49 * mittag_leffler(0.5, -(15.0**0.5))
    assert c.tail_sup == pytest.approx(oracle, rel=2e-2)
    assert c.verdict == BOUNDED_NONZERO
    assert classify_error(e, 0.1).verdict == CONVERGED


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=1e-3, max_value=1e3), st.floats(min_value=1e-4, max_value=1.0))
def test_classify_scale_covariant(c, tol):
    rng = np.random.default_rng(7)
    base = _traj(rng.normal(scale=0.01, size=(50, 3)))
    scaled = _traj(base.states * c)
    assert classify_error(base, tol).verdict == classify_error(scaled, tol * c).verdict


@pytest.mark.parametrize("alpha", [0.5, 0.9])
@pytest.mark.parametrize("lam", [-5.0, -2.0, -1.0, -0.3, 0.2, 0.8])
def test_criterion_agrees_with_simulation(alpha, lam):
    cfg = SolverConfig.from_horizon(0.01, 20.0)
    tr = simulate_diagonal(ClosedLoopDiagonal((lam,), (alpha,)), [1.0], cfg)
    c = classify_error(tr, 1e-2)
    if matignon_verdict(lam, alpha) == STABLE:
        assert c.tail_sup < 1.0
        with mp.workdps(300):
            z = mp.mpf(lam) * mp.mpf(15) ** alpha
            predicted = float(mp.nsum(lambda k: z**k / mp.gamma(alpha * k + 1), [0, mp.inf]))
        if predicted < 0.5e-2:
            assert c.verdict == CONVERGED
    else:
        assert c.tail_sup > 1.0
