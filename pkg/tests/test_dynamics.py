import math

import numpy as np
import pytest

from superint_lab.dynamics import (
    ABORTED,
    COMPLETED,
    IntegratorConfig,
    drift_report,
    force,
    integrate,
    step_jacobian,
    write_trajectory_csv,
)
from superint_lab.exceptions import DomainError, SingularityError
from superint_lab.geometry import CylindricalChart, PhasePoint
from superint_lab.integrals import integral_set
from superint_lab.observables import symplectic_form
from superint_lab.potentials import Angular3, Calogero


@pytest.fixture
def ttw_state():
    """r = 1 on the bisector of the sector, slow momenta."""
    point = CylindricalChart().inverse(PhasePoint("cylindrical3", [1.0, math.pi / 6, 0.0], [0.1, 0.05, 0.2]))
    return point.q, point.p


@pytest.mark.parametrize(
    "kwargs",
    [{"dt": 0.0}, {"dt": math.inf}, {"steps": -1}, {"method": "euler"}, {"guard_radius": 0.0}, {"log_every": 0}],
)
def test_integrator_config_validation(kwargs):
    with pytest.raises(DomainError):
        IntegratorConfig(**kwargs)


def test_integrator_config_from_settings(settings):
    settings.SUPERINT_INTEGRATOR = {"dt": 5e-4, "max_force": 10.0}
    cfg = IntegratorConfig.from_settings(steps=10)
    assert cfg.dt == 5e-4
    assert cfg.max_force == 10.0
    assert cfg.steps == 10
    assert cfg.guard_radius == 1e-6


def test_force_is_minus_gradient():
    spec = Calogero(1.0, 1.0, 1.0)
    x = np.array([0.0, 1.0, 3.0])
    assert force(spec, x) == pytest.approx(-spec.gradient(x))
    # translation invariance: the forces balance
    assert abs(force(spec, x).sum()) < 1e-14


def test_free_motion_has_no_drift():
    spec = Angular3({"name": "zero"})
    integrals = integral_set(spec)
    cfg = IntegratorConfig(dt=1e-2, steps=2000, log_every=50)
    trajectory = integrate(spec, [0.0, 1.0, 3.0], [0.3, -0.2, 0.1], cfg, observables=integrals.observables())
    assert trajectory.status == COMPLETED
    report = drift_report(trajectory, integrals)
    assert set(report.drifts) == {"H", "H1", "H2", "H3"}
    assert all(value < 1e-12 for value in report.drifts.values())
    assert trajectory.positions[-1] == pytest.approx(np.array([0.0, 1.0, 3.0]) + 20.0 * np.array([0.3, -0.2, 0.1]))


def test_ttw_conservation(ttw1, ttw_state):
    integrals = integral_set(ttw1)
    cfg = IntegratorConfig(dt=1e-3, steps=100000, method="leapfrog2")
    trajectory = integrate(ttw1, *ttw_state, cfg, observables=integrals.observables())
    assert trajectory.completed
    assert len(trajectory.times) == 1001
    report = drift_report(trajectory, integrals)
    assert report.duration == pytest.approx(100.0)
    assert report.passed(1e-5), report.drifts
    assert report.drifts["H2"] < 1e-12


def test_corrupted_integral_drifts(ttw1):
    # p_u = 1 carries u away from 0, where the flipped term of H3* matters
    state = CylindricalChart().inverse(PhasePoint("cylindrical3", [1.0, math.pi / 6, 0.0], [0.1, 0.05, 1.0]))
    cfg = IntegratorConfig(dt=1e-3, steps=2000, log_every=20)
    corrupted = integral_set(ttw1, corrupt_h3=True)
    trajectory = integrate(ttw1, state.q, state.p, cfg, observables=corrupted.observables())
    drifts = drift_report(trajectory, corrupted).drifts
    assert drifts["H3*"] > 1e-2
    assert drifts["H"] < 1e-4

    honest = drift_report(trajectory, integral_set(ttw1))
    assert honest.drifts["H3"] < 1e-4


def test_time_reversal(ttw1, ttw_state):
    x0, p0 = ttw_state
    cfg = IntegratorConfig(dt=1e-3, steps=1000)
    forward = integrate(ttw1, x0, p0, cfg)
    x1, p1 = forward.final_state
    backward = integrate(ttw1, x1, -p1, cfg)
    x2, p2 = backward.final_state
    assert np.max(np.abs(x2 - x0)) < 1e-8
    assert np.max(np.abs(-p2 - p0)) < 1e-8


def test_yoshida_beats_leapfrog(ttw1, ttw_state):
    integrals = integral_set(ttw1)
    drifts = {}
    for method in ("leapfrog2", "yoshida4"):
        cfg = IntegratorConfig(dt=1e-2, steps=2000, method=method, log_every=10)
        trajectory = integrate(ttw1, *ttw_state, cfg, observables=[integrals.hamiltonian])
        drifts[method] = drift_report(trajectory, [integrals.hamiltonian]).drifts["H"]
    assert drifts["yoshida4"] < drifts["leapfrog2"]


def test_leapfrog_step_is_symplectic(ttw1, ttw_state):
    cfg = IntegratorConfig(dt=1e-2)
    jacobian = step_jacobian(ttw1, *ttw_state, cfg)
    omega = symplectic_form(3)
    assert np.max(np.abs(jacobian.T @ omega @ jacobian - omega)) < 1e-8


def test_near_collision_aborts():
    spec = Calogero(1.0, 1.0, 1.0)
    cfg = IntegratorConfig(dt=1e-3, steps=5000, guard_radius=0.5)
    trajectory = integrate(spec, [0.0, 0.6, 2.0], [2.0, -2.0, 0.0], cfg)
    assert trajectory.status == ABORTED
    assert "X1" in trajectory.reason
    with pytest.raises(DomainError):
        drift_report(trajectory, integral_set(spec))


def test_force_limit_aborts():
    spec = Calogero(1.0, 1.0, 1.0)
    cfg = IntegratorConfig(dt=1e-3, steps=5000, max_force=5.0)
    trajectory = integrate(spec, [0.0, 0.6, 2.0], [2.0, -2.0, 0.0], cfg)
    assert trajectory.status == ABORTED
    assert "max_force" in trajectory.reason


def test_singular_start_raises():
    with pytest.raises(SingularityError):
        integrate(Calogero(1.0, 1.0, 1.0), [0.0, 0.0, 1.0], [0.0, 0.0, 0.0], IntegratorConfig(steps=1))


def test_start_needs_matching_lengths(ttw1):
    with pytest.raises(DomainError):
        integrate(ttw1, [0.0, 1.0], [0.0, 0.0], IntegratorConfig(steps=1))


def test_trajectory_csv(ttw1, ttw_state, tmp_path):
    integrals = integral_set(ttw1)
    cfg = IntegratorConfig(dt=1e-3, steps=250, log_every=100)
    trajectory = integrate(ttw1, *ttw_state, cfg, observables=integrals.observables())
    path = tmp_path / "trajectory.csv"
    write_trajectory_csv(trajectory, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,q1,q2,q3,p1,p2,p3,H,H1,H2,H3"
    # steps 0, 100, 200 and the last one
    assert len(lines) == 5
    table = np.loadtxt(path, delimiter=",", skiprows=1)
    assert table[-1, 0] == pytest.approx(0.25)
    assert table[:, 1:4] == pytest.approx(trajectory.positions)
