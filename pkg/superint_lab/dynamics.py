"""
Symplectic integration in Cartesian particle coordinates and conservation
drift along trajectories.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List

import numpy as np

from superint_lab.exceptions import DomainError, SingularChartError, SingularityError
from superint_lab.geometry import PhasePoint
from superint_lab.utils import check_finite, get_integrator_defaults

logger = logging.getLogger(__name__)

METHODS = ("leapfrog2", "yoshida4")

COMPLETED = "completed"
ABORTED = "aborted_near_collision"

YOSHIDA_W1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
YOSHIDA_W0 = -(2.0 ** (1.0 / 3.0)) * YOSHIDA_W1


@dataclass
class IntegratorConfig:
    dt: float = 1e-3
    steps: int = 1000
    method: str = "leapfrog2"
    guard_radius: float = 1e-6
    max_force: float = 1e8
    log_every: int = 100

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise DomainError("dt must be positive and finite, got %r" % self.dt)
        if int(self.steps) != self.steps or self.steps < 0:
            raise DomainError("steps must be a non-negative integer, got %r" % self.steps)
        if not math.isfinite(self.dt * self.steps):
            raise DomainError("dt * steps must be finite")
        if self.method not in METHODS:
            raise DomainError("Unknown method %r; expected one of %s" % (self.method, ", ".join(METHODS)))
        if not self.guard_radius > 0:
            raise DomainError("guard_radius must be positive, got %r" % self.guard_radius)
        if not self.max_force > 0:
            raise DomainError("max_force must be positive, got %r" % self.max_force)
        if int(self.log_every) != self.log_every or self.log_every < 1:
            raise DomainError("log_every must be a positive integer, got %r" % self.log_every)
        self.steps = int(self.steps)
        self.log_every = int(self.log_every)

    @classmethod
    def from_settings(cls, **overrides):
        """Defaults from ``settings.SUPERINT_INTEGRATOR``, then `overrides`."""
        values = get_integrator_defaults()
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)

    def as_dict(self):
        return {
            "dt": self.dt,
            "steps": self.steps,
            "method": self.method,
            "guard_radius": self.guard_radius,
            "max_force": self.max_force,
            "log_every": self.log_every,
        }


@dataclass
class Trajectory:
    """Logged states every `log_every` steps, the initial one included."""

    times: np.ndarray
    positions: np.ndarray
    momenta: np.ndarray
    logs: Dict[str, np.ndarray] = field(default_factory=dict)
    status: str = COMPLETED
    reason: str = ""

    @property
    def completed(self):
        return self.status == COMPLETED

    @property
    def states(self):
        return [PhasePoint("cartesian", x, p) for x, p in zip(self.positions, self.momenta)]

    @property
    def final_state(self):
        return self.positions[-1].copy(), self.momenta[-1].copy()

    def columns(self):
        d = self.positions.shape[1]
        names = ["t"] + ["q%s" % (i + 1) for i in range(d)] + ["p%s" % (i + 1) for i in range(d)]
        return names + list(self.logs)

    def table(self):
        parts = [self.times[:, None], self.positions, self.momenta]
        parts += [values[:, None] for values in self.logs.values()]
        return np.hstack(parts)


def force(spec, x):
    """-dV/dx."""
    x = check_finite(x, "x")
    return -np.asarray(spec.gradient(x), dtype=float)


class _Abort(Exception):
    pass


def _guarded_force(spec, x, cfg):
    try:
        spec.check_denominators(x, guard=cfg.guard_radius)
        f = force(spec, x)
    except SingularityError as e:
        raise _Abort(str(e))
    magnitude = float(np.max(np.abs(f))) if f.size else 0.0
    if not math.isfinite(magnitude) or magnitude > cfg.max_force:
        raise _Abort("Force %.3e exceeds max_force %.1e" % (magnitude, cfg.max_force))
    return f


def _leapfrog(spec, x, p, f, dt, cfg):
    """Kick-drift-kick; `f` is the force at `x`, the force at the new position is returned."""
    p = p + 0.5 * dt * f
    x = x + dt * p
    f = _guarded_force(spec, x, cfg)
    p = p + 0.5 * dt * f
    return x, p, f


def step(spec, x, p, f, cfg):
    """One step of `cfg.method`."""
    if cfg.method == "leapfrog2":
        return _leapfrog(spec, x, p, f, cfg.dt, cfg)
    for weight in (YOSHIDA_W1, YOSHIDA_W0, YOSHIDA_W1):
        x, p, f = _leapfrog(spec, x, p, f, weight * cfg.dt, cfg)
    return x, p, f


def _evaluate(observable, x, p):
    try:
        return observable.at_cartesian(PhasePoint("cartesian", x, p))
    except (SingularChartError, SingularityError):
        return math.nan


def integrate(spec, x0, p0, cfg, observables=()):
    """
    Integrates from (x0, p0). Near-collision states stop the run with status
    ``aborted_near_collision``; a singular initial state raises
    `SingularityError`.
    """
    x = check_finite(x0, "x0").copy()
    p = check_finite(p0, "p0").copy()
    if len(x) != spec.particles or len(p) != spec.particles:
        raise DomainError("%s needs %s coordinates" % (spec.family, spec.particles))
    spec.check_denominators(x, guard=cfg.guard_radius)
    f = force(spec, x)

    times, positions, momenta = [0.0], [x.copy()], [p.copy()]
    logs = {o.name: [_evaluate(o, x, p)] for o in observables}
    status, reason = COMPLETED, ""
    for n in range(1, cfg.steps + 1):
        try:
            x, p, f = step(spec, x, p, f, cfg)
        except _Abort as e:
            status, reason = ABORTED, str(e)
            logger.warning("Trajectory of %s aborted at step %s: %s", spec.family, n, reason)
            break
        if n % cfg.log_every == 0 or n == cfg.steps:
            times.append(n * cfg.dt)
            positions.append(x.copy())
            momenta.append(p.copy())
            for o in observables:
                logs[o.name].append(_evaluate(o, x, p))
    return Trajectory(
        times=np.array(times),
        positions=np.array(positions),
        momenta=np.array(momenta),
        logs={name: np.array(values) for name, values in logs.items()},
        status=status,
        reason=reason,
    )


@dataclass
class DriftReport:
    drifts: Dict[str, float]
    slopes: Dict[str, float]
    kinds: Dict[str, str]
    duration: float
    names: List[str] = field(default_factory=list)

    def passed(self, tolerance):
        return all(value < tolerance for value in self.drifts.values())


def _drift(values, times):
    start = values[0]
    deviation = values - start
    drift = float(np.max(np.abs(deviation)) / max(abs(start), 1.0))
    if len(times) < 3 or drift == 0.0:
        return drift, 0.0, "none"
    slope = float(np.polyfit(times, deviation, 1)[0]) / max(abs(start), 1.0)
    # a linear trend that accounts for most of the excursion is secular
    kind = "secular" if abs(slope) * (times[-1] - times[0]) > 0.5 * drift else "oscillatory"
    return drift, slope, kind


def drift_report(trajectory, integral_set):
    """
    For the Hamiltonian and every member: max_t |I(t) - I(0)| / max(|I(0)|, 1),
    the slope of a linear fit and the secular/oscillatory flag.
    """
    if not trajectory.completed:
        raise DomainError("drift_report needs a completed trajectory (%s)" % trajectory.reason)
    observables = integral_set.observables() if hasattr(integral_set, "observables") else list(integral_set)
    drifts, slopes, kinds = {}, {}, {}
    for observable in observables:
        values = trajectory.logs.get(observable.name)
        if values is None:
            values = np.array([_evaluate(observable, x, p) for x, p in zip(trajectory.positions, trajectory.momenta)])
        drifts[observable.name], slopes[observable.name], kinds[observable.name] = _drift(values, trajectory.times)
    return DriftReport(
        drifts=drifts,
        slopes=slopes,
        kinds=kinds,
        duration=float(trajectory.times[-1]),
        names=[o.name for o in observables],
    )


def step_jacobian(spec, x, p, cfg, eps=1e-6):
    """Central-difference Jacobian of one step of `cfg.method` in (x, p)."""
    d = len(x)
    state = np.concatenate([x, p])
    jacobian = np.empty((2 * d, 2 * d))

    def advance(s):
        xs, ps = s[:d], s[d:]
        xn, pn, _ = step(spec, xs, ps, force(spec, xs), cfg)
        return np.concatenate([xn, pn])

    for i in range(2 * d):
        plus, minus = state.copy(), state.copy()
        plus[i] += eps
        minus[i] -= eps
        jacobian[:, i] = (advance(plus) - advance(minus)) / (2 * eps)
    return jacobian


def write_trajectory_csv(trajectory, path):
    """Header row t, q..., p..., one column per logged observable; 17 significant digits."""
    header = ",".join(trajectory.columns())
    np.savetxt(path, trajectory.table(), delimiter=",", fmt="%.17g", header=header, comments="")
