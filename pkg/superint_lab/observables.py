"""
Phase-space observables with exact gradients, Poisson brackets and
functional-independence ranks.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from superint_lab import dual
from superint_lab.exceptions import ChartMismatchError, DomainError
from superint_lab.geometry import Chart, get_chart
from superint_lab.utils import get_bracket_tolerance, get_rank_tolerance

logger = logging.getLogger(__name__)


def _combine_degrees(a, b, op):
    if a is None or b is None:
        return None
    return op(a, b)


class Observable:
    """
    A function f(q, p) on the phase space of a chart.

    Parameters
    ----------
    func : callable
        ``func(q, p)`` on lists of floats or `dual.Dual` values.
    chart : Chart
        The chart the function is written in.
    name : str
    degree : int, optional
        Polynomial degree in the momenta, ``None`` when unknown.
    exact : bool
        False when some ingredient (an angular profile) is differentiated by
        finite differences.
    """

    def __init__(self, func, chart, name="", degree=None, exact=True):
        if not isinstance(chart, Chart):
            raise DomainError("Observable needs a Chart instance, got %r" % (chart,))
        self.func = func
        self.chart = chart
        self.name = name
        self.degree = degree
        self.exact = exact

    def __repr__(self):
        return "<Observable %s on %s degree=%s>" % (self.name, self.chart.name, self.degree)

    def evaluate(self, q, p):
        return self.func(q, p)

    def check_point(self, point):
        if point.chart != self.chart.name:
            raise ChartMismatchError(
                "Observable %s lives on %s, point is in %s" % (self.name, self.chart.name, point.chart)
            )
        if point.dim != self.chart.dim:
            raise DomainError("Observable %s expects dimension %s, got %s" % (self.name, self.chart.dim, point.dim))

    def __call__(self, point):
        self.check_point(point)
        return float(self.func(list(point.q), list(point.p)))

    def full_gradient(self, point):
        """Gradient over the concatenated vector (q, p)."""
        self.check_point(point)
        d = point.dim
        _, grad = dual.gradient(lambda *v: self.func(list(v[:d]), list(v[d:])), point.vector().tolist())
        return grad

    def gradient(self, point):
        grad = self.full_gradient(point)
        return grad[: point.dim], grad[point.dim :]

    def at_cartesian(self, point):
        """Evaluates at a Cartesian state by mapping it through the chart."""
        if self.chart.name == "cartesian":
            return self(point)
        return self(self.chart.forward(point))

    def _binary(self, other, op, name, degree_op):
        if isinstance(other, Observable):
            if other.chart.name != self.chart.name or other.chart.dim != self.chart.dim:
                raise ChartMismatchError("Cannot combine observables on %s and %s" % (self.chart, other.chart))
            f, g = self.func, other.func
            return Observable(
                lambda q, p: op(f(q, p), g(q, p)),
                self.chart,
                name=name % (self.name, other.name),
                degree=_combine_degrees(self.degree, other.degree, degree_op),
                exact=self.exact and other.exact,
            )
        c = float(other)
        f = self.func
        return Observable(
            lambda q, p: op(f(q, p), c),
            self.chart,
            name=name % (self.name, repr(c)),
            degree=self.degree,
            exact=self.exact,
        )

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b, "(%s + %s)", max)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b, "(%s - %s)", max)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b, "%s*%s", _sum_degrees)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Observable):
            raise TypeError("Observables can only be divided by scalars")
        return self * (1.0 / float(other))

    def __neg__(self):
        f = self.func
        return Observable(
            lambda q, p: -f(q, p), self.chart, name="-%s" % self.name, degree=self.degree, exact=self.exact
        )

    def renamed(self, name):
        return Observable(self.func, self.chart, name=name, degree=self.degree, exact=self.exact)


def _sum_degrees(a, b):
    return a + b


def resolve_chart(spec, chart=None):
    if chart is None:
        return spec.chart()
    if isinstance(chart, Chart):
        return chart
    return get_chart(chart, spec.particles)


def hamiltonian(spec, chart=None):
    """H = kinetic form of the chart + V, with V pulled into the chart."""
    chart = resolve_chart(spec, chart)
    potential = spec.potential_in(chart)
    kinetic = chart.kinetic

    def func(q, p):
        return kinetic(q, p) + potential(q)

    return Observable(func, chart, name="H", degree=2, exact=profile_is_exact(spec))


def profile_is_exact(spec):
    for attr in ("profile", "_profile"):
        profile = getattr(spec, attr, None)
        if profile is not None and not profile.exact:
            return False
    return True


def coordinate(chart, index, momentum=False):
    """The coordinate function q^index (or p_index) of `chart`."""
    if momentum:
        return Observable(lambda q, p: p[index], chart, name="p%s" % index, degree=1)
    return Observable(lambda q, p: q[index], chart, name="q%s" % index, degree=0)


def pulled_back_coordinates(chart, dim):
    """
    The chart coordinates (q^1..q^d, p_1..p_d) as observables on the
    Cartesian phase space they are computed from.
    """
    source = get_chart("cartesian", dim)
    result = []
    for momentum in (False, True):
        for index in range(chart.dim):

            def func(x, p, index=index, momentum=momentum):
                q, pq = chart.to_chart(x, p)
                return pq[index] if momentum else q[index]

            result.append(Observable(func, source, name="%s%s" % ("p" if momentum else "q", index)))
    return result


def canonical_residual(chart, point):
    """
    max |{Q_a, Q_b} - J_ab| over the chart coordinates Q = (q, p) as functions
    of the Cartesian state `point`; zero for a canonical lift.
    """
    d = point.dim
    gradients = [c.full_gradient(point) for c in pulled_back_coordinates(chart, d)]
    brackets = np.array([[_bracket_from_gradients(a, b, d) for b in gradients] for a in gradients])
    return float(np.max(np.abs(brackets - symplectic_form(chart.dim))))


def symplectic_form(d):
    J = np.zeros((2 * d, 2 * d))
    J[:d, d:] = np.eye(d)
    J[d:, :d] = -np.eye(d)
    return J


def _bracket_from_gradients(gf, gg, d):
    return float(gf[:d] @ gg[d:] - gf[d:] @ gg[:d])


def _bracket_scale(gf, gg, d):
    return float(np.abs(gf[:d]) @ np.abs(gg[d:]) + np.abs(gf[d:]) @ np.abs(gg[:d]))


def poisson_bracket(f, g, point):
    """{f, g} = sum_a df/dq^a dg/dp_a - df/dp_a dg/dq^a."""
    if f.chart.name != g.chart.name:
        raise ChartMismatchError("Bracket of observables on %s and %s" % (f.chart.name, g.chart.name))
    return _bracket_from_gradients(f.full_gradient(point), g.full_gradient(point), point.dim)


@dataclass
class IntegralSet:
    """
    First integrals claimed for `hamiltonian`. `candidates` are screened:
    they count towards the certified rank only once their brackets vanish.
    When `hamiltonian_in_rank` is false the claimed count refers to the
    integrals alone and H is left out of the rank.
    """

    system: str
    hamiltonian: Observable
    members: List[Observable]
    claimed_independent: int
    candidates: List[Observable] = field(default_factory=list)
    notes: Dict[str, str] = field(default_factory=dict)
    hamiltonian_in_rank: bool = True

    def __post_init__(self):
        if self.claimed_independent > len(self.members) + len(self.candidates) + 1:
            raise DomainError(
                "%s claims %s independent integrals from %s observables"
                % (self.system, self.claimed_independent, len(self.members) + len(self.candidates) + 1)
            )

    @property
    def chart(self):
        return self.hamiltonian.chart

    @property
    def exact(self):
        return all(o.exact for o in [self.hamiltonian] + self.members + self.candidates)

    def observables(self):
        return [self.hamiltonian] + list(self.members)

    def certified(self, report):
        """Members plus the candidates the bracket screen verified."""
        return list(self.members) + [c for c in self.candidates if report.verified.get(c.name)]

    def rank_observables(self, report):
        """The observables whose rank is compared with `claimed_independent`."""
        head = [self.hamiltonian] if self.hamiltonian_in_rank else []
        return head + self.certified(report)


@dataclass
class BracketReport:
    """
    Per-observable brackets with the Hamiltonian over a sample. `residuals`
    hold max |{H, I}| / max(1, scale), where scale is the sum of the absolute
    products entering the bracket; `absolute` holds the raw max |{H, I}|.
    """

    tolerance: float
    points: int
    residuals: Dict[str, float]
    absolute: Dict[str, float]
    candidate_residuals: Dict[str, float]
    verified: Dict[str, bool]
    pairwise: Optional[np.ndarray] = None
    member_names: List[str] = field(default_factory=list)

    @property
    def max_residual(self):
        return max(self.residuals.values(), default=0.0)

    @property
    def passed(self):
        return all(value < self.tolerance for value in self.residuals.values())


def bracket_residual(integral_set, points, tolerance=None, pairwise=True):
    """
    Max over `points` of |{H, I}| for every member and candidate of
    `integral_set`, plus the informational member-member bracket matrix.
    """
    points = list(points)
    if not points:
        raise DomainError("bracket_residual needs at least one point")
    if tolerance is None:
        tolerance = get_bracket_tolerance(exact=integral_set.exact)
    H = integral_set.hamiltonian
    members = list(integral_set.members)
    candidates = list(integral_set.candidates)
    residuals = dict.fromkeys([m.name for m in members], 0.0)
    absolute = dict.fromkeys([m.name for m in members], 0.0)
    candidate_residuals = dict.fromkeys([c.name for c in candidates], 0.0)
    matrix = np.zeros((len(members), len(members)))
    for point in points:
        d = point.dim
        gH = H.full_gradient(point)
        member_grads = [m.full_gradient(point) for m in members]
        for m, g in zip(members, member_grads):
            value = abs(_bracket_from_gradients(gH, g, d))
            absolute[m.name] = max(absolute[m.name], value)
            residuals[m.name] = max(residuals[m.name], value / max(1.0, _bracket_scale(gH, g, d)))
        for c in candidates:
            g = c.full_gradient(point)
            value = abs(_bracket_from_gradients(gH, g, d)) / max(1.0, _bracket_scale(gH, g, d))
            candidate_residuals[c.name] = max(candidate_residuals[c.name], value)
        if pairwise:
            for i, gi in enumerate(member_grads):
                for j in range(i + 1, len(member_grads)):
                    value = abs(_bracket_from_gradients(gi, member_grads[j], d))
                    matrix[i, j] = matrix[j, i] = max(matrix[i, j], value)
    verified = {name: value < tolerance for name, value in candidate_residuals.items()}
    for name, ok in verified.items():
        logger.debug("Candidate %s of %s: %s", name, integral_set.system, "verified" if ok else "unverified")
    return BracketReport(
        tolerance=tolerance,
        points=len(points),
        residuals=residuals,
        absolute=absolute,
        candidate_residuals=candidate_residuals,
        verified=verified,
        pairwise=matrix if pairwise else None,
        member_names=[m.name for m in members],
    )


def gradient_spectra(observables, points):
    """Normalized singular values sigma_j / sigma_max of the gradient matrix at each point."""
    observables = list(observables)
    points = list(points)
    if not observables or not points:
        raise DomainError("gradient_spectra needs observables and points")
    spectra = []
    for point in points:
        matrix = np.array([o.full_gradient(point) for o in observables])
        sigma = np.linalg.svd(matrix, compute_uv=False)
        top = sigma[0] if sigma.size else 0.0
        spectra.append(sigma / top if top > 0.0 else np.zeros_like(sigma))
    return spectra


def independence_rank(observables, points, tolerance=None):
    """
    Functional-independence rank: the number of singular values of the
    gradient matrix with sigma_j / sigma_max above `tolerance`, maximized over
    the points.
    """
    tolerance = get_rank_tolerance() if tolerance is None else tolerance
    return max(int(np.count_nonzero(spectrum > tolerance)) for spectrum in gradient_spectra(observables, points))


def finite_difference_gradient(observable, point, step=1e-6):
    """Central-difference gradient over (q, p); a test oracle, never used in brackets."""
    observable.check_point(point)
    vector = point.vector()
    d = point.dim
    grad = np.empty_like(vector)
    for i in range(len(vector)):
        plus, minus = vector.copy(), vector.copy()
        plus[i] += step
        minus[i] -= step
        grad[i] = (
            observable.func(plus[:d].tolist(), plus[d:].tolist())
            - observable.func(minus[:d].tolist(), minus[d:].tolist())
        ) / (2 * step)
    return grad


def detect_momentum_degree(observable, point, max_degree=8, seed=0, tolerance=1e-8):
    """
    Degree in the momenta, read off a polynomial fit of
    ``t -> f(q, p + t e)`` along a random direction e.
    """
    observable.check_point(point)
    q = point.q.tolist()
    direction = np.random.default_rng(seed).normal(size=point.dim)
    direction /= np.linalg.norm(direction)
    nodes = np.cos(math.pi * (np.arange(2 * max_degree + 1) + 0.5) / (2 * max_degree + 1))
    values = [float(observable.func(q, (point.p + t * direction).tolist())) for t in nodes]
    coefficients = np.polynomial.chebyshev.chebfit(nodes, values, max_degree)
    scale = np.max(np.abs(coefficients))
    if scale == 0.0:
        return 0
    significant = np.nonzero(np.abs(coefficients) > tolerance * scale)[0]
    return int(significant[-1])


def lift_reduced(observable, chart):
    """
    Lifts an observable of the reduced (r, psi) plane to a chart whose first
    two coordinates are (r, psi), e.g. cylindrical3.
    """
    if observable.chart.name != "reduced_polar":
        raise ChartMismatchError("Only reduced_polar observables can be lifted, got %s" % observable.chart.name)
    f = observable.func
    return Observable(
        lambda q, p: f(q[:2], p[:2]), chart, name=observable.name, degree=observable.degree, exact=observable.exact
    )

