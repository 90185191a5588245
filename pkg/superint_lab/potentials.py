"""
The potential families: inverse-square pair and three-body interactions on
a line, angular (degree -2 homogeneous) potentials, the Evans systems
embedded among four points and the planar three-point system.

Every family evaluates in two ways: the difference form, a function of the
particle positions, and the angular form, ``F(angles) / r**2`` in the
family's native chart. Both accept floats or `dual.Dual` values.
"""
import math
from typing import NamedTuple

import numpy as np

from superint_lab import dual
from superint_lab.exceptions import ChartMismatchError, DomainError, SingularityError
from superint_lab.geometry import (
    HypersphericalCylindricalChart,
    PlanePolarChart,
    PolarChart,
    get_chart,
    jacobi_matrix,
)
from superint_lab.profiles import AngularProfile, build_profile, build_ratio, inverse_cos2, inverse_sin2
from superint_lab.utils import check_finite, get_collision_guard

# Equal couplings g on the three pairs give (9g/2) / (r cos 3psi)^2 in the
# cylindrical3 frame; equal couplings h on the Wolfes terms give
# (3h/2) / (r sin 3psi)^2. Both are pinned against the difference form in
# tests/test_potentials.py::test_angular_constants_match_difference_form.
CALOGERO_ANGULAR_CONSTANT = 4.5
WOLFES_ANGULAR_CONSTANT = 1.5

THREE_BODY_CHARTS = ("cylindrical3", "reduced_polar")


def _coupling(value, name):
    value = float(value)
    if not math.isfinite(value):
        raise DomainError("Coupling %s must be finite, got %r" % (name, value))
    return value


def _dot(row, x):
    return sum(c * v for c, v in zip(row, x) if c != 0.0)


class Denominator(NamedTuple):
    """A quantity whose vanishing makes the potential singular."""

    label: str
    value: float
    # angular clearances are already scale-free
    dimensionless: bool = False


class PotentialSpec:
    """
    Base class of the potential families.

    Subclasses set `family`, `particles` (length of the position vector) and
    `chart_name` (the chart of the angular form), and implement
    `_difference_form`, `angular_form`, `denominators` and `params`.
    """

    family = None
    particles = None
    chart_name = None

    def __repr__(self):
        return "<%s %s>" % (self.__class__.__name__, self.describe())

    def params(self):
        return {}

    def describe(self):
        description = {"family": self.family}
        description.update(self.params())
        return description

    def chart(self):
        return get_chart(self.chart_name, self.particles)

    def denominators(self, x):
        """List of `Denominator`."""
        return []

    def check_denominators(self, x, guard=None):
        guard = get_collision_guard() if guard is None else guard
        for denominator in self.denominators([dual.value(v) for v in x]):
            if abs(denominator.value) < guard:
                raise SingularityError(denominator.label, denominator.value, guard)

    def radius(self, x):
        """Length of the component of x transverse to the invariance directions."""
        x = np.asarray(x, dtype=float)
        basis, _ = np.linalg.qr(np.array(self.invariance_directions()).T)
        return float(np.linalg.norm(x - basis @ (basis.T @ x)))

    def clearance(self, x):
        """
        Scale-free distance from the singular set: the smallest denominator,
        divided by the transverse radius unless it is an angular clearance.
        """
        radius = self.radius(x)
        if radius == 0.0:
            return 0.0
        values = [
            abs(d.value) if d.dimensionless else abs(d.value) / radius for d in self.denominators(list(x))
        ]
        return min(values, default=math.inf)

    def difference_form(self, x):
        if len(x) != self.particles:
            raise DomainError("%s expects %s coordinates, got %s" % (self.family, self.particles, len(x)))
        self.check_denominators(x)
        return self._difference_form(list(x))

    def _difference_form(self, x):
        raise NotImplementedError

    def angular_form(self, q):
        raise NotImplementedError

    def angular_profile(self):
        raise NotImplementedError

    def gradient(self, x):
        """dV/dx; exact. Subclasses override with closed forms."""
        self.check_denominators(x)
        _, grad = dual.gradient(lambda *xs: self._difference_form(list(xs)), [float(v) for v in x])
        return grad

    def invariance_directions(self):
        return [np.ones(self.particles)]

    def potential_in(self, chart):
        """
        Returns ``V(q)`` for configuration coordinates of `chart`: the angular
        form in the native chart, the difference form pulled back otherwise.
        """
        if chart.name == self.chart_name or (
            chart.name == "reduced_polar" and self.chart_name == "cylindrical3" and self.single_angle
        ):
            return self.angular_form
        if chart.name == "reduced_polar":
            raise ChartMismatchError("%s has no single-angle profile for the reduced_polar chart" % self.family)
        if chart.dim != self.particles:
            raise ChartMismatchError(
                "%s needs a chart of dimension %s, %s has %s" % (self.family, self.particles, chart.name, chart.dim)
            )
        zeros = [0.0] * chart.dim

        def potential(q):
            x, _ = chart.to_cartesian(q, zeros)
            return self.difference_form(x)

        return potential

    @property
    def single_angle(self):
        return False


class InverseSquareSum(PotentialSpec):
    """
    V = sum_i k_i / (c_i . x)^2 over fixed linear forms c_i. Calogero, Wolfes
    and the open Calogero chain are all of this shape.
    """

    chart_name = "cylindrical3"

    def __init__(self, couplings, forms, labels):
        self.couplings = tuple(_coupling(k, "k%s" % (i + 1)) for i, k in enumerate(couplings))
        self.forms = np.array(forms, dtype=float)
        self.labels = tuple(labels)
        self._rows = self.forms.tolist()
        self._profile = None

    def denominators(self, x):
        return [
            Denominator(label, _dot(row, x))
            for label, row, k in zip(self.labels, self._rows, self.couplings)
            if k != 0.0
        ]

    def _difference_form(self, x):
        total = 0.0
        for k, row in zip(self.couplings, self._rows):
            if k != 0.0:
                total = total + k / _dot(row, x) ** 2
        return total

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        self.check_denominators(x)
        couplings = np.asarray(self.couplings)
        active = couplings != 0.0
        weights = np.zeros_like(couplings)
        weights[active] = -2.0 * couplings[active] / (self.forms[active] @ x) ** 3
        return self.forms.T @ weights

    @property
    def equal_couplings(self):
        return len(set(self.couplings)) == 1

    def angular_form(self, q):
        if self._profile is None:
            self._profile = self.angular_profile()
        return self._profile(*q[1 : self.particles - 1]) / q[0] ** 2

    def angular_profile(self):
        return difference_backed_profile(self)


class Calogero(InverseSquareSum):
    family = "calogero"
    particles = 3

    def __init__(self, k1, k2, k3):
        super().__init__(
            (k1, k2, k3),
            forms=((1, -1, 0), (0, 1, -1), (-1, 0, 1)),
            labels=("X1", "X2", "X3"),
        )

    def params(self):
        return dict(zip(("k1", "k2", "k3"), self.couplings))

    @property
    def single_angle(self):
        return True

    def angular_profile(self):
        if self.equal_couplings:
            profile = inverse_cos2(k=CALOGERO_ANGULAR_CONSTANT * self.couplings[0], m=3)
            profile.name = "calogero"
            profile.params = {"g": self.couplings[0]}
            return profile
        return difference_backed_profile(self)


class Wolfes(InverseSquareSum):
    family = "wolfes"
    particles = 3

    def __init__(self, h1, h2, h3):
        # X_i - X_(i+1) with the cyclic X3 = x3 - x1
        super().__init__(
            (h1, h2, h3),
            forms=((1, -2, 1), (1, 1, -2), (-2, 1, 1)),
            labels=("X1-X2", "X2-X3", "X3-X1"),
        )

    def params(self):
        return dict(zip(("h1", "h2", "h3"), self.couplings))

    @property
    def single_angle(self):
        return True

    def angular_profile(self):
        if self.equal_couplings:
            profile = inverse_sin2(k=WOLFES_ANGULAR_CONSTANT * self.couplings[0], m=3)
            profile.name = "wolfes"
            profile.params = {"h": self.couplings[0]}
            return profile
        return difference_backed_profile(self)


class CalogeroChain(InverseSquareSum):
    """Open chain sum_i k_i / (x^i - x^(i+1))^2 of n = len(couplings) + 1 points."""

    family = "calogero_chain"
    chart_name = "hyperspherical_cylindrical"

    def __init__(self, couplings):
        couplings = list(couplings)
        if len(couplings) < 2:
            raise DomainError("calogero_chain needs at least two couplings (three points)")
        n = len(couplings) + 1
        self.particles = n
        forms = np.zeros((n - 1, n))
        for i in range(n - 1):
            forms[i, i], forms[i, i + 1] = 1.0, -1.0
        super().__init__(couplings, forms, ["X%s" % (i + 1) for i in range(n - 1)])

    def params(self):
        return {"couplings": list(self.couplings)}


class Angular3(PotentialSpec):
    """V = F(psi) / r^2 on the plane transverse to (1, 1, 1)."""

    family = "angular3"
    particles = 3
    chart_name = "cylindrical3"

    def __init__(self, profile):
        self.profile = build_profile(profile)

    def params(self):
        return {"profile": self.profile.describe()}

    @property
    def single_angle(self):
        return True

    def _polar(self, x):
        rows = jacobi_matrix(3).rows
        a, b = _dot(rows[0], x), _dot(rows[1], x)
        return dual.sqrt(a * a + b * b), dual.atan2(b, a)

    def denominators(self, x):
        r, psi = self._polar(x)
        result = [Denominator("r", r)]
        if r > 0.0 and not self.profile.zero:
            result.append(Denominator("F(psi)", self.profile.clearance(psi), True))
        return result

    def _difference_form(self, x):
        r, psi = self._polar(x)
        return self.profile(psi) / r**2

    def angular_form(self, q):
        return self.profile(q[1]) / q[0] ** 2

    def angular_profile(self):
        return self.profile

    def gradient(self, x):
        self.check_denominators(x)
        return polar_gradient(jacobi_matrix(3).U[:2], self.profile, x)


class TTW(Angular3):
    """k / (r sin((2n + 1) psi))^2, with psi the cylindrical3 angle."""

    family = "ttw"

    def __init__(self, n=1, k=1.0):
        if int(n) != n or n < 1:
            raise DomainError("ttw needs an integer n >= 1, got %r" % n)
        k = _coupling(k, "k")
        if k <= 0.0:
            raise DomainError("ttw needs k > 0, got %r" % k)
        self.n = int(n)
        self.k = k
        super().__init__(build_profile({"name": "ttw", "params": {"n": self.n, "k": k}}))

    def params(self):
        return {"n": self.n, "k": self.k}


class Evans(PotentialSpec):
    """
    The Evans potentials in the (X, Y, Z) Jacobi block of four points::

        V1 = F(psi_1) / R^2
        V2 = k / Z^2 + F(psi_1) / R^2
        V3 = (k cos(psi_2) + F(psi_1)) / R^2
        V4 = k^2 / rho^2 + k k1 / Z^2 + k k2 / X^2 + k k3 / Y^2

    with R = rho sin(psi_2) the distance from the Z axis.
    """

    family = "evans"
    particles = 4
    chart_name = "spherical4"
    variants = ("V1", "V2", "V3", "V4")

    def __init__(self, variant, profile=None, k=0.0, k1=0.0, k2=0.0, k3=0.0):
        if variant not in self.variants:
            raise DomainError("Unknown Evans variant %r; expected one of %s" % (variant, ", ".join(self.variants)))
        self.variant = variant
        self.k = _coupling(k, "k")
        self.k1, self.k2, self.k3 = (_coupling(v, name) for v, name in ((k1, "k1"), (k2, "k2"), (k3, "k3")))
        if variant == "V4":
            if profile is not None:
                raise DomainError("Evans V4 takes couplings k, k1, k2, k3, not a profile")
            self.profile = None
        else:
            if profile is None:
                raise DomainError("Evans %s needs an angular profile F(psi_1)" % variant)
            self.profile = build_profile(profile)

    def params(self):
        params = {"variant": self.variant}
        if self.variant == "V4":
            params.update(k=self.k, k1=self.k1, k2=self.k2, k3=self.k3)
        else:
            params["profile"] = self.profile.describe()
            if self.variant != "V1":
                params["k"] = self.k
        return params

    def _block(self, x):
        X, Y, Z, _ = jacobi_matrix(4).apply(x)
        return X, Y, Z

    def denominators(self, x):
        X, Y, Z = self._block(x)
        if self.variant == "V4":
            result = [Denominator("rho", math.sqrt(X * X + Y * Y + Z * Z))]
            for label, value, coupling in (("Z", Z, self.k1), ("X", X, self.k2), ("Y", Y, self.k3)):
                if self.k * coupling != 0.0:
                    result.append(Denominator(label, value))
            return result
        R = math.sqrt(X * X + Y * Y)
        result = [Denominator("R", R)]
        if R > 0.0 and not self.profile.zero:
            result.append(Denominator("F(psi1)", self.profile.clearance(math.atan2(Y, X)), True))
        if self.variant == "V2" and self.k != 0.0:
            result.append(Denominator("Z", Z))
        return result

    def _difference_form(self, x):
        X, Y, Z = self._block(x)
        if self.variant == "V4":
            k = self.k
            total = k * k / (X * X + Y * Y + Z * Z)
            for value, coupling in ((Z, self.k1), (X, self.k2), (Y, self.k3)):
                if k * coupling != 0.0:
                    total = total + k * coupling / value**2
            return total
        R2 = X * X + Y * Y
        numerator = self.profile(dual.atan2(Y, X))
        if self.variant == "V3":
            numerator = numerator + self.k * Z / dual.sqrt(R2 + Z * Z)
        total = numerator / R2
        if self.variant == "V2" and self.k != 0.0:
            total = total + self.k / Z**2
        return total

    def angular_energy(self, psi1, psi2):
        """rho^2 V as a function of the two angles."""
        s2, c2 = dual.sin(psi2), dual.cos(psi2)
        if self.variant == "V4":
            c1, s1 = dual.cos(psi1), dual.sin(psi1)
            return self.k * (
                self.k + self.k1 / c2**2 + (self.k2 / c1**2 + self.k3 / s1**2) / s2**2
            )
        numerator = self.profile(psi1)
        if self.variant == "V3":
            numerator = numerator + self.k * c2
        total = numerator / s2**2
        if self.variant == "V2":
            total = total + self.k / c2**2
        return total

    def angular_form(self, q):
        return self.angular_energy(q[1], q[2]) / q[0] ** 2


class Plane23(PotentialSpec):
    """
    Three points in a plane, x = (x^1, ..., x^6), interacting through
    X1 = x^1 + x^3 - 2x^5 and X2 = x^2 + x^4 - 2x^6 only::

        V = F1(X2 / X1) / X1^2 + F2(X1 / X2) / X2^2

    or, given an angular profile directly, V = F(psi) / r^2 in the
    polar_plane chart.
    """

    family = "plane23"
    particles = 6
    chart_name = "polar_plane"

    def __init__(self, profile=None, f1=None, f2=None):
        if profile is not None and (f1 is not None or f2 is not None):
            raise DomainError("plane23 takes either an angular profile or ratio functions f1/f2, not both")
        if profile is None and f1 is None and f2 is None:
            raise DomainError("plane23 needs an angular profile or ratio functions f1/f2")
        self.profile = build_profile(profile) if profile is not None else None
        self.f1 = build_ratio(f1 if f1 is not None else {"name": "zero"}) if profile is None else None
        self.f2 = build_ratio(f2 if f2 is not None else {"name": "zero"}) if profile is None else None
        self._profile = None

    def params(self):
        if self.profile is not None:
            return {"profile": self.profile.describe()}
        return {"f1": self.f1.describe(), "f2": self.f2.describe()}

    def invariance_directions(self):
        return [np.array(omega) for omega in PlanePolarChart.omegas]

    def transverse(self, x):
        return x[0] + x[2] - 2 * x[4], x[1] + x[3] - 2 * x[5]

    def denominators(self, x):
        X1, X2 = self.transverse(x)
        if self.profile is not None:
            r = math.sqrt((X1 * X1 + X2 * X2) / 6.0)
            result = [Denominator("r", r)]
            if r > 0.0 and not self.profile.zero:
                result.append(Denominator("F(psi)", self.profile.clearance(math.atan2(X2, X1)), True))
            return result
        result = []
        for label, ratio, value, other in (("X1", self.f1, X1, X2), ("X2", self.f2, X2, X1)):
            if ratio.zero:
                continue
            result.append(Denominator(label, value))
            if value != 0.0:
                result.append(Denominator("%s(%s)" % (ratio.name, label), ratio.clearance(other / value), True))
        return result

    def _difference_form(self, x):
        X1, X2 = self.transverse(x)
        if self.profile is not None:
            return self.profile(dual.atan2(X2, X1)) * 6.0 / (X1 * X1 + X2 * X2)
        total = 0.0
        if not self.f1.zero:
            total = total + self.f1(X2 / X1) / X1**2
        if not self.f2.zero:
            total = total + self.f2(X1 / X2) / X2**2
        return total

    def angular_profile(self):
        if self.profile is not None:
            return self.profile
        f1, f2 = self.f1, self.f2

        def func(psi):
            c, s = dual.cos(psi), dual.sin(psi)
            total = 0.0
            if not f1.zero:
                total = total + f1(s / c) / c**2
            if not f2.zero:
                total = total + f2(c / s) / s**2
            return total / 6.0

        def clearance(psi):
            c, s = math.cos(psi), math.sin(psi)
            values = [math.inf]
            if not f1.zero:
                values.append(abs(c))
                if c != 0.0:
                    values.append(f1.clearance(s / c))
            if not f2.zero:
                values.append(abs(s))
                if s != 0.0:
                    values.append(f2.clearance(c / s))
            return min(values)

        return AngularProfile(
            func, name="plane23_ratio", params=self.params(), clearance=clearance, zero=f1.zero and f2.zero
        )

    def angular_form(self, q):
        if self._profile is None:
            self._profile = self.angular_profile()
        return self._profile(q[1]) / q[0] ** 2

    def gradient(self, x):
        if self.profile is None:
            return super().gradient(x)
        self.check_denominators(x)
        return polar_gradient(PlanePolarChart().frame[4:6], self.profile, x)


FAMILIES = {
    cls.family: cls for cls in (Calogero, Wolfes, CalogeroChain, Angular3, TTW, Evans, Plane23)
}


def build_potential(family, **params):
    """Builds a potential from its family tag and parameters (config `system` block)."""
    try:
        cls = FAMILIES[family]
    except KeyError:
        raise DomainError("Unknown potential family %r; expected one of %s" % (family, ", ".join(sorted(FAMILIES))))
    try:
        return cls(**params)
    except TypeError as e:
        raise DomainError("Bad parameters for %s: %s" % (family, e))


def difference_backed_profile(spec):
    """
    Phi(angles) = r^2 V at unit radius, evaluated through the difference
    form. Used where no closed single-angle form exists (unequal couplings,
    chains of more than three points).
    """
    chart = HypersphericalCylindricalChart(spec.particles)
    columns = chart.frame.T.tolist()

    def configuration(angles):
        z = chart._embed(1.0, list(angles)) + [0.0]
        return [_dot(column, z) for column in columns]

    def func(*angles):
        return spec._difference_form(configuration(angles))

    def clearance(*angles):
        values = [abs(d.value) for d in spec.denominators(configuration(angles))]
        return min(values) if values else math.inf

    return AngularProfile(
        func,
        name="difference_form",
        params=spec.describe(),
        clearance=clearance,
        arity=chart.angle_count,
    )


def polar_gradient(rows, profile, x):
    """
    Gradient of F(psi) / r^2 where (r cos psi, r sin psi) = rows @ x::

        dV/dr = -2 V / r,  dV/dpsi = F'(psi) / r^2
    """
    x = np.asarray(x, dtype=float)
    a, b = rows @ x
    r2 = a * a + b * b
    r = math.sqrt(r2)
    psi = math.atan2(b, a)
    c, s = a / r, b / r
    F = float(profile(psi))
    dF = profile.derivative(psi) if not profile.zero else 0.0
    dV_dr = -2.0 * F / (r2 * r)
    dV_dpsi = dF / r2
    grad_ab = np.array([dV_dr * c - dV_dpsi * s / r, dV_dr * s + dV_dpsi * c / r])
    return rows.T @ grad_ab


def eval_difference_form(spec, x):
    x = check_finite(x, "x")
    return float(spec.difference_form(list(x)))


def eval_angular_form(spec, point):
    """
    Evaluates the angular form at a point of the family's chart, or of
    reduced_polar for the single-angle three-body families.
    """
    if point.chart == spec.chart_name:
        chart = spec.chart()
    elif point.chart == "reduced_polar" and spec.single_angle:
        chart = PolarChart()
    else:
        raise ChartMismatchError("%s has no angular form in the %s chart" % (spec.family, point.chart))
    chart._check_dim(point)
    chart.check_domain(point.q)
    q = list(point.q)
    if chart.name == "reduced_polar":
        profile = spec.angular_profile()
        clearance = profile.clearance(q[1])
        if not profile.zero and clearance < get_collision_guard():
            raise SingularityError("F(psi)", clearance, get_collision_guard())
    else:
        x, _ = chart.to_cartesian(q, [0.0] * chart.dim)
        spec.check_denominators(x)
    return float(spec.angular_form(q))


def angular_profile(spec):
    return spec.angular_profile()


def shift_profile(profile, alpha):
    """(shift F)(psi) = F(psi + alpha), for single-angle profiles."""
    alpha = float(alpha)
    if alpha == 0.0:
        return profile
    if profile.arity != 1:
        raise DomainError("Only single-angle profiles can be shifted")
    func = profile.func
    clearance = profile._clearance
    params = dict(profile.params)
    params["shift"] = alpha + params.get("shift", 0.0)
    return AngularProfile(
        lambda psi: func(psi + alpha),
        name=profile.name,
        params=params,
        clearance=None if clearance is None else (lambda psi: clearance(psi + alpha)),
        exact=profile.exact,
        zero=profile.zero,
    )


def check_homogeneity(spec, x, lam):
    """|V(lam x) - lam^-2 V(x)| / |lam^-2 V(x)|; absolute when V(x) = 0."""
    if lam <= 0:
        raise DomainError("Scale factor must be positive, got %r" % lam)
    x = check_finite(x, "x")
    expected = eval_difference_form(spec, x) / lam**2
    scaled = eval_difference_form(spec, lam * x)
    if expected == 0.0:
        return abs(scaled)
    return abs(scaled - expected) / abs(expected)


def check_translation_invariance(spec, x, c):
    """max over the family's invariance directions omega of |V(x + c omega) - V(x)|."""
    x = check_finite(x, "x")
    reference = eval_difference_form(spec, x)
    return max(abs(eval_difference_form(spec, x + c * omega) - reference) for omega in spec.invariance_directions())

