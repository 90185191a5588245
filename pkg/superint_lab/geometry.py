"""
Coordinate charts on the configuration space of points on a line (or in a
plane) and their canonical momentum lifts.

Every chart maps particle (Cartesian) coordinates and momenta to chart
coordinates and back. The maps are written with the helpers of
`superint_lab.dual`, so the same code evaluates numerically on floats and
yields exact derivatives when fed dual numbers; this is what the
canonical-bracket checks rely on.
"""
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from superint_lab import dual
from superint_lab.exceptions import ChartMismatchError, DomainError, SingularChartError
from superint_lab.utils import check_finite, get_collision_guard

RADIUS_GUARD = 1e-12
POLAR_ANGLE_GUARD = 1e-9


@dataclass(frozen=True, eq=False)
class JacobiMatrix:
    """
    Orthogonal matrix whose row j holds the coefficients of the Jacobi
    coordinate z^j in the particle coordinates x^1..x^n. The last row is the
    centre-of-mass direction.
    """

    n: int
    U: np.ndarray

    @property
    def rows(self):
        return self.U.tolist()

    def apply(self, x):
        return _apply(self.rows, x)


@lru_cache()
def jacobi_matrix(n):
    if n < 2:
        raise DomainError("Jacobi coordinates need at least two particles, got n=%s" % n)
    U = np.zeros((n, n))
    for j in range(1, n):
        norm = math.sqrt(j * (j + 1))
        U[j - 1, :j] = 1.0 / norm
        U[j - 1, j] = -j / norm
    U[n - 1, :] = 1.0 / math.sqrt(n)
    U.setflags(write=False)
    return JacobiMatrix(n=n, U=U)


def _apply(rows, vector):
    return [sum(c * v for c, v in zip(row, vector) if c != 0.0) for row in rows]


def _check_pair(x, p):
    if len(x) != len(p):
        raise DomainError("Positions and momenta differ in length: %s != %s" % (len(x), len(p)))


def to_jacobi(x, p):
    """
    Maps particle positions and momenta to Jacobi coordinates. The map is
    orthogonal, so momenta transform with the same matrix.
    """
    _check_pair(x, p)
    x = check_finite(x, "x")
    p = check_finite(p, "p")
    U = jacobi_matrix(len(x)).U
    return U @ x, U @ p


@dataclass(frozen=True, eq=False)
class DiffCoords:
    X: np.ndarray
    cyclic: Optional[float] = None
    collision: bool = False


def differences(x):
    """X_i = x^i - x^(i+1), i = 1..n-1, on plain lists (dual-friendly)."""
    return [x[i] - x[i + 1] for i in range(len(x) - 1)]


def diff_coords(x, guard=None):
    x = check_finite(x, "x")
    if len(x) < 2:
        raise DomainError("Difference coordinates need at least two particles")
    guard = get_collision_guard() if guard is None else guard
    X = np.array(differences(list(x)))
    cyclic = None
    values = list(X)
    if len(x) == 3:
        cyclic = float(x[2] - x[0])
        values.append(cyclic)
    collision = bool(min(abs(v) for v in values) < guard)
    return DiffCoords(X=X, cyclic=cyclic, collision=collision)


@dataclass(frozen=True, eq=False)
class PhasePoint:
    chart: str
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = check_finite(self.q, "q")
        p = check_finite(self.p, "p")
        if q.ndim != 1 or q.shape != p.shape:
            raise DomainError("q and p must be vectors of equal length, got %s and %s" % (q.shape, p.shape))
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def dim(self):
        return len(self.q)

    def vector(self):
        return np.concatenate([self.q, self.p])


class Chart:
    """
    Base class of the coordinate charts. Subclasses implement `to_chart`
    and `to_cartesian` on plain sequences of floats or dual numbers,
    `kinetic` (the kinetic energy in chart momenta) and `clearance`, a
    positive number measuring the distance from the chart's singular locus.
    """

    name = None
    dim = None

    def to_chart(self, x, p):
        raise NotImplementedError

    def to_cartesian(self, q, p):
        raise NotImplementedError

    def kinetic(self, q, p):
        raise NotImplementedError

    def clearance(self, q):
        return math.inf

    def in_domain(self, q):
        return self.clearance(q) > 0.0

    def check_domain(self, q):
        if not self.in_domain(q):
            raise SingularChartError("Point %s is outside the domain of the %s chart" % (list(q), self.name))

    def forward(self, point):
        if point.chart != "cartesian":
            raise ChartMismatchError("%s.forward expects a cartesian point, got %s" % (self.name, point.chart))
        self._check_dim(point)
        q, p = self.to_chart(list(point.q), list(point.p))
        result = PhasePoint(self.name, np.array(q, dtype=float), np.array(p, dtype=float))
        self.check_domain(result.q)
        return result

    def inverse(self, point):
        if point.chart != self.name:
            raise ChartMismatchError("%s.inverse got a point of chart %s" % (self.name, point.chart))
        self._check_dim(point)
        self.check_domain(point.q)
        x, p = self.to_cartesian(list(point.q), list(point.p))
        return PhasePoint("cartesian", np.array(x, dtype=float), np.array(p, dtype=float))

    def _check_dim(self, point):
        if point.dim != self.dim:
            raise DomainError("The %s chart has dimension %s, point has %s" % (self.name, self.dim, point.dim))

    def __repr__(self):
        return "<%s %s dim=%s>" % (self.__class__.__name__, self.name, self.dim)


class CartesianChart(Chart):
    name = "cartesian"

    def __init__(self, dim):
        self.dim = dim

    def to_chart(self, x, p):
        return list(x), list(p)

    def to_cartesian(self, q, p):
        return list(q), list(p)

    def kinetic(self, q, p):
        return 0.5 * sum(pi * pi for pi in p)


class OrthogonalFrameChart(Chart):
    """
    A chart reached through a fixed orthogonal frame (Jacobi coordinates, or
    the invariance frame of the planar system). Subclasses map frame
    coordinates w to chart coordinates.
    """

    frame = None

    def from_frame(self, w, pw):
        raise NotImplementedError

    def to_frame(self, q, p):
        raise NotImplementedError

    def to_chart(self, x, p):
        rows = self.frame.tolist()
        return self.from_frame(_apply(rows, x), _apply(rows, p))

    def to_cartesian(self, q, p):
        w, pw = self.to_frame(q, p)
        columns = self.frame.T.tolist()
        return _apply(columns, w), _apply(columns, pw)


class JacobiChart(OrthogonalFrameChart):
    name = "jacobi"

    def __init__(self, n):
        self.dim = n
        self.frame = jacobi_matrix(n).U

    def from_frame(self, w, pw):
        return list(w), list(pw)

    def to_frame(self, q, p):
        return list(q), list(p)

    def kinetic(self, q, p):
        return 0.5 * sum(pi * pi for pi in p)


def _polar(a, b, pa, pb):
    r = dual.sqrt(a * a + b * b)
    if dual.value(r) < RADIUS_GUARD:
        raise SingularChartError("Radius %.3e is below the axis guard" % dual.value(r))
    psi = dual.atan2(b, a)
    return r, psi, (a * pa + b * pb) / r, a * pb - b * pa


def _unpolar(r, psi, pr, ppsi):
    c, s = dual.cos(psi), dual.sin(psi)
    return r * c, r * s, c * pr - s * ppsi / r, s * pr + c * ppsi / r


class PolarChart(Chart):
    """
    Polar coordinates (r, psi) on a Cartesian plane; the reduced phase plane
    on which the cubic and higher integrals of the three-body systems live.
    """

    name = "reduced_polar"
    dim = 2

    def to_chart(self, x, p):
        r, psi, pr, ppsi = _polar(x[0], x[1], p[0], p[1])
        return [r, psi], [pr, ppsi]

    def to_cartesian(self, q, p):
        a, b, pa, pb = _unpolar(q[0], q[1], p[0], p[1])
        return [a, b], [pa, pb]

    def kinetic(self, q, p):
        r = q[0]
        return 0.5 * (p[0] * p[0] + p[1] * p[1] / (r * r))

    def clearance(self, q):
        return q[0] - RADIUS_GUARD


class HypersphericalCylindricalChart(OrthogonalFrameChart):
    """
    Spherical-cylindrical coordinates (r, phi_1..phi_{n-2}, u) in E^n: standard
    hyperspherical coordinates on the Jacobi block z^1..z^{n-1} and u = z^n
    along the centre-of-mass axis.

    Convention on y = (z^1..z^{n-1}), m = n - 1::

        y_i = r sin(phi_1)...sin(phi_{i-1}) cos(phi_i),   i < m
        y_m = r sin(phi_1)...sin(phi_{m-1})

    phi_1..phi_{m-2} are polar angles in [0, pi]; phi_{m-1} is azimuthal in
    (-pi, pi].
    """

    name = "hyperspherical_cylindrical"

    def __init__(self, n):
        if n < 3:
            raise DomainError("Spherical-cylindrical coordinates need n >= 3, got %s" % n)
        self.n = n
        self.dim = n
        self.frame = jacobi_matrix(n).U

    @property
    def angle_count(self):
        return self.n - 2

    def from_frame(self, w, pw):
        return self.from_jacobi(w, pw)

    def to_frame(self, q, p):
        return self.to_jacobi(q, p)

    def from_jacobi(self, z, pz):
        m = self.n - 1
        y, py = list(z[:m]), list(pz[:m])
        r = dual.sqrt(sum(v * v for v in y))
        if dual.value(r) < RADIUS_GUARD:
            raise SingularChartError("Point lies on the axis of the %s chart" % self.name)
        angles = []
        for k in range(m - 2):
            tail = dual.sqrt(sum(v * v for v in y[k + 1 :]))
            angles.append(dual.atan2(tail, y[k]))
        angles.append(dual.atan2(y[m - 1], y[m - 2]))
        pr = sum(yi * pi for yi, pi in zip(y, py)) / r
        momenta = [pr]
        for column in self._angle_columns(r, angles):
            momenta.append(sum(c * pi for c, pi in zip(column, py)))
        return [r] + angles + [z[m]], momenta + [pz[m]]

    def to_jacobi(self, q, p):
        m = self.n - 1
        r, angles, u = q[0], list(q[1:m]), q[m]
        y = self._embed(r, angles)
        py = [p[0] * yi / r for yi in y]
        for k, column in enumerate(self._angle_columns(r, angles)):
            scale = self._scale_squared(r, angles, k)
            py = [a + c * p[k + 1] / scale for a, c in zip(py, column)]
        return y + [u], py + [p[m]]

    def _embed(self, r, angles):
        sins = [dual.sin(a) for a in angles]
        coss = [dual.cos(a) for a in angles]
        m = self.n - 1
        y = []
        for i in range(m):
            value = r
            for j in range(min(i, m - 1)):
                value = value * sins[j]
            if i < m - 1:
                value = value * coss[i]
            y.append(value)
        return y

    def _angle_columns(self, r, angles):
        """Columns dy/dphi_k, one per angle; they are mutually orthogonal."""
        sins = [dual.sin(a) for a in angles]
        coss = [dual.cos(a) for a in angles]
        m = self.n - 1
        columns = []
        for k in range(m - 1):
            column = []
            for i in range(m):
                if i < k:
                    column.append(0.0)
                    continue
                value = r
                for j in range(min(i, m - 1)):
                    value = value * (coss[j] if j == k else sins[j])
                if i < m - 1:
                    value = value * (-sins[i] if i == k else coss[i])
                column.append(value)
            columns.append(column)
        return columns

    def _scale_squared(self, r, angles, k):
        value = r * r
        for j in range(k):
            value = value * dual.sin(angles[j]) ** 2
        return value

    def kinetic(self, q, p):
        m = self.n - 1
        r, angles = q[0], list(q[1:m])
        total = p[0] * p[0] + p[m] * p[m]
        for k in range(m - 1):
            total = total + p[k + 1] * p[k + 1] / self._scale_squared(r, angles, k)
        return 0.5 * total

    def clearance(self, q):
        m = self.n - 1
        clearance = q[0] - RADIUS_GUARD
        for k in range(m - 2):
            clearance = min(clearance, abs(math.sin(q[k + 1])) - POLAR_ANGLE_GUARD)
        return clearance


class CylindricalChart(HypersphericalCylindricalChart):
    """
    Cylindrical coordinates (r, psi, u) of three points on a line, with axis
    along omega = (1, 1, 1). The Jacobi axes e1 = (1, -1, 0)/sqrt(2) and
    e2 = (1, 1, -2)/sqrt(6) fix the origin of psi.
    """

    name = "cylindrical3"

    def __init__(self):
        super().__init__(3)


class PlanePolarChart(OrthogonalFrameChart):
    """
    Three points in a Euclidean plane seen as one point of R^6. The
    invariance vectors omega_1..omega_4 span the "axis" (coordinates
    u_1..u_4); the orthogonal complement, spanned by (1, 0, 1, 0, -2, 0) and
    (0, 1, 0, 1, 0, -2), carries the polar pair (r, psi).
    """

    name = "polar_plane"
    dim = 6
    omegas = (
        (1.0, 0.0, 1.0, 0.0, 1.0, 0.0),
        (0.0, 1.0, 0.0, 1.0, 0.0, 1.0),
        (1.0, 0.0, -1.0, 0.0, 0.0, 0.0),
        (0.0, 1.0, 0.0, -1.0, 0.0, 0.0),
    )
    complement = (
        (1.0, 0.0, 1.0, 0.0, -2.0, 0.0),
        (0.0, 1.0, 0.0, 1.0, 0.0, -2.0),
    )

    def __init__(self):
        rows = [np.array(v) / np.linalg.norm(v) for v in self.omegas + self.complement]
        self.frame = np.array(rows)
        self.frame.setflags(write=False)

    def from_frame(self, w, pw):
        r, psi, pr, ppsi = _polar(w[4], w[5], pw[4], pw[5])
        return [r, psi] + list(w[:4]), [pr, ppsi] + list(pw[:4])

    def to_frame(self, q, p):
        a, b, pa, pb = _unpolar(q[0], q[1], p[0], p[1])
        return list(q[2:6]) + [a, b], list(p[2:6]) + [pa, pb]

    def kinetic(self, q, p):
        r = q[0]
        return 0.5 * (p[0] * p[0] + p[1] * p[1] / (r * r) + sum(pi * pi for pi in p[2:6]))

    def clearance(self, q):
        return q[0] - RADIUS_GUARD


class Spherical4Chart(OrthogonalFrameChart):
    """
    Four points on a line: Jacobi coordinates (X, Y, Z, u) with spherical
    coordinates (rho, psi_1, psi_2) on (X, Y, Z)::

        X = rho sin(psi_2) cos(psi_1), Y = rho sin(psi_2) sin(psi_1), Z = rho cos(psi_2)

    Chart coordinates are ordered (rho, psi_1, psi_2, u).
    """

    name = "spherical4"
    dim = 4

    def __init__(self):
        self.frame = jacobi_matrix(4).U

    def from_frame(self, w, pw):
        X, Y, Z, u = w
        pX, pY, pZ, pu = pw
        R = dual.sqrt(X * X + Y * Y)
        rho = dual.sqrt(X * X + Y * Y + Z * Z)
        if dual.value(R) < RADIUS_GUARD:
            raise SingularChartError("Point lies on the polar axis of the spherical4 chart")
        psi1 = dual.atan2(Y, X)
        psi2 = dual.atan2(R, Z)
        p_rho = (X * pX + Y * pY + Z * pZ) / rho
        p_psi1 = X * pY - Y * pX
        p_psi2 = (Z * (X * pX + Y * pY)) / R - R * pZ
        return [rho, psi1, psi2, u], [p_rho, p_psi1, p_psi2, pu]

    def to_frame(self, q, p):
        rho, psi1, psi2, u = q
        p_rho, p_psi1, p_psi2, pu = p
        c1, s1 = dual.cos(psi1), dual.sin(psi1)
        c2, s2 = dual.cos(psi2), dual.sin(psi2)
        e_rho = (s2 * c1, s2 * s1, c2)
        e_psi2 = (c2 * c1, c2 * s1, -s2)
        e_psi1 = (-s1, c1, 0.0)
        position = [rho * e for e in e_rho]
        a, b, c = p_rho, p_psi2 / rho, p_psi1 / (rho * s2)
        momentum = [a * e_rho[i] + b * e_psi2[i] + c * e_psi1[i] for i in range(3)]
        return position + [u], momentum + [pu]

    def kinetic(self, q, p):
        rho, _, psi2, _ = q
        s2 = dual.sin(psi2)
        return 0.5 * (p[0] * p[0] + p[2] * p[2] / (rho * rho) + p[1] * p[1] / (rho * rho * s2 * s2) + p[3] * p[3])

    def clearance(self, q):
        return min(q[0] - RADIUS_GUARD, abs(math.sin(q[2])) - POLAR_ANGLE_GUARD)


def get_chart(name, dim=None):
    """Chart factory used by the config layer and the potentials."""
    if name == "cartesian":
        return CartesianChart(dim)
    if name == "jacobi":
        return JacobiChart(dim)
    if name == "cylindrical3":
        return CylindricalChart()
    if name == "hyperspherical_cylindrical":
        return HypersphericalCylindricalChart(dim)
    if name == "polar_plane":
        return PlanePolarChart()
    if name == "spherical4":
        return Spherical4Chart()
    if name == "reduced_polar":
        return PolarChart()
    raise DomainError("Unknown chart %r" % name)


def _from_jacobi(chart, z, pz):
    # only the axis is rejected; polar points map by the atan2 convention and chart.inverse refuses them
    _check_pair(z, pz)
    z = check_finite(z, "z")
    pz = check_finite(pz, "pz")
    if len(z) != chart.dim:
        raise DomainError("The %s chart expects %s Jacobi coordinates, got %s" % (chart.name, chart.dim, len(z)))
    q, p = chart.from_jacobi(list(z), list(pz))
    return PhasePoint(chart.name, np.array(q, dtype=float), np.array(p, dtype=float))


def cylindrical3(z, pz):
    """
    Cylindrical coordinates (r, psi, u; p_r, p_psi, p_u) of a three-body
    Jacobi vector. From particle coordinates use ``cylindrical3(*to_jacobi(x, p))``.
    """
    return _from_jacobi(CylindricalChart(), z, pz)


def hyperspherical_cylindrical(z, pz, n):
    return _from_jacobi(HypersphericalCylindricalChart(n), z, pz)


def plane_reduction(x, p):
    """
    Reduces three points in a plane (six Cartesian coordinates) to the
    polar pair (r, psi) transverse to the invariance directions and the four
    axis coordinates u_1..u_4.
    """
    _check_pair(x, p)
    if len(x) != 6:
        raise DomainError("plane_reduction expects six coordinates, got %s" % len(x))
    return PlanePolarChart().forward(PhasePoint("cartesian", x, p))
