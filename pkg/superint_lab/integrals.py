"""
The first-integral sets of the superintegrable families and the higher
order integral of the TTW-type systems.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Tuple

import numpy as np

from superint_lab import dual
from superint_lab.exceptions import ChartMismatchError, DomainError
from superint_lab.geometry import PolarChart, get_chart
from superint_lab.observables import (
    IntegralSet,
    Observable,
    _bracket_from_gradients,
    _bracket_scale,
    hamiltonian,
    lift_reduced,
    profile_is_exact,
)
from superint_lab.potentials import TTW, Evans, Plane23

logger = logging.getLogger(__name__)

MAX_SIGN_SCAN_TERMS = 20


def integral_set_3body(spec, chart="cylindrical3", corrupt_h3=False, fifth=False):
    """
    H, H1 = p_psi^2 / 2 + F(psi), H2 = p_u^2 / 2 and
    H3 = (r p_u - u p_r)^2 / 2 + (u^2 / r^2) H1 in the cylindrical3 chart.

    `corrupt_h3` flips the sign of the second term of H3 (a negative
    control). With `fifth`, the higher order integral of a ttw system is
    screened as a candidate.
    """
    if not spec.single_angle:
        raise ChartMismatchError("%s has no single-angle profile" % spec.family)
    chart = get_chart(chart) if isinstance(chart, str) else chart
    if chart.name != "cylindrical3":
        raise ChartMismatchError("The three-body integrals are written in cylindrical3, got %s" % chart.name)
    profile = spec.angular_profile()
    exact = profile.exact
    sign = -1.0 if corrupt_h3 else 1.0

    def h1(q, p):
        return 0.5 * p[1] * p[1] + profile(q[1])

    def h2(q, p):
        return 0.5 * p[2] * p[2]

    def h3(q, p):
        r, u = q[0], q[2]
        return 0.5 * (r * p[2] - u * p[0]) ** 2 + sign * (u * u / (r * r)) * h1(q, p)

    members = [
        Observable(h1, chart, name="H1", degree=2, exact=exact),
        Observable(h2, chart, name="H2", degree=2),
        Observable(h3, chart, name="H3*" if corrupt_h3 else "H3", degree=2, exact=exact),
    ]
    candidates = []
    if fifth:
        if not isinstance(spec, TTW):
            raise DomainError("The higher order integral is defined for the ttw family only")
        candidates.append(lift_reduced(fifth_integral(spec.n, spec.k), chart))
    return IntegralSet(
        system=spec.family,
        hamiltonian=hamiltonian(spec, chart),
        members=members,
        claimed_independent=4,
        candidates=candidates,
    )


@dataclass(frozen=True)
class CoefficientTable:
    """Exact coefficients A[sigma][i], sigma = 0..n, i = 0..2 sigma + 1."""

    n: int
    entries: Dict[Tuple[int, int], Fraction]

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, key):
        return self.entries[key]

    @staticmethod
    def order(sigma, i):
        """Derivative order l = 2 sigma + 1 - i paired with p_psi^l."""
        return 2 * sigma + 1 - i

    def rows(self):
        """(sigma, i, l, numerator, denominator) in table order."""
        for (sigma, i), value in sorted(self.entries.items()):
            yield sigma, i, self.order(sigma, i), value.numerator, value.denominator


def coefficient_table(n):
    """
    A[sigma][i] = (-1)^(2n - sigma) / m^(2 sigma + 1 - i) * C(m, i)
    * C(floor((m - i) / 2), floor((2 sigma + 1 - i) / 2)), m = 2n + 1.
    """
    if int(n) != n or n < 1:
        raise DomainError("coefficient_table needs an integer n >= 1, got %r" % n)
    n = int(n)
    m = 2 * n + 1
    entries = {}
    for sigma in range(n + 1):
        for i in range(2 * sigma + 2):
            l = 2 * sigma + 1 - i  # noqa: E741
            value = Fraction((-1) ** (2 * n - sigma), m**l) * math.comb(m, i) * math.comb((m - i) // 2, l // 2)
            entries[(sigma, i)] = value
    return CoefficientTable(n=n, entries=entries)


def _cos_derivative(m, l, psi):
    """d^l/dpsi^l cos(m psi) = m^l cos(m psi + l pi / 2), by the exact cycle."""
    phase = l % 4
    scale = float(m**l)
    if phase == 0:
        return scale * dual.cos(m * psi)
    if phase == 1:
        return -scale * dual.sin(m * psi)
    if phase == 2:
        return -scale * dual.cos(m * psi)
    return scale * dual.sin(m * psi)


def fifth_integral_terms(n, k):
    """
    The terms of the higher order integral without their coefficients:
    ``[(sigma, i, l, Observable), ...]`` on the reduced_polar chart, each
    r^-(m - i) (2k / sin^2(m psi))^(n - sigma) d^l cos(m psi) p_r^i p_psi^l.
    """
    chart = PolarChart()
    m = 2 * n + 1
    terms = []
    for sigma in range(n + 1):
        for i in range(2 * sigma + 2):
            l = 2 * sigma + 1 - i  # noqa: E741

            def func(q, p, sigma=sigma, i=i, l=l):
                r, psi = q
                weight = (2.0 * k / dual.sin(m * psi) ** 2) ** (n - sigma) if sigma < n else 1.0
                return weight * _cos_derivative(m, l, psi) * p[0] ** i * p[1] ** l / r ** (m - i)

            terms.append((sigma, i, l, Observable(func, chart, name="T%s_%s" % (sigma, i), degree=i + l)))
    return terms


def fifth_integral(n, k, table=None):
    """
    The integral of momentum degree 2n + 1 of H = (p_r^2 + p_psi^2 / r^2) / 2
    + k / (r sin((2n + 1) psi))^2, on the reduced_polar chart.
    """
    if int(n) != n or n < 1:
        raise DomainError("fifth_integral needs an integer n >= 1, got %r" % n)
    if k <= 0:
        raise DomainError("fifth_integral needs k > 0, got %r" % k)
    n = int(n)
    table = coefficient_table(n) if table is None else table
    terms = fifth_integral_terms(n, float(k))
    coefficients = [float(table[(sigma, i)]) for sigma, i, _, _ in terms]
    funcs = [term.func for _, _, _, term in terms]

    def func(q, p):
        total = 0.0
        for c, f in zip(coefficients, funcs):
            total = total + c * f(q, p)
        return total

    return Observable(func, PolarChart(), name="I%s" % (2 * n + 1), degree=2 * n + 1)


def reduced_hamiltonian(n, k):
    return hamiltonian(TTW(n=n, k=k), "reduced_polar")


@dataclass
class SignScan:
    n: int
    # residuals are brackets normalized by their term scale, maxed over the sample
    default_residual: float
    best_residual: float
    best_signs: Tuple[int, ...]
    vanishing: Tuple[Tuple[int, ...], ...]
    # smallest normalized singular value of the per-term bracket matrix
    min_singular_value: float
    terms: Tuple[Tuple[int, int, int], ...]


def fifth_integral_sign_scan(n, k, points, threshold=1e-9, chunk=1 << 14):
    """
    {H, I} is linear in the table entries, so the bracket of every sign
    assignment s is B (s * |A|) with B the per-term bracket matrix over
    `points`. Scans all assignments with the first sign fixed (I and -I have
    the same residual).
    """
    table = coefficient_table(n)
    terms = fifth_integral_terms(n, float(k))
    if len(terms) > MAX_SIGN_SCAN_TERMS:
        raise DomainError("Sign scan over %s terms is too large" % len(terms))
    H = reduced_hamiltonian(n, k)
    magnitudes = np.array([abs(float(table[(sigma, i)])) for sigma, i, _, _ in terms])
    printed = np.sign([float(table[(sigma, i)]) for sigma, i, _, _ in terms])
    rows, scales = [], []
    for point in points:
        gH = H.full_gradient(point)
        row, scale = [], 0.0
        for _, _, _, term in terms:
            g = term.full_gradient(point)
            row.append(_bracket_from_gradients(gH, g, point.dim))
            scale += _bracket_scale(gH, g, point.dim)
        rows.append(row)
        scales.append(max(1.0, scale))
    B = np.array(rows) * magnitudes / np.array(scales)[:, None]
    sigma = np.linalg.svd(B, compute_uv=False)
    min_singular = float(sigma[-1] / sigma[0]) if sigma[0] > 0 else 0.0

    default_residual = float(np.max(np.abs(B @ printed)))
    count = len(terms) - 1
    best_residual, best_signs, vanishing = math.inf, None, []
    for start in range(0, 1 << count, chunk):
        stop = min(start + chunk, 1 << count)
        codes = np.arange(start, stop)
        bits = (codes[:, None] >> np.arange(count)) & 1
        signs = np.hstack([np.ones((len(codes), 1)), 1.0 - 2.0 * bits])
        residuals = np.max(np.abs(B @ signs.T), axis=0)
        best = int(np.argmin(residuals))
        if residuals[best] < best_residual:
            best_residual, best_signs = float(residuals[best]), tuple(int(s) for s in signs[best])
        for index in np.nonzero(residuals < threshold)[0]:
            vanishing.append(tuple(int(s) for s in signs[index]))
    logger.info(
        "Sign scan n=%s: printed table residual %.3e, best %.3e, %s vanishing assignments",
        n,
        default_residual,
        best_residual,
        len(vanishing),
    )
    return SignScan(
        n=n,
        default_residual=default_residual,
        best_residual=best_residual,
        best_signs=best_signs,
        vanishing=tuple(vanishing),
        min_singular_value=min_singular,
        terms=tuple((sigma, i, l) for sigma, i, l, _ in terms),
    )


def evans_candidates(spec, chart, hamiltonian_obs, h5):
    """
    Candidate integrals for the three-dimensional part of an Evans system.
    They are screened by their bracket with the Hamiltonian; none is
    assumed.
    """
    profile = spec.profile
    k, k1, k2, k3 = spec.k, spec.k1, spec.k2, spec.k3
    exact = profile_is_exact(spec)

    if spec.variant == "V4":

        def azimuthal(psi1):
            return k * (k2 / dual.cos(psi1) ** 2 + k3 / dual.sin(psi1) ** 2)

    else:
        azimuthal = profile

    axial = {"V2": k, "V4": k * k1}.get(spec.variant, 0.0)

    def l_azimuthal(q, p):
        return 0.5 * p[1] * p[1] + azimuthal(q[1])

    def p_axial(q, p):
        w, pw = chart.to_frame(q, p)
        total = 0.5 * pw[2] * pw[2]
        if axial != 0.0:
            total = total + axial / w[2] ** 2
        return total

    def parabolic(q, p):
        rho, psi2 = q[0], q[2]
        c2 = dual.cos(psi2)
        xi, eta = rho * (1.0 + c2), rho * (1.0 - c2)
        total_ = xi + eta
        p_xi = 0.5 * p[0] - dual.sqrt(eta / xi) / total_ * p[2]
        p_eta = 0.5 * p[0] + dual.sqrt(xi / eta) / total_ * p[2]
        L = l_azimuthal(q, p)
        value = 2.0 * xi * eta * (p_xi * p_xi - p_eta * p_eta) + L * (eta / xi - xi / eta)
        if spec.variant == "V3":
            value = value - k * eta / xi - k * xi / eta
        return value / total_

    def plane_momentum(a, b, ca, cb):
        def func(q, p):
            w, pw = chart.to_frame(q, p)
            A, B = w[a], w[b]
            total = 0.5 * (A * pw[b] - B * pw[a]) ** 2
            if ca != 0.0:
                total = total + ca * B * B / (A * A)
            if cb != 0.0:
                total = total + cb * A * A / (B * B)
            return total

        return func

    return [
        (hamiltonian_obs - 0.5 * h5).renamed("H3D"),
        Observable(l_azimuthal, chart, name="L", degree=2, exact=exact),
        Observable(p_axial, chart, name="Pz", degree=2),
        Observable(parabolic, chart, name="K", degree=2, exact=exact),
        Observable(plane_momentum(0, 2, k * k2, k * k1), chart, name="Mxz", degree=2),
        Observable(plane_momentum(1, 2, k * k3, k * k1), chart, name="Myz", degree=2),
    ]


def integral_set_evans4(spec):
    """
    H^ = p_u^2 / 2 + H3D, H1 = (p_psi2^2 + p_psi1^2 / sin^2 psi2) / 2 + rho^2 V,
    H5 = p_u^2, H6 = (u p_rho - rho p_u)^2 / 2 + (u^2 / rho^2) H1, plus the
    screened candidates of `evans_candidates`.
    """
    if not isinstance(spec, Evans):
        raise ChartMismatchError("integral_set_evans4 needs an Evans potential, got %s" % spec.family)
    chart = spec.chart()
    exact = profile_is_exact(spec)

    def h1(q, p):
        s2 = dual.sin(q[2])
        return 0.5 * (p[2] * p[2] + p[1] * p[1] / (s2 * s2)) + spec.angular_energy(q[1], q[2])

    def h5(q, p):
        return p[3] * p[3]

    def h6(q, p):
        rho, u = q[0], q[3]
        return 0.5 * (u * p[0] - rho * p[3]) ** 2 + (u * u / (rho * rho)) * h1(q, p)

    H = hamiltonian(spec, chart)
    H5 = Observable(h5, chart, name="H5", degree=2)
    members = [
        Observable(h1, chart, name="H1", degree=2, exact=exact),
        H5,
        Observable(h6, chart, name="H6", degree=2, exact=exact),
    ]
    return IntegralSet(
        system="evans_%s" % spec.variant,
        hamiltonian=H,
        members=members,
        claimed_independent=6,
        candidates=evans_candidates(spec, chart, H, H5),
        notes={"candidates": "screened by bracket; only verified candidates enter the certified rank"},
    )


def integral_set_plane23(spec):
    """
    H1 = p_psi^2 / 2 + F(psi), H_i = p_i^2 and
    H'_i = (r p_i - u_i p_r)^2 / 2 + (u_i^2 / r^2) H1, i = 1..4, in the
    polar_plane chart.
    """
    if not isinstance(spec, Plane23):
        raise ChartMismatchError("integral_set_plane23 needs a plane23 potential, got %s" % spec.family)
    chart = spec.chart()
    profile = spec.angular_profile()

    def h1(q, p):
        return 0.5 * p[1] * p[1] + profile(q[1])

    members = [Observable(h1, chart, name="H1", degree=2, exact=profile.exact)]
    for i in range(4):

        def h(q, p, j=i + 2):
            return p[j] * p[j]

        members.append(Observable(h, chart, name="H_%s" % (i + 1), degree=2))
    for i in range(4):

        def h_prime(q, p, j=i + 2):
            r, u = q[0], q[j]
            return 0.5 * (r * p[j] - u * p[0]) ** 2 + (u * u / (r * r)) * h1(q, p)

        members.append(Observable(h_prime, chart, name="H'_%s" % (i + 1), degree=2, exact=profile.exact))
    return IntegralSet(
        system="plane23",
        hamiltonian=hamiltonian(spec, chart),
        members=members,
        claimed_independent=9,
        hamiltonian_in_rank=False,
    )


def has_integral_set(spec):
    return isinstance(spec, (Evans, Plane23)) or spec.single_angle


def integral_set(spec, fifth=False, corrupt_h3=False):
    """The integral set of `spec`'s family."""
    if isinstance(spec, Evans):
        return integral_set_evans4(spec)
    if isinstance(spec, Plane23):
        return integral_set_plane23(spec)
    if spec.single_angle:
        return integral_set_3body(spec, fifth=fifth, corrupt_h3=corrupt_h3)
    raise ChartMismatchError("No integral set for the %s family" % spec.family)

