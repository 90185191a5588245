import math

import numpy as np
import pytest

from superint_lab.exceptions import ChartMismatchError, DomainError
from superint_lab.geometry import PhasePoint, get_chart
from superint_lab.integrals import integral_set
from superint_lab.observables import (
    Observable,
    bracket_residual,
    coordinate,
    detect_momentum_degree,
    finite_difference_gradient,
    gradient_spectra,
    hamiltonian,
    independence_rank,
    poisson_bracket,
    symplectic_form,
)
from superint_lab.potentials import Angular3
from superint_lab.sampling import sample_points


@pytest.fixture
def cylindrical():
    return get_chart("cylindrical3")


@pytest.fixture
def point():
    return PhasePoint("cylindrical3", [1.2, 0.4, -0.3], [0.5, -0.7, 0.2])


def test_coordinate_brackets_are_canonical(cylindrical, point):
    q = [coordinate(cylindrical, i) for i in range(3)]
    p = [coordinate(cylindrical, i, momentum=True) for i in range(3)]
    matrix = np.array([[poisson_bracket(f, g, point) for g in q + p] for f in q + p])
    assert np.array_equal(matrix, symplectic_form(3))


def test_bracket_is_antisymmetric_and_leibniz(ttw1, cylindrical, point):
    H = hamiltonian(ttw1, cylindrical)
    f = Observable(lambda q, p: q[0] * p[1] + math.cos(q[1]) * p[2] ** 2, cylindrical, name="f")
    g = Observable(lambda q, p: p[0] * p[0] + q[2], cylindrical, name="g")
    assert poisson_bracket(f, H, point) == pytest.approx(-poisson_bracket(H, f, point))
    left = poisson_bracket(f * g, H, point)
    right = f(point) * poisson_bracket(g, H, point) + g(point) * poisson_bracket(f, H, point)
    assert left == pytest.approx(right, rel=1e-12)


def test_bracket_rejects_mixed_charts(ttw1, point):
    H = hamiltonian(ttw1, "reduced_polar")
    with pytest.raises(ChartMismatchError):
        poisson_bracket(H, hamiltonian(ttw1, "cylindrical3"), point)


def test_observable_rejects_point_of_other_chart(ttw1, reduced_point):
    with pytest.raises(ChartMismatchError):
        hamiltonian(ttw1, "cylindrical3")(reduced_point)


def test_hamiltonian_is_chart_independent(ttw1, cylindrical, point):
    cartesian = cylindrical.inverse(point)
    H_cyl = hamiltonian(ttw1, cylindrical)
    H_cart = hamiltonian(ttw1, "cartesian")
    assert H_cart(cartesian) == pytest.approx(H_cyl(point), rel=1e-12)


def test_exact_gradient_matches_finite_differences(ttw1, cylindrical, point):
    H = hamiltonian(ttw1, cylindrical)
    assert H.full_gradient(point) == pytest.approx(finite_difference_gradient(H, point), rel=1e-6, abs=1e-8)


def test_observable_algebra_tracks_degrees(cylindrical):
    a = Observable(lambda q, p: p[0], cylindrical, name="a", degree=1)
    b = Observable(lambda q, p: p[1] * p[1], cylindrical, name="b", degree=2)
    assert (a + b).degree == 2
    assert (a * b).degree == 3
    assert (2.0 * b).degree == 2
    assert (b / 2.0).name == "b*0.5"
    assert (-a).name == "-a"
    with pytest.raises(TypeError):
        a / b


def test_momentum_degree_detection(cylindrical, point):
    cubic = Observable(lambda q, p: p[0] ** 3 + q[0] * p[1], cylindrical, name="cubic")
    assert detect_momentum_degree(cubic, point) == 3
    assert detect_momentum_degree(coordinate(cylindrical, 1), point) == 0


def test_bracket_residual_of_the_three_body_set(ttw1):
    integrals = integral_set(ttw1)
    points = sample_points(integrals.chart, 200, seed=7, spec=ttw1)
    report = bracket_residual(integrals, points)
    assert report.passed
    assert report.points == 200
    assert set(report.residuals) == {"H1", "H2", "H3"}
    assert report.max_residual < 1e-10
    # H1, H2 and H3 are in involution with H but not with each other
    assert report.pairwise.shape == (3, 3)
    assert report.pairwise[1, 2] > 1e-3


def test_bracket_residual_needs_points(ttw1):
    with pytest.raises(DomainError):
        bracket_residual(integral_set(ttw1), [])


def test_bracket_residual_uses_loose_tolerance_for_fd_profiles():
    spec = Angular3({"name": "inverse_cos2_sin2", "params": {"a": 1.0, "b": 2.0}, "derivative": "finite_difference"})
    integrals = integral_set(spec)
    assert not integrals.exact
    points = sample_points(integrals.chart, 50, seed=3, spec=spec)
    report = bracket_residual(integrals, points)
    assert report.tolerance == 1e-5
    assert report.passed


def test_independence_rank_and_duplicates(ttw1):
    integrals = integral_set(ttw1)
    observables = integrals.observables()
    points = sample_points(integrals.chart, 20, seed=11, spec=ttw1)
    assert independence_rank(observables, points) == 4
    duplicated = observables + [observables[1] * 2.0]
    assert independence_rank(duplicated, points) == 4
    spectra = gradient_spectra(observables, points)
    assert len(spectra) == 20
    assert all(s[0] == 1.0 for s in spectra)


def test_gradient_spectra_need_input():
    with pytest.raises(DomainError):
        gradient_spectra([], [])
