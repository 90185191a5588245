import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superint_lab.exceptions import ChartMismatchError, DomainError, SingularityError
from superint_lab.geometry import PhasePoint, get_chart
from superint_lab.potentials import (
    CALOGERO_ANGULAR_CONSTANT,
    TTW,
    WOLFES_ANGULAR_CONSTANT,
    Angular3,
    Calogero,
    CalogeroChain,
    Evans,
    Plane23,
    Wolfes,
    build_potential,
    check_homogeneity,
    check_translation_invariance,
    eval_angular_form,
    eval_difference_form,
    shift_profile,
)

from .utils import GENERIC_X3, random_configuration


def cylindrical(x):
    return get_chart("cylindrical3").forward(PhasePoint("cartesian", x, np.zeros(3))).q


def test_calogero_difference_form():
    assert eval_difference_form(Calogero(1.0, 1.0, 1.0), [0.0, 1.0, 3.0]) == pytest.approx(1 + 1 / 4 + 1 / 9)
    assert eval_difference_form(Calogero(2.0, 0.0, 0.0), [0.0, 1.0, 3.0]) == pytest.approx(2.0)


def test_wolfes_difference_form():
    # X1 - X2 = 1, X2 - X3 = -5, X3 - X1 = 4
    assert eval_difference_form(Wolfes(1.0, 1.0, 1.0), [0.0, 1.0, 3.0]) == pytest.approx(1 + 1 / 25 + 1 / 16)


def test_angular_constants_match_difference_form(rng):
    g, h = 0.8, 1.3
    calogero, wolfes = Calogero(g, g, g), Wolfes(h, h, h)
    for _ in range(1000):
        x = random_configuration(rng, 3)
        r, psi, _ = cylindrical(x)
        expected_c = CALOGERO_ANGULAR_CONSTANT * g / (r * math.cos(3 * psi)) ** 2
        expected_w = WOLFES_ANGULAR_CONSTANT * h / (r * math.sin(3 * psi)) ** 2
        assert eval_difference_form(calogero, x) == pytest.approx(expected_c, rel=1e-10)
        assert eval_difference_form(wolfes, x) == pytest.approx(expected_w, rel=1e-10)
    assert CALOGERO_ANGULAR_CONSTANT == 4.5
    assert WOLFES_ANGULAR_CONSTANT == 1.5


def test_collision_raises_singularity_error():
    with pytest.raises(SingularityError) as excinfo:
        eval_difference_form(Calogero(1.0, 1.0, 1.0), [0.0, 1.0, 1.0])
    assert excinfo.value.denominator == "X2"
    assert excinfo.value.value == 0.0


def test_wolfes_collision_of_the_middle_form():
    # x3 + x1 - 2 x2 = 0
    with pytest.raises(SingularityError):
        eval_difference_form(Wolfes(1.0, 1.0, 1.0), [1.0, 0.0, -1.0])


def test_evans_v1_constant_profile():
    spec = Evans("V1", profile={"name": "constant", "params": {"c": 3.0}})
    point = PhasePoint("spherical4", [2.0, 0.4, math.pi / 2, 0.0], [0.0] * 4)
    assert eval_angular_form(spec, point) == pytest.approx(3.0 / 4.0)


def test_uncoupled_collision_is_not_singular():
    assert eval_difference_form(Calogero(1.0, 0.0, 0.0), [0.0, 1.0, 1.0]) == pytest.approx(1.0)


def test_difference_form_checks_length():
    with pytest.raises(DomainError):
        eval_difference_form(Calogero(1.0, 1.0, 1.0), [0.0, 1.0])


def test_difference_form_rejects_non_finite():
    with pytest.raises(DomainError):
        eval_difference_form(Calogero(1.0, 1.0, 1.0), [0.0, math.inf, 2.0])


def test_angular_form_agrees_with_difference_form_3body(rng):
    for spec in (Calogero(1.0, 2.0, 0.5), Wolfes(1.0, 1.0, 1.0), TTW(n=2, k=0.5)):
        x = random_configuration(rng, 3)
        point = get_chart("cylindrical3").forward(PhasePoint("cartesian", x, np.zeros(3)))
        assert eval_angular_form(spec, point) == pytest.approx(eval_difference_form(spec, x), rel=1e-10)


def test_reduced_polar_angular_form():
    point = PhasePoint("reduced_polar", [2.0, math.pi / 6], [0.0, 0.0])
    assert eval_angular_form(TTW(n=1, k=1.0), point) == pytest.approx(1.0 / 4.0)


def test_angular_form_rejects_foreign_chart():
    point = PhasePoint("spherical4", [1.0, 0.3, 1.0, 0.0], [0.0] * 4)
    with pytest.raises(ChartMismatchError):
        eval_angular_form(TTW(n=1, k=1.0), point)


def test_angular_form_on_singular_angle():
    point = PhasePoint("reduced_polar", [1.0, 0.0], [0.0, 0.0])
    with pytest.raises(SingularityError):
        eval_angular_form(TTW(n=1, k=1.0), point)


def test_evans_angular_form_agrees_with_difference_form(evans, rng):
    chart = get_chart("spherical4")
    for _ in range(20):
        x = random_configuration(rng, 4)
        point = chart.forward(PhasePoint("cartesian", x, np.zeros(4)))
        assert eval_angular_form(evans, point) == pytest.approx(eval_difference_form(evans, x), rel=1e-10)


def test_plane23_ratio_profile_agrees_with_difference_form(rng):
    spec = Plane23(
        f1={"name": "constant", "params": {"c": 1.0}},
        f2={"name": "rational", "params": {"numerator": [1.0], "denominator": [2.0, 0.0, 1.0]}},
    )
    chart = get_chart("polar_plane")
    for _ in range(20):
        x = rng.uniform(-1.0, 1.0, 6)
        point = chart.forward(PhasePoint("cartesian", x, np.zeros(6)))
        assert eval_angular_form(spec, point) == pytest.approx(eval_difference_form(spec, x), rel=1e-10)


def test_plane23_needs_exactly_one_description():
    with pytest.raises(DomainError):
        Plane23()
    with pytest.raises(DomainError):
        Plane23(profile={"name": "zero"}, f1={"name": "zero"})


def test_calogero_chain_angular_form(rng):
    spec = CalogeroChain([1.0, 0.5, 2.0, 0.25])
    chart = spec.chart()
    x = random_configuration(rng, 5)
    point = chart.forward(PhasePoint("cartesian", x, np.zeros(5)))
    assert eval_angular_form(spec, point) == pytest.approx(eval_difference_form(spec, x), rel=1e-10)


@pytest.mark.parametrize(
    "spec",
    [
        Calogero(1.0, 2.0, 3.0),
        Wolfes(1.0, 0.5, 2.0),
        TTW(n=2, k=1.5),
        Angular3({"name": "cos2", "params": {"a": 2.0, "b": 0.5}}),
        CalogeroChain([1.0, 2.0, 3.0]),
        Evans("V4", k=1.0, k1=1.0, k2=1.0, k3=1.0),
    ],
    ids=lambda spec: spec.family,
)
def test_gradient_matches_finite_differences(spec, rng):
    x = random_configuration(rng, spec.particles)
    grad = spec.gradient(x)
    step = 1e-6
    for i in range(spec.particles):
        plus, minus = x.copy(), x.copy()
        plus[i] += step
        minus[i] -= step
        fd = (eval_difference_form(spec, plus) - eval_difference_form(spec, minus)) / (2 * step)
        assert grad[i] == pytest.approx(fd, rel=1e-5, abs=1e-6)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(-5.0, 5.0))
def test_homogeneity_and_translation_invariance(lam, c):
    for spec in (Calogero(1.0, 2.0, 3.0), Wolfes(1.0, 1.0, 1.0), TTW(n=1, k=1.0)):
        assert check_homogeneity(spec, GENERIC_X3, lam) < 1e-10
        assert check_translation_invariance(spec, GENERIC_X3, c) < 1e-9


def test_plane23_translation_invariance_in_all_directions(plane23, rng):
    x = rng.uniform(-1.0, 1.0, 6)
    assert check_translation_invariance(plane23, x, 0.37) < 1e-9
    assert check_homogeneity(plane23, x, 2.5) < 1e-10


def test_homogeneity_needs_positive_scale():
    with pytest.raises(DomainError):
        check_homogeneity(Calogero(1.0, 1.0, 1.0), GENERIC_X3, 0.0)


def test_shift_profile(calogero, wolfes):
    shifted = shift_profile(calogero.angular_profile(), math.pi / 6)
    target = wolfes.angular_profile()
    for psi in (0.1, 0.4, 1.3, -2.0):
        assert shifted(psi) == pytest.approx(target(psi), rel=1e-12)
    assert shifted.params["shift"] == pytest.approx(math.pi / 6)
    profile = calogero.angular_profile()
    assert shift_profile(profile, 0.0) is profile


def test_build_potential():
    spec = build_potential("ttw", n=2, k=0.5)
    assert isinstance(spec, TTW)
    assert spec.describe() == {"family": "ttw", "n": 2, "k": 0.5}


@pytest.mark.parametrize(
    "family,params",
    [
        ("harmonic", {}),
        ("ttw", {"n": 0}),
        ("ttw", {"n": 1, "k": -1.0}),
        ("calogero", {"k1": 1.0}),
        ("evans", {"variant": "V9"}),
        ("evans", {"variant": "V1"}),
        ("evans", {"variant": "V4", "profile": {"name": "zero"}}),
        ("calogero_chain", {"couplings": [1.0]}),
    ],
)
def test_build_potential_rejects_bad_input(family, params):
    with pytest.raises(DomainError):
        build_potential(family, **params)


def test_clearance_is_scale_free(rng):
    spec = Calogero(1.0, 1.0, 1.0)
    x = random_configuration(rng, 3)
    assert spec.clearance(3.0 * x) == pytest.approx(spec.clearance(x))
    assert spec.clearance(x + 2.0) == pytest.approx(spec.clearance(x))
