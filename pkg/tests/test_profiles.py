import logging
import math

import pytest

from superint_lab import dual
from superint_lab.exceptions import ConfigError
from superint_lab.profiles import ProfileLibrary, build_profile, build_ratio, from_callable, register


def test_registered_profiles():
    assert {"zero", "constant", "inverse_sin2", "inverse_cos2", "ttw", "cos2", "inverse_cos2_sin2"} <= set(
        register.profiles
    )
    assert {"zero", "constant", "polynomial", "rational"} <= set(register.ratios)


def test_ttw_profile_value_and_derivative():
    profile = build_profile({"name": "ttw", "params": {"n": 1, "k": 2.0}})
    psi = 0.3
    assert profile(psi) == pytest.approx(2.0 / math.sin(3 * psi) ** 2)
    expected = -12.0 * math.cos(3 * psi) / math.sin(3 * psi) ** 3
    assert profile.derivative(psi) == pytest.approx(expected, rel=1e-12)
    assert profile.clearance(psi) == pytest.approx(abs(math.sin(3 * psi)))
    assert profile.describe() == {"name": "ttw", "params": {"n": 1, "k": 2.0}}


def test_zero_profile():
    profile = build_profile({"name": "zero"})
    assert profile.zero
    assert profile(1.0) == 0.0
    assert profile.clearance(1.0) == math.inf


def test_unknown_profile_is_a_config_error():
    with pytest.raises(ConfigError):
        build_profile({"name": "one_over_x"})


def test_bad_profile_params_are_a_config_error():
    with pytest.raises(ConfigError):
        build_profile({"name": "ttw", "params": {"q": 1}})


def test_unknown_profile_keys_are_rejected():
    with pytest.raises(ConfigError):
        build_profile({"name": "zero", "colour": "red"})


def test_bad_derivative_mode_is_rejected():
    with pytest.raises(ConfigError):
        build_profile({"name": "zero", "derivative": "symbolic"})


def test_finite_difference_fallback(caplog):
    exact = build_profile({"name": "inverse_cos2_sin2", "params": {"a": 1.0, "b": 2.0}})
    with caplog.at_level(logging.WARNING, logger="superint_lab"):
        approximate = build_profile(
            {"name": "inverse_cos2_sin2", "params": {"a": 1.0, "b": 2.0}, "derivative": "finite_difference"}
        )
    assert "finite-difference" in caplog.text
    assert not approximate.exact
    assert approximate.describe()["derivative"] == "finite_difference"
    psi = 0.7
    assert approximate(psi) == exact(psi)
    assert approximate.derivative(psi) == pytest.approx(exact.derivative(psi), rel=1e-6)


def test_from_callable_with_derivative_is_exact():
    profile = from_callable(math.sin, derivative=math.cos, name="sine")
    assert profile.exact
    _, grad = dual.gradient(lambda psi: profile(psi) * psi, [0.4])
    assert grad[0] == pytest.approx(math.cos(0.4) * 0.4 + math.sin(0.4))


def test_ratio_functions():
    rational = build_ratio({"name": "rational", "params": {"numerator": [1.0], "denominator": [1.0, 0.0, 1.0]}})
    assert rational(2.0) == pytest.approx(0.2)
    assert rational.clearance(0.0) == 1.0
    polynomial = build_ratio({"name": "polynomial", "params": {"coefficients": [1.0, 0.0, 3.0]}})
    assert polynomial(2.0) == 13.0
    assert build_ratio({"name": "zero"}).zero


def test_profile_library_registration():
    library = ProfileLibrary()

    @library.profile(name="double")
    def double(c=1.0):
        return from_callable(lambda psi: 2 * c * psi, derivative=lambda psi: 2 * c, name="double")

    assert library.get_profile("double", c=3.0)(1.0) == 6.0
    with pytest.raises(ConfigError):
        library.get_profile("triple")


def test_is_regular_uses_the_clearance():
    profile = build_profile({"name": "ttw", "params": {"n": 1, "k": 1.0}})
    assert profile.is_regular(math.pi / 6, margin=0.5)
    assert not profile.is_regular(0.01, margin=0.1)
    assert not profile.is_regular(0.0)
