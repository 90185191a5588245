import math

import numpy as np
import pytest

from superint_lab.exceptions import DomainError
from superint_lab.utils import (
    check_finite,
    format_float,
    get_bracket_tolerance,
    get_integrator_defaults,
    get_output_dir,
    get_sampling_margin,
)


def test_settings_getters(settings):
    assert get_bracket_tolerance() == 1e-10
    assert get_bracket_tolerance(exact=False) == 1e-5
    assert get_sampling_margin() == 0.1
    settings.SUPERINT_SAMPLING_MARGIN = 0.25
    assert get_sampling_margin() == 0.25


def test_integrator_defaults_merge_settings(settings):
    settings.SUPERINT_INTEGRATOR = {"dt": 0.01}
    assert get_integrator_defaults() == {"dt": 0.01, "guard_radius": 1e-6, "max_force": 1e8}


def test_output_dir_precedence(settings, monkeypatch):
    settings.SUPERINT_OUTPUT_DIR = "from-settings"
    monkeypatch.delenv("SUPERINT_OUTPUT_DIR", raising=False)
    assert get_output_dir() == "from-settings"
    assert get_output_dir(config_value="from-config") == "from-config"
    monkeypatch.setenv("SUPERINT_OUTPUT_DIR", "from-env")
    assert get_output_dir(config_value="from-config") == "from-env"
    assert get_output_dir("from-cli", "from-config") == "from-cli"


def test_check_finite():
    assert np.array_equal(check_finite([1, 2]), np.array([1.0, 2.0]))
    with pytest.raises(DomainError):
        check_finite([1.0, math.nan], "x")


def test_format_float_round_trips():
    for value in (0.1, 1 / 3, -2.5e-17, 1e300):
        assert float(format_float(value)) == value
