import os

import numpy as np

from django.conf import settings

from superint_lab.exceptions import DomainError

REPORT_SCHEMA = "superint-report/1"

INTEGRATOR_DEFAULTS = {"dt": 1e-3, "guard_radius": 1e-6, "max_force": 1e8}


def get_setting(name, default):
    """
    Returns ``settings.SUPERINT_<name>`` or `default`.

    The numerical modules are usable outside a Django project, so an
    unconfigured settings object simply yields the default.
    """
    if not settings.configured:
        return default
    return getattr(settings, "SUPERINT_%s" % name, default)


def get_collision_guard():
    return get_setting("COLLISION_GUARD", 1e-10)


def get_bracket_tolerance(exact=True):
    if exact:
        return get_setting("BRACKET_TOLERANCE", 1e-10)
    return get_setting("FD_BRACKET_TOLERANCE", 1e-5)


def get_rank_tolerance():
    return get_setting("RANK_TOLERANCE", 1e-8)


def get_sampling_margin():
    return get_setting("SAMPLING_MARGIN", 0.1)


def get_integrator_defaults():
    defaults = dict(INTEGRATOR_DEFAULTS)
    defaults.update(get_setting("INTEGRATOR", {}))
    return defaults


def get_output_dir(cli_value=None, config_value=None):
    """
    Resolves the output directory: ``--out`` wins, then the
    ``SUPERINT_OUTPUT_DIR`` environment variable, then the config file,
    then the setting.
    """
    if cli_value:
        return cli_value
    env_value = os.environ.get("SUPERINT_OUTPUT_DIR")
    if env_value:
        return env_value
    if config_value:
        return config_value
    return get_setting("OUTPUT_DIR", "superint-output")


def format_float(value):
    """17 significant digits, '.' decimal separator; round-trips doubles."""
    return "%.17g" % value


def check_finite(values, what="vector"):
    array = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(array)):
        raise DomainError("%s has non-finite entries: %s" % (what, array))
    return array
