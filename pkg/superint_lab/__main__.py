"""
``python -m superint_lab verify --config ttw.json --out out/``

Runs the ``superint`` management command without a Django project; when
``DJANGO_SETTINGS_MODULE`` is set, that project's settings are used instead.
"""
import os
import sys

from django.conf import settings
from django.core.management import execute_from_command_line

DEFAULT_LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {"plain": {"format": "%(levelname)s %(name)s: %(message)s"}},
    "handlers": {"console": {"class": "logging.StreamHandler", "formatter": "plain"}},
    "loggers": {"superint_lab": {"handlers": ["console"], "level": "INFO", "propagate": False}},
}


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    if not os.environ.get("DJANGO_SETTINGS_MODULE") and not settings.configured:
        settings.configure(INSTALLED_APPS=["superint_lab"], LOGGING=DEFAULT_LOGGING)
    execute_from_command_line(["superint_lab", "superint"] + list(argv))


if __name__ == "__main__":
    main()
