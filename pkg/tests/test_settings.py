import os

BASE_DIR = os.path.dirname(__file__)

INSTALLED_APPS = ("superint_lab",)

DATABASES = {"default": {"ENGINE": "django.db.backends.sqlite3", "NAME": ":memory:"}}

SECRET_KEY = "secretkey"
USE_TZ = True

SUPERINT_COLLISION_GUARD = 1e-10
SUPERINT_BRACKET_TOLERANCE = 1e-10
SUPERINT_FD_BRACKET_TOLERANCE = 1e-5
SUPERINT_RANK_TOLERANCE = 1e-8
SUPERINT_OUTPUT_DIR = os.path.join(BASE_DIR, "superint-output")

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "handlers": {"console": {"class": "logging.StreamHandler"}},
    "loggers": {"superint_lab": {"handlers": ["console"], "level": "WARNING"}},
}
