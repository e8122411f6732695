"""
Django settings for the sumfreelab project.

The project has no web surface: it exists to host the ``sumfree`` app, whose
management commands are the command-line interface of the lab. Only the
settings those commands need are defined here.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/6.0/ref/settings/
"""

from pathlib import Path
import environ
import os

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

env = environ.Env(
    DJANGO_DEBUG=(bool, False),
    SUMFREE_LOG_LEVEL=(str, "WARNING"),
)
environ.Env.read_env(os.path.join(BASE_DIR, ".env"))

# Nothing is signed or served, but Django insists on having one.
SECRET_KEY = env("DJANGO_SECRET_KEY", default="sumfreelab-not-secret")
DEBUG = env("DJANGO_DEBUG")

ALLOWED_HOSTS: list[str] = []

# Application definition

INSTALLED_APPS = [
    "sumfree.apps.SumfreeConfig",
]

# No persistence beyond flat files: the dummy backend is enough.
DATABASES: dict = {}

# Caps for the exhaustive enumerations and exact solvers, e.g.
# SUMFREE_LAB_CAPS="element_cap=65536,enumeration_cap=1000000"
SUMFREE_LAB_CAPS = env.dict("SUMFREE_LAB_CAPS", cast={"value": int}, default={})

# Logging goes to stderr so that CSV/JSON on stdout stays byte-identical.
LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {"format": "%(levelname)s %(name)s: %(message)s"},
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "stream": "ext://sys.stderr",
            "formatter": "plain",
        },
    },
    "loggers": {
        "sumfree": {
            "handlers": ["console"],
            "level": env("SUMFREE_LOG_LEVEL"),
            "propagate": False,
        },
    },
}

# Internationalization
# https://docs.djangoproject.com/en/6.0/topics/i18n/

LANGUAGE_CODE = "en-us"

TIME_ZONE = "Europe/Madrid"

USE_I18N = False

USE_TZ = True
