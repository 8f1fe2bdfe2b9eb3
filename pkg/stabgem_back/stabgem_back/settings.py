"""
Django settings for stabgem_back project.

Everything is read from the environment (a .env file is loaded first). The
STABGEM block holds the numerical limits and constants of the stabilizers app.
"""

import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.getenv(
    "SECRET_KEY", "django-insecure-5q1v!m0r7@x2a$stabgem-local-only-key-k8#d3e0w4z"
)

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = os.getenv("DEBUG", "True") == "True"

ALLOWED_HOSTS = os.getenv("ALLOWED_HOSTS", "").split(",") if os.getenv("ALLOWED_HOSTS") else []


# Application definition

INSTALLED_APPS = [
    "django.contrib.contenttypes",
    "django.contrib.auth",
    # Third-party apps
    "rest_framework",
    "django_filters",
    # Local apps
    "stabilizers",
]

MIDDLEWARE = []


# Database
# https://docs.djangoproject.com/en/5.2/ref/settings/#databases

if os.getenv("DB_ENGINE"):
    DATABASES = {
        "default": {
            "ENGINE": os.getenv("DB_ENGINE"),
            "NAME": os.getenv("DB_NAME"),
            "USER": os.getenv("DB_USER"),
            "PASSWORD": os.getenv("DB_PASSWORD"),
            "HOST": os.getenv("DB_HOST"),
            "PORT": os.getenv("DB_PORT"),
        }
    }
else:
    # Local runs keep the certificate ledger in a file next to manage.py
    DATABASES = {
        "default": {
            "ENGINE": "django.db.backends.sqlite3",
            "NAME": BASE_DIR / "stabgem.sqlite3",
        }
    }


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = True

USE_TZ = True

# Default primary key field type
# https://docs.djangoproject.com/en/5.2/ref/settings/#default-auto-field

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"


# ==============================================================================
# DJANGO REST FRAMEWORK CONFIGURATION
# ==============================================================================

REST_FRAMEWORK = {
    # Serializers only validate files and render reports; there is no API surface
    "DEFAULT_RENDERER_CLASSES": [
        "rest_framework.renderers.JSONRenderer",
    ],
    "DEFAULT_PARSER_CLASSES": [
        "rest_framework.parsers.JSONParser",
    ],
    "COERCE_DECIMAL_TO_STRING": False,
    "DATETIME_FORMAT": "%Y-%m-%dT%H:%M:%S%z",
}


# ==============================================================================
# STABGEM CONFIGURATION
# ==============================================================================

STABGEM = {
    # Worker pool size for certificate witnesses; 0 means one worker per core
    "JOBS": int(os.getenv("STABGEM_JOBS", "0")),
    # Fidelity gap used by patch certificates
    "EPSILON_PRIME": float(os.getenv("STABGEM_EPSILON_PRIME", "0.01")),
    # Dense oracle capacity
    "ORACLE_PURE_LIMIT": int(os.getenv("STABGEM_ORACLE_PURE_LIMIT", "20")),
    "ORACLE_MIXED_LIMIT": int(os.getenv("STABGEM_ORACLE_MIXED_LIMIT", "12")),
    # Exhaustive search limits
    "E0_BRUTEFORCE_LIMIT": int(os.getenv("STABGEM_E0_BRUTEFORCE_LIMIT", "12")),
    "DISTANCE_EXHAUSTIVE_LIMIT": int(os.getenv("STABGEM_DISTANCE_EXHAUSTIVE_LIMIT", "24")),
    # Geometry
    "LOCALITY_RADIUS": float(os.getenv("STABGEM_LOCALITY_RADIUS", "1.5")),
    "TRUNCATION_RADIUS_FACTOR": float(os.getenv("STABGEM_TRUNCATION_RADIUS_FACTOR", "3.0")),
    "THEOREM2_THRESHOLD": float(os.getenv("STABGEM_THEOREM2_THRESHOLD", "1.0")),
    # Where report files land when no --output is given
    "REPORT_DIR": Path(os.getenv("STABGEM_REPORT_DIR", str(BASE_DIR / "reports"))),
}


# ==============================================================================
# LOGGING CONFIGURATION
# ==============================================================================

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "{levelname} {asctime} {name} {message}",
            "style": "{",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "verbose",
        },
    },
    "loggers": {
        "stabilizers": {
            "handlers": ["console"],
            "level": os.getenv("STABGEM_LOG_LEVEL", "INFO"),
            "propagate": False,
        },
    },
}
