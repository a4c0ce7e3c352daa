"""
Django settings for the quantrs project (quantitative Robbins-Siegmund bounds)
"""

from pathlib import Path
import os
from dotenv import load_dotenv

# Build paths FIRST
BASE_DIR = Path(__file__).resolve().parent.parent.parent

# THEN load .env with explicit path
load_dotenv(BASE_DIR / '.env')

SECRET_KEY = os.getenv('SECRET_KEY', "django-insecure-quantrs-local-only")

DEBUG = os.getenv('DEBUG', 'True') == 'True'

ALLOWED_HOSTS = os.getenv('ALLOWED_HOSTS', 'localhost,127.0.0.1').split(',')

# Application definition
INSTALLED_APPS = [
    # Third-party apps
    'rest_framework',

    # Local apps
    'moduli.apps.ModuliConfig',
    'processes.apps.ProcessesConfig',
    'estimators.apps.EstimatorsConfig',
    'verify.apps.VerifyConfig',
    'experiments.apps.ExperimentsConfig',
]

LANGUAGE_CODE = "en-us"
TIME_ZONE = "UTC"
USE_I18N = False
USE_TZ = True

# REST Framework is used for serializers only
REST_FRAMEWORK = {
    'UNAUTHENTICATED_USER': None,
    'DEFAULT_AUTHENTICATION_CLASSES': [],
    'DEFAULT_PERMISSION_CLASSES': [],
    'COERCE_DECIMAL_TO_STRING': False,
}

# Logging
LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '%(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        app: {'handlers': ['console'], 'level': LOG_LEVEL, 'propagate': False}
        for app in ('moduli', 'processes', 'estimators', 'verify', 'experiments')
    },
}

# Bound calculus
QRS_UNIVERSAL_CONSTANT = 200  # c in the supermartingale rate c(K/λε)²
QRS_CLOSED_FORM_CONSTANT = 4096 * QRS_UNIVERSAL_CONSTANT + 336  # c̄ = 819,536
QRS_SATURATION_CAP = int(os.getenv('QRS_SATURATION_CAP', 2 ** 48))
QRS_DIVERGENCE_SCAN_CAP = int(os.getenv('QRS_DIVERGENCE_SCAN_CAP', 10 ** 8))
QRS_GRID = (0.5, 0.25, 0.1, 0.05, 0.01)

# Monte-Carlo
QRS_CONFIDENCE = float(os.getenv('QRS_CONFIDENCE', '0.997'))
QRS_WORKERS = int(os.getenv('QRS_WORKERS', '1'))
QRS_CHUNK_SIZE = int(os.getenv('QRS_CHUNK_SIZE', '128'))

# Experiment output
QRS_OUTPUT_DIR = Path(os.getenv('QRS_OUTPUT_DIR', BASE_DIR / 'reports'))
QRS_TRACE_DUMP_LIMIT = 10
