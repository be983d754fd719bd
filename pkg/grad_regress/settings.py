"""
Django settings for the grad_regress project.

The project hosts a single app, ``ogr``, which implements the online gradient
regression optimizer, its benchmark problems and the experiment harness.
Everything that varies between machines is read from the environment
(optionally through a ``.env`` file in the project root).
"""

from pathlib import Path
import os
from dotenv import load_dotenv
from django.core.management.utils import get_random_secret_key


# Load environment variables
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


def env_bool(name, default):
    value = os.getenv(name)
    if value is None:
        return default
    return value.strip().lower() in ('1', 'true', 'yes', 'on')


# No sessions or signed data are used; the key only satisfies Django.
SECRET_KEY = os.environ.get('DJANGO_SECRET_KEY') or get_random_secret_key()

DEBUG = env_bool('DEBUG', False)

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',
    'rest_framework',
    'ogr',
]

MIDDLEWARE = []

# The harness keeps no experiment database; Django only needs a default alias.
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# OGR harness settings
OGR_OUTPUT_ROOT = Path(os.getenv('OGR_OUTPUT_ROOT', BASE_DIR / 'runs'))
OGR_DEFAULT_STRIDE = int(os.getenv('OGR_DEFAULT_STRIDE', '1'))
OGR_MLP_STRIDE = int(os.getenv('OGR_MLP_STRIDE', '10'))
OGR_SELFTEST_LABELS = [
    label.strip()
    for label in os.getenv(
        'OGR_SELFTEST_LABELS',
        'ogr.tests.test_linalg,ogr.tests.test_regression,ogr.tests.test_subspace,'
        'ogr.tests.test_optimizer,ogr.tests.test_acceptance',
    ).split(',')
    if label.strip()
]

# Celery Configuration
CELERY_BROKER_URL = os.getenv('REDIS_URL', 'redis://localhost:6379/0')
CELERY_RESULT_BACKEND = os.getenv('REDIS_URL', 'redis://localhost:6379/0')
CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
CELERY_TIMEZONE = 'UTC'
# Desk-scale runs execute in-process unless a worker pool is available.
CELERY_TASK_ALWAYS_EAGER = env_bool('CELERY_TASK_ALWAYS_EAGER', True)

# Logging Configuration
OGR_LOG_DIR = Path(os.getenv('OGR_LOG_DIR', BASE_DIR / 'logs'))
OGR_LOG_LEVEL = os.getenv('OGR_LOG_LEVEL', 'INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {thread:d} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {asctime} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'file': {
            'level': 'DEBUG',
            'class': 'logging.FileHandler',
            'filename': OGR_LOG_DIR / 'ogr.log',
            'formatter': 'verbose',
        },
        'console': {
            'level': 'WARNING',
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'ogr': {
            'handlers': ['file', 'console'],
            'level': OGR_LOG_LEVEL,
            'propagate': False,
        },
    },
}

# Create logs directory if it doesn't exist
if not os.path.exists(OGR_LOG_DIR):
    os.makedirs(OGR_LOG_DIR)
