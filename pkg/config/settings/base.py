from pathlib import Path

from decouple import config

BASE_DIR = Path(__file__).resolve().parent.parent.parent

SECRET_KEY = config('SECRET_KEY', default='change-me')

DEBUG = False

INSTALLED_APPS = [
    'django.contrib.contenttypes',

    # Third-party apps
    'rest_framework',

    # Local apps
    'probability.apps.ProbabilityConfig',
    'dynamics.apps.DynamicsConfig',
    'second_law.apps.SecondLawConfig',
    'sampler.apps.SamplerConfig',
    'experiments.apps.ExperimentsConfig',
]

# Reports are rendered by experiments.renderers; these only pin DRF's defaults
REST_FRAMEWORK = {
    'COERCE_DECIMAL_TO_STRING': False,
    'STRICT_JSON': True,
    'UNICODE_JSON': True,
}

if config('RDS_HOSTNAME', default=''):
    DATABASES = {
        'default': {
            'ENGINE': 'django.db.backends.postgresql',
            'NAME': config('RDS_DB_NAME', default='postgres'),
            'USER': config('RDS_USERNAME', default='postgres'),
            'PASSWORD': config('RDS_PASSWORD', default=''),
            'HOST': config('RDS_HOSTNAME'),
            'PORT': config('RDS_PORT', default='5432'),
        }
    }
else:
    DATABASES = {
        'default': {
            'ENGINE': 'django.db.backends.sqlite3',
            'NAME': BASE_DIR / 'db.sqlite3',
        }
    }

LANGUAGE_CODE = 'en-us'
TIME_ZONE = 'UTC'
USE_I18N = False
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# Run defaults for the corrstoch command. Flags and config files override these.
CORRSTOCH = {
    'DEFAULT_SEED': config('CORRSTOCH_SEED', default=0, cast=int),
    'DEFAULT_TRIALS': config('CORRSTOCH_TRIALS', default=500, cast=int),
    'DEFAULT_SAMPLES': config('CORRSTOCH_SAMPLES', default=10000, cast=int),
    'DEFAULT_TOLERANCE': config('CORRSTOCH_TOLERANCE', default=1e-9, cast=float),
    'DEFAULT_UNITS': config('CORRSTOCH_UNITS', default='nats'),
    'DEFAULT_WORKERS': config('CORRSTOCH_WORKERS', default=1, cast=int),
    'SAMPLER_CHUNK': config('CORRSTOCH_SAMPLER_CHUNK', default=2 ** 18, cast=int),
    'SAMPLER_SEEDS': config('CORRSTOCH_SAMPLER_SEEDS', default=5, cast=int),
}

LOG_LEVEL = config('LOG_LEVEL', default='WARNING')

# Console output goes to stderr; stdout is reserved for report documents.
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {thread:d} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'level': 'DEBUG',
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': LOG_LEVEL,
    },
}
