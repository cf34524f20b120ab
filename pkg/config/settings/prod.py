from .base import *  # noqa: F403,F401
import os

DEBUG = False

# Recorded runs live in PostgreSQL
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.postgresql',
        'NAME': config('DB_NAME', default='corrstoch'),  # noqa: F405
        'USER': config('DB_USER', default='postgres'),  # noqa: F405
        'PASSWORD': config('DB_PASSWORD', default=''),  # noqa: F405
        'HOST': config('DB_HOST', default='localhost'),  # noqa: F405
        'PORT': config('DB_PORT', default='5432'),  # noqa: F405
    }
}

LOGGING['handlers']['file'] = {  # noqa: F405
    'level': 'INFO',
    'class': 'logging.FileHandler',
    'filename': os.path.join(BASE_DIR, 'corrstoch.log'),  # noqa: F405
    'formatter': 'verbose',
}
LOGGING['root']['handlers'] = ['console', 'file']  # noqa: F405
LOGGING['root']['level'] = 'INFO'  # noqa: F405
