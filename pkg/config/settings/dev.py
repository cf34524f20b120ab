from .base import *  # noqa: F403,F401

DEBUG = True
LOGGING['root']['level'] = config('LOG_LEVEL', default='INFO')  # noqa: F405
