"""
Settings file for the rannlr test suite.
"""
from rannlr.conf import logging_config

SECRET_KEY = 'test'

INSTALLED_APPS = [
    'rannlr',
]

RANNLR = {}

LOGGING = logging_config('ERROR')

USE_TZ = True
