"""
Settings live in the ``RANNLR`` dictionary of the Django settings, so the package can be installed as an app of
a Django project. Standalone use (the ``rannlr`` command line, scripts, notebooks) configures Django on first
access with the overrides from the JSON file named by ``RANNLR_SETTINGS``.
"""
from __future__ import unicode_literals

import json
import logging
import os

from django.conf import settings

logger = logging.getLogger(__name__)

DEFAULTS = {
    'sampler': 'cumulative',
    'chunk_size': 65536,
    'workers': 1,
    'check_interval': 1000,
    'stall_factor': 10.0,
    'stall_patience': 3,
    'float_format': '%.17g',
    'log_level': 'WARNING',
}


def load_user_settings(path=None):
    """
    Read the settings overrides. The file is a JSON object whose keys are a subset of :py:data:`DEFAULTS`.

    :param path: The settings file. Falls back to the ``RANNLR_SETTINGS`` environment variable.
    :type path: str
    :return: The overrides, empty when no file is configured.
    :rtype: dict
    """
    path = path or os.environ.get('RANNLR_SETTINGS')
    if not path:
        return {}

    with open(path) as fp:
        overrides = json.load(fp)

    unknown = set(overrides) - set(DEFAULTS)
    if unknown:
        logger.warning("Ignoring unknown settings: %s", ', '.join(sorted(unknown)))
    return {key: value for key, value in overrides.items() if key in DEFAULTS}


def logging_config(level):
    """A ``LOGGING`` dictionary that sends the ``rannlr`` loggers to stderr at ``level``."""
    return {
        'version': 1,
        'disable_existing_loggers': False,
        'formatters': {
            'plain': {'format': '%(asctime)s %(levelname)s %(name)s: %(message)s'},
        },
        'handlers': {
            'console': {'class': 'logging.StreamHandler', 'formatter': 'plain'},
        },
        'loggers': {
            'rannlr': {'handlers': ['console'], 'level': str(level).upper(), 'propagate': False},
        },
    }


def configure():
    """
    Configure Django for standalone use unless a settings module or an earlier call already did.
    """
    if settings.configured or os.environ.get('DJANGO_SETTINGS_MODULE'):
        return
    user_settings = load_user_settings()
    settings.configure(
        INSTALLED_APPS=['rannlr'],
        RANNLR=user_settings,
        LOGGING=logging_config(user_settings.get('log_level', DEFAULTS['log_level'])),
    )


def get_setting(name):
    configure()
    return getattr(settings, 'RANNLR', {}).get(name, DEFAULTS[name])
