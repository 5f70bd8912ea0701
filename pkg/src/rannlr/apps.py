from __future__ import unicode_literals

from django.apps import AppConfig


class RannlrConfig(AppConfig):
    name = 'rannlr'
    verbose_name = "Randomized nonlinear rescaling"

    def ready(self):
        import rannlr.bench  # noqa: F401 registers the built-in problems
