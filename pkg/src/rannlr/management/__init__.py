"""
The ``rannlr`` command line. Its subcommands are the Django management commands of the ``rannlr`` app, so inside a
project that installs the app they also run as ``django-admin bench ...``.
"""
from __future__ import unicode_literals

import sys

from django.core import management

from rannlr.conf import configure
from rannlr.management.base import EXIT_CONFIGURATION


class ManagementUtility(management.ManagementUtility):
    """
    Django's utility under the ``rannlr`` program name. Subcommands may be spelled with hyphens
    (``check-psi`` for ``check_psi``) and an unknown subcommand is a configuration error.
    """

    def __init__(self, argv=None):
        super(ManagementUtility, self).__init__(argv)
        self.prog_name = 'rannlr'
        # "rannlr help check-psi" names the subcommand in the second position.
        positions = (1, 2) if len(self.argv) > 1 and self.argv[1] == 'help' else (1,)
        for position in positions:
            if position < len(self.argv) and not self.argv[position].startswith('-'):
                self.argv[position] = self.argv[position].replace('-', '_')

    def fetch_command(self, subcommand):
        if subcommand not in management.get_commands():
            sys.stderr.write("Unknown command: %r\nType '%s help' for usage.\n" % (subcommand, self.prog_name))
            sys.exit(EXIT_CONFIGURATION)
        return super(ManagementUtility, self).fetch_command(subcommand)


def execute_from_command_line(argv=None):
    """Run the command line and exit with the subcommand's exit code."""
    configure()
    ManagementUtility(argv).execute()
