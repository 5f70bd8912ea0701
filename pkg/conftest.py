"""
pytest wiring equivalent to src/runtests.py: use the test settings and set up Django before collection.
"""
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), 'src'))
os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'rannlr_tests.test_settings')

import django  # noqa: E402

django.setup()
