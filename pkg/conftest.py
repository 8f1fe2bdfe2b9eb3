"""
Pytest wiring for the Django test suite under stabgem_back/.

Mirrors what `manage.py test` does: configure settings, set up the test
environment and create the test databases for the session.
"""

import os
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent / "stabgem_back"))
os.environ.setdefault("DJANGO_SETTINGS_MODULE", "stabgem_back.settings")

import django  # noqa: E402

django.setup()

_runner = None
_old_config = None


def pytest_sessionstart(session):
    global _runner, _old_config
    from django.test.runner import DiscoverRunner

    _runner = DiscoverRunner(verbosity=0, interactive=False)
    _runner.setup_test_environment()
    _old_config = _runner.setup_databases()


def pytest_sessionfinish(session, exitstatus):
    if _runner is not None:
        _runner.teardown_databases(_old_config)
        _runner.teardown_test_environment()
