"""
Pytest configuration shared by every test package.

Puts the project root on sys.path and loads .env before collection so the
settings object sees the same environment as the CLI.
"""

import os
import sys

import dotenv

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)


def pytest_configure(config):
    """Load .env before test modules import scale_variations.config."""
    dotenv.load_dotenv(os.path.join(ROOT, ".env"))
    os.environ.setdefault("SCALE_LOG_LEVEL", "WARNING")
