"""Zeros of random power series on the unit disk."""

import json

from ._core import *  # noqa: F401,F403
from ._core import __version__, run_config


def run(config_text):
    """Run an experiment from INI text and return the record as a dict."""
    return json.loads(run_config(config_text))
