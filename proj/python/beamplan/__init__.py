"""Beam placement and load balancing for multi-beam satellites.

Thin python layer over the C++ core; see the project README for the model
and the CLI equivalents of these calls.
"""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import __version__, run_scenario as _run_scenario  # noqa: F401


def run(config: dict) -> dict:
    """Run a scenario from a config dict and return the run document."""
    return _json.loads(_run_scenario(_json.dumps(config)))
