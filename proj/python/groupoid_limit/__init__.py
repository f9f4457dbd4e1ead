"""Lie groupoid classical-limit laboratory (Python bindings)."""

import json as _json

from ._core import (  # noqa: F401
    Chart,
    Grid,
    Symbol,
    __version__,
    abelian_bundle,
    algebroid,
    ax_plus_b,
    bracket,
    classical_limit,
    compose,
    heisenberg,
    intertwining,
    invert_element,
    norm_curve,
    pair,
    source_coords,
    validate_axioms,
)
from ._core import run_command as _run_command


def run_command(name, config):
    """Run a CLI command on a config dict; returns the JSON summary as a dict."""
    return _json.loads(_run_command(name, _json.dumps(config)))
