"""Joint precoder and IRS phase optimization for full-duplex max-min weighted rate."""

import json

from ._irsfd import (
    ConfigError,
    DomainError,
    Instance,
    NumericalError,
    SolverError,
    cli,
    oracle,
    quantize_phases_2bit,
    rate_report,
    run,
    smoothed_min,
)
from . import _irsfd

SCHEMES = ("bcd_mm", "bcd_socp", "socp_mm", "rand_phase", "two_bit")


def default_config():
    """Default system parameters as a dict."""
    return json.loads(_irsfd.default_config_json())


def make_instance(config=None, geometry=None, seed=None):
    """Draws geometry, channels and the initial state; dict overrides are optional."""
    return Instance(json.dumps(config or {}), json.dumps(geometry or {}), seed)


def sweep(spec, threads=1):
    """Runs a sweep document (dict) and returns records and summary as a dict."""
    return json.loads(_irsfd.sweep_json(json.dumps(spec), threads))


def solve_subproblem(subproblem, tol=1e-7):
    """Solves a convex subproblem given in its JSON dump form."""
    return _irsfd.solve_subproblem_json(json.dumps(subproblem), tol)


__all__ = [
    "SCHEMES", "ConfigError", "DomainError", "Instance", "NumericalError", "SolverError",
    "cli", "default_config", "make_instance", "oracle", "quantize_phases_2bit",
    "rate_report", "run", "smoothed_min", "solve_subproblem", "sweep",
]
