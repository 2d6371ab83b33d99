"""Mean-field stochastic Volterra simulation and chaos-rate harness."""

import json as _json

from ._core import (
    YWSequence,
    chaos,
    delta_from_epsilon,
    epsilon_n,
    fit_rate,
    gc_bench,
    picard,
    simulate,
    wasserstein_1d,
    wasserstein_exact,
)

__all__ = [
    "YWSequence",
    "chaos",
    "chaos_report",
    "delta_from_epsilon",
    "epsilon_n",
    "fit_rate",
    "gc_bench",
    "picard",
    "simulate",
    "system",
    "wasserstein_1d",
    "wasserstein_exact",
]


def system(**kwargs):
    """JSON system block from keyword arguments, for simulate() and picard()."""
    return _json.dumps(kwargs)


def chaos_report(config, threads=1):
    """Run a chaos experiment from a config dict and return the parsed report."""
    if isinstance(config, dict):
        config = _json.dumps(config)
    return _json.loads(chaos(config, threads))
