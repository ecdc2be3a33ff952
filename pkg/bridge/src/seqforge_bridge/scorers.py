"""Scorers the bridge can serve out of the box.

``toy_equivalent`` mirrors the engine's built-in motif oracle exactly:
same motif order, same overlap counting, same logistic branch.  Float
addition is not associative, so the summation order is part of the
contract; reorder the table and the cross-process byte-identity test
will catch it.

Real predictors plug in through ``load_plugin("pkg.module:attr")``,
where the attribute is any ``sequence -> float in [0, 1]`` callable.
For a splice model that emits per-position probabilities, the callable
is where those collapse to one score (say, the mean over the sites you
care about); the protocol layer neither knows nor cares.
"""

from __future__ import annotations

import math
from importlib import import_module
from typing import Callable

# (motif, weight) in scoring order.
TOY_MOTIF_WEIGHTS = (
    ("GCATG", 0.8),
    ("TTTCT", -0.7),
    ("GAAGAA", 0.5),
    ("CTCTCT", -0.4),
)


def _count_overlapping(motif: str, sequence: str) -> int:
    n = 0
    start = sequence.find(motif)
    while start != -1:
        n += 1
        start = sequence.find(motif, start + 1)
    return n


def _logistic(x: float) -> float:
    # Branch on sign so exp never overflows.
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def toy_equivalent(sequence: str) -> float:
    total = 0.0
    for motif, weight in TOY_MOTIF_WEIGHTS:
        total += weight * _count_overlapping(motif, sequence)
    return _logistic(total)


def constant(value: float) -> Callable[[str], float]:
    """A scorer that ignores its input; handy for plumbing checks."""
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"constant score must be in [0, 1], got {value}")

    def score(sequence: str) -> float:
        return value

    return score


def load_plugin(spec: str) -> Callable[[str], float]:
    """Resolve ``module.path:attr`` to a scorer callable."""
    module_name, sep, attr_path = spec.partition(":")
    if not sep or not module_name or not attr_path:
        raise ValueError(f"plugin spec must look like 'module:attr', got {spec!r}")
    obj = import_module(module_name)
    for attr in attr_path.split("."):
        obj = getattr(obj, attr)
    if not callable(obj):
        raise TypeError(f"{spec!r} resolved to a non-callable {type(obj).__name__}")
    return obj
