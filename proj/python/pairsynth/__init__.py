"""Photon-pair source circuit synthesis from colored graphs.

Graphs, partitions and designs are plain dicts in the JSON file formats
described under docs/.
"""

import json

import numpy as np

from . import _core
from ._core import DomainError, EmptyStateError, OverConstrainedError, ParseError

__all__ = [
    "DomainError",
    "EmptyStateError",
    "OverConstrainedError",
    "ParseError",
    "fixture",
    "frequency_partition",
    "load",
    "matching_count",
    "simulate",
    "state_from_matchings",
    "synthesize",
    "takagi",
    "verify",
]


def _dump(doc):
    return doc if isinstance(doc, str) else json.dumps(doc)


def load(path):
    with open(path) as f:
        return json.load(f)


def fixture(name, alphas=None):
    """Graph dict of a built-in fixture: "ghz_qutrit", "ghz_qubit" or "l_a4"."""
    if name == "ghz_qutrit":
        return json.loads(_core.fixture_ghz_qutrit())
    if name == "ghz_qubit":
        return json.loads(_core.fixture_ghz_qubit())
    if name == "l_a4":
        if alphas is None:
            alphas = [3 ** -0.5] * 3
        return json.loads(_core.fixture_l_a4(*[complex(a) for a in alphas]))
    raise KeyError(name)


def takagi(a):
    """Returns (U, s) with a = U diag(s) U^T."""
    return _core.takagi(np.asarray(a, dtype=complex))


def frequency_partition(graph):
    return json.loads(_core.frequency_partition(_dump(graph)))


def matching_count(graph):
    return _core.matching_count(_dump(graph))


def state_from_matchings(graph):
    return _core.state_from_matchings(_dump(graph))


def simulate(graph, gain=None, contamination=False):
    return _core.simulate(_dump(graph), gain, contamination)


def synthesize(graph, partition=None, gain=0.01, diagonal_sources=False,
               contamination=False):
    """Design dict; raises OverConstrainedError carrying the JSON report."""
    part = None if partition is None else _dump(partition)
    return json.loads(_core.synthesize(_dump(graph), part, gain,
                                       diagonal_sources, contamination))


def verify(design, graph):
    return _core.verify(_dump(design), _dump(graph))
