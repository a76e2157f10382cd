"""p-adic prehomogeneous zeta toolkit."""

import json

from ._plgz import (
    DomainError,
    d_coefficient,
    form_invariants,
    gamma_k,
    tate_rho,
    weil_gamma,
)
from . import _plgz


def classify(diagram):
    """Graded profile of a diagram given as a dict or JSON text."""
    text = diagram if isinstance(diagram, str) else json.dumps(diagram)
    return json.loads(_plgz.classify(text))


def table_diagram(row, param):
    text = _plgz.table_diagram(row, param)
    return None if text is None else json.loads(text)


def census(p, n=2, plus=True, depth=3):
    return json.loads(_plgz.census_counts(p, n, plus, depth))


def verify(suite, p=3, seed=1):
    return json.loads(_plgz.verify(suite, p, seed))


__all__ = [
    "DomainError",
    "census",
    "classify",
    "d_coefficient",
    "form_invariants",
    "gamma_k",
    "table_diagram",
    "tate_rho",
    "verify",
    "weil_gamma",
]
