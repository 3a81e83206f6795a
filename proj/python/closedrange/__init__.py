"""Closed-range analysis of composition operators on the Dirichlet space.

Thin wrappers over the compiled core. Symbols, queries and scenarios are
plain dicts; they cross into C++ as JSON text.
"""

import json

from . import _core
from ._core import (
    ConvergenceError,
    ContourError,
    DomainError,
    SingularityOverflow,
    Symbol as _Symbol,
    ValidationError,
    bergman_disk,
    bergman_distance,
    count_preimages,
    preimages,
    pseudo_hyperbolic_distance,
    tau,
)

__version__ = _core.__version__

__all__ = [
    "ConvergenceError",
    "ContourError",
    "DomainError",
    "SingularityOverflow",
    "ValidationError",
    "bergman_disk",
    "bergman_distance",
    "composition_norm",
    "count_preimages",
    "coverage_ratio",
    "dirichlet_norm",
    "parse_scenario",
    "peak_ratios",
    "preimages",
    "pseudo_hyperbolic_distance",
    "reverse_carleson_ratio",
    "run_scenario",
    "symbol",
    "tau",
    "verify",
]


def symbol(spec):
    """Build a symbol from a dict such as {"kind": "power", "degree": 2}."""
    return _Symbol(json.dumps(spec))


def _query_text(query):
    return json.dumps(query) if query else ""


def dirichlet_norm(coefficients):
    return _core.dirichlet_norm([complex(c) for c in coefficients])


def composition_norm(phi, coefficients):
    return _core.composition_norm(phi, [complex(c) for c in coefficients])


def peak_ratios(phi, ks, zeta=1.0):
    return _core.peak_ratios(phi, complex(zeta), list(ks))


def coverage_ratio(phi, z, r=1.0, query=None):
    """(estimate, standard error) of the image's share of D(z, r)."""
    return _core.coverage_ratio(phi, complex(z), r, _query_text(query))


def reverse_carleson_ratio(phi, z, alpha=1.0, r=1.0, query=None):
    return _core.reverse_carleson_ratio(phi, complex(z), r, alpha, _query_text(query))


def parse_scenario(scenario):
    """Validate a scenario dict and return it with every default filled in."""
    return json.loads(_core.parse_scenario(json.dumps(scenario)))


def run_scenario(scenario):
    """Run the full pipeline and return the report as a dict."""
    return json.loads(_core.run_scenario(json.dumps(scenario)))


def verify(tags=("all",), seed=42):
    return json.loads(_core.verify(list(tags), seed))
