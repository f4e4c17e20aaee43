"""Desk-scale coarse geometry of finitely presented groups.

Builds finite word-metric balls of Cayley graphs and 2-complexes and
measures coarse invariants on them: end-depth tables, dead ends,
filling (sci) and semistability probes, hyperbolicity data, the ray-fan
construction, and Britton/amalgam reduction.  Every quantity is
window-relative: results carry the ball radius they were computed in.
"""

__version__ = "0.1.0"

from .errors import (
    CayleyKitError,
    ParseError,
    PreconditionError,
    BudgetError,
    WindowError,
    OracleError,
)

from .zoo import zoo_group

__all__ = [
    "__version__",
    "zoo_group",
    "CayleyKitError",
    "ParseError",
    "PreconditionError",
    "BudgetError",
    "WindowError",
    "OracleError",
]
