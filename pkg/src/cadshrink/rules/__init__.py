"""The rule library, organized in togglable groups.

Groups: reroll (chain folding, repeat/tabulate inference, structure
finding), cad (geometric identities), inverse (speculative reordering /
regrouping / reprojection and its discharge), bridge (lifts, splits, and
housekeeping), numeric (constant folding).  `ruleset` composes them per
configuration; see docs/RULES.md for the full catalogue.
"""

from __future__ import annotations

from typing import List

from ..egraph import Rewrite
from .bridge import bridge_rules, numeric_rules
from .cad import cad_identity_rules
from .inverse import inverse_rules
from .reroll import reroll_rules

__all__ = [
    "bridge_rules",
    "cad_identity_rules",
    "inverse_rules",
    "numeric_rules",
    "reroll_rules",
    "ruleset",
]


def ruleset(
    cad: bool = True,
    inverse: bool = True,
    solver_eps: float = 1e-3,
) -> List[Rewrite]:
    rules: List[Rewrite] = []
    rules += reroll_rules(allow_inverse=inverse, solver_eps=solver_eps)
    if cad:
        rules += cad_identity_rules()
    if inverse:
        rules += inverse_rules()
    rules += bridge_rules()
    seen = set()
    out = []
    for r in rules:
        if r.name not in seen:
            seen.add(r.name)
            out.append(r)
    return out
