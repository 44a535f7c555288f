"""Program-size cost: a proxy for editability.

Every constructor, numeric literal, variable, and vector component counts 1;
a Tabulate additionally pays 2 per binding (name + bound) and Repeat pays 1
for its count.  Any inverse-transformation form costs INFINITE, which keeps
those forms from ever being extracted.
"""

from __future__ import annotations

import math

from .ast import (
    Expr,
    INVERSE_TYPES,
    Repeat,
    Tabulate,
    children,
)

INFINITE = math.inf


def node_weight(e: Expr) -> float:
    if isinstance(e, INVERSE_TYPES):
        return INFINITE
    if isinstance(e, Tabulate):
        return 1 + 2 * len(e.bindings)
    if isinstance(e, Repeat):
        return 2  # constructor + count literal
    return 1


def cost(e: Expr) -> float:
    total = node_weight(e)
    for c in children(e):
        total += cost(c)
        if total == INFINITE:
            return INFINITE
    return total
