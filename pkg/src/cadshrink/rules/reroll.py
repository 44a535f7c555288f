"""Loop-rerolling rules: chain folding, repeat detection, Map2 extraction
via the structure finder, closed-form list solving, and the Map2/Tabulate
recombinations that squeeze separated parameters back into one loop.
"""

from __future__ import annotations

import math
from typing import List

from .. import solvers
from ..ast import Unsort
from ..egraph import (
    B,
    EGraph,
    Match,
    PKVar,
    PNode,
    PVar,
    Rewrite,
    expr_build,
)
from ..structure import find_map2s


def _fold_intro(m: Match, g: EGraph):
    """(binop c1 c2 ...) on a maximal same-kind left spine becomes
    (Fold binop (List c1 c2 ...))."""
    kind = m.subst["k"]
    cid = g.find(m.eclass)
    for pnode, _ in g.parents_of(cid):
        if (
            pnode.op == "Binop"
            and pnode.payload == kind
            and g.find(pnode.children[0]) == cid
        ):
            return None  # interior of a longer spine; the outermost node fires
    items: List[int] = []
    seen = set()
    cur = cid
    while True:
        if cur in seen:
            break
        seen.add(cur)
        node = next(
            (n for n in g.nodes_of(cur) if n.op == "Binop" and n.payload == kind),
            None,
        )
        if node is None:
            break
        items.append(g.find(node.children[1]))
        cur = g.find(node.children[0])
    items.append(cur)
    items.reverse()
    if len(items) < 2:
        return None
    return B("Fold", kind, B("List", None, *items))


def _repeat_intro(m: Match, g: EGraph):
    xs = m.subst["xs"]
    if len(xs) < 2:
        return None
    first = g.find(xs[0])
    if any(g.find(x) != first for x in xs[1:]):
        return None
    return B("Repeat", len(xs), first)


def _map2_repeat(m: Match, g: EGraph):
    return B(
        "Repeat",
        m.subst["n"],
        B("Affine", m.subst["a"], m.subst["p"], m.subst["c"]),
    )


def _map2_tab_tab(m: Match, g: EGraph):
    return B(
        "Tabulate",
        m.subst["bnd"],
        B("Affine", m.subst["a"], m.subst["p"], m.subst["c"]),
    )


def _bounds_product(bindings) -> int:
    return math.prod(b for _, b in bindings)


def _map2_tab_repeat(m: Match, g: EGraph):
    if _bounds_product(m.subst["bnd"]) != m.subst["n"]:
        return None
    return _map2_tab_tab(m, g)


def _structure_find(m: Match, g: EGraph):
    # A list that already has a Repeat/Tabulate representative is rerolled;
    # more Map2 variants over it only bloat the graph.
    cls = g.find(m.eclass)
    by_op = g.classes[cls].by_op
    if "Repeat" in by_op or "Tabulate" in by_op:
        return None
    # Emissions depend on the element classes' contents; re-run only when
    # one of them changed (class contents only grow, so sizes fingerprint
    # them), otherwise every prior build would be re-added each iteration.
    xs = tuple(g.find(c) for c in m.subst["xs"])
    state = tuple(len(g.nodes_of(c)) for c in xs)
    cache = getattr(g, "_structure_cache", None)
    if cache is None:
        cache = {}
        g._structure_cache = cache  # type: ignore[attr-defined]
    if cache.get(xs) == state:
        return None
    cache[xs] = state
    builds = [
        b
        for b in find_map2s(g, xs)
        if tuple(g.find(c) for c in b.children[1].children) != xs
    ]
    return builds or None


def _list_solve(allow_inverse: bool, eps: float):
    def rhs(m: Match, g: EGraph):
        xs = m.subst["xs"]
        if len(xs) < 3:
            return None
        vals = [g.find_vec3(c) for c in xs]
        if any(v is None for v in vals):
            return None
        tab = solvers.solve_list(vals, eps)
        if tab is not None:
            return expr_build(tab)
        if not allow_inverse:
            return None
        sorted_fit = solvers.solve_list_sorted(vals, eps)
        if sorted_fit is not None:
            perm, tab = sorted_fit
            return expr_build(Unsort(perm, tab))
        sph = solvers.solve_spherical(vals, eps)
        if sph is not None:
            return expr_build(sph)
        return None

    return rhs


def reroll_rules(allow_inverse: bool = True, solver_eps: float = 1e-3) -> List[Rewrite]:
    anylist = lambda: PNode("List", None, (), rest="xs")
    return [
        Rewrite(
            "fold-intro",
            PNode("Binop", PKVar("k"), (PVar("l"), PVar("r"))),
            _fold_intro,
        ),
        Rewrite("repeat-intro", anylist(), _repeat_intro, cacheable=True),
        Rewrite(
            "map2-repeat-fuse",
            PNode(
                "Map2",
                PKVar("a"),
                (
                    PNode("Repeat", PKVar("n"), (PVar("p"),)),
                    PNode("Repeat", PKVar("n"), (PVar("c"),)),
                ),
            ),
            _map2_repeat,
        cacheable=True,
        ),
        Rewrite(
            "map2-tabulate-fuse",
            PNode(
                "Map2",
                PKVar("a"),
                (
                    PNode("Tabulate", PKVar("bnd"), (PVar("p"),)),
                    PNode("Tabulate", PKVar("bnd"), (PVar("c"),)),
                ),
            ),
            _map2_tab_tab,
        cacheable=True,
        ),
        Rewrite(
            "map2-tabulate-repeat-fuse",
            PNode(
                "Map2",
                PKVar("a"),
                (
                    PNode("Tabulate", PKVar("bnd"), (PVar("p"),)),
                    PNode("Repeat", PKVar("n"), (PVar("c"),)),
                ),
            ),
            _map2_tab_repeat,
        cacheable=True,
        ),
        Rewrite(
            "map2-repeat-tabulate-fuse",
            PNode(
                "Map2",
                PKVar("a"),
                (
                    PNode("Repeat", PKVar("n"), (PVar("p"),)),
                    PNode("Tabulate", PKVar("bnd"), (PVar("c"),)),
                ),
            ),
            _map2_tab_repeat,
        cacheable=True,
        ),
        Rewrite("structure-find", anylist(), _structure_find),
        Rewrite("list-solve", anylist(), _list_solve(allow_inverse, solver_eps), cacheable=True),
    ]
