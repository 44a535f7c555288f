"""Propagation and elimination of inverse transformations.

A solver that had to reorder/regroup/reproject its input registers the fact
with an Unsort/Unpart/Unspherical wrapper; these rules move the wrappers
outward through Map2s and lists and discharge them in contexts that are
insensitive to the transformation (Fold Union / Fold Intersection, Repeat).
The list-grouping rules live here too since they communicate via Unpart and
Unsort.
"""

from __future__ import annotations

from typing import List, Optional, Tuple

from ..egraph import (
    ANY_PAYLOAD,
    B,
    Build,
    EGraph,
    Match,
    PKVar,
    PNode,
    PVar,
    Rewrite,
)
from ..solvers import partition_list, regrouping


def _under_ac_fold(g: EGraph, cid: int) -> bool:
    """Is this list the direct argument of a Fold Union / Fold Intersection?
    Regrouping wrappers can only ever be discharged there, so the grouping
    rules stay quiet elsewhere."""
    cid = g.find(cid)
    for p, _ in g.parents_of(cid):
        if p.op == "Fold" and p.payload in ("Union", "Intersection"):
            if g.find(p.children[0]) == cid:
                return True
    return False


def _self_looped(m: Match, g: EGraph) -> bool:
    """A Map2 whose params or cads list is its own class (the all-identity
    combos emit these); propagating inverse wrappers through them recurses
    forever without exposing anything."""
    me = g.find(m.eclass)
    return (
        g.find(m.subst["params_class"]) == me or g.find(m.subst["cads_class"]) == me
    )


def _map2_unsort(m: Match, g: EGraph):
    # (Map2 aff (Unsort p ps) cs) ~> (Unsort p (Sort p <this class>))
    if _self_looped(m, g):
        return None
    p = m.subst["p"]
    return B("Unsort", p, B("Sort", p, g.find(m.eclass)))


def _sort_apply(m: Match, g: EGraph):
    p = m.subst["p"]
    xs = m.subst["xs"]
    if len(xs) != len(p):
        return None
    return B("List", None, *(xs[i] for i in p))


def _unsort_elim_fold(m: Match, g: EGraph):
    return B("Fold", m.subst["k"], m.subst["l"])


def _unsort_elim_repeat(m: Match, g: EGraph):
    if len(m.subst["p"]) != m.subst["n"]:
        return None
    return B("Repeat", m.subst["n"], m.subst["x"])


def _split_list_like(
    g: EGraph, cid: int, part: Tuple[int, ...]
) -> Optional[List[Build]]:
    """Represent `cid` (a list of length sum(part)) as per-block builds."""
    total = sum(part)
    for n in g.nodes_of(cid):
        if n.op == "Unpart" and n.payload == part:
            return [g.find(c) for c in n.children]
        if n.op == "List" and len(n.children) == total:
            out, off = [], 0
            for ln in part:
                out.append(B("List", None, *n.children[off : off + ln]))
                off += ln
            return out
        if n.op == "Repeat" and n.payload == total:
            item = g.find(n.children[0])
            return [B("Repeat", ln, item) for ln in part]
    return None


def _map2_unpart_cads(m: Match, g: EGraph):
    # (Map2 aff ps (Unpart P ls...)) ~> (Unpart P (Map2 aff ps_1 l_1) ...),
    # splitting the parameter list blockwise.
    if _self_looped(m, g):
        return None
    part = m.subst["P"]
    ps_blocks = _split_list_like(g, g.find(m.subst["params_class"]), part)
    if ps_blocks is None:
        return None
    pieces = [
        B("Map2", m.subst["a"], pb, lb) for pb, lb in zip(ps_blocks, m.subst["ls"])
    ]
    return B("Unpart", part, *pieces)


def _map2_unpart_params(m: Match, g: EGraph):
    if _self_looped(m, g):
        return None
    part = m.subst["P"]
    cs_blocks = _split_list_like(g, g.find(m.subst["cads_class"]), part)
    if cs_blocks is None:
        return None
    pieces = [
        B("Map2", m.subst["a"], pb, cb) for pb, cb in zip(m.subst["ls"], cs_blocks)
    ]
    return B("Unpart", part, *pieces)


def _unpart_to_concat(m: Match, g: EGraph):
    return B("Concat", None, *m.subst["ls"])


def _unspherical_translate(m: Match, g: EGraph):
    # (Map2 Translate (Unspherical n ctr ps) cs)
    #   ~> (Map2 Translate (Repeat n ctr) (Map2 TranslateSpherical ps cs))
    n = m.subst["n"]
    return B(
        "Map2",
        "Translate",
        B("Repeat", n, m.subst["ctr"]),
        B("Map2", "TranslateSpherical", m.subst["ps"], m.subst["cs"]),
    )


def _list_partition(m: Match, g: EGraph):
    if not _under_ac_fold(g, m.eclass):
        return None
    got = partition_list(m.subst["xs"], g)
    if got is None:
        return None
    part, groups = got
    return B(
        "Unpart",
        part.lengths,
        *(B("List", None, *grp) for grp in groups),
    )


def _list_regroup(m: Match, g: EGraph):
    # Non-contiguous grouping: register the reorder and the split together,
    # (List ...) ~> (Unsort q (Unpart P (List g1...) (List g2...))).
    if not _under_ac_fold(g, m.eclass):
        return None
    got = regrouping(m.subst["xs"], g)
    if got is None:
        return None
    perm, part, groups = got
    return B(
        "Unsort",
        perm.indices,
        B("Unpart", part.lengths, *(B("List", None, *grp) for grp in groups)),
    )


def inverse_rules() -> List[Rewrite]:
    return [
        Rewrite(
            "map2-unsort-params",
            PNode(
                "Map2",
                PKVar("a"),
                (
                    PNode("Unsort", PKVar("p"), (PVar("ps"),), as_name="params_class"),
                    PVar("cads_class"),
                ),
            ),
            _map2_unsort,
        cacheable=True,
        ),
        Rewrite(
            "map2-unsort-cads",
            PNode(
                "Map2",
                PKVar("a"),
                (
                    PVar("params_class"),
                    PNode("Unsort", PKVar("p"), (PVar("cs"),), as_name="cads_class"),
                ),
            ),
            _map2_unsort,
        cacheable=True,
        ),
        Rewrite(
            "sort-apply",
            PNode("Sort", PKVar("p"), (PNode("List", None, (), rest="xs"),)),
            _sort_apply,
        cacheable=True,
        ),
        Rewrite(
            "unsort-elim-fold-union",
            PNode(
                "Fold", "Union", (PNode("Unsort", ANY_PAYLOAD, (PVar("l"),)),)
            ),
            lambda m, g: B("Fold", "Union", m.subst["l"]),
        cacheable=True,
        ),
        Rewrite(
            "unsort-elim-fold-intersection",
            PNode(
                "Fold",
                "Intersection",
                (PNode("Unsort", ANY_PAYLOAD, (PVar("l"),)),),
            ),
            lambda m, g: B("Fold", "Intersection", m.subst["l"]),
        cacheable=True,
        ),
        Rewrite(
            "unsort-elim-repeat",
            PNode(
                "Unsort",
                PKVar("p"),
                (PNode("Repeat", PKVar("n"), (PVar("x"),)),),
            ),
            _unsort_elim_repeat,
        cacheable=True,
        ),
        Rewrite(
            "map2-unpart-cads",
            PNode(
                "Map2",
                PKVar("a"),
                (
                    PVar("params_class"),
                    PNode("Unpart", PKVar("P"), (), rest="ls", as_name="cads_class"),
                ),
            ),
            _map2_unpart_cads,
        cacheable=True,
        ),
        Rewrite(
            "map2-unpart-params",
            PNode(
                "Map2",
                PKVar("a"),
                (
                    PNode("Unpart", PKVar("P"), (), rest="ls", as_name="params_class"),
                    PVar("cads_class"),
                ),
            ),
            _map2_unpart_params,
        cacheable=True,
        ),
        Rewrite(
            "unpart-to-concat",
            PNode("Unpart", PKVar("P"), (), rest="ls"),
            _unpart_to_concat,
        cacheable=True,
        ),
        Rewrite(
            "unspherical-translate",
            PNode(
                "Map2",
                "Translate",
                (
                    PNode("Unspherical", PKVar("n"), (PVar("ctr"), PVar("ps"))),
                    PVar("cs"),
                ),
            ),
            _unspherical_translate,
        cacheable=True,
        ),
        Rewrite("list-partition", PNode("List", None, (), rest="xs"), _list_partition),
        Rewrite("list-regroup", PNode("List", None, (), rest="xs"), _list_regroup),
    ]
