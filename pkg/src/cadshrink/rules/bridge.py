"""Bridging rules: lifting Unsort over Unpart, splitting a folded Unpart
into a fold of folds, small Fold/List housekeeping, and numeric constant
folding.
"""

from __future__ import annotations

from typing import List

from ..ast import round_sig
from ..egraph import B, EGraph, Match, PKVar, PNode, PVar, Rewrite
from .common import bnum


def _unsort_over_unpart(m: Match, g: EGraph):
    # (Unpart P (l1 ... (Unsort p lk) ... ln))
    #   ~> (Unsort p' (Unpart P (l1 ... lk ... ln)))
    # p' applies p inside block k's offset window and is identity elsewhere.
    part = m.subst["P"]
    ls = m.subst["ls"]
    offsets, acc = [], 0
    for ln in part:
        offsets.append(acc)
        acc += ln
    builds = []
    for k, lcid in enumerate(ls):
        for node in g.nodes_of(lcid):
            if node.op != "Unsort" or len(node.payload) != part[k]:
                continue
            q = node.payload
            lifted = list(range(acc))
            for t in range(part[k]):
                lifted[offsets[k] + t] = offsets[k] + q[t]
            inner = list(ls)
            inner[k] = g.find(node.children[0])
            builds.append(
                B("Unsort", tuple(lifted), B("Unpart", part, *inner))
            )
            break  # one lift per block position is enough per iteration
    return builds or None


def _fold_union_unpart_split(m: Match, g: EGraph):
    return B(
        "Fold",
        "Union",
        B("List", None, *(B("Fold", "Union", l) for l in m.subst["ls"])),
    )


def _fold_splice(m: Match, g: EGraph):
    # (Fold U (List ... (Fold U (List a b)) ...)) ~> spliced list
    kind = m.subst["k"]
    if kind not in ("Union", "Intersection"):
        return None
    xs = m.subst["xs"]
    builds = []
    for pos, cid in enumerate(xs):
        for node in g.nodes_of(cid):
            if node.op != "Fold" or node.payload != kind:
                continue
            inner_list = next(
                (n for n in g.nodes_of(node.children[0]) if n.op == "List"), None
            )
            if inner_list is None:
                continue
            spliced = xs[:pos] + inner_list.children + xs[pos + 1 :]
            builds.append(B("Fold", kind, B("List", None, *spliced)))
            break
    return builds or None


def _num_fold(m: Match, g: EGraph):
    a = g.find_num(m.subst["a"])
    b = g.find_num(m.subst["b"])
    if a is None or b is None:
        return None
    op = m.subst["op"]
    if op == "+":
        v = a + b
    elif op == "-":
        v = a - b
    elif op == "*":
        v = a * b
    else:
        if b == 0:
            return None
        v = a / b
    return bnum(round_sig(v))


def numeric_rules() -> List[Rewrite]:
    return [
        Rewrite(
            "num-fold",
            PNode("BinNum", PKVar("op"), (PVar("a"), PVar("b"))),
            _num_fold,
        cacheable=True,
        ),
    ]


def bridge_rules() -> List[Rewrite]:
    return [
        Rewrite(
            "unsort-over-unpart",
            PNode("Unpart", PKVar("P"), (), rest="ls"),
            _unsort_over_unpart,
        ),
        Rewrite(
            "fold-union-unpart-split",
            PNode("Fold", "Union", (PNode("Unpart", PKVar("P"), (), rest="ls"),)),
            _fold_union_unpart_split,
        cacheable=True,
        ),
        Rewrite(
            "fold-singleton",
            PNode("Fold", PKVar("k"), (PNode("List", None, (PVar("x"),)),)),
            lambda m, g: m.subst["x"],
        cacheable=True,
        ),
        Rewrite(
            "fold-pair",
            PNode("Fold", PKVar("k"), (PNode("List", None, (PVar("x"), PVar("y"))),)),
            lambda m, g: B("Binop", m.subst["k"], m.subst["x"], m.subst["y"]),
        cacheable=True,
        ),
        Rewrite(
            "fold-splice",
            PNode("Fold", PKVar("k"), (PNode("List", None, (), rest="xs"),)),
            _fold_splice,
        ),
    ] + numeric_rules()
