"""Group-based Map2 extraction.

Lists whose element classes hold several equivalent affine enodes would
otherwise need a full Cartesian product of Map2s.  Grouping the element
classes by their affine signature (the multiset of affine-operator kinds in
the class) and extending one choice per group keeps the emission count
small and bounded.
"""

from __future__ import annotations

import itertools
from typing import Dict, List, Optional, Tuple

from .egraph import B, Build, EClassId, EGraph, ENode

SIGNATURE_KINDS = ("Translate", "Rotate", "Scale")
MAX_COMBOS_PER_KIND = 8

AffineSignature = Tuple[Tuple[str, int], ...]  # sorted (kind, count) pairs


def affine_signature(g: EGraph, cid: EClassId) -> AffineSignature:
    counts: Dict[str, int] = {}
    for n in g.nodes_by_op(cid, "Affine"):
        if n.payload in SIGNATURE_KINDS:
            counts[n.payload] = counts.get(n.payload, 0) + 1
    return tuple(sorted(counts.items()))


def _kth_affine(g: EGraph, cid: EClassId, kind: str, k: int) -> Optional[ENode]:
    seen = 0
    for n in g.nodes_by_op(cid, "Affine"):
        if n.payload == kind:
            if seen == k:
                return n
            seen += 1
    return None


def find_map2s(g: EGraph, list_children: Tuple[EClassId, ...]) -> List[Build]:
    """Emit (Map2 kind params cads) builds for a list of element classes.

    One affine choice is made per signature group and extended across the
    whole group positionally; at most MAX_COMBOS_PER_KIND combinations are
    emitted per affine kind, lower choice indices first.
    """
    if len(list_children) < 2:
        return []
    canon = [g.find(c) for c in list_children]
    if all(c == canon[0] for c in canon[1:]):
        return []  # uniform list: Repeat covers it, a Map2 adds nothing
    sigs = [affine_signature(g, c) for c in canon]
    if any(not s for s in sigs):
        return []

    group_of: Dict[AffineSignature, int] = {}
    for s in sigs:
        if s not in group_of:
            group_of[s] = len(group_of)
    group_sigs = list(group_of)

    common = set(dict(group_sigs[0]))
    for s in group_sigs[1:]:
        common &= set(dict(s))

    builds: List[Build] = []
    for kind in sorted(common):
        choice_counts = [dict(s)[kind] for s in group_sigs]
        combos = itertools.islice(
            itertools.product(*(range(c) for c in choice_counts)),
            MAX_COMBOS_PER_KIND,
        )
        for combo in combos:
            params: List[EClassId] = []
            cads: List[EClassId] = []
            for pos, cid in enumerate(canon):
                node = _kth_affine(g, cid, kind, combo[group_of[sigs[pos]]])
                if node is None:
                    break  # class shrank since signatures were taken
                params.append(node.children[0])
                cads.append(node.children[1])
            else:
                builds.append(
                    B("Map2", kind, B("List", None, *params), B("List", None, *cads))
                )
    return builds
