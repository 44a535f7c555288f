"""CAD identities: half-turn/mirror exchange, identity transforms,
scale/translate interchange and combination, and primitive/unit-primitive
conversions.  Identity *introduction* only fires on cad classes sitting
directly under a List enode; unguarded introduction would never saturate.
"""

from __future__ import annotations

from typing import List

from ..egraph import (
    B,
    EGraph,
    Match,
    PNode,
    PVar,
    Rewrite,
)
from .common import TOL, approx, bnum, bvec3, first_node

_AFF2 = lambda outer, inner: PNode(
    "Affine", outer, (PVar("v1"), PNode("Affine", inner, (PVar("v2"), PVar("c"))))
)


def _rotate180_to_scale(m: Match, g: EGraph):
    if approx(g.find_vec3(m.subst["v"]), (0.0, 0.0, 180.0)):
        return B("Affine", "Scale", bvec3(-1, -1, 1), m.subst["c"])
    return None


def _scale_to_rotate180(m: Match, g: EGraph):
    if approx(g.find_vec3(m.subst["v"]), (-1.0, -1.0, 1.0)):
        return B("Affine", "Rotate", bvec3(0, 0, 180), m.subst["c"])
    return None


def _identity_elim(target):
    def rhs(m: Match, g: EGraph):
        if approx(g.find_vec3(m.subst["v"]), target):
            return m.subst["c"]
        return None

    return rhs


def _identity_intro(kind: str, vec):
    # Guarded introduction: only for a cad class under a List whose siblings
    # carry `kind` while this class lacks it.  That is exactly when a list
    # needs the identity to expose a common affine; anywhere else the extra
    # wrapper just bloats signatures and feeds useless Map2 emissions.
    def rhs(m: Match, g: EGraph):
        cid = g.find(m.eclass)
        if not g.class_is_cad(cid):
            return None
        if any(n.payload == kind for n in g.nodes_by_op(cid, "Affine")):
            return None
        for p, _ in g.parents_of(cid):
            if p.op != "List":
                continue
            for sib in p.children:
                sib = g.find(sib)
                if sib != cid and any(
                    n.payload == kind for n in g.nodes_by_op(sib, "Affine")
                ):
                    return B("Affine", kind, bvec3(*vec), cid)
        return None

    return rhs


def _scale_translate_interchange(m: Match, g: EGraph):
    s = g.find_vec3(m.subst["v1"])
    t = g.find_vec3(m.subst["v2"])
    if s is None or t is None:
        return None
    moved = bvec3(s[0] * t[0], s[1] * t[1], s[2] * t[2])
    return B("Affine", "Translate", moved, B("Affine", "Scale", m.subst["v1"], m.subst["c"]))


def _translate_scale_interchange(m: Match, g: EGraph):
    t = g.find_vec3(m.subst["v1"])
    s = g.find_vec3(m.subst["v2"])
    if s is None or t is None or any(abs(c) < TOL for c in s):
        return None
    moved = bvec3(t[0] / s[0], t[1] / s[1], t[2] / s[2])
    return B("Affine", "Scale", m.subst["v2"], B("Affine", "Translate", moved, m.subst["c"]))


def _combine(kind: str, merge_fn):
    def rhs(m: Match, g: EGraph):
        a = g.find_vec3(m.subst["v1"])
        b = g.find_vec3(m.subst["v2"])
        if a is None or b is None:
            return None
        return B("Affine", kind, bvec3(*merge_fn(a, b)), m.subst["c"])

    return rhs


def _cuboid_to_unit(m: Match, g: EGraph):
    return B(
        "Affine",
        "Scale",
        m.subst["d"],
        B("Cuboid", None, bvec3(1, 1, 1)),
    )


def _cuboid_from_unit(m: Match, g: EGraph):
    if approx(g.find_vec3(m.subst["d"]), (1.0, 1.0, 1.0)):
        return B("Cuboid", None, m.subst["v"])
    return None


def _sphere_to_unit(m: Match, g: EGraph):
    r = m.subst["r"]
    return B("Affine", "Scale", B("Vec3", None, r, r, r), B("Sphere", None, bnum(1)))


def _sphere_from_unit(m: Match, g: EGraph):
    r = g.find_num(m.subst["r"])
    if r is None or abs(r - 1.0) > TOL:
        return None
    for n in g.nodes_of(m.subst["v"]):
        if n.op == "Vec3":
            a, b, c = (g.find(ch) for ch in n.children)
            if a == b == c:
                return B("Sphere", None, a)
    vals = g.find_vec3(m.subst["v"])
    if vals is not None and approx(vals, (vals[0], vals[0], vals[0])):
        return B("Sphere", None, bnum(vals[0]))
    return None


def _prism_to_unit(op: str):
    # (Cylinder [h, r]) -> (Scale [r, r, h] (Cylinder [1, 1])); same for HexPrism
    def rhs(m: Match, g: EGraph):
        n = first_node(g, m.subst["p"], "Vec2")
        if n is None:
            return None
        h, r = n.children
        return B(
            "Affine",
            "Scale",
            B("Vec3", None, r, r, h),
            B(op, None, B("Vec2", None, bnum(1), bnum(1))),
        )

    return rhs


def _prism_from_unit(op: str):
    def rhs(m: Match, g: EGraph):
        if not approx(g.find_vec2(m.subst["p"]), (1.0, 1.0)):
            return None
        for n in g.nodes_of(m.subst["v"]):
            if n.op == "Vec3":
                a, b, c = (g.find(ch) for ch in n.children)
                if a == b:
                    return B(op, None, B("Vec2", None, c, a))
        vals = g.find_vec3(m.subst["v"])
        if vals is not None and abs(vals[0] - vals[1]) <= TOL:
            return B(op, None, B("Vec2", None, bnum(vals[2]), bnum(vals[0])))
        return None

    return rhs


def cad_identity_rules() -> List[Rewrite]:
    rot = lambda: PNode("Affine", "Rotate", (PVar("v"), PVar("c")))
    trans = lambda: PNode("Affine", "Translate", (PVar("v"), PVar("c")))
    scale = lambda: PNode("Affine", "Scale", (PVar("v"), PVar("c")))
    return [
        Rewrite("rotate-half-turn-to-scale", rot(), _rotate180_to_scale, cacheable=True),
        Rewrite("scale-to-rotate-half-turn", scale(), _scale_to_rotate180, cacheable=True),
        Rewrite("rotate-zero-elim", rot(), _identity_elim((0.0, 0.0, 0.0)), cacheable=True),
        Rewrite("translate-zero-elim", trans(), _identity_elim((0.0, 0.0, 0.0)), cacheable=True),
        Rewrite("scale-one-elim", scale(), _identity_elim((1.0, 1.0, 1.0)), cacheable=True),
        Rewrite("rotate-zero-intro", PVar("c"), _identity_intro("Rotate", (0, 0, 0)), cacheable=True),
        Rewrite("translate-zero-intro", PVar("c"), _identity_intro("Translate", (0, 0, 0)), cacheable=True),
        Rewrite("scale-one-intro", PVar("c"), _identity_intro("Scale", (1, 1, 1)), cacheable=True),
        Rewrite(
            "scale-translate-interchange",
            _AFF2("Scale", "Translate"),
            _scale_translate_interchange,
        cacheable=True,
        ),
        Rewrite(
            "translate-scale-interchange",
            _AFF2("Translate", "Scale"),
            _translate_scale_interchange,
        cacheable=True,
        ),
        Rewrite(
            "scale-scale-combine",
            _AFF2("Scale", "Scale"),
            _combine("Scale", lambda a, b: (a[0] * b[0], a[1] * b[1], a[2] * b[2])),
        cacheable=True,
        ),
        Rewrite(
            "translate-translate-combine",
            _AFF2("Translate", "Translate"),
            _combine("Translate", lambda a, b: (a[0] + b[0], a[1] + b[1], a[2] + b[2])),
        cacheable=True,
        ),
        Rewrite("cuboid-to-unit", PNode("Cuboid", None, (PVar("d"),)), _cuboid_to_unit, cacheable=True),
        Rewrite(
            "cuboid-from-unit",
            PNode("Affine", "Scale", (PVar("v"), PNode("Cuboid", None, (PVar("d"),)))),
            _cuboid_from_unit,
        cacheable=True,
        ),
        Rewrite("sphere-to-unit", PNode("Sphere", None, (PVar("r"),)), _sphere_to_unit, cacheable=True),
        Rewrite(
            "sphere-from-unit",
            PNode("Affine", "Scale", (PVar("v"), PNode("Sphere", None, (PVar("r"),)))),
            _sphere_from_unit,
        cacheable=True,
        ),
        Rewrite("cylinder-to-unit", PNode("Cylinder", None, (PVar("p"),)), _prism_to_unit("Cylinder"), cacheable=True),
        Rewrite(
            "cylinder-from-unit",
            PNode("Affine", "Scale", (PVar("v"), PNode("Cylinder", None, (PVar("p"),)))),
            _prism_from_unit("Cylinder"),
        cacheable=True,
        ),
        Rewrite("hexprism-to-unit", PNode("HexPrism", None, (PVar("p"),)), _prism_to_unit("HexPrism"), cacheable=True),
        Rewrite(
            "hexprism-from-unit",
            PNode("Affine", "Scale", (PVar("v"), PNode("HexPrism", None, (PVar("p"),)))),
            _prism_from_unit("HexPrism"),
        cacheable=True,
        ),
    ]
