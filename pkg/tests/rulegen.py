"""Randomized closed instances for every rewrite rule, plus the soundness
runner that applies a rule inside an e-graph and compares evaluations of the
matched class before and after (without merging, so 'before' stays pristine).
"""

from __future__ import annotations

import random
from typing import Callable, Dict, List

from cadshrink.ast import (
    Affine,
    BinNum,
    Binop,
    Cuboid,
    Cylinder,
    Expr,
    Fold,
    HexPrism,
    ListExpr,
    Map2,
    Num,
    Partitioning,
    Permutation,
    Repeat,
    Sort,
    Sphere,
    Tabulate,
    Unpart,
    Unsort,
    Unspherical,
    Var,
    Vec2,
    Vec3,
    vec3,
)
from cadshrink.egraph import EGraph, extract, uniform_weight
from cadshrink.equiv import semantic_equiv
from cadshrink.evaluator import eval_to_core

AFFS = ("Translate", "Rotate", "Scale")
BOPS = ("Union", "Difference", "Intersection")


def rand_num(rng: random.Random) -> float:
    return rng.choice([-4, -2, -1, -0.5, 0.5, 1, 1.5, 2, 3, 5, 8])


def rand_pos(rng: random.Random) -> float:
    return rng.choice([0.5, 1, 1.5, 2, 3, 4, 6])


def rand_angle(rng: random.Random) -> float:
    return rng.choice([0, 15, 30, 45, 60, 90, 120, 180, 270])


def rand_vec(rng: random.Random, kind: str) -> Vec3:
    if kind == "Rotate":
        return vec3(rand_angle(rng), rand_angle(rng), rand_angle(rng))
    if kind == "Scale":
        return vec3(rand_pos(rng), rand_pos(rng), rand_pos(rng))
    return vec3(rand_num(rng), rand_num(rng), rand_num(rng))


def rand_prim(rng: random.Random) -> Expr:
    k = rng.randrange(4)
    if k == 0:
        return Cuboid(vec3(rand_pos(rng), rand_pos(rng), rand_pos(rng)))
    if k == 1:
        return Sphere(Num(rand_pos(rng)))
    if k == 2:
        return Cylinder(Vec2(Num(rand_pos(rng)), Num(rand_pos(rng))))
    return HexPrism(Vec2(Num(rand_pos(rng)), Num(rand_pos(rng))))


def rand_cad(rng: random.Random, depth: int = 2) -> Expr:
    if depth <= 0 or rng.random() < 0.3:
        return rand_prim(rng)
    k = rng.randrange(4)
    if k < 3:
        kind = AFFS[k]
        return Affine(kind, rand_vec(rng, kind), rand_cad(rng, depth - 1))
    return Binop(rng.choice(BOPS), rand_cad(rng, depth - 1), rand_cad(rng, depth - 1))


def rand_cads(rng: random.Random, n: int) -> List[Expr]:
    return [rand_cad(rng, 1) for _ in range(n)]


def rand_vec_list(rng: random.Random, n: int, kind: str = "Translate") -> ListExpr:
    return ListExpr(tuple(rand_vec(rng, kind) for _ in range(n)))


def rand_perm(rng: random.Random, n: int) -> Permutation:
    idx = list(range(n))
    rng.shuffle(idx)
    return Permutation(tuple(idx))


def _poly_vec_list(rng: random.Random, n: int) -> ListExpr:
    coefs = [
        [rng.randint(-9, 9) for _ in range(3)],
        [rng.randint(-9, 9) for _ in range(3)],
        [rng.randint(-9, 9) for _ in range(3)],
    ]
    rows = []
    for i in range(n):
        rows.append(vec3(*(c[0] + c[1] * i + c[2] * i * i for c in coefs)))
    return ListExpr(tuple(rows))


def _chain(rng: random.Random, kind: str, items: List[Expr]) -> Expr:
    acc = items[0]
    for e in items[1:]:
        acc = Binop(kind, acc, e)
    return acc


def _tab_vec_body(rng: random.Random, var: str, kind: str = "Translate") -> Vec3:
    a, b = rng.randint(1, 5), rng.randint(0, 6)
    if kind == "Scale":  # keep every component nonzero at every index
        return Vec3(
            BinNum("+", BinNum("*", Num(a), Var(var)), Num(1)),
            Num(rand_pos(rng)),
            BinNum("+", Var(var), Num(1)),
        )
    return Vec3(
        BinNum("+", BinNum("*", Num(a), Var(var)), Num(b)),
        Num(rand_num(rng)),
        Var(var),
    )


def _tab_cad_body(rng: random.Random, var: str) -> Expr:
    return Affine(
        "Translate",
        Vec3(BinNum("*", Num(rng.randint(1, 4)), Var(var)), Num(0), Num(0)),
        rand_prim(rng),
    )


def _unpart_lists(rng: random.Random, make_item) -> "tuple[Partitioning, list]":
    lens = [rng.randint(1, 3) for _ in range(rng.randint(2, 3))]
    part = Partitioning(tuple(lens))
    lists = [ListExpr(tuple(make_item() for _ in range(ln))) for ln in lens]
    return part, lists


def instance_generators() -> Dict[str, Callable[[random.Random], Expr]]:
    """One closed-instance builder per rule name."""

    def fold_intro(rng):
        kind = rng.choice(BOPS)
        return _chain(rng, kind, rand_cads(rng, rng.randint(2, 5)))

    def repeat_intro(rng):
        item = rand_cad(rng, 1)
        return ListExpr((item,) * rng.randint(2, 5))

    def map2_repeat(rng):
        n = rng.randint(2, 5)
        kind = rng.choice(AFFS)
        return Map2(kind, Repeat(n, rand_vec(rng, kind)), Repeat(n, rand_cad(rng, 1)))

    def map2_tab_tab(rng):
        n = rng.randint(2, 5)
        kind = rng.choice(AFFS)
        binds = (("i", n),)
        return Map2(
            kind,
            Tabulate(binds, _tab_vec_body(rng, "i", kind)),
            Tabulate(binds, _tab_cad_body(rng, "i")),
        )

    def map2_tab_repeat(rng):
        n = rng.randint(2, 5)
        kind = rng.choice(AFFS)
        return Map2(
            kind, Tabulate((("i", n),), _tab_vec_body(rng, "i", kind)), Repeat(n, rand_cad(rng, 1))
        )

    def map2_repeat_tab(rng):
        n = rng.randint(2, 5)
        kind = rng.choice(AFFS)
        return Map2(
            kind, Repeat(n, rand_vec(rng, kind)), Tabulate((("i", n),), _tab_cad_body(rng, "i"))
        )

    def structure_find(rng):
        kind = rng.choice(AFFS)
        n = rng.randint(2, 5)
        child = rand_prim(rng)
        items = tuple(
            Affine(kind, rand_vec(rng, kind), child if rng.random() < 0.7 else rand_prim(rng))
            for _ in range(n)
        )
        return ListExpr(items)

    def list_solve(rng):
        return _poly_vec_list(rng, rng.randint(3, 8))

    def rot180(rng):
        return Affine("Rotate", vec3(0, 0, 180), rand_cad(rng, 1))

    def mirror(rng):
        return Affine("Scale", vec3(-1, -1, 1), rand_cad(rng, 1))

    def rot0(rng):
        return Affine("Rotate", vec3(0, 0, 0), rand_cad(rng, 1))

    def trans0(rng):
        return Affine("Translate", vec3(0, 0, 0), rand_cad(rng, 1))

    def scale1(rng):
        return Affine("Scale", vec3(1, 1, 1), rand_cad(rng, 1))

    def intro(kind):
        def gen(rng):
            # a sibling carrying `kind` plus one element lacking it
            sib = Affine(kind, rand_vec(rng, kind), rand_prim(rng))
            return ListExpr((sib, rand_prim(rng)))

        return gen

    def scale_trans(rng):
        return Affine(
            "Scale",
            rand_vec(rng, "Scale"),
            Affine("Translate", rand_vec(rng, "Translate"), rand_cad(rng, 1)),
        )

    def trans_scale(rng):
        return Affine(
            "Translate",
            rand_vec(rng, "Translate"),
            Affine("Scale", rand_vec(rng, "Scale"), rand_cad(rng, 1)),
        )

    def scale_scale(rng):
        return Affine(
            "Scale", rand_vec(rng, "Scale"), Affine("Scale", rand_vec(rng, "Scale"), rand_cad(rng, 1))
        )

    def trans_trans(rng):
        return Affine(
            "Translate",
            rand_vec(rng, "Translate"),
            Affine("Translate", rand_vec(rng, "Translate"), rand_cad(rng, 1)),
        )

    def cuboid(rng):
        return Cuboid(vec3(rand_pos(rng), rand_pos(rng), rand_pos(rng)))

    def cuboid_unit(rng):
        return Affine("Scale", rand_vec(rng, "Scale"), Cuboid(vec3(1, 1, 1)))

    def sphere(rng):
        return Sphere(Num(rand_pos(rng)))

    def sphere_unit(rng):
        r = rand_pos(rng)
        return Affine("Scale", vec3(r, r, r), Sphere(Num(1)))

    def cylinder(rng):
        return Cylinder(Vec2(Num(rand_pos(rng)), Num(rand_pos(rng))))

    def cylinder_unit(rng):
        r = rand_pos(rng)
        return Affine("Scale", vec3(r, r, rand_pos(rng)), Cylinder(Vec2(Num(1), Num(1))))

    def hexprism(rng):
        return HexPrism(Vec2(Num(rand_pos(rng)), Num(rand_pos(rng))))

    def hexprism_unit(rng):
        r = rand_pos(rng)
        return Affine("Scale", vec3(r, r, rand_pos(rng)), HexPrism(Vec2(Num(1), Num(1))))

    def m2_unsort_params(rng):
        n = rng.randint(3, 5)
        kind = rng.choice(AFFS)
        return Map2(
            kind,
            Unsort(rand_perm(rng, n), rand_vec_list(rng, n, kind)),
            ListExpr(tuple(rand_cads(rng, n))),
        )

    def m2_unsort_cads(rng):
        n = rng.randint(3, 5)
        kind = rng.choice(AFFS)
        return Map2(
            kind,
            rand_vec_list(rng, n, kind),
            Unsort(rand_perm(rng, n), ListExpr(tuple(rand_cads(rng, n)))),
        )

    def sort_apply(rng):
        n = rng.randint(2, 6)
        return Sort(rand_perm(rng, n), ListExpr(tuple(rand_cads(rng, n))))

    def unsort_fold(kind):
        def gen(rng):
            n = rng.randint(2, 6)
            return Fold(kind, Unsort(rand_perm(rng, n), ListExpr(tuple(rand_cads(rng, n)))))

        return gen

    def unsort_repeat(rng):
        n = rng.randint(2, 6)
        return Unsort(rand_perm(rng, n), Repeat(n, rand_cad(rng, 1)))

    def m2_unpart_cads(rng):
        kind = rng.choice(AFFS)
        part, lists = _unpart_lists(rng, lambda: rand_cad(rng, 1))
        return Map2(kind, rand_vec_list(rng, part.total, kind), Unpart(part, tuple(lists)))

    def m2_unpart_params(rng):
        kind = rng.choice(AFFS)
        part, lists = _unpart_lists(rng, lambda: rand_vec(rng, kind))
        return Map2(kind, Unpart(part, tuple(lists)), ListExpr(tuple(rand_cads(rng, part.total))))

    def unpart_concat(rng):
        part, lists = _unpart_lists(rng, lambda: rand_cad(rng, 1))
        return Unpart(part, tuple(lists))

    def unspherical_trans(rng):
        n = rng.randint(3, 5)
        sph = ListExpr(
            tuple(vec3(rand_pos(rng), rand_angle(rng), rand_angle(rng)) for _ in range(n))
        )
        center = vec3(rand_num(rng), rand_num(rng), rand_num(rng))
        return Map2(
            "Translate", Unspherical(n, center, sph), ListExpr(tuple(rand_cads(rng, n)))
        )

    def partition_blocks(rng):
        spheres = [Sphere(Num(rand_pos(rng))) for _ in range(rng.randint(1, 3))]
        boxes = [Cuboid(vec3(rand_pos(rng), rand_pos(rng), rand_pos(rng))) for _ in range(rng.randint(2, 3))]
        return Fold("Union", ListExpr(tuple(spheres + boxes)))

    def regroup(rng):
        items = [Sphere(Num(rand_pos(rng))), Cuboid(vec3(1, 2, 3)), Sphere(Num(rand_pos(rng))), Cuboid(vec3(2, 2, 2))]
        rng.shuffle(items)
        items.append(Cuboid(vec3(rand_pos(rng), 1, 1)))
        return Fold("Union", ListExpr(tuple(items)))

    def unsort_over_unpart(rng):
        part, lists = _unpart_lists(rng, lambda: rand_cad(rng, 1))
        k = rng.randrange(len(lists))
        n_k = part.lengths[k]
        lists[k] = Unsort(rand_perm(rng, n_k), lists[k])
        return Unpart(part, tuple(lists))

    def fold_unpart_split(rng):
        part, lists = _unpart_lists(rng, lambda: rand_cad(rng, 1))
        return Fold("Union", Unpart(part, tuple(lists)))

    def fold_singleton(rng):
        return Fold(rng.choice(BOPS), ListExpr((rand_cad(rng, 1),)))

    def fold_pair(rng):
        return Fold(rng.choice(BOPS), ListExpr((rand_cad(rng, 1), rand_cad(rng, 1))))

    def fold_splice(rng):
        kind = rng.choice(("Union", "Intersection"))
        inner = Fold(kind, ListExpr(tuple(rand_cads(rng, rng.randint(2, 3)))))
        return Fold(kind, ListExpr((rand_cad(rng, 1), inner, rand_cad(rng, 1))))

    def num_fold(rng):
        op = rng.choice("+-*/")
        return Sphere(BinNum(op, Num(rng.randint(1, 9)), Num(rng.randint(1, 9))))

    return {
        "fold-intro": fold_intro,
        "repeat-intro": repeat_intro,
        "map2-repeat-fuse": map2_repeat,
        "map2-tabulate-fuse": map2_tab_tab,
        "map2-tabulate-repeat-fuse": map2_tab_repeat,
        "map2-repeat-tabulate-fuse": map2_repeat_tab,
        "structure-find": structure_find,
        "list-solve": list_solve,
        "rotate-half-turn-to-scale": rot180,
        "scale-to-rotate-half-turn": mirror,
        "rotate-zero-elim": rot0,
        "translate-zero-elim": trans0,
        "scale-one-elim": scale1,
        "rotate-zero-intro": intro("Rotate"),
        "translate-zero-intro": intro("Translate"),
        "scale-one-intro": intro("Scale"),
        "scale-translate-interchange": scale_trans,
        "translate-scale-interchange": trans_scale,
        "scale-scale-combine": scale_scale,
        "translate-translate-combine": trans_trans,
        "cuboid-to-unit": cuboid,
        "cuboid-from-unit": cuboid_unit,
        "sphere-to-unit": sphere,
        "sphere-from-unit": sphere_unit,
        "cylinder-to-unit": cylinder,
        "cylinder-from-unit": cylinder_unit,
        "hexprism-to-unit": hexprism,
        "hexprism-from-unit": hexprism_unit,
        "map2-unsort-params": m2_unsort_params,
        "map2-unsort-cads": m2_unsort_cads,
        "sort-apply": sort_apply,
        "unsort-elim-fold-union": unsort_fold("Union"),
        "unsort-elim-fold-intersection": unsort_fold("Intersection"),
        "unsort-elim-repeat": unsort_repeat,
        "map2-unpart-cads": m2_unpart_cads,
        "map2-unpart-params": m2_unpart_params,
        "unpart-to-concat": unpart_concat,
        "unspherical-translate": unspherical_trans,
        "list-partition": partition_blocks,
        "list-regroup": regroup,
        "unsort-over-unpart": unsort_over_unpart,
        "fold-union-unpart-split": fold_unpart_split,
        "fold-singleton": fold_singleton,
        "fold-pair": fold_pair,
        "fold-splice": fold_splice,
        "num-fold": num_fold,
    }


def values_equiv(a: Expr, b: Expr, eps: float) -> bool:
    """Evaluated-form comparison: elementwise over lists, numeric over
    vectors/scalars, canonical-form equivalence over cads."""
    if isinstance(a, ListExpr) or isinstance(b, ListExpr):
        if not (isinstance(a, ListExpr) and isinstance(b, ListExpr)):
            return False
        if len(a.items) != len(b.items):
            return False
        return all(values_equiv(x, y, eps) for x, y in zip(a.items, b.items))
    if isinstance(a, Vec3) and isinstance(b, Vec3):
        return all(
            abs(x.value - y.value) <= eps
            for x, y in ((a.x, b.x), (a.y, b.y), (a.z, b.z))
        )
    if isinstance(a, Num) and isinstance(b, Num):
        return abs(a.value - b.value) <= eps
    return semantic_equiv(a, b, eps)


def check_rule_on_instance(rule, instance: Expr, eps: float = 1e-6) -> int:
    """Apply `rule` everywhere it matches inside `instance` (no merging) and
    assert evaluated before/after agreement.  Returns applications checked."""
    g = EGraph()
    g.add_expr(instance)
    checked = 0
    for m in g.search(rule.lhs):
        res = rule.rhs(m, g)
        if res is None:
            continue
        builds = res if isinstance(res, list) else [res]
        for b in builds:
            new_id = g.add_build(b)
            before = extract(g, m.eclass, uniform_weight)
            after = extract(g, new_id, uniform_weight)
            ok = values_equiv(eval_to_core(before), eval_to_core(after), eps)
            assert ok, (
                f"{rule.name} broke equivalence:\n  before: {before}\n  after: {after}"
            )
            checked += 1
    return checked
