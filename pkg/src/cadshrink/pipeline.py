"""End-to-end driver: build the e-graph from a flat Core Caddy input, run
saturation with the configured rule groups, extract the cheapest program,
and validate it against the input with the analytic oracle.  Also houses
the seeded perturbation harness used to stress-test robustness.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Tuple

from .ast import (
    Affine,
    Binop,
    Cuboid,
    Cylinder,
    Expr,
    HexPrism,
    Num,
    Sphere,
    Vec2,
    Vec3,
    contains_inverse,
    round_sig,
    vec3,
)
from .cost import INFINITE, cost
from .egraph import EGraph, extract, run_saturation
from .equiv import semantic_equiv
from .errors import CadShrinkError
from .evaluator import eval_to_core
from .rules import ruleset


@dataclass
class Config:
    max_iters: int = 30
    max_nodes: int = 100_000
    max_seconds: float = 10.0
    solver_eps: float = 1e-3
    equiv_eps: float = 1e-6
    cad_rules: bool = True
    inverse_rules: bool = True
    rng_seed: int = 0


@dataclass
class ShrinkReport:
    input_cost: float
    output_cost: float
    iterations: int
    enodes: int
    eclasses: int
    stop_reason: str
    wall_seconds: float
    validated: Optional[bool] = None

    def to_json(self) -> dict:
        out = {
            "input_cost": self.input_cost,
            "output_cost": self.output_cost,
            "iterations": self.iterations,
            "enodes": self.enodes,
            "eclasses": self.eclasses,
            "stop_reason": self.stop_reason,
            "wall_seconds": round(self.wall_seconds, 6),
        }
        if self.validated is not None:
            out["validated"] = self.validated
        return out


def shrink(input_expr: Expr, cfg: Optional[Config] = None) -> Tuple[Expr, ShrinkReport]:
    cfg = cfg or Config()
    c_in = cost(input_expr)
    if c_in == INFINITE:
        raise CadShrinkError("input contains inverse-transformation forms")
    g = EGraph()
    root = g.add_expr(input_expr)
    rules = ruleset(
        cad=cfg.cad_rules, inverse=cfg.inverse_rules, solver_eps=cfg.solver_eps
    )
    sat = run_saturation(
        g,
        rules,
        max_iters=cfg.max_iters,
        max_nodes=cfg.max_nodes,
        max_seconds=cfg.max_seconds,
    )
    out = extract(g, root)
    c_out = cost(out)
    assert c_out <= c_in, "extraction can never beat the still-represented input"
    report = ShrinkReport(
        input_cost=c_in,
        output_cost=c_out,
        iterations=sat.iterations,
        enodes=sat.n_nodes,
        eclasses=sat.n_classes,
        stop_reason=sat.stop_reason,
        wall_seconds=sat.wall_seconds,
    )
    return out, report


def validate(input_core: Expr, output: Expr, eps: float = 1e-6) -> bool:
    """Does the output evaluate back to something equivalent to the input?"""
    if contains_inverse(output):
        raise CadShrinkError("output still contains inverse-transformation forms")
    return semantic_equiv(eval_to_core(output), input_core, eps)


@dataclass
class PerturbOptions:
    substitute_identities: bool = True
    drop_identities: bool = True
    interchange: bool = True
    shuffle_ac: bool = True
    jitter: float = 0.0

    @staticmethod
    def none() -> "PerturbOptions":
        return PerturbOptions(False, False, False, False, 0.0)


_ZERO = (0.0, 0.0, 0.0)
_ONE = (1.0, 1.0, 1.0)


def _vec_values(v: Expr) -> Tuple[float, float, float]:
    assert isinstance(v, Vec3)
    return (v.x.value, v.y.value, v.z.value)  # type: ignore[union-attr]


def _is(vals, target) -> bool:
    return all(abs(a - b) <= 1e-9 for a, b in zip(vals, target))


def perturb(input_core: Expr, seed: int, options: Optional[PerturbOptions] = None) -> Expr:
    """Seeded, deterministic obfuscation of a Core Caddy expression.

    Applies half-turn/mirror swaps, identity-affine removal, scale/translate
    interchanges, primitive/unit-scale expansion, random reordering of
    Union/Intersection chain arguments, and optional uniform numeric jitter.
    The result stays equivalent to the input (up to the jitter magnitude).
    """
    opts = options or PerturbOptions()
    rng = random.Random(seed)
    out = _perturb_walk(input_core, rng, opts)
    if opts.jitter:
        out = _jitter(out, rng, opts.jitter)
    return out


def _chain_items(e: Binop) -> list:
    items = [e.rhs]
    cur = e.lhs
    while isinstance(cur, Binop) and cur.kind == e.kind:
        items.append(cur.rhs)
        cur = cur.lhs
    items.append(cur)
    items.reverse()
    return items


def _perturb_walk(e: Expr, rng: random.Random, opts: PerturbOptions) -> Expr:
    if isinstance(e, Binop) and e.kind in ("Union", "Intersection"):
        items = [_perturb_walk(c, rng, opts) for c in _chain_items(e)]
        if opts.shuffle_ac and len(items) > 1:
            rng.shuffle(items)
        acc = items[0]
        for c in items[1:]:
            acc = Binop(e.kind, acc, c)
        return acc
    if isinstance(e, Binop):
        return Binop(e.kind, _perturb_walk(e.lhs, rng, opts), _perturb_walk(e.rhs, rng, opts))
    if isinstance(e, Affine):
        child = _perturb_walk(e.child, rng, opts)
        vals = _vec_values(e.params)
        if opts.drop_identities and (
            (e.kind in ("Rotate", "Translate") and _is(vals, _ZERO))
            or (e.kind == "Scale" and _is(vals, _ONE))
        ):
            return child
        if opts.substitute_identities and rng.random() < 0.5:
            if e.kind == "Rotate" and _is(vals, (0.0, 0.0, 180.0)):
                return Affine("Scale", vec3(-1, -1, 1), child)
            if e.kind == "Scale" and _is(vals, (-1.0, -1.0, 1.0)):
                return Affine("Rotate", vec3(0, 0, 180), child)
        node = Affine(e.kind, e.params, child)
        if opts.interchange:
            node = _maybe_interchange(node, rng)
        return node
    if isinstance(e, (Cuboid, Sphere, Cylinder, HexPrism)):
        if opts.substitute_identities and rng.random() < 0.3:
            return _unit_expand(e)
        return e
    if isinstance(e, (Num, Vec3, Vec2)):
        return e
    raise CadShrinkError(f"perturb expects Core Caddy, got {type(e).__name__}")


def _maybe_interchange(e: Affine, rng: random.Random) -> Affine:
    if not isinstance(e.child, Affine) or rng.random() >= 0.5:
        return e
    outer, inner = e, e.child
    ov, iv = _vec_values(outer.params), _vec_values(inner.params)
    if outer.kind == "Scale" and inner.kind == "Translate":
        moved = vec3(*(round_sig(a * b) for a, b in zip(ov, iv)))
        return Affine("Translate", moved, Affine("Scale", outer.params, inner.child))
    if outer.kind == "Translate" and inner.kind == "Scale":
        if any(abs(c) < 1e-9 for c in iv):
            return e
        moved = vec3(*(round_sig(a / b) for a, b in zip(ov, iv)))
        return Affine("Scale", inner.params, Affine("Translate", moved, inner.child))
    return e


def _unit_expand(e: Expr) -> Expr:
    if isinstance(e, Cuboid):
        return Affine("Scale", e.dims, Cuboid(vec3(1, 1, 1)))
    if isinstance(e, Sphere):
        r = e.radius
        return Affine("Scale", Vec3(r, r, r), Sphere(Num(1)))
    if isinstance(e, (Cylinder, HexPrism)):
        assert isinstance(e.params, Vec2)
        h, r = e.params.a, e.params.b
        unit = type(e)(Vec2(Num(1), Num(1)))
        return Affine("Scale", Vec3(r, r, h), unit)
    return e


def _jitter(e: Expr, rng: random.Random, magnitude: float) -> Expr:
    if isinstance(e, Num):
        return Num(round_sig(e.value + rng.uniform(-magnitude, magnitude)))
    if isinstance(e, Vec3):
        return Vec3(*(_jitter(c, rng, magnitude) for c in (e.x, e.y, e.z)))
    if isinstance(e, Vec2):
        return Vec2(_jitter(e.a, rng, magnitude), _jitter(e.b, rng, magnitude))
    if isinstance(e, Cuboid):
        return Cuboid(_jitter(e.dims, rng, magnitude))
    if isinstance(e, Sphere):
        return Sphere(_jitter(e.radius, rng, magnitude))
    if isinstance(e, (Cylinder, HexPrism)):
        return type(e)(_jitter(e.params, rng, magnitude))
    if isinstance(e, Affine):
        return Affine(e.kind, _jitter(e.params, rng, magnitude), _jitter(e.child, rng, magnitude))
    if isinstance(e, Binop):
        return Binop(e.kind, _jitter(e.lhs, rng, magnitude), _jitter(e.rhs, rng, magnitude))
    raise CadShrinkError(f"jitter expects Core Caddy, got {type(e).__name__}")
