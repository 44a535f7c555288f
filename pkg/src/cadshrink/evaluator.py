"""Big-step evaluation of full and extended Caddy down to Core Caddy.

Tabulate unrolls with the last-bound variable varying fastest, Fold is a
left fold, Map2 zips parameters onto cads, and the inverse forms undo (or
impose) the reordering/regrouping/reprojection they carry.  All numeric
results are constant-folded and rounded to 12 significant digits.
"""

from __future__ import annotations

import itertools
import math
from typing import Dict, Optional, Tuple

from .ast import (
    Affine,
    BinNum,
    Binop,
    Concat,
    Cuboid,
    Cylinder,
    Expr,
    Fold,
    HexPrism,
    ListExpr,
    Map2,
    Num,
    Part,
    Repeat,
    Sort,
    Sphere,
    Spherical,
    Tabulate,
    Unpart,
    Unsort,
    Unspherical,
    Var,
    Vec2,
    Vec3,
    round_sig,
)
from .errors import EvalError

Env = Dict[str, float]


def eval_num(e: Expr, env: Optional[Env] = None) -> float:
    env = env or {}
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        if e.name not in env:
            raise EvalError(f"unbound variable {e.name!r}")
        return env[e.name]
    if isinstance(e, BinNum):
        a = eval_num(e.lhs, env)
        b = eval_num(e.rhs, env)
        if e.op == "+":
            return round_sig(a + b)
        if e.op == "-":
            return round_sig(a - b)
        if e.op == "*":
            return round_sig(a * b)
        if b == 0:
            raise EvalError("division by zero")
        return round_sig(a / b)
    raise EvalError(f"expected a numeric expression, got {type(e).__name__}")


def spherical_to_cartesian(r: float, phi: float, theta: float) -> Tuple[float, float, float]:
    """[r, phi, theta]: phi = azimuth from +x in the xy-plane, theta =
    inclination from +z, both in degrees."""
    p, t = math.radians(phi), math.radians(theta)
    return (r * math.sin(t) * math.cos(p), r * math.sin(t) * math.sin(p), r * math.cos(t))


def cartesian_to_spherical(x: float, y: float, z: float) -> Tuple[float, float, float]:
    """Inverse of spherical_to_cartesian; phi normalized to [0, 360), and
    phi = theta = 0 at the origin where the angles are undefined."""
    r = math.sqrt(x * x + y * y + z * z)
    if r < 1e-12:
        return (0.0, 0.0, 0.0)
    theta = math.degrees(math.acos(max(-1.0, min(1.0, z / r))))
    phi = math.degrees(math.atan2(y, x)) % 360.0
    return (r, phi, theta)


def _vec3_values(e: Expr, env: Env) -> Tuple[float, float, float]:
    if not isinstance(e, Vec3):
        raise EvalError(f"expected a 3-vector, got {type(e).__name__}")
    return (eval_num(e.x, env), eval_num(e.y, env), eval_num(e.z, env))


def _const_vec3(values) -> Vec3:
    return Vec3(*(Num(round_sig(v)) for v in values))


def _eval_list(e: Expr, env: Env) -> ListExpr:
    v = _eval(e, env)
    if not isinstance(v, ListExpr):
        raise EvalError(f"expected a list, got {type(v).__name__}")
    return v


def _apply_affine(kind: str, vec: Tuple[float, float, float], child: Expr) -> Expr:
    if kind == "TranslateSpherical":
        return Affine("Translate", _const_vec3(spherical_to_cartesian(*vec)), child)
    return Affine(kind, _const_vec3(vec), child)


def _eval(e: Expr, env: Env) -> Expr:
    if isinstance(e, (Num, Var, BinNum)):
        return Num(round_sig(eval_num(e, env)))
    if isinstance(e, Vec3):
        return _const_vec3(_vec3_values(e, env))
    if isinstance(e, Vec2):
        return Vec2(Num(round_sig(eval_num(e.a, env))), Num(round_sig(eval_num(e.b, env))))
    if isinstance(e, Cuboid):
        return Cuboid(_eval(e.dims, env))
    if isinstance(e, Sphere):
        return Sphere(_eval(e.radius, env))
    if isinstance(e, Cylinder):
        return Cylinder(_eval(e.params, env))
    if isinstance(e, HexPrism):
        return HexPrism(_eval(e.params, env))
    if isinstance(e, Affine):
        return _apply_affine(e.kind, _vec3_values(e.params, env), _eval(e.child, env))
    if isinstance(e, Binop):
        return Binop(e.kind, _eval(e.lhs, env), _eval(e.rhs, env))
    if isinstance(e, Fold):
        items = _eval_list(e.arg, env).items
        acc = items[0]
        for v in items[1:]:
            acc = Binop(e.kind, acc, v)
        return acc
    if isinstance(e, ListExpr):
        return ListExpr(tuple(_eval(c, env) for c in e.items))
    if isinstance(e, Concat):
        out = []
        for sub in e.lists:
            out.extend(_eval_list(sub, env).items)
        return ListExpr(tuple(out))
    if isinstance(e, Tabulate):
        names = [v for v, _ in e.bindings]
        bounds = [b for _, b in e.bindings]
        out = []
        inner = dict(env)
        for idx in itertools.product(*(range(b) for b in bounds)):
            for name, i in zip(names, idx):
                inner[name] = float(i)
            out.append(_eval(e.body, inner))
        return ListExpr(tuple(out))
    if isinstance(e, Map2):
        params = _eval_list(e.params, env).items
        cads = _eval_list(e.cads, env).items
        if len(params) != len(cads):
            raise EvalError(
                f"Map2 length mismatch: {len(params)} parameters vs {len(cads)} cads"
            )
        out = []
        for p, c in zip(params, cads):
            if not isinstance(p, Vec3):
                raise EvalError("Map2 parameters must be 3-vectors")
            out.append(_apply_affine(e.kind, (p.x.value, p.y.value, p.z.value), c))
        return ListExpr(tuple(out))
    if isinstance(e, Repeat):
        item = _eval(e.item, env)
        return ListExpr((item,) * e.count)
    if isinstance(e, Sort):
        items = _eval_list(e.arg, env).items
        if len(items) != len(e.perm):
            raise EvalError("permutation length does not match list length")
        return ListExpr(tuple(e.perm.gather(items)))
    if isinstance(e, Unsort):
        items = _eval_list(e.arg, env).items
        if len(items) != len(e.perm):
            raise EvalError("permutation length does not match list length")
        return ListExpr(tuple(e.perm.scatter(items)))
    if isinstance(e, Part):
        items = _eval_list(e.arg, env).items
        if len(items) != e.part.total:
            raise EvalError("partitioning sum does not match list length")
        return ListExpr(tuple(ListExpr(tuple(sub)) for sub in e.part.split(items)))
    if isinstance(e, Unpart):
        if len(e.lists) == 1 and len(e.part) > 1:
            subs = _eval_list(e.lists[0], env).items  # nested list-of-sublists form
        else:
            subs = tuple(_eval(sub, env) for sub in e.lists)
        out = []
        for n, sub in zip(e.part.lengths, subs):
            if not isinstance(sub, ListExpr):
                raise EvalError("Unpart expects sublists")
            if len(sub.items) != n:
                raise EvalError(
                    f"Unpart sublist length {len(sub.items)} does not match partition entry {n}"
                )
            out.extend(sub.items)
        return ListExpr(tuple(out))
    if isinstance(e, (Spherical, Unspherical)):
        cx, cy, cz = _vec3_values(e.center, env)
        items = _eval_list(e.arg, env).items
        if len(items) != e.count:
            raise EvalError(f"expected {e.count} vectors, got {len(items)}")
        out = []
        for v in items:
            if not isinstance(v, Vec3):
                raise EvalError("spherical conversion needs a list of 3-vectors")
            x, y, z = v.x.value, v.y.value, v.z.value
            if isinstance(e, Spherical):
                out.append(_const_vec3(cartesian_to_spherical(x - cx, y - cy, z - cz)))
            else:
                dx, dy, dz = spherical_to_cartesian(x, y, z)
                out.append(_const_vec3((cx + dx, cy + dy, cz + dz)))
        return ListExpr(tuple(out))
    raise EvalError(f"cannot evaluate {type(e).__name__}")


def eval_to_core(e: Expr) -> Expr:
    """Evaluate a closed, well-formed program to a Core Caddy expression
    (or a List of Core Caddy values for list-valued programs)."""
    return _eval(e, {})
