"""Analytic equivalence oracle for Core Caddy.

Canonical form: push every affine transform down to the primitive leaves as
an accumulated 4x4 homogeneous matrix (legal because the transforms are
invertible point maps, so they distribute over the set operators), fold each
primitive's own dimensions into that matrix as a diagonal scale, flatten
nested Union chains and nested Intersection chains into multisets, and keep
Difference ordered and left-associated.  Two expressions are equivalent iff
their canonical forms match structurally with per-matrix-entry tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .ast import Affine, Binop, Cuboid, Cylinder, Expr, HexPrism, Sphere, Vec2, Vec3
from .errors import DegenerateScaleError, EvalError
from .evaluator import eval_num


def translation_matrix(v) -> np.ndarray:
    m = np.eye(4)
    m[:3, 3] = v
    return m


def scale_matrix(v) -> np.ndarray:
    m = np.eye(4)
    m[0, 0], m[1, 1], m[2, 2] = v
    return m


def rotation_matrix(deg) -> np.ndarray:
    """Rz @ Ry @ Rx, angles in degrees."""
    rx, ry, rz = (math.radians(a) for a in deg)
    cx, sx = math.cos(rx), math.sin(rx)
    cy, sy = math.cos(ry), math.sin(ry)
    cz, sz = math.cos(rz), math.sin(rz)
    mx = np.array([[1, 0, 0], [0, cx, -sx], [0, sx, cx]], dtype=float)
    my = np.array([[cy, 0, sy], [0, 1, 0], [-sy, 0, cy]], dtype=float)
    mz = np.array([[cz, -sz, 0], [sz, cz, 0], [0, 0, 1]], dtype=float)
    m = np.eye(4)
    m[:3, :3] = mz @ my @ mx
    return m


def affine_matrix(kind: str, vec) -> np.ndarray:
    if kind == "Translate":
        return translation_matrix(vec)
    if kind == "Scale":
        return scale_matrix(vec)
    if kind == "Rotate":
        return rotation_matrix(vec)
    raise EvalError(f"no matrix form for affine kind {kind!r}")


@dataclass
class CanonPrim:
    kind: str
    matrix: np.ndarray


@dataclass
class CanonAC:
    op: str  # Union | Intersection
    items: List


@dataclass
class CanonDiff:
    items: List  # ((a - b) - c) flattened to [a, b, c]


def _vec(e: Expr, n: int) -> Tuple[float, ...]:
    if n == 3 and isinstance(e, Vec3):
        return (eval_num(e.x), eval_num(e.y), eval_num(e.z))
    if n == 2 and isinstance(e, Vec2):
        return (eval_num(e.a), eval_num(e.b))
    raise EvalError(f"expected a {n}-vector")


def canonicalize(e: Expr, eps: float = 0.0, matrix: np.ndarray = None):
    m = np.eye(4) if matrix is None else matrix
    if isinstance(e, Cuboid):
        return CanonPrim("Cuboid", m @ scale_matrix(_vec(e.dims, 3)))
    if isinstance(e, Sphere):
        r = eval_num(e.radius)
        return CanonPrim("Sphere", m @ scale_matrix((r, r, r)))
    if isinstance(e, (Cylinder, HexPrism)):
        h, r = _vec(e.params, 2)
        kind = "Cylinder" if isinstance(e, Cylinder) else "HexPrism"
        return CanonPrim(kind, m @ scale_matrix((r, r, h)))
    if isinstance(e, Affine):
        vec = _vec(e.params, 3)
        if e.kind == "Scale" and any(abs(c) < eps for c in vec):
            raise DegenerateScaleError(
                f"Scale {vec} has a near-zero component; cannot push through set operators"
            )
        return canonicalize(e.child, eps, m @ affine_matrix(e.kind, vec))
    if isinstance(e, Binop):
        if e.kind in ("Union", "Intersection"):
            items = []
            for side in (e.lhs, e.rhs):
                c = canonicalize(side, eps, m)
                if isinstance(c, CanonAC) and c.op == e.kind:
                    items.extend(c.items)
                else:
                    items.append(c)
            return CanonAC(e.kind, items)
        # Difference: ordered, left-associated
        left = canonicalize(e.lhs, eps, m)
        right = canonicalize(e.rhs, eps, m)
        items = left.items if isinstance(left, CanonDiff) else [left]
        return CanonDiff(list(items) + [right])
    raise EvalError(f"not a Core Caddy expression: {type(e).__name__}")


def _sort_key(c):
    if isinstance(c, CanonPrim):
        return (0, c.kind, tuple(np.round(c.matrix, 6).ravel()))
    if isinstance(c, CanonAC):
        return (1, c.op, len(c.items), tuple(_sort_key(i) for i in sorted(c.items, key=_sort_key)))
    return (2, "", len(c.items), tuple(_sort_key(i) for i in c.items))


def _match(a, b, eps: float) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, CanonPrim):
        return a.kind == b.kind and bool(np.all(np.abs(a.matrix - b.matrix) <= eps))
    if isinstance(a, CanonDiff):
        return len(a.items) == len(b.items) and all(
            _match(x, y, eps) for x, y in zip(a.items, b.items)
        )
    # AC multiset: greedy bipartite matching after canonical sorting
    if a.op != b.op or len(a.items) != len(b.items):
        return False
    left = sorted(a.items, key=_sort_key)
    right = sorted(b.items, key=_sort_key)
    if all(_match(x, y, eps) for x, y in zip(left, right)):
        return True
    used = [False] * len(right)
    for x in left:
        for j, y in enumerate(right):
            if not used[j] and _match(x, y, eps):
                used[j] = True
                break
        else:
            return False
    return True


def semantic_equiv(a: Expr, b: Expr, eps: float) -> bool:
    """True iff the canonical forms of two Core Caddy expressions agree
    entrywise within eps.  Raises DegenerateScaleError for near-zero scales."""
    return _match(canonicalize(a, eps), canonicalize(b, eps), eps)
