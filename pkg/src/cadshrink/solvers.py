"""Closed-form inference for numeric vector lists, plus list grouping.

The arithmetic solvers fit per-component polynomials of degree <= 2 over the
list index, in Cartesian or spherical coordinates, optionally after a stable
sort.  Results that required reordering or reprojection come back wrapped in
the matching inverse form (Unsort / Unspherical) so the engine can unify
them speculatively and discharge the wrapper where context allows.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .ast import (
    BinNum,
    Expr,
    Num,
    Partitioning,
    Permutation,
    Tabulate,
    Unsort,
    Unspherical,
    Var,
    Vec3,
    round_sig,
    vec3,
)
from .egraph import EClassId, EGraph
from .evaluator import cartesian_to_spherical
from .structure import affine_signature

Vec = Tuple[float, float, float]

INDEX_VAR = "i"
MAX_DEGREE = 2


@dataclass(frozen=True)
class FitResult:
    """Per-component polynomials constant-first ((c0, c1[, c2]) per axis),
    the list length, and the worst absolute residual of the rounded fit."""

    coefficients: Tuple[Tuple[float, ...], Tuple[float, ...], Tuple[float, ...]]
    n: int
    max_residual: float

_fit_cache: Dict[Tuple, Optional[Tuple[Tuple[float, ...], ...]]] = {}
_solve_cache: Dict[Tuple, object] = {}
_FIT_CACHE_MAX = 20000


def _cached(kind: str, vs, eps: float, compute):
    """Solver results depend only on the numeric values, so memoize on them;
    repeated saturation iterations then never refit the same list."""
    key = (kind, tuple(vs), eps)
    if key in _solve_cache:
        return _solve_cache[key]
    if len(_solve_cache) > _FIT_CACHE_MAX:
        _solve_cache.clear()
    result = compute()
    _solve_cache[key] = result
    return result


def fit_polynomials(vs: Sequence[Vec], eps: float) -> Optional[FitResult]:
    """Least-squares fit over the index 0..n-1, lowest degree (1 then 2)
    whose rounded coefficients keep every component within eps; terms with
    |coefficient| < eps are dropped before the residual check."""
    key = (tuple(vs), eps)
    if key in _fit_cache:
        return _fit_cache[key]
    n = len(vs)
    data = np.asarray(vs, dtype=float)
    idx = np.arange(n, dtype=float)
    result = None
    for degree in range(1, MAX_DEGREE + 1):
        design = np.vander(idx, degree + 1, increasing=True)
        coeffs, *_ = np.linalg.lstsq(design, data, rcond=None)
        rounded = np.array(
            [[round_sig(c) if abs(c) >= eps else 0.0 for c in col] for col in coeffs.T]
        )
        residual = float(np.abs(design @ rounded.T - data).max())
        if residual <= eps:
            result = FitResult(tuple(tuple(col) for col in rounded), n, residual)
            break
    if len(_fit_cache) > _FIT_CACHE_MAX:
        _fit_cache.clear()
    _fit_cache[key] = result
    return result


def _poly_expr(coeffs: Tuple[float, ...]) -> Expr:
    """Highest-degree terms first: a*i*i + b*i + c, trivial factors dropped."""
    i = Var(INDEX_VAR)
    terms: List[Expr] = []
    for power in range(len(coeffs) - 1, -1, -1):
        c = coeffs[power]
        if c == 0.0:
            continue
        if power == 0:
            terms.append(Num(c))
        else:
            base: Expr = i
            for _ in range(power - 1):
                base = BinNum("*", base, i)
            terms.append(base if c == 1.0 else BinNum("*", Num(c), base))
    if not terms:
        return Num(0.0)
    out = terms[0]
    for t in terms[1:]:
        out = BinNum("+", out, t)
    return out


def solve_list(vs: Sequence[Vec], eps: float) -> Optional[Tabulate]:
    """Fit (Tabulate (i n) [f_x(i), f_y(i), f_z(i)]); constant lists and
    lists shorter than 3 decline (Repeat covers constants)."""
    n = len(vs)
    if n < 3:
        return None
    if all(v == vs[0] for v in vs[1:]):
        return None
    fit = fit_polynomials(vs, eps)
    if fit is None:
        return None
    body = Vec3(*(_poly_expr(c) for c in fit.coefficients))
    return Tabulate(((INDEX_VAR, n),), body)


_SORT_KEYS = (
    lambda v: (v[0], v[1], v[2]),
    lambda v: (v[2], v[1], v[0]),
    lambda v: v[0],
    lambda v: v[1],
    lambda v: v[2],
)


def solve_list_sorted(
    vs: Sequence[Vec], eps: float
) -> Optional[Tuple[Permutation, Tabulate]]:
    """Try a fixed menu of sort keys; on success return the gather
    permutation p (Sort p vs is the sorted list) and the fit for it."""
    if len(vs) < 3:
        return None

    def compute():
        tried = set()
        for key in _SORT_KEYS:
            perm = Permutation.sorting([key(v) for v in vs])
            if perm.is_identity() or perm.indices in tried:
                continue
            tried.add(perm.indices)
            tab = solve_list(perm.gather(vs), eps)
            if tab is not None:
                return perm, tab
        return None

    return _cached("sorted", vs, eps, compute)


def solve_spherical(vs: Sequence[Vec], eps: float) -> Optional[Unspherical]:
    """Fit in spherical coordinates about the origin or the centroid; the
    result is wrapped in Unspherical (with any Unsort nested inside)."""
    n = len(vs)
    if n < 3:
        return None

    def compute():
        centroid = tuple(
            round_sig(c) for c in np.mean(np.asarray(vs, dtype=float), axis=0)
        )
        centers = [(0.0, 0.0, 0.0)]
        if max(abs(c) for c in centroid) > eps:
            centers.append(centroid)
        for center in centers:
            sph = [
                cartesian_to_spherical(x - center[0], y - center[1], z - center[2])
                for (x, y, z) in vs
            ]
            tab = solve_list(sph, eps)
            if tab is not None:
                return Unspherical(n, vec3(*center), tab)
            sorted_fit = solve_list_sorted(sph, eps)
            if sorted_fit is not None:
                perm, tab = sorted_fit
                return Unspherical(n, vec3(*center), Unsort(perm, tab))
        return None

    return _cached("spherical", vs, eps, compute)


# list grouping (the partitioning solver)


def _prim_fingerprints(g: EGraph) -> Dict[EClassId, frozenset]:
    """Primitive constructors reachable in each class's cheapest
    representative.  Cached per graph state."""
    from .egraph import class_costs  # local import: avoids cycle at module load

    state = g.state_triple()
    cached = getattr(g, "_fingerprint_cache", None)
    if cached is not None and cached[0] == state:
        return cached[1]
    best = class_costs(g)
    memo: Dict[EClassId, frozenset] = {}

    def fp(cid: EClassId) -> frozenset:
        cid = g.find(cid)
        if cid in memo:
            return memo[cid]
        memo[cid] = frozenset()
        node = best[cid][1]
        if node is None:
            return memo[cid]
        acc = set()
        if node.op in ("Cuboid", "Sphere", "Cylinder", "HexPrism"):
            acc.add(node.op)
        for ch in node.children:
            acc |= fp(ch)
        memo[cid] = frozenset(acc)
        return memo[cid]

    for cid in list(g.classes):
        fp(cid)
    g._fingerprint_cache = (state, memo)  # type: ignore[attr-defined]
    return memo


def group_items(
    g: EGraph, items: Sequence[EClassId]
) -> Optional[Tuple[str, List[List[int]]]]:
    """Group list positions by the first key that yields a non-trivial
    grouping: primitive-kind fingerprint, then affine signature, then
    canonical class identity.  Trivial = one group, or all singletons."""
    canon = [g.find(c) for c in items]
    fps = _prim_fingerprints(g)
    keyings = (
        ("fingerprint", [tuple(sorted(fps.get(c, frozenset()))) for c in canon]),
        ("signature", [affine_signature(g, c) for c in canon]),
        ("identity", canon),
    )
    for name, keys in keyings:
        groups: Dict[object, List[int]] = {}
        for pos, k in enumerate(keys):
            groups.setdefault(k, []).append(pos)
        if 2 <= len(groups) < len(items):
            return name, list(groups.values())
    return None


def _contiguous(groups: List[List[int]]) -> bool:
    return all(grp == list(range(grp[0], grp[0] + len(grp))) for grp in groups)


def partition_list(
    items: Sequence[EClassId], g: EGraph
) -> Optional[Tuple[Partitioning, List[List[EClassId]]]]:
    """Split a list whose grouping is already contiguous; non-contiguous
    groupings return None (a reordering must be registered first)."""
    if len(items) < 2:
        return None
    got = group_items(g, items)
    if got is None:
        return None
    _, groups = got
    if not _contiguous(groups):
        return None
    groups = sorted(groups, key=lambda grp: grp[0])
    part = Partitioning(tuple(len(grp) for grp in groups))
    return part, [[g.find(items[p]) for p in grp] for grp in groups]


def regrouping(
    items: Sequence[EClassId], g: EGraph
) -> Optional[Tuple[Permutation, Partitioning, List[List[EClassId]]]]:
    """For a non-contiguous grouping: the gather permutation that brings the
    groups together (smaller groups first, ties by first occurrence, stable
    within a group), the resulting partitioning, and the grouped items."""
    if len(items) < 2:
        return None
    got = group_items(g, items)
    if got is None:
        return None
    _, groups = got
    if _contiguous(groups):
        return None
    groups = sorted(groups, key=lambda grp: (len(grp), grp[0]))
    perm = Permutation(tuple(pos for grp in groups for pos in grp))
    part = Partitioning(tuple(len(grp) for grp in groups))
    grouped = [[g.find(items[p]) for p in grp] for grp in groups]
    return perm, part, grouped
