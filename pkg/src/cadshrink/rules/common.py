"""Shared helpers for rule builders."""

from __future__ import annotations


from ..ast import round_sig
from ..egraph import B, Build, EClassId, EGraph

TOL = 1e-9  # matching tolerance for identity constants


def approx(vec, target, tol: float = TOL) -> bool:
    return vec is not None and all(abs(a - b) <= tol for a, b in zip(vec, target))


def bnum(v: float) -> Build:
    return B("Num", round_sig(v))


def bvec3(x: float, y: float, z: float) -> Build:
    return B("Vec3", None, bnum(x), bnum(y), bnum(z))


def first_node(g: EGraph, cid: EClassId, op: str, payload=None, match_payload=False):
    for n in g.nodes_of(cid):
        if n.op == op and (not match_payload or n.payload == payload):
            return n
    return None
