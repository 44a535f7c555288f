"""Congruence-closed e-graph: hashconsing, pattern search, rewriting,
a saturation driver, and minimal-cost extraction.

Merges are deferred: they mark classes dirty and congruence is repaired by
`rebuild`, which the saturation loop calls once per iteration.  Within one
iteration all matches for all rules are collected before any application,
so rule order cannot hide matches.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Dict, List, NamedTuple, Optional, Set, Tuple, Union

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
    Partitioning,
    Permutation,
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
from .cost import INFINITE
from .errors import NoFiniteExtractionError
from .sexp import format_number

EClassId = int

CAD_OPS = frozenset(
    {"Cuboid", "Sphere", "Cylinder", "HexPrism", "Affine", "Binop", "Fold"}
)
INVERSE_OPS = frozenset({"Sort", "Unsort", "Part", "Unpart", "Spherical", "Unspherical"})
VARIADIC_OPS = frozenset({"List", "Concat", "Unpart"})


class ENode(NamedTuple):
    op: str
    payload: object  # hashable; None when the operator carries no payload
    children: Tuple[EClassId, ...]


class EClass:
    __slots__ = ("nodes", "node_set", "by_op", "parents")

    def __init__(self):
        self.nodes: List[ENode] = []  # insertion order (structure finder relies on it)
        self.node_set: Set[ENode] = set()
        self.by_op: Dict[str, List[ENode]] = {}
        self.parents: List[Tuple[ENode, EClassId]] = []

    def push(self, node: ENode) -> bool:
        if node in self.node_set:
            return False
        self.nodes.append(node)
        self.node_set.add(node)
        self.by_op.setdefault(node.op, []).append(node)
        return True


class EGraph:
    def __init__(self):
        self._uf: List[EClassId] = []
        self.classes: Dict[EClassId, EClass] = {}
        self.hashcons: Dict[ENode, EClassId] = {}
        self.pending: List[EClassId] = []
        self.union_count = 0
        self._normalized_at = -1
        self._op_index_state = None
        self._op_index: Dict[str, List[Tuple[EClassId, ENode]]] = {}

    # union-find

    def find(self, x: EClassId) -> EClassId:
        uf = self._uf
        root = uf[x]
        if root == x:
            return x
        while uf[root] != root:
            root = uf[root]
        while uf[x] != root:
            uf[x], x = root, uf[x]
        return root

    def _new_class(self) -> EClassId:
        cid = len(self._uf)
        self._uf.append(cid)
        self.classes[cid] = EClass()
        return cid

    # construction

    def canonicalize(self, node: ENode) -> ENode:
        return ENode(node.op, node.payload, tuple(self.find(c) for c in node.children))

    def add(self, node: ENode) -> EClassId:
        node = self.canonicalize(node)
        cid = self.hashcons.get(node)
        if cid is not None:
            return self.find(cid)
        cid = self._new_class()
        self.classes[cid].push(node)
        self.hashcons[node] = cid
        for ch in set(node.children):
            self.classes[self.find(ch)].parents.append((node, cid))
        return cid

    def add_expr(self, e: Expr) -> EClassId:
        return self.add(_expr_node(self, e))

    def merge(self, a: EClassId, b: EClassId) -> EClassId:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        self.union_count += 1
        if len(self.classes[ra].parents) < len(self.classes[rb].parents):
            ra, rb = rb, ra
        self._uf[rb] = ra
        winner = self.classes[ra]
        loser = self.classes.pop(rb)
        for n in loser.nodes:
            winner.push(n)
        winner.parents.extend(loser.parents)
        self.pending.append(ra)
        return ra

    def rebuild(self) -> None:
        if not self.pending and self.union_count == self._normalized_at:
            return
        while self.pending:
            todo = {self.find(c) for c in self.pending}
            self.pending = []
            for cid in todo:
                self._repair(self.find(cid))
        self._normalize_node_lists()
        self._normalized_at = self.union_count

    def _repair(self, cid: EClassId) -> None:
        cls = self.classes.get(cid)
        if cls is None:
            return
        parents = cls.parents
        cls.parents = []
        fresh: Dict[ENode, EClassId] = {}
        for pnode, pcls in parents:
            self.hashcons.pop(pnode, None)
            canon = self.canonicalize(pnode)
            existing = self.hashcons.get(canon)
            if existing is not None:
                self.merge(pcls, existing)
            self.hashcons[canon] = self.find(pcls)
            fresh[canon] = self.find(pcls)
        cls = self.classes.get(self.find(cid))
        if cls is not None:
            cls.parents.extend(fresh.items())

    def _normalize_node_lists(self) -> None:
        for cid, cls in self.classes.items():
            nodes, seen = [], set()
            changed = False
            for n in cls.nodes:
                canon = self.canonicalize(n)
                if canon is not n and canon != n:
                    changed = True
                if canon not in seen:
                    seen.add(canon)
                    nodes.append(canon)
                else:
                    changed = True
            if changed or len(nodes) != len(cls.nodes):
                cls.nodes = nodes
                cls.node_set = seen
                by_op: Dict[str, List[ENode]] = {}
                for n in nodes:
                    by_op.setdefault(n.op, []).append(n)
                cls.by_op = by_op

    # queries

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    @property
    def n_nodes(self) -> int:
        return len(self.hashcons)

    def state_triple(self) -> Tuple[int, int, int]:
        return (len(self.classes), len(self.hashcons), self.union_count)

    def nodes_of(self, cid: EClassId) -> List[ENode]:
        return self.classes[self.find(cid)].nodes

    def nodes_by_op(self, cid: EClassId, op: str) -> List[ENode]:
        return self.classes[self.find(cid)].by_op.get(op, [])

    def parents_of(self, cid: EClassId) -> List[Tuple[ENode, EClassId]]:
        return self.classes[self.find(cid)].parents

    def find_num(self, cid: EClassId) -> Optional[float]:
        for n in self.nodes_by_op(cid, "Num"):
            return n.payload
        return None

    def find_vec3(self, cid: EClassId) -> Optional[Tuple[float, float, float]]:
        for n in self.nodes_by_op(cid, "Vec3"):
            vals = tuple(self.find_num(c) for c in n.children)
            if all(v is not None for v in vals):
                return vals  # type: ignore[return-value]
        return None

    def find_vec2(self, cid: EClassId) -> Optional[Tuple[float, float]]:
        for n in self.nodes_by_op(cid, "Vec2"):
            vals = tuple(self.find_num(c) for c in n.children)
            if all(v is not None for v in vals):
                return vals  # type: ignore[return-value]
        return None

    def class_is_cad(self, cid: EClassId) -> bool:
        by_op = self.classes[self.find(cid)].by_op
        return any(op in CAD_OPS for op in by_op)

    def _nodes_by_op(self, op: str) -> List[Tuple[EClassId, ENode]]:
        state = self.state_triple()
        if self._op_index_state != state:
            index: Dict[str, List[Tuple[EClassId, ENode]]] = {}
            for cid in sorted(self.classes):
                for n in self.classes[cid].nodes:
                    index.setdefault(n.op, []).append((cid, n))
            self._op_index = index
            self._op_index_state = state
        return self._op_index.get(op, [])

    # pattern search

    def search(self, pattern) -> List["Match"]:
        out: List[Match] = []
        seen = set()
        if isinstance(pattern, PVar):
            for cid in sorted(self.classes):
                out.append(Match(cid, {pattern.name: cid}))
            return out
        results: List[Dict] = []
        for cid, node in self._nodes_by_op(pattern.op):
            _match_node(self, node, pattern, {}, results)
            if results:
                rcid = self.find(cid)
                for subst in results:
                    key = (rcid, _subst_key(subst))
                    if key not in seen:
                        seen.add(key)
                        out.append(Match(rcid, subst))
                results.clear()
        return out

    # rewriting

    def add_build(self, b: "Build") -> EClassId:
        if isinstance(b, int):
            return self.find(b)
        children = tuple(self.add_build(c) for c in b.children)
        return self.add(ENode(b.op, b.payload, children))

    # debug dump: one line per class, stable ordering

    def dump(self) -> str:
        lines = []
        for cid in sorted(self.classes):
            nodes = sorted(
                (self.canonicalize(n) for n in self.classes[cid].nodes),
                key=lambda n: (n.op, repr(n.payload), n.children),
            )
            rendered = []
            for n in nodes:
                payload = "" if n.payload is None else f"[{_fmt_payload(n.payload)}]"
                args = ", ".join(f"c{self.find(c)}" for c in n.children)
                rendered.append(f"{n.op}{payload}({args})" if n.children else f"{n.op}{payload}")
            lines.append(f"c{cid}: " + " ".join(rendered))
        return "\n".join(lines)

    def congruence_violations(self) -> List[Tuple[ENode, EClassId, EClassId]]:
        """Full-scan audit: congruent enodes living in distinct classes."""
        seen: Dict[ENode, EClassId] = {}
        bad = []
        for cid in self.classes:
            for n in self.classes[cid].nodes:
                canon = self.canonicalize(n)
                other = seen.get(canon)
                if other is None:
                    seen[canon] = cid
                elif other != cid:
                    bad.append((canon, other, cid))
        return bad


def _fmt_payload(p) -> str:
    if isinstance(p, float):
        return format_number(p)
    if isinstance(p, tuple):
        return " ".join(str(x) for x in p)
    return str(p)


# patterns


class PVar(NamedTuple):
    name: str


class PKVar(NamedTuple):
    name: str


ANY_PAYLOAD = object()


class PNode(NamedTuple):
    op: str
    payload: object  # concrete payload, PKVar, or ANY_PAYLOAD
    children: Tuple
    rest: Optional[str] = None  # name binding a suffix of children (variadic ops)
    as_name: Optional[str] = None  # also bind the eclass this node matched in


Pattern = Union[PVar, PNode]


class Match(NamedTuple):
    eclass: EClassId
    subst: Dict[str, object]


def _subst_key(subst: Dict[str, object]):
    # Binding order is fixed by pattern traversal, so insertion order is a
    # stable key; no sort needed.
    return tuple(subst.items())


_MISSING = object()


def _match_node(g: EGraph, node: ENode, pat: PNode, subst: Dict, out: List[Dict]) -> None:
    """Backtracking matcher: one shared binding dict, copied only on a
    completed match (appended to `out`)."""
    if node.op != pat.op:
        return
    p = pat.payload
    bound_payload = False
    if p is ANY_PAYLOAD:
        pass
    elif type(p) is PKVar:
        prev = subst.get(p.name, _MISSING)
        if prev is _MISSING:
            subst[p.name] = node.payload
            bound_payload = True
        elif prev != node.payload:
            return
    elif node.payload != p:
        return

    npat = len(pat.children)
    if (len(node.children) != npat if pat.rest is None else len(node.children) < npat):
        if bound_payload:
            del subst[p.name]
        return

    def kids(i: int) -> None:
        if i == npat:
            if pat.rest is not None:
                rest = tuple(g.find(c) for c in node.children[npat:])
                prev = subst.get(pat.rest, _MISSING)
                if prev is _MISSING:
                    subst[pat.rest] = rest
                    out.append(dict(subst))
                    del subst[pat.rest]
                elif prev == rest:
                    out.append(dict(subst))
                return
            out.append(dict(subst))
            return
        cpat = pat.children[i]
        cid = g.find(node.children[i])
        if type(cpat) is PVar:
            prev = subst.get(cpat.name, _MISSING)
            if prev is _MISSING:
                subst[cpat.name] = cid
                kids(i + 1)
                del subst[cpat.name]
            elif g.find(prev) == cid:
                kids(i + 1)
            return
        # nested PNode: try each same-op node in the child class
        bound_as = False
        if cpat.as_name is not None:
            prev = subst.get(cpat.as_name, _MISSING)
            if prev is not _MISSING and g.find(prev) != cid:
                return
            if prev is _MISSING:
                subst[cpat.as_name] = cid
                bound_as = True
        for cnode in g.classes[cid].by_op.get(cpat.op, ()):
            _match_node(g, cnode, cpat, subst, _Cont(out, kids, i))
        if bound_as:
            del subst[cpat.as_name]

    kids(0)
    if bound_payload:
        del subst[p.name]


class _Cont(list):
    """List stand-in whose append resumes sibling matching instead of
    recording: lets _match_node drive nested continuation without yields."""

    __slots__ = ("out", "kids", "i")

    def __init__(self, out, kids, i):
        super().__init__()
        self.out = out
        self.kids = kids
        self.i = i

    def append(self, subst_copy):  # a nested pattern matched fully
        self.kids(self.i + 1)


# right-hand sides build expressions over existing eclass ids


class Build(NamedTuple):
    op: str
    payload: object
    children: Tuple  # Build | EClassId


BuildLike = Union[Build, EClassId]


def B(op: str, payload=None, *children) -> Build:
    return Build(op, payload, tuple(children))


@dataclass(frozen=True)
class Rewrite:
    """A searchable left pattern plus a builder over substitutions.

    The builder returns None (no applicable result for this match), one
    build, or several builds; each build is added and unified with the
    matched class.  `cacheable` marks builders whose successful result is a
    pure function of the substitution, letting the saturation loop skip
    re-running them on a match it has already applied.
    """

    name: str
    lhs: Pattern
    rhs: Callable[[Match, EGraph], Union[None, BuildLike, List[BuildLike]]]
    cacheable: bool = False


@dataclass
class SaturationReport:
    stop_reason: str  # saturated | iter_limit | node_limit | time_limit
    iterations: int
    n_classes: int
    n_nodes: int
    wall_seconds: float


def run_saturation(
    g: EGraph,
    rules: List[Rewrite],
    max_iters: int = 30,
    max_nodes: int = 100_000,
    max_seconds: float = 10.0,
) -> SaturationReport:
    t0 = time.monotonic()
    stop = "iter_limit"
    iterations = 0
    applied: Dict[Tuple, EClassId] = {}  # (rule, match) -> built root, cacheable rules
    for _ in range(max_iters):
        iterations += 1
        before = g.state_triple()
        all_matches = [(rule, m) for rule in rules for m in g.search(rule.lhs)]
        over = False
        for rule, m in all_matches:
            key = None
            if rule.cacheable:
                key = (rule.name, g.find(m.eclass), _subst_key(m.subst))
                hit = applied.get(key)
                if hit is not None:
                    g.merge(m.eclass, hit)
                    continue
            res = rule.rhs(m, g)
            if res is None:
                continue
            builds = res if isinstance(res, list) else [res]
            for b in builds:
                new_id = g.add_build(b)
                if key is not None:
                    applied[key] = new_id
                g.merge(m.eclass, new_id)
            if g.n_nodes > max_nodes:
                stop = "node_limit"
                over = True
                break
            if time.monotonic() - t0 > max_seconds:
                stop = "time_limit"
                over = True
                break
        g.rebuild()
        if over:
            break
        if g.state_triple() == before:
            stop = "saturated"
            break
        if g.n_nodes > max_nodes:
            stop = "node_limit"
            break
        if time.monotonic() - t0 > max_seconds:
            stop = "time_limit"
            break
    return SaturationReport(
        stop_reason=stop,
        iterations=iterations,
        n_classes=g.n_classes,
        n_nodes=g.n_nodes,
        wall_seconds=time.monotonic() - t0,
    )


# extraction


def default_weight(op: str, payload) -> float:
    if op in INVERSE_OPS:
        return INFINITE
    if op == "Tabulate":
        return 1 + 2 * len(payload)
    if op == "Repeat":
        return 2
    return 1


def uniform_weight(op: str, payload) -> float:
    """Like default_weight but inverse forms are extractable (debug/tests)."""
    if op == "Tabulate":
        return 1 + 2 * len(payload)
    if op == "Repeat":
        return 2
    return 1


def class_costs(
    g: EGraph, cost_fn: Callable[[str, object], float] = default_weight
) -> Dict[EClassId, Tuple[float, Optional[ENode]]]:
    """Bottom-up fixpoint: minimal extraction cost and best enode per class.
    Worklist-driven; a class is revisited when one of its children improves."""
    best: Dict[EClassId, Tuple[float, Optional[ENode]]] = {
        cid: (INFINITE, None) for cid in g.classes
    }
    find = g.find
    pending = sorted(g.classes)
    in_queue = set(pending)
    while pending:
        next_pending: List[EClassId] = []
        in_queue.clear()
        for cid in pending:
            cur, cur_node = best[cid]
            improved = False
            for node in g.classes[cid].nodes:
                w = cost_fn(node.op, node.payload)
                if w == INFINITE:
                    continue
                total = w
                for ch in node.children:
                    c = best[find(ch)][0]
                    if c == INFINITE:
                        total = INFINITE
                        break
                    total += c
                if total < cur:
                    cur, cur_node = total, node
                    improved = True
            if improved:
                best[cid] = (cur, cur_node)
                for _, pcid in g.classes[cid].parents:
                    pcid = find(pcid)
                    if pcid not in in_queue:
                        in_queue.add(pcid)
                        next_pending.append(pcid)
        pending = sorted(next_pending)
    return best


def extract(
    g: EGraph,
    root: EClassId,
    cost_fn: Callable[[str, object], float] = default_weight,
) -> Expr:
    best = class_costs(g, cost_fn)
    root = g.find(root)
    if best[root][0] == INFINITE:
        raise NoFiniteExtractionError(f"class c{root} has no finite-cost representative")

    def build(cid: EClassId) -> Expr:
        node = best[g.find(cid)][1]
        assert node is not None
        kids = [build(c) for c in node.children]
        return _node_expr(node.op, node.payload, kids)

    return build(root)


def extracted_cost(g: EGraph, root: EClassId, cost_fn=default_weight) -> float:
    return class_costs(g, cost_fn)[g.find(root)][0]


class _AsBuild:
    """Stand-in graph whose add() wraps nodes instead of interning them,
    letting _expr_node double as an Expr -> Build converter."""

    @staticmethod
    def add(node) -> Build:
        return Build(node.op, node.payload, node.children)


def expr_build(e: Expr) -> Build:
    """Turn a concrete Expr into a Build tree (no eclass references)."""
    return _AsBuild.add(_expr_node(_AsBuild, e))  # type: ignore[arg-type]


# Expr <-> ENode conversion


def _expr_node(g: EGraph, e: Expr) -> ENode:
    def addc(x: Expr) -> EClassId:
        return g.add(_expr_node(g, x))

    if isinstance(e, Num):
        return ENode("Num", round_sig(e.value), ())
    if isinstance(e, Var):
        return ENode("Var", e.name, ())
    if isinstance(e, BinNum):
        return ENode("BinNum", e.op, (addc(e.lhs), addc(e.rhs)))
    if isinstance(e, Vec3):
        return ENode("Vec3", None, (addc(e.x), addc(e.y), addc(e.z)))
    if isinstance(e, Vec2):
        return ENode("Vec2", None, (addc(e.a), addc(e.b)))
    if isinstance(e, Cuboid):
        return ENode("Cuboid", None, (addc(e.dims),))
    if isinstance(e, Sphere):
        return ENode("Sphere", None, (addc(e.radius),))
    if isinstance(e, Cylinder):
        return ENode("Cylinder", None, (addc(e.params),))
    if isinstance(e, HexPrism):
        return ENode("HexPrism", None, (addc(e.params),))
    if isinstance(e, Affine):
        return ENode("Affine", e.kind, (addc(e.params), addc(e.child)))
    if isinstance(e, Binop):
        return ENode("Binop", e.kind, (addc(e.lhs), addc(e.rhs)))
    if isinstance(e, Fold):
        return ENode("Fold", e.kind, (addc(e.arg),))
    if isinstance(e, ListExpr):
        return ENode("List", None, tuple(addc(c) for c in e.items))
    if isinstance(e, Concat):
        return ENode("Concat", None, tuple(addc(c) for c in e.lists))
    if isinstance(e, Tabulate):
        return ENode("Tabulate", e.bindings, (addc(e.body),))
    if isinstance(e, Map2):
        return ENode("Map2", e.kind, (addc(e.params), addc(e.cads)))
    if isinstance(e, Repeat):
        return ENode("Repeat", e.count, (addc(e.item),))
    if isinstance(e, Sort):
        return ENode("Sort", e.perm.indices, (addc(e.arg),))
    if isinstance(e, Unsort):
        return ENode("Unsort", e.perm.indices, (addc(e.arg),))
    if isinstance(e, Part):
        return ENode("Part", e.part.lengths, (addc(e.arg),))
    if isinstance(e, Unpart):
        return ENode("Unpart", e.part.lengths, tuple(addc(c) for c in e.lists))
    if isinstance(e, Spherical):
        return ENode("Spherical", e.count, (addc(e.center), addc(e.arg)))
    if isinstance(e, Unspherical):
        return ENode("Unspherical", e.count, (addc(e.center), addc(e.arg)))
    raise TypeError(f"cannot intern {type(e).__name__}")


def _node_expr(op: str, payload, kids: List[Expr]) -> Expr:
    if op == "Num":
        return Num(payload)
    if op == "Var":
        return Var(payload)
    if op == "BinNum":
        return BinNum(payload, kids[0], kids[1])
    if op == "Vec3":
        return Vec3(kids[0], kids[1], kids[2])
    if op == "Vec2":
        return Vec2(kids[0], kids[1])
    if op == "Cuboid":
        return Cuboid(kids[0])
    if op == "Sphere":
        return Sphere(kids[0])
    if op == "Cylinder":
        return Cylinder(kids[0])
    if op == "HexPrism":
        return HexPrism(kids[0])
    if op == "Affine":
        return Affine(payload, kids[0], kids[1])
    if op == "Binop":
        return Binop(payload, kids[0], kids[1])
    if op == "Fold":
        return Fold(payload, kids[0])
    if op == "List":
        return ListExpr(tuple(kids))
    if op == "Concat":
        return Concat(tuple(kids))
    if op == "Tabulate":
        return Tabulate(payload, kids[0])
    if op == "Map2":
        return Map2(payload, kids[0], kids[1])
    if op == "Repeat":
        return Repeat(payload, kids[0])
    if op == "Sort":
        return Sort(Permutation(payload), kids[0])
    if op == "Unsort":
        return Unsort(Permutation(payload), kids[0])
    if op == "Part":
        return Part(Partitioning(payload), kids[0])
    if op == "Unpart":
        return Unpart(Partitioning(payload), tuple(kids))
    if op == "Spherical":
        return Spherical(payload, kids[0], kids[1])
    if op == "Unspherical":
        return Unspherical(payload, kids[0], kids[1])
    raise TypeError(f"unknown operator {op!r}")
