"""Abstract syntax for the Caddy CAD language family.

Three nested fragments share this one tree type:

* core: numeric literals, vectors, primitives, affine transforms
  (minus TranslateSpherical), and binary set operators.  This is plain CSG.
* full: adds List/Concat/Fold/Tabulate/Map2/Repeat and variables, the
  operators that express repetition.
* extended: adds the inverse-transformation forms (Sort/Unsort, Part/Unpart,
  Spherical/Unspherical).  These exist only inside the rewriting engine and
  are never extracted into output programs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Tuple

AFFINE_KINDS = ("Translate", "Rotate", "Scale", "TranslateSpherical")
BINOP_KINDS = ("Union", "Difference", "Intersection")
NUM_OPS = ("+", "-", "*", "/")

SIG_DIGITS = 12


def round_sig(x: float, digits: int = SIG_DIGITS) -> float:
    """Round to `digits` significant digits (stabilizes hashing of floats).
    Magnitudes below 1e-12 collapse to zero; desk-scale models never use them
    and trig round-trips leave ~1e-16 residue otherwise."""
    if x == 0 or not math.isfinite(x):
        return 0.0 if x == 0 else x
    if abs(x) < 1e-12:
        return 0.0
    mag = math.floor(math.log10(abs(x)))
    return round(x, digits - 1 - mag)


class Expr:
    """Base class for every Caddy tree node."""

    __slots__ = ()


@dataclass(frozen=True)
class Num(Expr):
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class BinNum(Expr):
    op: str
    lhs: Expr
    rhs: Expr

    def __post_init__(self):
        if self.op not in NUM_OPS:
            raise ValueError(f"unknown numeric operator {self.op!r}")


@dataclass(frozen=True)
class Vec3(Expr):
    x: Expr
    y: Expr
    z: Expr


@dataclass(frozen=True)
class Vec2(Expr):
    a: Expr
    b: Expr


@dataclass(frozen=True)
class Cuboid(Expr):
    dims: Expr  # Vec3 [x, y, z]


@dataclass(frozen=True)
class Sphere(Expr):
    radius: Expr


@dataclass(frozen=True)
class Cylinder(Expr):
    params: Expr  # Vec2 [height, radius]


@dataclass(frozen=True)
class HexPrism(Expr):
    params: Expr  # Vec2 [height, radius]


@dataclass(frozen=True)
class Affine(Expr):
    kind: str
    params: Expr  # Vec3
    child: Expr

    def __post_init__(self):
        if self.kind not in AFFINE_KINDS:
            raise ValueError(f"unknown affine kind {self.kind!r}")


@dataclass(frozen=True)
class Binop(Expr):
    kind: str
    lhs: Expr
    rhs: Expr

    def __post_init__(self):
        if self.kind not in BINOP_KINDS:
            raise ValueError(f"unknown set operator {self.kind!r}")


@dataclass(frozen=True)
class Fold(Expr):
    kind: str
    arg: Expr  # a list-valued expression

    def __post_init__(self):
        if self.kind not in BINOP_KINDS:
            raise ValueError(f"unknown set operator {self.kind!r}")


@dataclass(frozen=True)
class ListExpr(Expr):
    items: Tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        if not self.items:
            raise ValueError("List must be non-empty")


@dataclass(frozen=True)
class Concat(Expr):
    lists: Tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "lists", tuple(self.lists))
        if not self.lists:
            raise ValueError("Concat must be non-empty")


@dataclass(frozen=True)
class Tabulate(Expr):
    bindings: Tuple[Tuple[str, int], ...]  # ((var, bound), ...), bounds >= 1
    body: Expr

    def __post_init__(self):
        binds = tuple((str(v), int(b)) for v, b in self.bindings)
        object.__setattr__(self, "bindings", binds)
        if not binds:
            raise ValueError("Tabulate needs at least one binding")
        for v, b in binds:
            if b < 1:
                raise ValueError(f"Tabulate bound for {v} must be >= 1, got {b}")


@dataclass(frozen=True)
class Map2(Expr):
    kind: str  # affine kind applied pointwise
    params: Expr  # vec3-list
    cads: Expr  # cad-list

    def __post_init__(self):
        if self.kind not in AFFINE_KINDS:
            raise ValueError(f"unknown affine kind {self.kind!r}")


@dataclass(frozen=True)
class Repeat(Expr):
    count: int
    item: Expr

    def __post_init__(self):
        object.__setattr__(self, "count", int(self.count))
        if self.count < 1:
            raise ValueError("Repeat count must be >= 1")


@dataclass(frozen=True)
class Permutation:
    """A zero-based index gather sequence; a bijection on 0..n-1.

    Sort gathers: (Sort p l)[k] = l[p[k]].  Unsort is the inverse scatter:
    (Unsort p l)[p[k]] = l[k].
    """

    indices: Tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        if sorted(idx) != list(range(len(idx))):
            raise ValueError(f"not a permutation of 0..{len(idx) - 1}: {idx}")

    def __len__(self) -> int:
        return len(self.indices)

    def gather(self, seq: Iterable) -> list:
        items = list(seq)
        if len(items) != len(self.indices):
            raise ValueError("permutation length mismatch")
        return [items[i] for i in self.indices]

    def scatter(self, seq: Iterable) -> list:
        items = list(seq)
        if len(items) != len(self.indices):
            raise ValueError("permutation length mismatch")
        out = [None] * len(items)
        for k, i in enumerate(self.indices):
            out[i] = items[k]
        return out

    def inverse(self) -> "Permutation":
        out = [0] * len(self.indices)
        for k, i in enumerate(self.indices):
            out[i] = k
        return Permutation(tuple(out))

    def is_identity(self) -> bool:
        return all(i == k for k, i in enumerate(self.indices))

    @staticmethod
    def sorting(keys: list) -> "Permutation":
        """Stable argsort: gathering with the result sorts the keyed items."""
        order = sorted(range(len(keys)), key=lambda k: keys[k])
        return Permutation(tuple(order))


@dataclass(frozen=True)
class Partitioning:
    """Sublist lengths; their sum must match the flattened list length."""

    lengths: Tuple[int, ...]

    def __post_init__(self):
        ls = tuple(int(x) for x in self.lengths)
        object.__setattr__(self, "lengths", ls)
        if not ls or any(x < 1 for x in ls):
            raise ValueError(f"partition lengths must be positive: {ls}")

    def __len__(self) -> int:
        return len(self.lengths)

    @property
    def total(self) -> int:
        return sum(self.lengths)

    def offsets(self) -> list:
        out, acc = [], 0
        for n in self.lengths:
            out.append(acc)
            acc += n
        return out

    def split(self, seq: Iterable) -> list:
        items = list(seq)
        if len(items) != self.total:
            raise ValueError("partitioning sum does not match list length")
        out = []
        for off, n in zip(self.offsets(), self.lengths):
            out.append(items[off : off + n])
        return out


@dataclass(frozen=True)
class Sort(Expr):
    perm: Permutation
    arg: Expr


@dataclass(frozen=True)
class Unsort(Expr):
    perm: Permutation
    arg: Expr


@dataclass(frozen=True)
class Part(Expr):
    part: Partitioning
    arg: Expr


@dataclass(frozen=True)
class Unpart(Expr):
    part: Partitioning
    lists: Tuple[Expr, ...]  # one sublist per partition entry, or a single
    # expression evaluating to the list of sublists

    def __post_init__(self):
        object.__setattr__(self, "lists", tuple(self.lists))
        if len(self.lists) != len(self.part) and len(self.lists) != 1:
            raise ValueError("Unpart arity does not match its partitioning")


@dataclass(frozen=True)
class Spherical(Expr):
    count: int
    center: Expr  # Vec3
    arg: Expr

    def __post_init__(self):
        object.__setattr__(self, "count", int(self.count))


@dataclass(frozen=True)
class Unspherical(Expr):
    count: int
    center: Expr  # Vec3
    arg: Expr

    def __post_init__(self):
        object.__setattr__(self, "count", int(self.count))


INVERSE_TYPES = (Sort, Unsort, Part, Unpart, Spherical, Unspherical)
PRIMITIVE_TYPES = (Cuboid, Sphere, Cylinder, HexPrism)


def num(v: float) -> Num:
    return Num(float(v))


def vec3(x, y, z) -> Vec3:
    return Vec3(*(c if isinstance(c, Expr) else Num(c) for c in (x, y, z)))


def vec2(a, b) -> Vec2:
    return Vec2(*(c if isinstance(c, Expr) else Num(c) for c in (a, b)))


def children(e: Expr) -> Iterator[Expr]:
    """Yield direct Expr children (payload ints/strings are not children)."""
    if isinstance(e, (Num, Var)):
        return
    elif isinstance(e, BinNum):
        yield e.lhs
        yield e.rhs
    elif isinstance(e, Vec3):
        yield e.x
        yield e.y
        yield e.z
    elif isinstance(e, Vec2):
        yield e.a
        yield e.b
    elif isinstance(e, Cuboid):
        yield e.dims
    elif isinstance(e, Sphere):
        yield e.radius
    elif isinstance(e, (Cylinder, HexPrism)):
        yield e.params
    elif isinstance(e, Affine):
        yield e.params
        yield e.child
    elif isinstance(e, Binop):
        yield e.lhs
        yield e.rhs
    elif isinstance(e, Fold):
        yield e.arg
    elif isinstance(e, ListExpr):
        yield from e.items
    elif isinstance(e, Concat):
        yield from e.lists
    elif isinstance(e, Tabulate):
        yield e.body
    elif isinstance(e, Map2):
        yield e.params
        yield e.cads
    elif isinstance(e, Repeat):
        yield e.item
    elif isinstance(e, (Sort, Unsort, Part)):
        yield e.arg
    elif isinstance(e, Unpart):
        yield from e.lists
    elif isinstance(e, (Spherical, Unspherical)):
        yield e.center
        yield e.arg
    else:
        raise TypeError(f"not an Expr: {e!r}")


def subtrees(e: Expr) -> Iterator[Expr]:
    yield e
    for c in children(e):
        yield from subtrees(c)


def contains_inverse(e: Expr) -> bool:
    return any(isinstance(s, INVERSE_TYPES) for s in subtrees(e))


def is_core(e: Expr) -> bool:
    """Core Caddy: no variables, no list forms, no TranslateSpherical."""
    for s in subtrees(e):
        if isinstance(s, (Num, BinNum, Vec3, Vec2, *PRIMITIVE_TYPES, Binop)):
            continue
        if isinstance(s, Affine) and s.kind != "TranslateSpherical":
            continue
        return False
    return True


def free_vars(e: Expr) -> frozenset:
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, Tabulate):
        bound = frozenset(v for v, _ in e.bindings)
        return free_vars(e.body) - bound
    out: frozenset = frozenset()
    for c in children(e):
        out |= free_vars(c)
    return out


def substitute(e: Expr, var: str, value: int) -> Expr:
    """Replace free occurrences of `var` with a numeric literal."""
    if isinstance(e, Var):
        return Num(value) if e.name == var else e
    if isinstance(e, Num):
        return e
    if isinstance(e, Tabulate):
        if any(v == var for v, _ in e.bindings):
            return e  # shadowed
        return Tabulate(e.bindings, substitute(e.body, var, value))
    if isinstance(e, BinNum):
        return BinNum(e.op, substitute(e.lhs, var, value), substitute(e.rhs, var, value))
    if isinstance(e, Vec3):
        return Vec3(*(substitute(c, var, value) for c in (e.x, e.y, e.z)))
    if isinstance(e, Vec2):
        return Vec2(substitute(e.a, var, value), substitute(e.b, var, value))
    if isinstance(e, Cuboid):
        return Cuboid(substitute(e.dims, var, value))
    if isinstance(e, Sphere):
        return Sphere(substitute(e.radius, var, value))
    if isinstance(e, Cylinder):
        return Cylinder(substitute(e.params, var, value))
    if isinstance(e, HexPrism):
        return HexPrism(substitute(e.params, var, value))
    if isinstance(e, Affine):
        return Affine(e.kind, substitute(e.params, var, value), substitute(e.child, var, value))
    if isinstance(e, Binop):
        return Binop(e.kind, substitute(e.lhs, var, value), substitute(e.rhs, var, value))
    if isinstance(e, Fold):
        return Fold(e.kind, substitute(e.arg, var, value))
    if isinstance(e, ListExpr):
        return ListExpr(tuple(substitute(c, var, value) for c in e.items))
    if isinstance(e, Concat):
        return Concat(tuple(substitute(c, var, value) for c in e.lists))
    if isinstance(e, Map2):
        return Map2(e.kind, substitute(e.params, var, value), substitute(e.cads, var, value))
    if isinstance(e, Repeat):
        return Repeat(e.count, substitute(e.item, var, value))
    if isinstance(e, Sort):
        return Sort(e.perm, substitute(e.arg, var, value))
    if isinstance(e, Unsort):
        return Unsort(e.perm, substitute(e.arg, var, value))
    if isinstance(e, Part):
        return Part(e.part, substitute(e.arg, var, value))
    if isinstance(e, Unpart):
        return Unpart(e.part, tuple(substitute(c, var, value) for c in e.lists))
    if isinstance(e, Spherical):
        return Spherical(e.count, substitute(e.center, var, value), substitute(e.arg, var, value))
    if isinstance(e, Unspherical):
        return Unspherical(e.count, substitute(e.center, var, value), substitute(e.arg, var, value))
    raise TypeError(f"not an Expr: {e!r}")
