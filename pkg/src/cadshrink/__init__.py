"""cadshrink: shrink flat CSG expressions into structured CAD programs."""

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
    contains_inverse,
    free_vars,
    is_core,
    substitute,
)
from .cost import INFINITE, cost
from .errors import (
    CadShrinkError,
    DegenerateScaleError,
    EvalError,
    NoFiniteExtractionError,
    ParseError,
)
from .egraph import EGraph, ENode, Rewrite, extract, run_saturation
from .evaluator import eval_to_core
from .equiv import semantic_equiv
from .pipeline import Config, PerturbOptions, ShrinkReport, perturb, shrink, validate
from .sexp import parse, pretty, to_text

__all__ = [
    "Affine",
    "BinNum",
    "Binop",
    "CadShrinkError",
    "Concat",
    "Config",
    "Cuboid",
    "Cylinder",
    "DegenerateScaleError",
    "EGraph",
    "ENode",
    "EvalError",
    "Expr",
    "Fold",
    "HexPrism",
    "INFINITE",
    "ListExpr",
    "Map2",
    "NoFiniteExtractionError",
    "Num",
    "ParseError",
    "Part",
    "Partitioning",
    "Permutation",
    "PerturbOptions",
    "Repeat",
    "Rewrite",
    "ShrinkReport",
    "Sort",
    "Sphere",
    "Spherical",
    "Tabulate",
    "Unpart",
    "Unsort",
    "Unspherical",
    "Var",
    "Vec2",
    "Vec3",
    "contains_inverse",
    "cost",
    "eval_to_core",
    "extract",
    "free_vars",
    "is_core",
    "parse",
    "perturb",
    "pretty",
    "run_saturation",
    "semantic_equiv",
    "shrink",
    "substitute",
    "to_text",
    "validate",
]
