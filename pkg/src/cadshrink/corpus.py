"""Bundled corpus: hand-written parametrized models in the repetitive style
the shrinker targets (radial arrays, rows of slots, growing sequences), plus
one genuinely two-dimensional grid that single-loop inference cannot fully
reroll.  Each model ships three forms: the structured source (.caddy), its
flattened Core Caddy (.csexp), and a seeded perturbation (_p.csexp).
"""

from __future__ import annotations

from pathlib import Path
from typing import Dict

from .evaluator import eval_to_core
from .pipeline import PerturbOptions, perturb
from .sexp import parse, pretty

MODELS: Dict[str, str] = {
    "wheel6": """
        (Union
          (Cylinder [1, 5])
          (Fold Union (Tabulate (i 6)
            (Rotate [0, 0, 60*i] (Translate [1, -0.5, 0] (Cuboid [10, 1, 1]))))))
    """,
    "row_slots": """
        (Difference
          (Cuboid [48, 25, 10])
          (Fold Union (Tabulate (i 9)
            (Translate [5*i + 2, 2, 1] (Cuboid [3, 21, 10])))))
    """,
    "radial_holes": """
        (Difference
          (Cylinder [5, 9])
          (Fold Union (Tabulate (i 12)
            (Rotate [0, 0, 30*i] (Translate [7, 0, 0] (Cylinder [6, 1]))))))
    """,
    "sphere_ring": """
        (Fold Union (Tabulate (i 8)
          (TranslateSpherical [10, 45*i, 90] (Sphere 2))))
    """,
    "stairs": """
        (Fold Union (Tabulate (i 8)
          (Translate [2*i, 0, 0] (Scale [2, 2, i+1] (Cuboid [1, 1, 1])))))
    """,
    "fence": """
        (Union
          (Translate [0, 0, 1] (Cylinder [9, 0.5]))
          (Translate [0, 0, 7] (Cylinder [9, 0.5]))
          (Fold Union (Tabulate (i 8)
            (Translate [1.5*i + 1, 0, 0] (Cuboid [1, 1, 9])))))
    """,
    "gear_teeth": """
        (Union
          (Cylinder [2, 6])
          (Fold Union (Tabulate (i 9)
            (Rotate [0, 0, 40*i] (Translate [6, -0.5, 0] (Cuboid [2, 1, 2]))))))
    """,
    "quad_row": """
        (Fold Union (Tabulate (i 5)
          (Translate [i*i + 2*i, 0, 0] (Sphere 1))))
    """,
    "shelf": """
        (Difference
          (Cuboid [20, 30, 20])
          (Fold Union (Tabulate (i 4)
            (Translate [1, 7*i + 1, 1] (Cuboid [18, 5, 18])))))
    """,
    "hex_row": """
        (Fold Union (Tabulate (i 6)
          (Translate [7*i, 0, 0] (HexPrism [2, i+1]))))
    """,
    "cyl_line": """
        (Fold Union (Tabulate (i 7)
          (Translate [3*i, 0, 0] (Cylinder [i+1, 1]))))
    """,
    "grid12": """
        (Union
          (Cuboid [20, 22, 1])
          (Fold Union (Tabulate (i 3) (j 4)
            (Translate [6*i + 1, 5*j + 1, 1] (Cuboid [5, 4, 2])))))
    """,
}

PERTURB_SEEDS: Dict[str, int] = {name: 1000 + k for k, name in enumerate(MODELS)}


def write_corpus(directory) -> None:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    for name, source in MODELS.items():
        expr = parse(source)
        core = eval_to_core(expr)
        perturbed = perturb(core, PERTURB_SEEDS[name], PerturbOptions())
        (out / f"{name}.caddy").write_text(pretty(expr) + "\n")
        (out / f"{name}.csexp").write_text(pretty(core) + "\n")
        (out / f"{name}_p.csexp").write_text(pretty(perturbed) + "\n")


if __name__ == "__main__":
    import sys

    write_corpus(sys.argv[1] if len(sys.argv) > 1 else "corpus")
