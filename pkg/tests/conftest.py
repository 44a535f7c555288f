import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
REPO_ROOT = TESTS_DIR.parent
CORPUS_DIR = REPO_ROOT / "corpus"

sys.path.insert(0, str(TESTS_DIR))  # oracle_* and rulegen helper modules

# The ship's-wheel trio: structured target, ideal flat input, obfuscated
# flat input (half-turn replaced by a mirror scale, identity transform
# dropped, scale/translate interchanged, primitives unit-expanded, reordered).

WHEEL_TARGET = """
(Union
 (Cylinder [1, 5])
 (Fold Union
  (Tabulate (i 6)
   (Rotate [0, 0, 60*i]
    (Translate [1, -0.5, 0]
     (Cuboid [10, 1, 1]))))))
"""

WHEEL_IDEAL = """
(Union
 (Cylinder [1, 5])
 (Union
  (Rotate [0, 0, 0] (Translate [1, -0.5, 0] (Cuboid [10, 1, 1])))
  (Rotate [0, 0, 60] (Translate [1, -0.5, 0] (Cuboid [10, 1, 1])))
  (Rotate [0, 0, 120] (Translate [1, -0.5, 0] (Cuboid [10, 1, 1])))
  (Rotate [0, 0, 180] (Translate [1, -0.5, 0] (Cuboid [10, 1, 1])))
  (Rotate [0, 0, 240] (Translate [1, -0.5, 0] (Cuboid [10, 1, 1])))
  (Rotate [0, 0, 300] (Translate [1, -0.5, 0] (Cuboid [10, 1, 1])))))
"""

WHEEL_OBFUSCATED = """
(Union
 (Rotate [0, 0, 120] (Translate [1, -0.5, 0] (Cuboid [10, 1, 1])))
 (Scale [10, 1, 1] (Translate [0.1, -0.5, 0] (Cuboid [1, 1, 1])))
 (Rotate [0, 0, 300] (Translate [1, -0.5, 0] (Cuboid [10, 1, 1])))
 (Scale [5, 5, 1] (Cylinder [1, 1]))
 (Translate [-1, 0.5, 0] (Scale [-1, -1, 1] (Cuboid [10, 1, 1])))
 (Rotate [0, 0, 240] (Translate [1, -0.5, 0] (Cuboid [10, 1, 1])))
 (Rotate [0, 0, 60] (Translate [1, -0.5, 0] (Cuboid [10, 1, 1]))))
"""


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    assert CORPUS_DIR.is_dir(), "bundled corpus missing; run python -m cadshrink.corpus corpus"
    return CORPUS_DIR
