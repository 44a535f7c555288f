"""Exception types shared across the package."""


class CadShrinkError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(CadShrinkError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class EvalError(CadShrinkError):
    """Unbound variable, length mismatch, or division by zero during evaluation."""


class DegenerateScaleError(CadShrinkError):
    """A Scale component is (near) zero; pushing it through a Difference is unsound."""


class NoFiniteExtractionError(CadShrinkError):
    """Every representative of the requested eclass has infinite cost."""
