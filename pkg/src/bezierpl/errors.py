"""Exception hierarchy shared by every module of the package."""


class BezierPLError(Exception):
    """Base class for all library errors."""


class InvalidCurveError(BezierPLError, ValueError):
    """Control points are malformed, too few, or contain NaN/Inf."""


class DomainError(BezierPLError, ValueError):
    """A parameter lies outside its admissible range."""


class NearSingularError(BezierPLError, ArithmeticError):
    """The curve derivative is (numerically) zero where curvature is needed."""

    def __init__(self, t: float, norm: float, epsilon: float):
        self.t = t
        self.norm = norm
        self.epsilon = epsilon
        super().__init__(
            f"|C'(t)| = {norm:.3e} <= regularity epsilon {epsilon:.3e} at t = {t!r}"
        )


class QuadratureError(BezierPLError, ArithmeticError):
    """Adaptive quadrature hit its panel cap before meeting the tolerance."""


class CapExceededError(BezierPLError, MemoryError):
    """A subdivision depth would exceed the configured control-point cap."""

    def __init__(self, depth: int, points: int, cap: int):
        self.depth = depth
        self.points = points
        self.cap = cap
        super().__init__(
            f"depth {depth} needs {points} control points, cap is {cap}"
        )


class DegenerateMetricError(BezierPLError, ValueError):
    """A convergence sweep produced no positive values to fit."""


class InvariantBreachError(BezierPLError, AssertionError):
    """An internal consistency check failed; this always signals a bug."""


class CurveParseError(BezierPLError, ValueError):
    """A curve file could not be parsed. Carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
