"""Exception types shared across the package."""


class TropicalError(Exception):
    """Base class for all errors raised by tropsched."""


class DomainError(TropicalError, ValueError):
    """A scalar operation was applied outside its domain (e.g. inverting -inf)."""


class ShapeError(TropicalError, ValueError):
    """Operand shapes are incompatible."""


class RegularityError(TropicalError, ValueError):
    """A matrix or vector lacks the required regularity.

    ``axis`` is one of ``"row"``, ``"column"`` or ``"entry"`` and ``index`` is
    the first offending position.
    """

    def __init__(self, name: str, axis: str, index: int):
        self.name = name
        self.axis = axis
        self.index = index
        if axis == "entry":
            msg = f"{name}: entry {index} is -inf"
        else:
            msg = f"{name}: {axis} {index} consists entirely of -inf"
        super().__init__(msg)


class InfeasibleError(TropicalError):
    """The inequality Ax <= x has no regular solution because Tr(A) > 0."""

    def __init__(self, trace_value: float, name: str = "A"):
        self.trace_value = trace_value
        self.name = name
        super().__init__(
            f"Tr({name}) = {trace_value:g} > 0: positive-weight cycle, "
            "no regular solution exists"
        )


class EmptyFamilyError(TropicalError):
    """The bounds of a solution family are inconsistent (lower > upper)."""


class ConsistencyError(TropicalError):
    """An internal self-check failed; indicates a bug rather than bad input."""


class ModelError(TropicalError):
    """A project model failed validation for the requested problem."""

    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(report.errors) or "invalid model")


class ProjectFileError(TropicalError, ValueError):
    """A project file could not be parsed; ``path`` is a JSON-path location."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class GridTooLargeError(TropicalError, ValueError):
    """The requested oracle grid exceeds the enumeration budget."""


class OutOfBoundsError(TropicalError, ValueError):
    """A parameter vector lies outside the bounds of a solution family."""
