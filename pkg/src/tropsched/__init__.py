"""Max-plus linear algebra and closed-form tropical solvers for project scheduling."""

from .errors import (
    ConsistencyError,
    DomainError,
    EmptyFamilyError,
    InfeasibleError,
    ModelError,
    OutOfBoundsError,
    ProjectFileError,
    RegularityError,
    ShapeError,
    TropicalError,
)
from .fileio import dump_project, emit_report, parse_project
from .scheduling import (
    Problem,
    ProjectModel,
    Schedule,
    ScheduleFamily,
    instantiate,
    solve,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "ConsistencyError",
    "DomainError",
    "EmptyFamilyError",
    "InfeasibleError",
    "ModelError",
    "OutOfBoundsError",
    "ProjectFileError",
    "RegularityError",
    "ShapeError",
    "TropicalError",
    "Problem",
    "ProjectModel",
    "Schedule",
    "ScheduleFamily",
    "dump_project",
    "emit_report",
    "instantiate",
    "parse_project",
    "solve",
    "validate",
]
