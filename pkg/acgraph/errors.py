"""Exception hierarchy; every error carries a human readable ``message``."""

from __future__ import annotations

from typing import Any, Sequence, Tuple


class AcGraphError(Exception):
    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class GeometryError(AcGraphError):
    pass


class CollinearOverlapError(GeometryError):
    def __init__(self, message: str, segments: Tuple[Any, Any] | None = None):
        super().__init__(message)
        self.segments = segments


class PrecisionError(AcGraphError):
    pass


class GraphFormatError(AcGraphError):
    def __init__(self, message: str, *, field: str = "", line: int | None = None):
        location = field or ""
        if line is not None:
            location = f"line {line}" + (f", {location}" if location else "")
        super().__init__(f"{location}: {message}" if location else message)
        self.field = field
        self.line = line


class InvalidGraphError(AcGraphError):
    def __init__(self, message: str, violations: Sequence[Any] = ()):
        super().__init__(message)
        self.violations = list(violations)


class ConstructionError(AcGraphError):
    def __init__(self, message: str, *, stage: str = ""):
        super().__init__(f"[{stage}] {message}" if stage else message)
        self.stage = stage


class ProjectionError(ConstructionError):
    def __init__(self, message: str, *, pair: Tuple[int, int] | None = None, kind: str = ""):
        super().__init__(message, stage="project")
        self.pair = pair
        self.kind = kind


class MeshError(AcGraphError):
    pass


class ChargingError(AcGraphError):
    pass


class PreconditionError(AcGraphError):
    pass


class PartitionError(AcGraphError):
    def __init__(self, message: str, *, edge: int | None = None):
        super().__init__(message)
        self.edge = edge
