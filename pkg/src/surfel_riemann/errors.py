"""Exception types raised across the package.

Every error derives from :class:`SurfelRiemannError` so callers (and the
command line front end) can separate input/validation failures from bugs.
"""

from __future__ import annotations


class SurfelRiemannError(Exception):
    """Base class for validation and input errors."""


class EmptyInput(SurfelRiemannError, ValueError):
    pass


class NonManifoldEdge(SurfelRiemannError):
    """An edgel is shared by more than two surfels."""

    def __init__(self, edgel, count):
        self.edgel = edgel
        self.count = count
        a, b = edgel
        super().__init__(
            f"edgel {_fmt(a)}-{_fmt(b)} is incident to {count} surfels"
        )


class NonManifoldVertex(SurfelRiemannError):
    """The surfels around a corner do not form a single fan."""

    def __init__(self, corner):
        self.corner = corner
        super().__init__(f"surfels around corner {_fmt(corner)} do not form one fan")


class DegenerateProjection(SurfelRiemannError):
    def __init__(self, surfel, detail=""):
        self.surfel = surfel
        super().__init__(f"surfel {surfel}: degenerate projection {detail}".strip())


class NonPositiveRealPart(SurfelRiemannError):
    def __init__(self, where, rho):
        self.where = where
        self.rho = rho
        super().__init__(f"{where}: Re(rho) too small (rho={complex(rho):.6g})")


class DimensionError(SurfelRiemannError, ValueError):
    pass


class SingularStar(SurfelRiemannError):
    pass


class NotRealStructure(SurfelRiemannError):
    pass


class DegenerateMove(SurfelRiemannError):
    pass


class InvalidConfiguration(SurfelRiemannError):
    pass


class SingularSystem(SurfelRiemannError):
    pass


class Underconstrained(SurfelRiemannError):
    pass


class MalformedInput(SurfelRiemannError, ValueError):
    """A text input file could not be parsed."""


def _fmt(p):
    return "(" + ",".join(str(int(c)) for c in p) + ")"


__all__ = [
    "SurfelRiemannError", "EmptyInput", "NonManifoldEdge", "NonManifoldVertex",
    "DegenerateProjection", "NonPositiveRealPart", "DimensionError", "SingularStar",
    "NotRealStructure", "DegenerateMove", "InvalidConfiguration", "SingularSystem",
    "Underconstrained", "MalformedInput",
]
