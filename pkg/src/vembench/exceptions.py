"""Exception hierarchy shared across the package.

Every failure mode that callers are expected to catch has its own class so
batch drivers can record a machine-readable reason token instead of matching
on message strings.
"""

from __future__ import annotations


class VembenchError(Exception):
    """Base class for all package-specific failures."""


class DegenerateGeometry(VembenchError):
    """A polygon or triangle is invalid: self-intersecting, zero area, or collapsed."""


class InvalidParameter(VembenchError):
    """A family parameter, tolerance, or configuration value is out of range."""


class GenerationFailed(VembenchError):
    """A generator could not produce a valid polygon within its retry budget."""


class RefinementFailed(VembenchError):
    """Mesh refinement exceeded its insertion budget without meeting targets."""


class SingularG(VembenchError):
    """The projector Gram matrix is numerically singular for some element."""


class SolveFailed(VembenchError):
    """The linear solver did not return a usable solution."""


class InvalidSamples(VembenchError):
    """A statistics routine received too few samples or mismatched lengths."""


class ConstantColumn(VembenchError):
    """A correlation input has zero variance, so the coefficient is undefined."""


class ZeroNormalizer(VembenchError):
    """A relative error was requested against an identically-zero reference."""


class NegativeQuadraticForm(VembenchError):
    """An energy norm evaluated negative beyond round-off, so the matrix is not PSD."""


class MissingJoin(VembenchError):
    """Two result tables could not be joined because a mesh id is absent from one."""
