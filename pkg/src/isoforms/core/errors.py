"""Exception hierarchy for isoforms.

Domain errors (bad input forms, illegal table cells, numerical corruption) all derive from
``DomainError`` so the command line can map them to exit status 1. I/O failures keep the
exceptions raised by :mod:`isoforms.io` and map to exit status 2.
"""

from typing import Any


class IsoformsError(Exception):
    """Base exception for isoforms."""


class DomainError(IsoformsError):
    """A mathematically invalid request or a failed numerical certification."""


class InvalidPointError(DomainError):
    """Raised when a projective pair does not describe a point of the sphere."""


class InvalidMapError(DomainError):
    """Raised for singular matrices or degenerate point correspondences."""


class InvalidFormError(DomainError):
    """Raised when a 1-form violates the simple pole / simple zero invariants."""


class NotFiniteError(DomainError):
    """Raised when a group closure grows beyond its cap."""


class SignatureError(DomainError):
    """Raised when a closed set of maps matches no finite subgroup signature."""


class GroupTypeError(DomainError):
    """Raised when an operation is asked to work with the wrong group type."""


class IllegalCellError(DomainError):
    """Raised for a (group, dif, l1, l2) combination outside the pole-count table."""


class SynthesisError(DomainError):
    """Raised when a synthesized form does not have the requested isotropy."""

    def __init__(self, message: str, achieved: Any = None) -> None:
        super().__init__(message)
        # The isotropy group that was actually reached, when known
        self.achieved = achieved


class SamplingError(DomainError):
    """Raised when stratum sampling exhausts its rejection budget."""


class NumericalError(DomainError):
    """Raised when an internal consistency check fails beyond tolerance."""


class SpecialPointError(DomainError):
    """Raised when a point is not a vertex, edge midpoint or face center."""
