"""Exception hierarchy.

``LiteralError`` and ``DomainError`` are ordinary caller errors.
``TheoremViolation`` is raised when a theorem-backed assertion fails; it can
only mean an implementation bug, never bad input.
"""


class CoarseGroupsError(Exception):
    pass


class LiteralError(CoarseGroupsError, ValueError):
    """A group/hom/ideal/map literal could not be parsed."""


class DomainError(CoarseGroupsError, ValueError):
    """Input is well-formed but outside the operation's domain."""


class UnsupportedError(DomainError):
    """No decision procedure exists for this combination of inputs."""


class TheoremViolation(CoarseGroupsError, AssertionError):
    """A theorem-backed consistency check failed."""
