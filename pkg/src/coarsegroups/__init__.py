"""Exact large-scale geometry of abelian groups: lattice algebra, group
ideals, coarse properties of homomorphisms, quasi-homomorphisms, spans and
their rational model, countable-rank endomorphisms, and cover witnesses."""

from .cardinals import ALEPH0, INFINITE, OMEGA
from .coarse import GroupIdeal, IdealKind, are_close, audit_ideal_axioms, parse_ideal, parse_subgroup
from .errors import CoarseGroupsError, DomainError, LiteralError, TheoremViolation, UnsupportedError
from .fgab import FgAbGroup, Hom, Subgroup, invariants, kernel, pullback, quotient
from .morph import analyze_hom, classify_fg, consistency_classif2

__version__ = "0.1.0"

__all__ = [
    "ALEPH0",
    "INFINITE",
    "OMEGA",
    "GroupIdeal",
    "IdealKind",
    "are_close",
    "audit_ideal_axioms",
    "parse_ideal",
    "parse_subgroup",
    "CoarseGroupsError",
    "DomainError",
    "LiteralError",
    "TheoremViolation",
    "UnsupportedError",
    "FgAbGroup",
    "Hom",
    "Subgroup",
    "invariants",
    "kernel",
    "pullback",
    "quotient",
    "analyze_hom",
    "classify_fg",
    "consistency_classif2",
]
