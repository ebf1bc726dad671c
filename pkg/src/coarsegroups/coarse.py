"""Group ideals, the coarse structures they induce, and closeness of maps.

An ideal is stored intensionally (a kind tag plus parameters) and membership
is decided per kind. Members handed to :meth:`GroupIdeal.contains` are either
finite sets (:class:`FiniteSubset`) or subgroups.
"""

from __future__ import annotations

import enum
import random
import re
from dataclasses import dataclass
from typing import Iterable

from .cardinals import OMEGA
from .errors import DomainError, LiteralError, UnsupportedError
from .fgab import FgAbGroup, Hom, Subgroup, direct_sum, image_subgroup

__all__ = [
    "IdealKind",
    "FiniteSubset",
    "GroupIdeal",
    "CoarseGroup",
    "AuditReport",
    "Closeness",
    "ideal_contains",
    "audit_ideal_axioms",
    "are_close",
    "entourage_ball",
    "product_ideal",
    "parse_subgroup",
    "parse_ideal",
]


class IdealKind(enum.Enum):
    DISCRETE = "discrete"
    BOUNDED = "bounded"
    FINITARY = "finitary"
    LINEAR = "linear"
    FINITE_RANK = "finite-rank"
    CUSTOM = "custom"


def _is_big(G) -> bool:
    return getattr(G, "countable_rank", False)


@dataclass(frozen=True)
class FiniteSubset:
    ambient: object
    elements: frozenset

    @classmethod
    def of(cls, G, elems: Iterable) -> "FiniteSubset":
        return cls(G, frozenset(G.reduce(e) for e in elems))

    def __iter__(self):
        return iter(sorted(self.elements))

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x):
        return self.ambient.reduce(x) in self.elements

    def __add__(self, other: "FiniteSubset") -> "FiniteSubset":
        G = self.ambient
        return FiniteSubset(G, frozenset(G.add(a, b) for a in self.elements for b in other.elements))

    def __neg__(self) -> "FiniteSubset":
        return FiniteSubset(self.ambient, frozenset(self.ambient.neg(a) for a in self.elements))

    def __or__(self, other: "FiniteSubset") -> "FiniteSubset":
        return FiniteSubset(self.ambient, self.elements | other.elements)

    def translate(self, x) -> "FiniteSubset":
        G = self.ambient
        return FiniteSubset(G, frozenset(G.add(x, a) for a in self.elements))

    def issubset(self, other: "FiniteSubset") -> bool:
        return self.elements <= other.elements

    def __str__(self):
        return "{" + ", ".join(str(e) for e in self) + "}"


@dataclass(frozen=True, eq=False)
class GroupIdeal:
    """Group ideal on ``ambient``.

    ``subgroup`` is the parameter of ``LINEAR``; ``base`` is a finite list of
    finite sets whose subsets make up a ``CUSTOM`` family (used to exercise
    the axiom auditor; such a family need not be an ideal).
    """

    ambient: object
    kind: IdealKind
    subgroup: Subgroup | None = None
    base: tuple = ()

    @classmethod
    def discrete(cls, G) -> "GroupIdeal":
        return cls(G, IdealKind.DISCRETE)

    @classmethod
    def bounded(cls, G) -> "GroupIdeal":
        return cls(G, IdealKind.BOUNDED)

    @classmethod
    def finitary(cls, G, kappa=OMEGA) -> "GroupIdeal":
        if kappa is not OMEGA:
            raise DomainError(
                f"kappa={kappa!r} rejected: on a countable group every kappa > omega "
                "gives the bounded structure; use GroupIdeal.bounded explicitly"
            )
        return cls(G, IdealKind.FINITARY)

    @classmethod
    def linear(cls, H: Subgroup) -> "GroupIdeal":
        return cls(H.ambient, IdealKind.LINEAR, subgroup=H)

    @classmethod
    def finite_rank(cls, G, kappa=OMEGA) -> "GroupIdeal":
        if not _is_big(G):
            raise DomainError("finite-rank ideal needs a countable-rank ambient (BigSumGroup)")
        if kappa is not OMEGA:
            raise DomainError(f"kappa={kappa!r} rejected: only OMEGA is supported")
        return cls(G, IdealKind.FINITE_RANK)

    @classmethod
    def custom(cls, G, base_sets: Iterable[Iterable]) -> "GroupIdeal":
        return cls(G, IdealKind.CUSTOM, base=tuple(FiniteSubset.of(G, s) for s in base_sets))

    # -- semantics ----------------------------------------------------------
    def linear_subgroup(self) -> Subgroup | None:
        """The subgroup ``A`` with ``I = {K : K <= A}``, when the ideal has that shape."""
        G = self.ambient
        if _is_big(G):
            return None
        if self.kind is IdealKind.LINEAR:
            return self.subgroup
        if self.kind is IdealKind.DISCRETE:
            return Subgroup.trivial(G)
        if self.kind is IdealKind.BOUNDED:
            return Subgroup.whole(G)
        if self.kind is IdealKind.FINITARY and G.is_finite:
            return Subgroup.whole(G)
        return None

    def _key(self):
        A = self.linear_subgroup()
        if A is not None:
            return (self.ambient, "linear", A)
        if self.kind is IdealKind.CUSTOM:
            return (self.ambient, "custom", frozenset(b.elements for b in self.base))
        return (self.ambient, self.kind)

    def __eq__(self, other):
        if not isinstance(other, GroupIdeal):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    @property
    def is_custom(self) -> bool:
        return self.kind is IdealKind.CUSTOM

    def contains(self, K) -> bool:
        return ideal_contains(self, K)

    def is_connected(self) -> bool:
        """``G`` is the union of the members."""
        G = self.ambient
        if self.kind in (IdealKind.BOUNDED, IdealKind.FINITARY, IdealKind.FINITE_RANK):
            return True
        if self.kind is IdealKind.CUSTOM:
            if not G.is_finite:
                return False
            covered = set().union(*(b.elements for b in self.base)) if self.base else set()
            return covered == set(G.elements())
        return self.linear_subgroup() == Subgroup.whole(G)

    def __str__(self):
        if self.kind is IdealKind.LINEAR:
            return f"linear({_subgroup_literal(self.subgroup)})"
        if self.kind is IdealKind.CUSTOM:
            return "custom[" + ", ".join(str(b) for b in self.base) + "]"
        return self.kind.value


@dataclass(frozen=True)
class CoarseGroup:
    group: object
    ideal: GroupIdeal

    def __post_init__(self):
        if self.ideal.ambient != self.group:
            raise DomainError("ideal lives on a different group")

    @property
    def connected(self) -> bool:
        return self.ideal.is_connected()


# ---------------------------------------------------------------------------
# Membership


def _check_ambient(I: GroupIdeal, G):
    if I.ambient != G:
        raise DomainError(f"ambient mismatch: ideal on {I.ambient}, set in {G}")


def ideal_contains(I: GroupIdeal, K) -> bool:
    """Decide ``K in I`` for a finite set or a subgroup ``K``."""
    _check_ambient(I, K.ambient)
    if I.kind is IdealKind.BOUNDED:
        return True
    if I.kind is IdealKind.FINITE_RANK:
        return True if isinstance(K, FiniteSubset) else K.has_finite_rank()
    if I.kind is IdealKind.FINITARY:
        return True if isinstance(K, FiniteSubset) else K.is_finite
    if I.kind is IdealKind.CUSTOM:
        if isinstance(K, FiniteSubset):
            elems = K.elements
        elif K.is_finite:
            elems = frozenset(K.elements())
        else:
            return False
        return any(elems <= b.elements for b in I.base)
    A = I.linear_subgroup()
    if isinstance(K, FiniteSubset):
        return all(A.contains(x) for x in K.elements)
    return K.issubset(A)


# ---------------------------------------------------------------------------
# Axiom audit


_AXIOMS = ("sum", "negation", "union", "subset")


@dataclass(frozen=True)
class AuditReport:
    """``counterexample`` is the first violation in axiom order (sum first)."""

    passed: bool
    checked: int
    counterexample: dict | None = None
    failed_axioms: tuple = ()

    def as_dict(self):
        return {
            "passed": self.passed,
            "checked": self.checked,
            "failed_axioms": list(self.failed_axioms),
            "counterexample": self.counterexample,
        }


def _random_element(G, rng: random.Random, spread: int = 20):
    if _is_big(G):
        return G.random_element(rng, spread)
    return G.reduce([rng.randint(-spread, spread) for _ in range(G.dim)])


def _sample_member(I: GroupIdeal, rng: random.Random) -> FiniteSubset:
    G = I.ambient
    size = rng.randint(0, 5)
    if I.kind is IdealKind.CUSTOM:
        if not I.base:
            return FiniteSubset(G, frozenset([G.zero()]))
        b = sorted(rng.choice(I.base).elements)
        return FiniteSubset(G, frozenset(x for x in b if rng.random() < 0.6))
    A = I.linear_subgroup()
    if A is not None and I.kind is not IdealKind.BOUNDED:
        gens = [g for g in A.generators if any(g)] or [G.zero()]
        elems = []
        for _ in range(size):
            v = G.zero()
            for g in gens:
                v = G.add(v, G.scale(rng.randint(-6, 6), g))
            elems.append(v)
        return FiniteSubset.of(G, elems)
    return FiniteSubset.of(G, [_random_element(G, rng) for _ in range(size)])


def audit_ideal_axioms(I: GroupIdeal, samples: int = 1000, seed: int = 0) -> AuditReport:
    """Sample members ``K, J`` and check the ideal axioms on them."""
    rng = random.Random(seed)
    G = I.ambient
    zero = FiniteSubset(G, frozenset([G.zero()]))
    if not ideal_contains(I, zero):
        return AuditReport(False, 1, {"axiom": "contains {0}", "K": str(zero)}, ("contains {0}",))
    checked = 1
    found: dict[str, dict] = {}
    for _ in range(samples):
        K = _sample_member(I, rng)
        J = _sample_member(I, rng)
        sub = FiniteSubset(G, frozenset(x for x in K.elements if rng.random() < 0.5))
        results = {"sum": K + J, "negation": -K, "union": K | J, "subset": sub}
        for name in _AXIOMS:
            checked += 1
            S = results[name]
            if name not in found and not ideal_contains(I, S):
                found[name] = {"axiom": name, "K": str(K), "J": str(J), "result": str(S)}
    A = I.linear_subgroup()
    if A is not None:
        checked += 1
        if not (ideal_contains(I, A) and ideal_contains(I, A + A)):
            found["subgroup closure"] = {"axiom": "subgroup closure", "K": repr(A)}
    if not found:
        return AuditReport(True, checked)
    order = [a for a in _AXIOMS + ("subgroup closure",) if a in found]
    return AuditReport(False, checked, found[order[0]], tuple(order))


# ---------------------------------------------------------------------------
# Closeness and entourages


@dataclass(frozen=True)
class Closeness:
    close: bool
    difference_image: Subgroup

    @property
    def verdict(self) -> str:
        return "CLOSE" if self.close else "NOT_CLOSE"

    def __bool__(self):
        return self.close


def are_close(f: Hom, g: Hom, I: GroupIdeal) -> Closeness:
    """``f`` and ``g`` are close iff ``(g - f)(G)`` belongs to ``I``."""
    if (f.source, f.target) != (g.source, g.target):
        raise DomainError("maps are not parallel")
    _check_ambient(I, f.target)
    D = image_subgroup(g - f)
    return Closeness(ideal_contains(I, D), D)


def entourage_ball(K, x) -> FiniteSubset:
    """``E_K[x] = x + K``; only finite ``K`` can be materialised."""
    if isinstance(K, Subgroup):
        if not K.is_finite:
            raise DomainError("entourage ball of an infinite set cannot be listed")
        K = FiniteSubset.of(K.ambient, K.elements())
    if not isinstance(K, FiniteSubset):
        raise DomainError("K must be a FiniteSubset or a finite Subgroup")
    return K.translate(K.ambient.reduce(x))


def product_ideal(*ideals: GroupIdeal):
    """Ideal on the direct sum generated by products ``K1 x ... x Km``.

    Returns ``(ideal, DirectSum)``.
    """
    groups = [I.ambient for I in ideals]
    if any(_is_big(G) for G in groups):
        raise UnsupportedError("product ideals are only built on finitely generated groups")
    ds = direct_sum(*groups)
    if all(I.kind is IdealKind.FINITARY for I in ideals):
        return GroupIdeal.finitary(ds.group), ds
    subs = [I.linear_subgroup() for I in ideals]
    if any(A is None for A in subs):
        raise UnsupportedError(
            "product of " + " x ".join(str(I) for I in ideals) + " has no supported description"
        )
    gens = []
    for A, inj in zip(subs, ds.injections):
        gens.extend(inj(g) for g in A.generators)
    return GroupIdeal.linear(Subgroup(ds.group, gens)), ds


# ---------------------------------------------------------------------------
# Literals


def _subgroup_literal(S: Subgroup) -> str:
    gens = [g for g in S.generators if any(g)]
    return "<" + ", ".join("(" + ",".join(map(str, g)) + ")" for g in gens) + ">"


def _parse_vector(text: str, G) -> tuple:
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1]
    try:
        v = tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise LiteralError(f"bad vector {text!r}") from None
    if len(v) != G.dim:
        raise LiteralError(f"vector {v} has length {len(v)}, group {G} needs {G.dim}")
    return v


def _split_top(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([{<":
            depth += 1
        elif ch in ")]}>":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if "".join(cur).strip():
        parts.append("".join(cur))
    return parts


def parse_subgroup(text: str, G: FgAbGroup) -> Subgroup:
    """Subgroup literal.

    Accepted forms: ``<(1,0),(0,2)>`` (generators), ``<2>`` on rank-one
    groups, ``0``, ``G``, ``Tor``, and ``mG`` for an integer ``m``.
    """
    text = text.strip()
    if text in ("0", "trivial"):
        return Subgroup.trivial(G)
    if text == "G":
        return Subgroup.whole(G)
    if text == "Tor":
        return Subgroup.torsion_subgroup(G)
    m = re.fullmatch(r"(-?\d+)\s*G", text)
    if m:
        return Subgroup.multiple(G, int(m.group(1)))
    if text.startswith("<") and text.endswith(">"):
        body = text[1:-1].strip()
        gens = [_parse_vector(p, G) for p in _split_top(body)] if body else []
        return Subgroup(G, gens)
    raise LiteralError(f"bad subgroup literal {text!r}")


def parse_ideal(text: str, G) -> GroupIdeal:
    """Ideal literal: ``finitary``, ``bounded``, ``discrete``,
    ``linear(<subgroup>)`` or ``finite-rank``."""
    t = text.strip()
    if t == "finitary":
        return GroupIdeal.finitary(G)
    if t == "bounded":
        return GroupIdeal.bounded(G)
    if t == "discrete":
        return GroupIdeal.discrete(G)
    if t == "finite-rank":
        return GroupIdeal.finite_rank(G)
    m = re.fullmatch(r"linear\((.*)\)", t, re.S)
    if m:
        if _is_big(G):
            raise UnsupportedError("linear ideals are not supported on countable-rank groups")
        return GroupIdeal.linear(parse_subgroup(m.group(1), G))
    raise LiteralError(f"bad ideal literal {text!r}")
