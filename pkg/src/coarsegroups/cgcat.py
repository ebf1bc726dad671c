"""Morphism classes up to closeness, spans with coarse-equivalence left legs,
and the rational model of the localisation.

All coarse structures here are finitary. A hom class is sent to ``Q (x) f``
(its free-to-free block over the rationals); a span ``X <-w- P -f-> Y`` to
``(Q (x) f)(Q (x) w)^-1``. Matrices are ``target x source`` throughout.
"""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass
from fractions import Fraction

from . import faults
from .coarse import GroupIdeal, are_close
from .errors import DomainError, LiteralError, TheoremViolation
from .fgab import FgAbGroup, Hom, pullback
from .intlat import IntMatrix, rational_inverse, rational_matmul
from .morph import analyze_hom

__all__ = [
    "RationalMap",
    "HomClass",
    "Span",
    "is_ce",
    "rationalize",
    "compose_spans",
    "identity_span",
    "hom_span",
    "SpanEquivalence",
    "spans_equivalent",
    "ore_square",
    "check_homotopical_axioms",
    "parse_span",
]


def is_ce(f: Hom) -> bool:
    """``f`` is a coarse equivalence for the finitary structures."""
    rep = analyze_hom(f, GroupIdeal.finitary(f.source), GroupIdeal.finitary(f.target))
    return rep.flags["coarse_equivalence"]


@dataclass(frozen=True)
class RationalMap:
    """Exact rational matrix ``Q^ncols -> Q^nrows``."""

    rows: tuple
    nrows: int
    ncols: int

    @classmethod
    def of(cls, rows, nrows: int, ncols: int) -> "RationalMap":
        return cls(tuple(tuple(Fraction(a) for a in r) for r in rows), nrows, ncols)

    @classmethod
    def identity(cls, k: int) -> "RationalMap":
        return cls.of([[int(i == j) for j in range(k)] for i in range(k)], k, k)

    def __matmul__(self, other: "RationalMap") -> "RationalMap":
        if self.ncols != other.nrows:
            raise DomainError("rational maps are not composable")
        prod = [
            [sum((self.rows[i][t] * other.rows[t][j] for t in range(self.ncols)), Fraction(0))
             for j in range(other.ncols)]
            for i in range(self.nrows)
        ]
        return RationalMap(tuple(map(tuple, prod)), self.nrows, other.ncols)

    @property
    def is_invertible(self) -> bool:
        return self.nrows == self.ncols and (self.nrows == 0 or rational_inverse(self.rows) is not None)

    def inverse(self) -> "RationalMap":
        if self.nrows != self.ncols:
            raise DomainError("non-square rational map")
        if self.nrows == 0:
            return self
        inv = rational_inverse(self.rows)
        if inv is None:
            raise DomainError("rational map is singular")
        return RationalMap.of(inv, self.nrows, self.ncols)

    def tolist(self) -> list[list[str]]:
        return [[str(a) for a in r] for r in self.rows]

    def __str__(self):
        return str(self.tolist())


@dataclass(frozen=True, eq=False)
class HomClass:
    """A hom up to closeness (finitary structures)."""

    rep: Hom

    @property
    def source(self):
        return self.rep.source

    @property
    def target(self):
        return self.rep.target

    def __eq__(self, other):
        if not isinstance(other, HomClass):
            return NotImplemented
        if (self.source, self.target) != (other.source, other.target):
            return False
        return are_close(self.rep, other.rep, GroupIdeal.finitary(self.target)).close

    def __hash__(self):
        return hash((self.source, self.target, rationalize(self).rows))

    def __matmul__(self, other: "HomClass") -> "HomClass":
        return HomClass(self.rep @ other.rep)


def _q(f: Hom) -> RationalMap:
    return RationalMap.of(f.free_block(), f.target.free_rank, f.source.free_rank)


class Span:
    """``X <-left- P -right-> Y`` with ``left`` a coarse equivalence.

    With ``normalize`` the apex is cut down to its free part ``Z^r0`` (the
    inclusion of the free part is a coarse equivalence, so the class is kept).
    """

    __slots__ = ("left", "right")

    def __init__(self, left: Hom, right: Hom, normalize: bool = True):
        if left.source != right.source:
            raise DomainError("span legs must share the apex")
        if not is_ce(left):
            raise DomainError(f"left leg {left} is not a coarse equivalence")
        if normalize and left.source.torsion:
            P = left.source
            F = FgAbGroup.free(P.free_rank)
            incl = Hom.from_images(F, P, [e + (0,) * len(P.torsion) for e in F.basis()])
            left, right = left @ incl, right @ incl
        self.left, self.right = left, right

    @property
    def apex(self) -> FgAbGroup:
        return self.left.source

    @property
    def source(self) -> FgAbGroup:
        return self.left.target

    @property
    def target(self) -> FgAbGroup:
        return self.right.target

    def __repr__(self):
        return f"Span({self.source} <- {self.apex} -> {self.target}; left={self.left.matrix.tolist()}, right={self.right.matrix.tolist()})"

    def as_dict(self):
        return {
            "apex": str(self.apex),
            "source": str(self.source),
            "target": str(self.target),
            "left": self.left.matrix.tolist(),
            "right": self.right.matrix.tolist(),
        }


def identity_span(X: FgAbGroup) -> Span:
    return Span(Hom.identity(X), Hom.identity(X))


def hom_span(f: Hom) -> Span:
    """The image of a hom in the localisation: ``X <-id- X -f-> Y``."""
    return Span(Hom.identity(f.source), f)


def rationalize(x) -> RationalMap:
    """``Q (x) f`` for a hom or class; ``(Q (x) right)(Q (x) left)^-1`` for a span."""
    if isinstance(x, HomClass):
        x = x.rep
    if isinstance(x, Hom):
        return _q(x)
    if isinstance(x, Span):
        L = _q(x.left)
        if not L.is_invertible:
            raise DomainError("left leg is not invertible over Q")
        out = _q(x.right) @ L.inverse()
        if faults.active("cgcat.rational") and out.nrows and out.ncols:
            rows = [list(r) for r in out.rows]
            rows[0][0] += 1
            out = RationalMap.of(rows, out.nrows, out.ncols)
        return out
    raise DomainError(f"cannot rationalize {type(x).__name__}")


def compose_spans(s1: Span, s2: Span) -> Span:
    """``s2 o s1`` for ``s1: X <- P1 -> Y`` and ``s2: Y <- P2 -> Z``, through the
    pullback of ``s2.left`` and ``s1.right``."""
    if s1.target != s2.source:
        raise DomainError(f"middle objects differ: {s1.target} vs {s2.source}")
    pb = pullback(s2.left, s1.right)  # u: T -> P1, v: T -> P2
    left = s1.left @ pb.u
    if not is_ce(left):
        raise TheoremViolation("pulled-back left leg is not a coarse equivalence")
    return Span(left, s2.right @ pb.v)


# ---------------------------------------------------------------------------
# Span equivalence


@dataclass(frozen=True)
class SpanEquivalence:
    equivalent: bool
    rational: tuple
    witness: dict | None
    searched: int

    @property
    def verdict(self) -> str:
        return "EQUIVALENT" if self.equivalent else "NOT_EQUIVALENT"

    def as_dict(self):
        return {
            "verdict": self.verdict,
            "rational_channel": {"left": self.rational[0].tolist(), "right": self.rational[1].tolist()},
            "witness_channel": self.witness if self.witness else {"found": False, "searched": self.searched},
        }


def _witness_ok(s1: Span, s2: Span, s: Hom, t: Hom) -> bool:
    X, Y = s1.source, s1.target
    return (
        is_ce(s1.left @ s)
        and are_close(s1.left @ s, s2.left @ t, GroupIdeal.finitary(X)).close
        and are_close(s1.right @ s, s2.right @ t, GroupIdeal.finitary(Y)).close
    )


def _t_solver(s1: Span, s2: Span, k: int):
    """Integer ``t: Z^k -> P2`` with ``Q(left2) t = Q(left1) s`` (torsion rows 0),
    as a function of the free block ``S`` of ``s``."""
    P2 = s2.apex
    L2 = _q(s2.left)
    if not L2.is_invertible:
        return lambda S: None
    M = rational_matmul(L2.inverse().rows, _q(s1.left).rows, inner=L2.ncols)

    def solve(S):
        T = rational_matmul(M, S, inner=k) if S else []
        if any(a.denominator != 1 for r in T for a in r):
            return None
        rows = [[int(a) for a in r] for r in T] + [[0] * k for _ in P2.torsion]
        return Hom.from_rows(FgAbGroup.free(k), P2, rows)

    return solve


def spans_equivalent(s1: Span, s2: Span, search_bound: int = 8, max_candidates: int = 20000) -> SpanEquivalence:
    """Decide by the rational model; cross-check with a bounded search for a
    definitional witness ``Z -s-> P1, Z -t-> P2``."""
    if (s1.source, s1.target) != (s2.source, s2.target):
        raise DomainError("spans have different endpoints")
    r1, r2 = rationalize(s1), rationalize(s2)
    equal = r1 == r2
    witness = None
    searched = 0

    pb = pullback(s2.left, s1.left)  # u: T -> P1, v: T -> P2, left1 u = left2 v
    searched += 1
    if _witness_ok(s1, s2, pb.u, pb.v):
        witness = {"found": True, "route": "pullback", "apex": str(pb.apex),
                   "s": pb.u.matrix.tolist(), "t": pb.v.matrix.tolist()}
    else:
        P1 = s1.apex
        k = P1.free_rank
        B = search_bound
        solve_t = _t_solver(s1, s2, k)
        for norm in range(1, B + 1):
            if witness or searched >= max_candidates:
                break
            for entries in itertools.product(range(-norm, norm + 1), repeat=k * k):
                if max(map(abs, entries), default=0) != norm:
                    continue
                searched += 1
                if searched >= max_candidates:
                    break
                S = [list(entries[i * k : (i + 1) * k]) for i in range(k)]
                if IntMatrix(S, k).det() == 0:
                    continue  # s1.left @ s cannot be a coarse equivalence
                t = solve_t(S)
                if t is None:
                    continue
                s = Hom.from_rows(FgAbGroup.free(k), P1, S + [[0] * k for _ in P1.torsion])
                if _witness_ok(s1, s2, s, t):
                    witness = {"found": True, "route": "enumeration", "apex": str(s.source),
                               "s": s.matrix.tolist(), "t": t.matrix.tolist()}
                    break
    if witness and not equal:
        raise TheoremViolation(
            f"definitional witness found but rational forms differ: {r1} vs {r2}"
        )
    return SpanEquivalence(equal, (r1, r2), witness, searched)


# ---------------------------------------------------------------------------
# Ore squares and homotopical axioms


@dataclass(frozen=True)
class OreSquare:
    w_prime: Hom  # T -> Y, coarse equivalence
    f_prime: Hom  # T -> X

    def as_dict(self):
        return {
            "apex": str(self.w_prime.source),
            "w_prime": self.w_prime.matrix.tolist(),
            "f_prime": self.f_prime.matrix.tolist(),
            "w_prime_ce": True,
        }


def ore_square(w: Hom, f: Hom) -> OreSquare:
    """Complete ``X -w-> Z <-f- Y`` (``w`` a coarse equivalence) to a square
    ``w f' = f w'`` with ``w'`` a coarse equivalence."""
    if w.target != f.target:
        raise DomainError("w and f need a common codomain")
    if not is_ce(w):
        raise DomainError(f"{w} is not a coarse equivalence")
    pb = pullback(f, w)  # u: T -> X, v: T -> Y, w u = f v
    f_prime, w_prime = pb.u, pb.v
    if (w @ f_prime).matrix != (f @ w_prime).matrix:
        raise TheoremViolation("Ore square does not commute")
    if not is_ce(w_prime):
        raise TheoremViolation("Ore leg w' is not a coarse equivalence")
    return OreSquare(w_prime, f_prime)


def check_homotopical_axioms(samples: int = 300, seed: int = 0) -> dict:
    """Right cancellability and 2-out-of-6 on random data."""
    from .randomgen import random_ce_hom, random_group, random_hom

    rng = random.Random(seed)
    out = {"cancellability": {"checked": 0, "premise_held": 0},
           "two_out_of_six": {"checked": 0, "premise_held": 0},
           "violations": []}
    for i in range(samples):
        G = random_group(rng, 2, 6)
        H = random_group(rng, 2, 6)
        K = FgAbGroup(H.free_rank, random_group(rng, 0, 6).torsion)
        f = random_hom(rng, G, H, 3)
        if rng.random() < 0.6:
            # perturb by a torsion-valued hom: close to f
            d = random_hom(rng, G, H, 3)
            n = H.free_rank
            d = Hom.from_rows(G, H, [[0] * G.dim if j < n else list(r) for j, r in enumerate(d.matrix.rows())])
            g = f + d
        else:
            g = random_hom(rng, G, H, 3)
        w = random_ce_hom(rng, H, K)
        out["cancellability"]["checked"] += 1
        if are_close(w @ f, w @ g, GroupIdeal.finitary(K)).close:
            out["cancellability"]["premise_held"] += 1
            if not are_close(f, g, GroupIdeal.finitary(H)).close:
                out["violations"].append({"axiom": "right cancellability", "sample": i,
                                          "f": str(f), "g": str(g), "w": str(w)})
    for i in range(samples):
        r = rng.randint(0, 2)
        A, B, C, D = (FgAbGroup(r, random_group(rng, 0, 6).torsion) for _ in range(4))
        maps = []
        for X, Y in ((A, B), (B, C), (C, D)):
            if rng.random() < 0.75:
                maps.append(random_ce_hom(rng, X, Y))
            else:
                maps.append(random_hom(rng, X, Y, 2))
        f, g, h = maps
        out["two_out_of_six"]["checked"] += 1
        if is_ce(g @ f) and is_ce(h @ g):
            out["two_out_of_six"]["premise_held"] += 1
            bad = [n for n, m in (("f", f), ("g", g), ("h", h), ("hgf", h @ g @ f)) if not is_ce(m)]
            if bad:
                out["violations"].append({"axiom": "2-out-of-6", "sample": i, "not_ce": bad})
    out["passed"] = not out["violations"]
    return out


# ---------------------------------------------------------------------------
# Literals


def _parse_fields(body: str) -> dict:
    from .coarse import _split_top

    fields = {}
    for part in _split_top(body):
        key, sep, val = part.partition(":")
        if not sep:
            raise LiteralError(f"bad span field {part!r}")
        fields[key.strip()] = val.strip()
    return fields


def _parse_matrix(text: str, nrows: int, ncols: int) -> IntMatrix:
    import json

    try:
        rows = json.loads(text)
    except json.JSONDecodeError:
        raise LiteralError(f"bad matrix {text!r}") from None
    if nrows == 0:
        return IntMatrix.zeros(0, ncols)
    if len(rows) != nrows or any(len(r) != ncols for r in rows):
        raise LiteralError(f"matrix {text} should be {nrows}x{ncols}")
    return IntMatrix(rows, ncols)


def parse_span(text: str, normalize: bool = True) -> Span:
    """``span{apex: Z, source: Z, target: Z, left: [[2]], right: [[1]]}``.

    ``source``/``target`` default to the apex.
    """
    m = re.fullmatch(r"\s*span\s*\{(.*)\}\s*", text, re.S)
    if not m:
        raise LiteralError(f"bad span literal {text!r}")
    fields = _parse_fields(m.group(1))
    for key in ("apex", "left", "right"):
        if key not in fields:
            raise LiteralError(f"span literal missing {key!r}")
    P = FgAbGroup.parse(fields["apex"])
    X = FgAbGroup.parse(fields.get("source", fields["apex"]))
    Y = FgAbGroup.parse(fields.get("target", fields["apex"]))
    left = Hom(P, X, _parse_matrix(fields["left"], X.dim, P.dim))
    right = Hom(P, Y, _parse_matrix(fields["right"], Y.dim, P.dim))
    return Span(left, right, normalize=normalize)
