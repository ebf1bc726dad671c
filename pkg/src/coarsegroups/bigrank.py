"""The countable-rank free group ``Z^(N)`` with head-plus-tail endomorphisms.

An endomorphism is a finite integer matrix ``head`` acting on coordinates
``0..m-1`` plus a tail rule ``e_i -> c e_{i+k}`` for ``i >= m`` (dropped when
``i + k < 0``). The four named rules are ``identity`` (c=1, k=0),
``shift(k)`` (c=1), ``zero`` (c=0) and ``scale(c)`` (k=0); the general
``(c, k)`` form keeps composition closed.

The coarse structure is ``I_{r0, omega}``: subsets of subgroups of finite
free rank.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass

from . import faults
from .cardinals import ALEPH0, OMEGA, to_json
from .coarse import GroupIdeal
from .errors import DomainError, LiteralError, TheoremViolation
from .intlat import IntMatrix, rational_rank

__all__ = [
    "BigSumGroup",
    "BIG",
    "BigSubgroup",
    "StructuredEndo",
    "rank_of_image",
    "kernel_rank",
    "analyze_structured",
    "classif1_check",
    "consistency_classif2_big",
    "functoriality_audit",
    "random_endo",
    "parse_endo",
]


class BigSumGroup:
    """``Z^(N)``; elements are sorted tuples of ``(index, value)`` with value != 0."""

    countable_rank = True
    is_finite = False
    free_rank = ALEPH0
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __eq__(self, other):
        return isinstance(other, BigSumGroup)

    def __hash__(self):
        return hash("BigSumGroup")

    def __str__(self):
        return "Z^(N)"

    __repr__ = __str__

    def reduce(self, v) -> tuple:
        items = v.items() if isinstance(v, dict) else v
        acc: dict[int, int] = {}
        for i, a in items:
            if i < 0:
                raise DomainError(f"negative coordinate {i}")
            acc[int(i)] = acc.get(int(i), 0) + int(a)
        return tuple(sorted((i, a) for i, a in acc.items() if a))

    def zero(self) -> tuple:
        return ()

    def add(self, x, y) -> tuple:
        return self.reduce(list(x) + list(y))

    def neg(self, x) -> tuple:
        return tuple((i, -a) for i, a in x)

    def basis_vector(self, i: int) -> tuple:
        return ((i, 1),)

    def random_element(self, rng: random.Random, spread: int = 20, support: int = 12) -> tuple:
        return self.reduce(
            {rng.randrange(support): rng.randint(-spread, spread) for _ in range(rng.randint(0, 3))}
        )


BIG = BigSumGroup()


def _support_bound(vectors) -> int:
    return max((i + 1 for v in vectors for i, _ in v), default=0)


def _rank_of(vectors) -> int:
    vectors = [v for v in vectors if v]
    if not vectors:
        return 0
    s = _support_bound(vectors)
    rows = []
    for v in vectors:
        r = [0] * s
        for i, a in v:
            r[i] = a
        rows.append(r)
    return rational_rank(rows)


class BigSubgroup:
    """Subgroup of ``Z^(N)``: finitely generated, or described only by its rank."""

    def __init__(self, generators=(), rank=None, description: str = ""):
        self.ambient = BIG
        self.generators = tuple(BIG.reduce(g) for g in generators)
        self.rank = _rank_of(self.generators) if rank is None else rank
        self.description = description

    def has_finite_rank(self) -> bool:
        return self.rank != ALEPH0

    @property
    def is_finite(self) -> bool:
        return not self.generators or self.rank == 0

    def __repr__(self):
        return self.description or f"<{', '.join(map(str, self.generators))}>"


@dataclass(frozen=True)
class StructuredEndo:
    head: IntMatrix
    c: int = 1
    k: int = 0

    def __post_init__(self):
        if not isinstance(self.head, IntMatrix):
            rows = list(self.head)
            object.__setattr__(self, "head", IntMatrix(rows, len(rows[0]) if rows else 0))

    # -- named rules ----------------------------------------------------
    @classmethod
    def shift(cls, k: int = 1, head=None) -> "StructuredEndo":
        return cls(head if head is not None else IntMatrix.zeros(0, 0), 1, k)

    @classmethod
    def identity(cls) -> "StructuredEndo":
        return cls(IntMatrix.zeros(0, 0), 1, 0)

    @classmethod
    def zero(cls, head=None) -> "StructuredEndo":
        return cls(head if head is not None else IntMatrix.zeros(0, 0), 0, 0)

    @classmethod
    def scale(cls, c: int, head=None) -> "StructuredEndo":
        return cls(head if head is not None else IntMatrix.zeros(0, 0), c, 0)

    @property
    def m(self) -> int:
        return self.head.ncols

    @property
    def m_out(self) -> int:
        return self.head.nrows

    @property
    def tail_rule(self) -> str:
        if self.c == 0:
            return "zero"
        if self.c == 1 and self.k == 0:
            return "identity"
        if self.c == 1:
            return f"shift({self.k})"
        if self.k == 0:
            return f"scale({self.c})"
        return f"scaled-shift({self.c},{self.k})"

    def image_of_basis(self, i: int) -> tuple:
        if i < self.m:
            return BIG.reduce((r, self.head[r, i]) for r in range(self.m_out))
        j = i + self.k
        if j < 0 or self.c == 0:
            return ()
        return ((j, self.c),)

    def __call__(self, v) -> tuple:
        v = BIG.reduce(v)
        out: dict[int, int] = {}
        for i, a in v:
            for j, b in self.image_of_basis(i):
                out[j] = out.get(j, 0) + a * b
        return BIG.reduce(out)

    def __matmul__(self, other: "StructuredEndo") -> "StructuredEndo":
        """``self o other``."""
        g, f = self, other
        M = max(f.m, g.m - f.k, -f.k, -(f.k + g.k), 0)
        cols = [g(f.image_of_basis(j)) for j in range(M)]
        rows = _support_bound(cols)
        head = [[0] * M for _ in range(rows)]
        for j, v in enumerate(cols):
            for i, a in v:
                head[i][j] = a
        return StructuredEndo(IntMatrix(head, M), g.c * f.c, f.k + g.k)

    def __str__(self):
        return f"endo{{head: {self.head.tolist()}, tail: {self.tail_rule}}}"


def rank_of_image(f: StructuredEndo):
    if f.c != 0:
        return ALEPH0
    return rational_rank(f.head.tolist()) if f.m and f.m_out else 0


def _finite_threshold(f: StructuredEndo) -> int:
    """Tail inputs from here on land in coordinates nothing else reaches."""
    return max(f.m, f.m_out - f.k, -f.k, 0)


def kernel_rank(f: StructuredEndo):
    if f.c == 0:
        return ALEPH0
    T = _finite_threshold(f)
    cols = [f.image_of_basis(j) for j in range(T)]
    r = T - _rank_of(cols)
    if faults.active("bigrank.kernel"):
        r = ALEPH0
    return r


@dataclass(frozen=True)
class BigReport:
    flags: dict
    witnesses: dict
    reasons: dict

    def as_dict(self):
        return {
            "flags": self.flags,
            "witnesses": self.witnesses,
            "ideal_pair": ["finite-rank", "finite-rank"],
            "reasons": self.reasons,
        }


def _escape_certificate(f: StructuredEndo) -> dict:
    """For ``|c| >= 2``: every coordinate ``i >= i0`` of ``f(G)`` is divisible by
    ``c``, so ``e_i`` is outside ``f(G) + K`` once ``i`` is past ``K``'s support."""
    i0 = max(f.m_out, f.m + f.k, 0)
    for i in range(i0, i0 + 8):
        touching = [j for j in range(f.m)] + [i - f.k]
        for j in touching:
            if j < 0:
                continue
            coeff = dict(f.image_of_basis(j)).get(i, 0)
            if coeff % f.c:
                raise TheoremViolation(f"escape certificate fails at coordinate {i}")
    return {
        "modulus": abs(f.c),
        "from_coordinate": i0,
        "statement": f"for K supported below s, e_i is not in f(G) + K for every i >= max(s, {i0})",
    }


def analyze_structured(f: StructuredEndo) -> BigReport:
    """Large-scale properties of ``f`` for ``I_{r0, omega}`` on both sides."""
    kr = kernel_rank(f)
    ir = rank_of_image(f)
    witnesses = {"kernel_rank": to_json(kr), "image_rank": to_json(ir), "tail": f.tail_rule}
    reasons = {
        "bornologous": "images of finitely generated subgroups are finitely generated",
        "uniformly_bounded_copreserving": "K & f(G) is finitely generated for finite-rank K; lift its generators",
    }
    lsi = kr != ALEPH0
    reasons["large_scale_injective"] = "kernel has finite rank" if lsi else "kernel has infinite rank"
    eff = f.c != 0
    reasons["effectively_proper"] = "tail injective" if eff else "tail kills infinitely many coordinates"
    if abs(f.c) == 1:
        J = max(f.m + f.k, 0)
        lss = True
        witnesses["complement"] = [f"e_{i}" for i in range(J)]
        reasons["large_scale_surjective"] = f"f(G) + <e_0..e_{J - 1}> = G" if J else "f(G) = G"
    elif f.c == 0:
        lss = False
        reasons["large_scale_surjective"] = "image has finite rank"
    else:
        lss = False
        witnesses["escape"] = _escape_certificate(f)
        reasons["large_scale_surjective"] = "cokernel has unbounded torsion support"
    born, ubc = True, True
    ce = born and eff and lss
    if ce != (lsi and lss and born and ubc) or (eff != lsi):
        raise TheoremViolation(f"{f}: kernel route (lsi={lsi}) and tail route (eff={eff}) disagree")
    flags = {
        "bornologous": born,
        "large_scale_injective": lsi,
        "effectively_proper": eff,
        "uniformly_bounded_copreserving": ubc,
        "large_scale_surjective": lss,
        "coarse_equivalence": ce,
        "coarse_embedding": born and eff,
    }
    return BigReport(flags, witnesses, reasons)


def classif1_check(G) -> bool:
    """``G -> 0`` is a coarse equivalence iff ``r0(G) < omega``."""
    if isinstance(G, BigSumGroup):
        rep = analyze_structured(StructuredEndo.zero())  # same kernel as G -> 0
        verdict = rep.flags["coarse_equivalence"]
        predicted = False
    else:
        from .fgab import FgAbGroup, Hom
        from .morph import analyze_hom, invariant_ideal

        T = FgAbGroup.trivial()
        f = Hom.zero(G, T)
        verdict = analyze_hom(f, invariant_ideal(G, "r0"), invariant_ideal(T, "r0")).flags[
            "coarse_equivalence"
        ]
        predicted = G.free_rank < OMEGA
    if verdict != predicted:
        raise TheoremViolation(f"trivial map on {G}: analysis {verdict}, rank criterion {predicted}")
    return verdict


def consistency_classif2_big(f: StructuredEndo, selector: str = "r0", kappa=OMEGA):
    from .morph import Classif2Result

    if selector != "r0" or kappa is not OMEGA:
        raise DomainError("only r0 with kappa = OMEGA is modelled on Z^(N)")
    if not analyze_structured(f).flags["coarse_equivalence"]:
        return Classif2Result(False, None)
    a = b = ALEPH0  # source and target are both Z^(N)
    holds = (a < kappa and b < kappa) or a == b
    if not holds:
        raise TheoremViolation("dichotomy fails")
    return Classif2Result(True, holds, (a, b))


def random_endo(rng: random.Random, max_head: int = 6, bound: int = 5) -> StructuredEndo:
    m, m_out = rng.randint(0, max_head), rng.randint(0, max_head)
    head = IntMatrix([[rng.randint(-bound, bound) for _ in range(m)] for _ in range(m_out)], m)
    rule = rng.choice(["identity", "shift", "zero", "scale"])
    if rule == "identity":
        return StructuredEndo(head, 1, 0)
    if rule == "shift":
        return StructuredEndo(head, 1, rng.randint(-3, 3))
    if rule == "zero":
        return StructuredEndo(head, 0, 0)
    return StructuredEndo(head, rng.choice([-3, -2, -1, 2, 3]), 0)


def functoriality_audit(samples: int = 500, seed: int = 0) -> dict:
    """Every hom is bornologous for ``I_{r0, omega}``: ``r0(f(K)) < omega`` (and
    at most ``r0(K)``) for finitely generated ``K``."""
    rng = random.Random(seed)
    violations = []
    for i in range(samples):
        f = random_endo(rng)
        K = BigSubgroup([BIG.random_element(rng, 5) for _ in range(rng.randint(1, 4))])
        fK = BigSubgroup([f(g) for g in K.generators])
        if not fK.has_finite_rank() or fK.rank > K.rank:
            violations.append({"sample": i, "f": str(f), "K": repr(K), "rank_fK": to_json(fK.rank)})
    return {"checked": samples, "violations": violations, "passed": not violations}


def rank_ideal() -> GroupIdeal:
    return GroupIdeal.finite_rank(BIG)


def parse_endo(text: str) -> StructuredEndo:
    """``endo{head: [[..]], tail: identity|shift(k)|zero|scale(c)}``."""
    m = re.fullmatch(r"\s*endo\s*\{\s*head\s*:\s*(\[.*\])\s*,\s*tail\s*:\s*([^}]*)\}\s*", text, re.S)
    if not m:
        raise LiteralError(f"bad endo literal {text!r}")
    try:
        rows = json.loads(m.group(1))
    except json.JSONDecodeError:
        raise LiteralError(f"bad head matrix in {text!r}") from None
    if rows and (not all(isinstance(r, list) for r in rows) or len({len(r) for r in rows}) != 1):
        raise LiteralError("head must be a rectangular matrix")
    head = IntMatrix(rows, len(rows[0]) if rows else 0)
    tail = m.group(2).strip()
    if tail == "identity":
        return StructuredEndo(head, 1, 0)
    if tail == "zero":
        return StructuredEndo(head, 0, 0)
    t = re.fullmatch(r"shift\((-?\d+)\)", tail)
    if t:
        return StructuredEndo(head, 1, int(t.group(1)))
    t = re.fullmatch(r"scale\((-?\d+)\)", tail)
    if t:
        return StructuredEndo(head, int(t.group(1)), 0)
    raise LiteralError(f"bad tail rule {tail!r}")
