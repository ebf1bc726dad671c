"""Asymptotic-dimension cover witnesses on ``Z^d``, cellularity of ideals, and
small/large eventually periodic subsets of ``Z``.

Covers are made of boxes. An explicit witness lists its boxes on a window
``[-W, W]^d``; a periodic witness lists prototype boxes and a period per axis
and is checked exactly on one fundamental domain, which covers every window at
once.
"""

from __future__ import annotations

import itertools
import json
import math
import re
from dataclasses import dataclass

import numpy as np

from .coarse import GroupIdeal, IdealKind
from .errors import DomainError, LiteralError

__all__ = [
    "Box",
    "Separation",
    "CoverWitness",
    "PeriodicCover",
    "CoverCheck",
    "check_cover",
    "check_periodic_cover",
    "make_asdim_witness",
    "make_periodic_witness",
    "merge_families",
    "is_cellular",
    "PeriodicSet",
    "is_large",
    "is_small",
    "smallness_certificate",
    "dlt_vs_small",
    "parse_periodic_set",
]


@dataclass(frozen=True)
class Box:
    lo: tuple
    hi: tuple  # inclusive

    def clip(self, W: int) -> "Box | None":
        lo = tuple(max(a, -W) for a in self.lo)
        hi = tuple(min(b, W) for b in self.hi)
        return None if any(a > b for a, b in zip(lo, hi)) else Box(lo, hi)

    def shift(self, v) -> "Box":
        return Box(tuple(a + t for a, t in zip(self.lo, v)), tuple(b + t for b, t in zip(self.hi, v)))

    @property
    def extent(self) -> tuple:
        """Largest coordinate difference inside the box, per axis."""
        return tuple(b - a for a, b in zip(self.lo, self.hi))

    def __str__(self):
        return "x".join(f"[{a},{b}]" for a, b in zip(self.lo, self.hi))


@dataclass(frozen=True)
class Separation:
    """The separating set ``S``: the box ``[-radius, radius]^d`` or explicit points."""

    radius: int | None = None
    points: tuple = ()

    @classmethod
    def box(cls, s: int) -> "Separation":
        return cls(radius=s)

    @classmethod
    def of(cls, pts) -> "Separation":
        pts = tuple(sorted({tuple(p) if not isinstance(p, int) else (p,) for p in pts}))
        neg = {tuple(-a for a in p) for p in pts}
        if neg != set(pts):
            raise DomainError("S must be symmetric")
        return cls(points=pts)

    @property
    def max_abs(self) -> int:
        if self.radius is not None:
            return self.radius
        return max((max(map(abs, p)) for p in self.points), default=0)

    def meets(self, lo, hi) -> bool:
        """``S`` meets the box ``[lo, hi]``."""
        if self.radius is not None:
            return all(a <= self.radius and b >= -self.radius for a, b in zip(lo, hi))
        return any(all(a <= x <= b for x, a, b in zip(p, lo, hi)) for p in self.points)


def _s_disjoint(U: Box, V: Box, S: Separation) -> bool:
    """``U`` and ``V + S`` are disjoint iff ``S`` misses ``U - V``."""
    lo = tuple(a - d for a, d in zip(U.lo, V.hi))
    hi = tuple(b - c for b, c in zip(U.hi, V.lo))
    return not S.meets(lo, hi)


@dataclass
class CoverWitness:
    d: int
    W: int
    families: list  # list of lists of Box
    K_radius: int
    S: Separation

    @property
    def K_size(self) -> int:
        return (2 * self.K_radius + 1) ** self.d

    def as_dict(self, limit: int = 20):
        return {
            "d": self.d,
            "W": self.W,
            "families": len(self.families),
            "blocks": [len(f) for f in self.families],
            "sample_blocks": [[str(b) for b in f[:limit]] for f in self.families],
            "K_radius": self.K_radius,
            "K_size": self.K_size,
            "S_max_abs": self.S.max_abs,
        }


@dataclass(frozen=True)
class CoverCheck:
    ok: bool
    violation: dict | None = None
    unbounded_suspect: bool = False

    def __bool__(self):
        return self.ok

    def as_dict(self):
        return {"ok": self.ok, "violation": self.violation, "unbounded_suspect": self.unbounded_suspect}


_GRID_LIMIT = 5_000_000


def _check_bounded(blocks_by_family, K_radius):
    for fi, fam in enumerate(blocks_by_family):
        for U in fam:
            if max(U.extent) > K_radius:
                return {"kind": "unbounded block", "family": fi, "block": str(U), "K_radius": K_radius}
    return None


def _check_disjoint(blocks_by_family, S: Separation, d: int):
    s = S.max_abs
    for fi, fam in enumerate(blocks_by_family):
        if len(fam) < 2:
            continue
        side = max(max(U.extent) for U in fam) + s + 1
        buckets: dict[tuple, list[int]] = {}
        for idx, U in enumerate(fam):
            cells = [range(math.floor(a / side), math.floor(b / side) + 1) for a, b in zip(U.lo, U.hi)]
            for cell in itertools.product(*cells):
                buckets.setdefault(cell, []).append(idx)
        seen = set()
        for cell, members in buckets.items():
            near = set()
            for off in itertools.product((-1, 0, 1), repeat=d):
                near.update(buckets.get(tuple(c + o for c, o in zip(cell, off)), ()))
            for i in members:
                for j in near:
                    if i == j or (min(i, j), max(i, j)) in seen:
                        continue
                    seen.add((min(i, j), max(i, j)))
                    if not _s_disjoint(fam[i], fam[j], S):
                        return {
                            "kind": "not S-disjoint",
                            "family": fi,
                            "blocks": [str(fam[i]), str(fam[j])],
                        }
    return None


def _check_covered(blocks, W: int, d: int):
    if d == 1:
        spans = sorted((U.lo[0], U.hi[0]) for U in blocks)
        reach = -W - 1
        for a, b in spans:
            if a > reach + 1:
                return {"kind": "uncovered point", "point": [reach + 1]}
            reach = max(reach, b)
        if reach < W:
            return {"kind": "uncovered point", "point": [reach + 1]}
        return None
    if (2 * W + 1) ** d > _GRID_LIMIT:
        raise DomainError("window too large for an explicit coverage grid; use a periodic witness")
    grid = np.zeros((2 * W + 1,) * d, dtype=bool)
    for U in blocks:
        grid[tuple(slice(a + W, b + W + 1) for a, b in zip(U.lo, U.hi))] = True
    if not grid.all():
        p = np.argwhere(~grid)[0] - W
        return {"kind": "uncovered point", "point": p.tolist()}
    return None


def check_cover(w: CoverWitness) -> CoverCheck:
    """Cover of the window, uniform bound ``U - U <= K``, and ``S``-disjointness
    inside each family, all checked exhaustively on the window."""
    fams = [[b for b in (U.clip(w.W) for U in fam) if b is not None] for fam in w.families]
    suspect = w.K_radius >= w.W
    for check in (
        lambda: _check_bounded(fams, w.K_radius),
        lambda: _check_disjoint(fams, w.S, w.d),
        lambda: _check_covered([U for f in fams for U in f], w.W, w.d),
    ):
        v = check()
        if v is not None:
            return CoverCheck(False, v, suspect)
    return CoverCheck(True, None, suspect)


# ---------------------------------------------------------------------------
# Periodic witnesses


@dataclass
class PeriodicCover:
    """Boxes ``P + sum(n_i period_i e_i)`` for prototypes ``P`` (with family labels)."""

    d: int
    periods: tuple
    prototypes: list  # list of (Box, family)
    families: int
    K_radius: int
    S: Separation

    def as_dict(self):
        return {
            "d": self.d,
            "periods": list(self.periods),
            "prototypes": [[str(b), f] for b, f in self.prototypes],
            "families": self.families,
            "K_radius": self.K_radius,
            "K_size": (2 * self.K_radius + 1) ** self.d,
            "S_max_abs": self.S.max_abs,
        }

    def blocks_on_window(self, W: int) -> list:
        fams = [[] for _ in range(self.families)]
        ranges = []
        for p in self.periods:
            ranges.append(range(math.floor((-W - 2 * p) / p) - 1, math.ceil((W + 2 * p) / p) + 2))
        for box, fam in self.prototypes:
            for ns in itertools.product(*ranges):
                B = box.shift(tuple(n * p for n, p in zip(ns, self.periods)))
                if B.clip(W) is not None:
                    fams[fam].append(B)
        return fams

    def explicit(self, W: int) -> CoverWitness:
        return CoverWitness(self.d, W, self.blocks_on_window(W), self.K_radius, self.S)


def check_periodic_cover(pc: PeriodicCover) -> CoverCheck:
    """Exact check of the infinite periodic cover on one fundamental domain."""
    P = pc.periods
    for box, fam in pc.prototypes:
        if max(box.extent) > pc.K_radius:
            return CoverCheck(False, {"kind": "unbounded block", "family": fam, "block": str(box)})
    # coverage of the fundamental domain [0, P)
    grid = np.zeros(P, dtype=bool)
    reach = [max(max(abs(a), abs(b)) for a, b in zip(bx.lo, bx.hi)) for bx, _ in pc.prototypes]
    span = max(reach, default=0)
    shifts = [range(-(span // p) - 2, span // p + 3) for p in P]
    for box, _ in pc.prototypes:
        for ns in itertools.product(*shifts):
            B = box.shift(tuple(n * p for n, p in zip(ns, P)))
            sl = tuple(slice(max(a, 0), min(b, p - 1) + 1) for a, b, p in zip(B.lo, B.hi, P))
            if all(s.start < s.stop for s in sl):
                grid[sl] = True
    if not grid.all():
        return CoverCheck(False, {"kind": "uncovered point", "point": np.argwhere(~grid)[0].tolist()})
    # S-disjointness between a prototype and every translate of a same-family prototype
    s = pc.S.max_abs
    for (A, fa), (B, fb) in itertools.product(pc.prototypes, repeat=2):
        if fa != fb:
            continue
        reach = [
            (max(abs(x) for x in (*A.lo, *A.hi, *B.lo, *B.hi)) * 2 + s) // p + 2 for p in P
        ]
        for ns in itertools.product(*(range(-r, r + 1) for r in reach)):
            C = B.shift(tuple(n * p for n, p in zip(ns, P)))
            if C == A:
                continue
            if not _s_disjoint(A, C, pc.S):
                return CoverCheck(False, {"kind": "not S-disjoint", "family": fa, "blocks": [str(A), str(C)]})
    return CoverCheck(True)


def make_periodic_witness(d: int, S) -> PeriodicCover:
    """Two families of intervals (``d = 1``) or three of bricks (``d = 2``)."""
    S = S if isinstance(S, Separation) else Separation.of(S)
    s = S.max_abs
    if d == 1:
        L = 2 * (s + 1)
        protos = [(Box((0,), (L - 1,)), 0), (Box((L,), (2 * L - 1,)), 1)]
        return PeriodicCover(1, (2 * L,), protos, 2, L - 1, S)
    if d == 2:
        H, L = s + 1, 2 * (s + 1)
        protos = []
        for j in range(2):
            off = (j % 2) * (L // 2)
            for i in range(3):
                t = 2 * i + (j % 2)
                alpha = (t - j) // 2
                color = (alpha - j) % 3
                protos.append((Box((i * L + off, j * H), (i * L + off + L - 1, j * H + H - 1)), color))
        return PeriodicCover(2, (3 * L, 2 * H), protos, 3, L - 1, S)
    raise DomainError(f"witness generation is implemented for d = 1, 2 only (got d = {d})")


def make_asdim_witness(d: int, S, W: int) -> CoverWitness:
    """Explicit witness on ``[-W, W]^d``; families of a periodic pattern."""
    return make_periodic_witness(d, S).explicit(W)


def merge_families(w: CoverWitness) -> CoverWitness:
    return CoverWitness(w.d, w.W, [[U for f in w.families for U in f]], w.K_radius, w.S)


# ---------------------------------------------------------------------------
# Cellularity


@dataclass(frozen=True)
class Cellularity:
    cellular: bool
    reason: str

    def __bool__(self):
        return self.cellular

    def as_dict(self):
        return {"cellular": self.cellular, "reason": self.reason}


def is_cellular(I: GroupIdeal) -> Cellularity:
    """The ideal has a cofinal family of subgroups."""
    kind = I.kind
    if kind is IdealKind.CUSTOM:
        raise DomainError("cellularity is not decided for custom families")
    if kind is IdealKind.FINITE_RANK:
        return Cellularity(True, "every member lies in a finitely generated subgroup")
    if kind is IdealKind.FINITARY and not I.ambient.is_finite:
        G = I.ambient
        gens = [tuple(int(i == j) for j in range(G.dim)) for i in range(G.dim)]
        K = [G.zero()] + gens + [G.neg(g) for g in gens]
        return Cellularity(
            False,
            f"K = {sorted(K)} is a member generating {G}, which is infinite, so no subgroup containing K is a member",
        )
    return Cellularity(True, "the members are the subsets of one subgroup")


# ---------------------------------------------------------------------------
# Eventually periodic subsets of Z


def _minimal_period(m: int, R: frozenset) -> int:
    for p in sorted(q for q in range(1, m + 1) if m % q == 0):
        if all(((r + p) % m in R) == (r in R) for r in range(m)):
            return p
    return m


@dataclass(frozen=True)
class PeriodicSet:
    """``((R + mZ) symmetric-difference F)``, stored canonically."""

    m: int
    residues: frozenset
    exceptions: frozenset

    @classmethod
    def make(cls, m: int, residues=(), toggles=()) -> "PeriodicSet":
        if m < 1:
            raise DomainError("period must be positive")
        R = frozenset(r % m for r in residues)
        p = _minimal_period(m, R)
        R = frozenset(r % p for r in R)
        F: set[int] = set()
        for x in toggles:
            F ^= {int(x)}
        return cls(p, R, frozenset(F))

    def __contains__(self, x: int) -> bool:
        return ((x % self.m) in self.residues) != (x in self.exceptions)

    def members(self, lo: int, hi: int) -> np.ndarray:
        xs = np.arange(lo, hi + 1, dtype=np.int64)
        mask = np.isin(np.mod(xs, self.m), list(self.residues))
        if self.exceptions:
            mask ^= np.isin(xs, list(self.exceptions))
        return xs[mask]

    @property
    def is_finite(self) -> bool:
        return not self.residues

    def __str__(self):
        ex = ", ".join(f"{x:+d}" for x in sorted(self.exceptions))
        return f"periodic{{m: {self.m}, residues: {sorted(self.residues)}, except: [{ex}]}}"


def is_large(A: PeriodicSet) -> bool:
    """``A + K = Z`` for a finite ``K`` iff a residue class is (eventually) present."""
    return bool(A.residues)


def is_small(A: PeriodicSet) -> bool:
    """Removing ``A`` from any large set leaves a large set iff ``A`` is finite."""
    return not A.residues


def _max_gap(A: PeriodicSet) -> int:
    lo = min(A.exceptions, default=0) - 2 * A.m
    hi = max(A.exceptions, default=0) + 2 * A.m
    xs = A.members(lo, hi)
    return int(np.diff(xs).max()) if len(xs) > 1 else A.m


def smallness_certificate(A: PeriodicSet) -> dict:
    if A.residues:
        r = min(A.residues)
        L = PeriodicSet.make(A.m, [r])
        left = sorted(x for x in A.exceptions if x % A.m == r)
        return {
            "large": True,
            "small": False,
            "gap_bound": _max_gap(A),
            "killing_large_set": str(L),
            "reason": f"L = {r} + {A.m}Z is large and L \\ A = {left} is finite, hence not large",
        }
    pts = sorted(A.exceptions)
    return {
        "large": False,
        "small": True,
        "elements": pts,
        "reason": (
            "A is finite; for large L with L + K = Z, the set L \\ A misses only finitely many "
            "points of L, so enlarging K by the diameter of A plus a gap of L covers Z again"
        ),
    }


def _largest_chain(xs: np.ndarray, step: int) -> int:
    """Largest number of points in a run with consecutive gaps <= ``step``."""
    if len(xs) == 0:
        return 0
    breaks = np.nonzero(np.diff(xs) > step)[0]
    edges = np.concatenate([[-1], breaks, [len(xs) - 1]])
    return int(np.diff(edges).max())


@dataclass(frozen=True)
class DltVsSmall:
    in_D_less: bool
    in_S: bool

    @property
    def equal_here(self) -> bool:
        return self.in_D_less == self.in_S

    def as_dict(self):
        return {"in_D_less": self.in_D_less, "in_S": self.in_S, "equal_here": self.equal_here}


def dlt_vs_small(A: PeriodicSet) -> DltVsSmall:
    """Compare "asdim of the subspace is 0" with smallness.

    Asdim 0 is decided from the geometry: with ``S = [-m, m]`` the ``S``-chains
    of ``A`` must stay bounded; a chain that keeps growing with the window
    means asdim 1.
    """
    span = max((abs(x) for x in A.exceptions), default=0) + 4 * A.m
    sizes = [_largest_chain(A.members(-w, w), A.m) for w in (2 * span, 4 * span)]
    in_D_less = sizes[0] == sizes[1]
    return DltVsSmall(in_D_less, is_small(A))


def parse_periodic_set(text: str) -> PeriodicSet:
    """``periodic{m: 6, residues: [1,3], except: [+7, -1]}``; every exception
    (a signed integer) toggles membership of that integer."""
    m = re.fullmatch(r"\s*periodic\s*\{(.*)\}\s*", text, re.S)
    if not m:
        raise LiteralError(f"bad periodic-set literal {text!r}")
    body = m.group(1)
    fields = dict(re.findall(r"(\w+)\s*:\s*(\[[^\]]*\]|-?\d+)", body))
    if "m" not in fields:
        raise LiteralError("periodic-set literal needs m")
    try:
        period = int(fields["m"])
        residues = json.loads(fields.get("residues", "[]"))
        toggles = json.loads(re.sub(r"\+(\d)", r"\1", fields.get("except", "[]")))
    except (ValueError, json.JSONDecodeError):
        raise LiteralError(f"bad periodic-set literal {text!r}") from None
    if not all(isinstance(v, int) for v in residues + toggles):
        raise LiteralError("residues and exceptions must be integers")
    return PeriodicSet.make(period, residues, toggles)
