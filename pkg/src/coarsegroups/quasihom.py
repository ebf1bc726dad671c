"""Quasi-homomorphisms ``Z^n -> H`` evaluated on finite windows.

A map is certified on a window when its defect set
``D_r = {f(x+y) - f(x) - f(y) : x, y in [-r, r]^n}`` satisfies the rule of the
target ideal (finitary: unchanged from radius ``r/2`` to ``r``; linear:
contained in the subgroup; bounded: always). A certificate is evidence on the
window, not a proof. Closed-form maps also carry an exact defect set, which
must agree with the window scan.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import faults
from .coarse import GroupIdeal, IdealKind, _split_top
from .errors import DomainError, LiteralError, TheoremViolation, UnsupportedError
from .fgab import FgAbGroup, Hom, Subgroup

__all__ = [
    "QhMap",
    "AffineFloor",
    "LargestEvenBelow",
    "AbsValue",
    "HomMap",
    "Table",
    "Compose",
    "PreimageSearch",
    "DefectReport",
    "defect",
    "perturb_and_check",
    "compose_qh",
    "section_as_coarse_inverse",
    "coarse_inverse_is_qh_check",
    "bornologous_on_window",
    "image_rank_on_window",
    "parse_qhmap",
    "NotWindowSurjective",
    "CoarseInverseFails",
]

DEFAULT_RADII = (250, 500, 1000, 2000)
EXHAUSTIVE_LIMIT = 2000
MIN_SAMPLES = 100_000
_CHUNK = 1 << 22  # pair evaluations per numpy block


class NotWindowSurjective(DomainError):
    pass


class CoarseInverseFails(DomainError):
    pass


class QhMap:
    """Base class: a total map ``Z^n -> target``.

    Subclasses implement :meth:`_values` on an ``(N, n)`` int64 array.
    """

    n: int = 1
    target: FgAbGroup = FgAbGroup.free(1)
    codomain: Subgroup | None = None

    def _init_ideals(self, source_ideal, target_ideal):
        self.source = FgAbGroup.free(self.n)
        self.source_ideal = source_ideal or GroupIdeal.finitary(self.source)
        self.target_ideal = target_ideal or GroupIdeal.finitary(self.target)
        if self.source_ideal.ambient != self.source or self.target_ideal.ambient != self.target:
            raise DomainError("ideals must live on the source Z^n and the target")

    def _values(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def values(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.int64).reshape(-1, self.n)
        V = np.asarray(self._values(X), dtype=np.int64).reshape(len(X), self.target.dim)
        return _reduce(V, self.target)

    def __call__(self, x) -> tuple:
        if isinstance(x, (int, np.integer)):
            x = (int(x),)
        return tuple(int(a) for a in self.values([tuple(x)])[0])

    def retarget(self, ideal: GroupIdeal) -> "QhMap":
        """Same map, different target ideal."""
        import copy

        g = copy.copy(self)
        if ideal.ambient != self.target:
            raise DomainError("ideal lives on a different group")
        g.target_ideal = ideal
        return g

    def with_source_ideal(self, ideal: GroupIdeal) -> "QhMap":
        import copy

        g = copy.copy(self)
        if ideal.ambient != self.source:
            raise DomainError("ideal lives on a different group")
        g.source_ideal = ideal
        return g

    def symbolic_defect(self):
        """Exact defect set as a frozenset of tuples, ``"UNBOUNDED"``, or ``None``."""
        return None

    def symbolic_period(self) -> int | None:
        """Window radius beyond which the window scan sees every defect value."""
        return None

    def describe(self) -> str:
        return repr(self)


def _reduce(V: np.ndarray, G: FgAbGroup) -> np.ndarray:
    for j, m in enumerate(G.moduli):
        if m:
            V[:, j] = np.mod(V[:, j], m)
    return V


class AffineFloor(QhMap):
    """``x -> floor(sum(a_i x_i) + b)`` with rational ``a_i`` and ``b``."""

    def __init__(self, slopes, offset=0, source_ideal=None, target_ideal=None):
        if isinstance(slopes, (int, Fraction, str)):
            slopes = [slopes]
        self.slopes = tuple(Fraction(s) for s in slopes)
        self.offset = Fraction(offset)
        self.n = len(self.slopes)
        self.target = FgAbGroup.free(1)
        self.codomain = None
        self.den = math.lcm(*(s.denominator for s in self.slopes), self.offset.denominator)
        self.num = np.array([int(s * self.den) for s in self.slopes], dtype=np.int64)
        self.b = int(self.offset * self.den)
        self._init_ideals(source_ideal, target_ideal)

    def _values(self, X):
        return np.floor_divide(X @ self.num + self.b, self.den)

    def symbolic_defect(self):
        # floor(u + v - b) over fractional parts u, v of the attained values
        Q = math.lcm(*(s.denominator for s in self.slopes))
        fracs = {(Fraction(k, Q) + self.offset) % 1 for k in range(Q)}
        out = set()
        for u in fracs:
            for v in fracs:
                out.add((math.floor(u + v - self.offset),))
        return frozenset(out)

    def symbolic_period(self):
        return math.lcm(*(s.denominator for s in self.slopes))

    def __repr__(self):
        sl = ",".join(str(s) for s in self.slopes)
        return f"floor({sl}; {self.offset})" if self.offset else f"floor({sl})"


class LargestEvenBelow(QhMap):
    """``x -> `` the largest even integer strictly below ``x``; image ``2Z``."""

    def __init__(self, source_ideal=None, target_ideal=None):
        self.n = 1
        self.target = FgAbGroup.free(1)
        self.codomain = Subgroup(self.target, [(2,)])
        self._init_ideals(source_ideal, target_ideal)

    def _values(self, X):
        x = X[:, 0]
        return x - 2 + np.mod(x, 2)

    def symbolic_defect(self):
        return frozenset({(0,), (2,)})

    def symbolic_period(self):
        return 2

    def __repr__(self):
        return "largest-even-below"


class AbsValue(QhMap):
    def __init__(self, source_ideal=None, target_ideal=None):
        self.n = 1
        self.target = FgAbGroup.free(1)
        self.codomain = None
        self._init_ideals(source_ideal, target_ideal)

    def _values(self, X):
        return np.abs(X[:, 0])

    def symbolic_defect(self):
        return "UNBOUNDED"

    def __repr__(self):
        return "abs"


class HomMap(QhMap):
    def __init__(self, hom: Hom, source_ideal=None, target_ideal=None):
        if hom.source.torsion:
            raise DomainError("HomMap needs a free source Z^n")
        self.hom = hom
        self.n = hom.source.free_rank
        self.target = hom.target
        self.codomain = None
        self.A = np.array(hom.matrix.tolist(), dtype=np.int64).reshape(hom.target.dim, self.n)
        self._init_ideals(source_ideal, target_ideal)

    @classmethod
    def scalar(cls, c: int, **kw) -> "HomMap":
        Z = FgAbGroup.free(1)
        return cls(Hom.scalar(Z, c), **kw)

    @classmethod
    def identity(cls, n: int = 1, **kw) -> "HomMap":
        return cls(Hom.identity(FgAbGroup.free(n)), **kw)

    def _values(self, X):
        return X @ self.A.T

    def symbolic_defect(self):
        return frozenset({self.target.zero()})

    def symbolic_period(self):
        return 1

    def __repr__(self):
        return f"hom {self.hom.matrix.tolist()}"


class Table(QhMap):
    """Explicit values on finitely many points, ``default`` elsewhere."""

    def __init__(self, entries: dict, default: QhMap, source_ideal=None, target_ideal=None):
        self.default = default
        self.n = default.n
        self.target = default.target
        self.codomain = default.codomain
        self.entries = {
            (tuple(k) if not isinstance(k, int) else (k,)): self.target.reduce(
                v if not isinstance(v, int) else (v,)
            )
            for k, v in entries.items()
        }
        self._init_ideals(source_ideal or default.source_ideal, target_ideal or default.target_ideal)
        if self.n == 1 and self.entries:
            keys = sorted(self.entries)
            self._keys = np.array([k[0] for k in keys], dtype=np.int64)
            self._vals = np.array([self.entries[k] for k in keys], dtype=np.int64)

    def _values(self, X):
        V = self.default.values(X).copy()
        if not self.entries:
            return V
        if self.n == 1:
            x = X[:, 0]
            pos = np.searchsorted(self._keys, x)
            pos = np.clip(pos, 0, len(self._keys) - 1)
            hit = self._keys[pos] == x
            V[hit] = self._vals[pos[hit]]
            return V
        for i, row in enumerate(map(tuple, X.tolist())):
            if row in self.entries:
                V[i] = self.entries[row]
        return V

    def __repr__(self):
        return f"table[{len(self.entries)} entries, default {self.default!r}]"


class Compose(QhMap):
    """``outer o inner``; the inner target must be ``Z^m`` with ``m = outer.n``."""

    def __init__(self, outer: QhMap, inner: QhMap, source_ideal=None, target_ideal=None):
        if inner.target.torsion or inner.target.free_rank != outer.n:
            raise DomainError(
                f"cannot compose: inner target {inner.target} is not Z^{outer.n}"
            )
        self.outer, self.inner = outer, inner
        self.n = inner.n
        self.target = outer.target
        self.codomain = outer.codomain
        self._init_ideals(source_ideal or inner.source_ideal, target_ideal or outer.target_ideal)

    def _values(self, X):
        return self.outer.values(self.inner.values(X))

    def __repr__(self):
        return f"compose({self.outer!r}, {self.inner!r})"


class PreimageSearch(QhMap):
    """``t -> `` least-absolute-value preimage of ``c t`` under ``f: Z -> Z``
    (ties go to the nonnegative one), where ``cZ`` is the codomain of ``f``."""

    def __init__(self, f: QhMap, factor: int = 4, margin: int = 64):
        if f.n != 1 or f.target != FgAbGroup.free(1):
            raise UnsupportedError("sections are built for maps Z -> Z")
        self.f = f
        self.c = _codomain_step(f)
        self.factor, self.margin = factor, margin
        self.n = 1
        self.target = FgAbGroup.free(1)
        self.codomain = None
        self._init_ideals(None, None)

    def _values(self, X):
        out = np.empty(len(X), dtype=np.int64)
        for i, t in enumerate(X[:, 0].tolist()):
            y = self.c * t
            P = self.factor * abs(t) + self.margin
            xs = _search_order(P)
            hit = np.nonzero(self.f.values(xs)[:, 0] == y)[0]
            if not len(hit):
                raise NotWindowSurjective(f"{y} has no preimage in [-{P}, {P}]")
            out[i] = xs[hit[0]]
        return out

    def __repr__(self):
        return f"section({self.f!r})"


def _search_order(P: int) -> np.ndarray:
    """``0, 1, -1, 2, -2, ..., P, -P``."""
    k = np.arange(1, P + 1, dtype=np.int64)
    return np.concatenate([[0], np.stack([k, -k], axis=1).ravel()])


def _codomain_step(f: QhMap) -> int:
    if f.codomain is None:
        return 1
    S = f.codomain
    if S.ambient != FgAbGroup.free(1) or S.lattice.nrows != 1:
        raise UnsupportedError("codomain must be cZ")
    return abs(S.lattice[0, 0])


# ---------------------------------------------------------------------------
# Defect scan


@dataclass
class DefectReport:
    map: str
    radii: tuple
    defects: dict  # radius -> sorted tuple of defect elements
    verdict: str
    M: tuple = ()
    witnesses: dict = field(default_factory=dict)  # radius -> ((x, y), defect)
    symbolic: object = None
    exhaustive: bool = True
    samples: int = 0

    @property
    def certified(self) -> bool:
        return self.verdict == "CERTIFIED_ON_WINDOW"

    def defect_set(self, r=None) -> frozenset:
        return frozenset(self.defects[self.radii[-1] if r is None else r])

    def as_dict(self) -> dict:
        def el(t):
            return list(t) if len(t) != 1 else t[0]

        sym = self.symbolic
        if isinstance(sym, frozenset):
            sym = sorted(el(t) for t in sym)
        return {
            "map": self.map,
            "radii": list(self.radii),
            "defects": {str(r): [el(t) for t in self.defects[r]] for r in self.radii},
            "verdict": self.verdict,
            "M": [el(t) for t in self.M],
            "witnesses": {
                str(r): {"pair": [el(p) for p in w[0]], "defect": el(w[1])}
                for r, w in self.witnesses.items()
            },
            "symbolic": sym,
            "exhaustive": self.exhaustive,
            "samples": self.samples,
        }


def _magnitude(D: np.ndarray, G: FgAbGroup) -> np.ndarray:
    n = G.free_rank
    return np.abs(D[:, :n]).sum(axis=1) if n else np.zeros(len(D), dtype=np.int64)


def _distinct_rows(D: np.ndarray) -> set:
    if D.shape[1] == 1:
        v = D[:, 0]
        lo, hi = int(v.min()), int(v.max())
        if hi - lo < 1 << 22:
            present = np.nonzero(np.bincount(v - lo))[0] + lo
            return {(int(t),) for t in present}
        return {(int(t),) for t in np.unique(v)}
    return set(map(tuple, np.unique(D, axis=0).tolist()))


def _pair_block(f: QhMap, F: np.ndarray, R2: int, xs: np.ndarray, ys: np.ndarray):
    """Defects over ``xs x ys`` (both descending); ``F[i] = f(i - R2)``.

    Returns the distinct defects and ``(magnitude, x, y, defect)`` of the
    largest defect, preferring the largest ``(x, y)`` among ties.
    """
    G = f.target
    found: set = set()
    best = None
    if not len(xs) or not len(ys):
        return found, best
    rows = max(1, _CHUNK // len(ys))
    Fy = F[ys + R2]
    for s in range(0, len(xs), rows):
        xc = xs[s : s + rows]
        D = F[(xc[:, None] + ys[None, :]) + R2] - F[xc + R2][:, None, :] - Fy[None, :, :]
        D = _reduce(D.reshape(-1, G.dim), G)
        found |= _distinct_rows(D)
        mag = _magnitude(D, G)
        i = int(np.argmax(mag))
        cand = (int(mag[i]), int(xc[i // len(ys)]), int(ys[i % len(ys)]), tuple(D[i].tolist()))
        if best is None or cand[:3] > best[:3]:
            best = cand
    return found, best


def _desc(lo: int, hi: int) -> np.ndarray:
    """Integers ``x`` with ``lo < |x| <= hi``, descending."""
    pos = np.arange(hi, lo, -1, dtype=np.int64)
    if lo < 0:
        return np.arange(hi, -hi - 1, -1, dtype=np.int64)
    return np.concatenate([pos, -pos[::-1]])


def _scan_shells(f: QhMap, radii, F: np.ndarray, R2: int):
    """Exhaustive ``n = 1`` scan; each radius only visits its new shell of pairs."""
    out = []
    acc: set = set()
    best = None
    prev = -1
    for r in radii:
        inner = _desc(-1, prev) if prev >= 0 else np.zeros(0, dtype=np.int64)
        shell = _desc(prev, r)
        full = _desc(-1, r)
        for xs, ys in ((shell, full), (inner, shell)):
            found, b = _pair_block(f, F, R2, xs, ys)
            acc |= found
            if b is not None and (best is None or b[:3] > best[:3]):
                best = b
        out.append((set(acc), ((best[1],), (best[2],)), best[3]))
        prev = r
    return out


def _scan_sampled(f: QhMap, r: int, rng: np.random.Generator, count: int):
    G = f.target
    X = rng.integers(-r, r + 1, size=(count, f.n), dtype=np.int64)
    Y = rng.integers(-r, r + 1, size=(count, f.n), dtype=np.int64)
    # always include the axes through 0 and the antidiagonal
    X = np.concatenate([X, np.zeros_like(X[:64]), X[:64]])
    Y = np.concatenate([Y, Y[:64], -X[:64]])
    D = f.values(X + Y) - f.values(X) - f.values(Y)
    D = _reduce(D, G)
    found = set(map(tuple, np.unique(D, axis=0).tolist()))
    mag = _magnitude(D, G)
    top = np.nonzero(mag == mag.max())[0]
    keys = sorted(((tuple(X[i].tolist()), tuple(Y[i].tolist())), i) for i in top)
    (x, y), i = keys[-1]
    return found, (x, y), tuple(D[i].tolist())


def _effective_radii(radii) -> tuple:
    radii = sorted({int(r) for r in radii})
    if not radii or radii[0] < 1:
        raise DomainError("radii must be positive")
    rmax = radii[-1]
    return tuple(sorted(set(radii) | {max(1, rmax // 2)}))


def defect(f: QhMap, radii=DEFAULT_RADII, seed: int = 0, samples: int = MIN_SAMPLES) -> DefectReport:
    """Defect sets of ``f`` on growing windows and the resulting verdict."""
    radii = _effective_radii(radii)
    rmax = radii[-1]
    G = f.target
    I = f.target_ideal
    if I.is_custom or I.kind is IdealKind.FINITE_RANK:
        raise UnsupportedError(f"no defect rule for target ideal {I}")
    exhaustive = f.n == 1 and rmax <= EXHAUSTIVE_LIMIT
    defects, witnesses = {}, {}
    acc: set = set()
    if exhaustive:
        R2 = 2 * rmax
        F = f.values(np.arange(-R2, R2 + 1, dtype=np.int64)[:, None])
        for r, (found, pair, d) in zip(radii, _scan_shells(f, radii, F, R2)):
            acc |= found
            defects[r] = tuple(sorted(acc))
            witnesses[r] = (pair, d)
    else:
        rng = np.random.default_rng(seed)
        per = max(samples // len(radii), 1)
        for r in radii:
            found, pair, d = _scan_sampled(f, r, rng, per)
            acc |= found
            defects[r] = tuple(sorted(acc))
            witnesses[r] = (pair, d)
    for a, b in zip(radii, radii[1:]):
        if not set(defects[a]) <= set(defects[b]):
            raise TheoremViolation("defect sets shrank with the radius")

    D = set(defects[rmax])
    half = radii[radii.index(max(1, rmax // 2))]
    A = I.linear_subgroup()
    if I.kind is IdealKind.BOUNDED:
        ok = True
    elif A is not None and not (I.kind is IdealKind.FINITARY):
        ok = all(A.contains(d) for d in D)
    else:
        ok = D == set(defects[half])
    if ok:
        M = D | {f(f.n * (0,))}
        M |= {G.neg(m) for m in M}
        verdict, M, witnesses = "CERTIFIED_ON_WINDOW", tuple(sorted(M)), {}
    else:
        verdict, M = "REJECTED", ()

    sym = f.symbolic_defect()
    if faults.active("quasihom.symbolic") and isinstance(sym, frozenset):
        sym = sym | {tuple(10**6 for _ in range(G.dim))}
    _check_symbolic(f, sym, D, verdict, exhaustive, rmax)
    return DefectReport(
        repr(f), radii, defects, verdict, M, witnesses, sym, exhaustive, 0 if exhaustive else samples
    )


def _check_symbolic(f, sym, D, verdict, exhaustive, rmax):
    if sym is None:
        return
    if sym == "UNBOUNDED":
        if verdict == "CERTIFIED_ON_WINDOW" and f.target_ideal.kind is IdealKind.FINITARY:
            raise TheoremViolation(f"{f!r}: unbounded defect certified on the window")
        return
    if not D <= sym:
        raise TheoremViolation(f"{f!r}: window defects {sorted(D - sym)} outside the exact set")
    period = f.symbolic_period()
    if exhaustive and period is not None and 2 * rmax + 1 >= 4 * period and D != sym:
        raise TheoremViolation(f"{f!r}: window misses exact defects {sorted(sym - D)}")


# ---------------------------------------------------------------------------
# Closeness, composition, inverses


def _window_points(n: int, r: int, rng=None, count: int = MIN_SAMPLES) -> np.ndarray:
    if n == 1:
        return np.arange(-r, r + 1, dtype=np.int64)[:, None]
    if rng is None:
        rng = np.random.default_rng(0)
    return rng.integers(-r, r + 1, size=(count, n), dtype=np.int64)


@dataclass
class PerturbVerdict:
    closeness_bound: tuple
    difference_stable: bool
    f_report: DefectReport
    g_report: DefectReport
    assertion: str

    def as_dict(self):
        return {
            "closeness_bound": [list(t) for t in self.closeness_bound],
            "difference_stable": self.difference_stable,
            "f": self.f_report.as_dict(),
            "g": self.g_report.as_dict(),
            "assertion": self.assertion,
        }


def _value_set(f: QhMap, pts: np.ndarray) -> set:
    return set(map(tuple, np.unique(f.values(pts), axis=0).tolist()))


def perturb_and_check(f: QhMap, g: QhMap, radii=DEFAULT_RADII, seed: int = 0) -> PerturbVerdict:
    """If ``g - f`` has stable finite range and ``f`` is certified, ``g`` must be."""
    if (f.n, f.target) != (g.n, g.target):
        raise DomainError("f and g have different signatures")
    radii = _effective_radii(radii)
    rmax = radii[-1]
    G = f.target
    rng = np.random.default_rng(seed)

    def diff(r):
        pts = _window_points(f.n, r, rng)
        V = _reduce(g.values(pts) - f.values(pts), G)
        return set(map(tuple, np.unique(V, axis=0).tolist()))

    full, half = diff(2 * rmax), diff(rmax)
    stable = full == half
    fr, gr = defect(f, radii, seed), defect(g, radii, seed)
    assertion = "NOT_APPLICABLE"
    if stable and fr.certified:
        bound = {
            G.reduce([a + b - c - d for a, b, c, d in zip(x, p, q, s)])
            for x in fr.defect_set()
            for p in full
            for q in full
            for s in full
        }
        if not gr.defect_set() <= bound:
            raise TheoremViolation(f"defect of {g!r} escapes D_f + M - M - M")
        if not gr.certified:
            raise TheoremViolation(f"{g!r} is close to certified {f!r} but not certified")
        assertion = "HOLDS"
    return PerturbVerdict(tuple(sorted(full)) if stable else (), stable, fr, gr, assertion)


def bornologous_on_window(f: QhMap, radii=DEFAULT_RADII) -> bool:
    """Window check of ``f(I_source) <= I_target``."""
    radii = _effective_radii(radii)
    rmax = radii[-1]
    I, J = f.source_ideal, f.target_ideal
    A = I.linear_subgroup()
    B = J.linear_subgroup()
    if J.kind is IdealKind.BOUNDED:
        return True
    if A is None:
        # finitary source: finite sets map to finite sets
        if B is None:
            return True
        return all(B.contains(v) for v in _value_set(f, _window_points(f.n, rmax)))
    gens = [g for g in A.generators if any(g)]

    def image(r):
        if not gens:
            return _value_set(f, np.zeros((1, f.n), dtype=np.int64))
        C = _window_points(len(gens), r)
        pts = C @ np.array(gens, dtype=np.int64)
        return _value_set(f, pts)

    full = image(rmax)
    if B is None:
        return full == image(max(1, rmax // 2))
    return all(B.contains(v) for v in full)


@dataclass
class CompositionReport:
    composite: DefectReport
    outer: DefectReport
    inner: DefectReport
    outer_bornologous: bool
    assertion: str

    def as_dict(self):
        return {
            "composite": self.composite.as_dict(),
            "outer": self.outer.as_dict(),
            "inner": self.inner.as_dict(),
            "outer_bornologous": self.outer_bornologous,
            "assertion": self.assertion,
        }


def compose_qh(outer: QhMap, inner: QhMap, radii=DEFAULT_RADII, seed: int = 0) -> CompositionReport:
    """Defect report of ``outer o inner``; certified inputs with a bornologous
    outer map must give a certified composite."""
    if inner.target_ideal != outer.source_ideal:
        raise DomainError(
            f"not composable: inner target ideal {inner.target_ideal} != outer source ideal {outer.source_ideal}"
        )
    comp = Compose(outer, inner)
    cr = defect(comp, radii, seed)
    orep, irep = defect(outer, radii, seed), defect(inner, radii, seed)
    born = bornologous_on_window(outer, radii)
    assertion = "NOT_APPLICABLE"
    if orep.certified and irep.certified and born:
        if not cr.certified:
            raise TheoremViolation(f"composite {comp!r} of certified maps is not certified")
        assertion = "HOLDS"
    return CompositionReport(cr, orep, irep, born, assertion)


@dataclass
class SectionResult:
    section: Table
    report: DefectReport
    f_report: DefectReport
    effectively_proper_on_window: bool
    roundtrip: bool
    assertion: str

    def as_dict(self):
        R = self.report.radii[-1]
        sample = {str(t): self.section(t)[0] for t in range(-min(R, 8), min(R, 8) + 1)}
        return {
            "section_sample": sample,
            "section": self.report.as_dict(),
            "f": self.f_report.as_dict(),
            "effectively_proper_on_window": self.effectively_proper_on_window,
            "roundtrip": self.roundtrip,
            "assertion": self.assertion,
        }


def _fibre_spread(f: QhMap, s: QhMap, r: int, c: int) -> int:
    xs = np.arange(-r, r + 1, dtype=np.int64)[:, None]
    fx = f.values(xs)[:, 0]
    if np.any(fx % c):
        raise TheoremViolation("f leaves its declared codomain")
    back = s.values((fx // c)[:, None])[:, 0]
    return int(np.abs(back - xs[:, 0]).max())


def section_as_coarse_inverse(f: QhMap, radii=DEFAULT_RADII, seed: int = 0) -> SectionResult:
    """Least-absolute-value section ``s`` of ``f: Z -> cZ`` on the window,
    parametrised by ``t -> c t``."""
    if f.n != 1 or f.target != FgAbGroup.free(1):
        raise UnsupportedError("sections are built for maps Z -> Z")
    radii = _effective_radii(radii)
    R = radii[-1]
    c = _codomain_step(f)
    search = PreimageSearch(f)
    P = search.factor * R + search.margin
    xs = _search_order(P)
    fx = f.values(xs)[:, 0]
    table = {}
    for x, y in zip(xs.tolist(), fx.tolist()):
        if y % c == 0:
            table.setdefault(y // c, x)
    # the section must serve every window point of the composite scan
    need = range(-2 * R, 2 * R + 1)
    missing = [t for t in need if t not in table]
    if missing:
        raise NotWindowSurjective(f"{c * missing[0]} has no preimage in [-{P}, {P}]")
    s = Table({t: table[t] for t in need}, search)
    ts = np.arange(-R, R + 1, dtype=np.int64)[:, None]
    roundtrip = bool(np.array_equal(f.values(s.values(ts))[:, 0], c * ts[:, 0]))
    if not roundtrip:
        raise TheoremViolation("f o s != id on the window")
    fr = defect(f, radii, seed)
    sr = defect(s, radii, seed)
    spread = [_fibre_spread(f, s, r, c) for r in (max(1, R // 2), R)]
    eff = spread[0] == spread[1]
    assertion = "NOT_APPLICABLE"
    if fr.certified and eff:
        if not sr.certified:
            raise TheoremViolation(f"section of certified {f!r} is not certified")
        assertion = "HOLDS"
    return SectionResult(s, sr, fr, eff, roundtrip, assertion)


@dataclass
class InverseVerdict:
    displacement_gf: tuple
    displacement_fg: tuple
    f_report: DefectReport
    g_report: DefectReport
    assertion: str

    def as_dict(self):
        return {
            "displacement_gf": [list(t) for t in self.displacement_gf],
            "displacement_fg": [list(t) for t in self.displacement_fg],
            "f": self.f_report.as_dict(),
            "g": self.g_report.as_dict(),
            "assertion": self.assertion,
        }


def coarse_inverse_is_qh_check(f: QhMap, g: QhMap, radii=DEFAULT_RADII, seed: int = 0) -> InverseVerdict:
    """With ``g o f ~ id`` and ``f o g ~ id`` on windows, a certified ``f``
    forces a certified ``g``."""
    if f.target.torsion or g.target.torsion:
        raise UnsupportedError("coarse inverses are checked between free groups")
    if f.target.free_rank != g.n or g.target.free_rank != f.n:
        raise DomainError("f and g are not mutually composable")
    radii = _effective_radii(radii)
    R = radii[-1]
    rng = np.random.default_rng(seed)

    def disp(a: QhMap, b: QhMap, r: int) -> set:
        pts = _window_points(b.n, r, rng)
        V = a.values(b.values(pts)) - pts
        return set(map(tuple, np.unique(V, axis=0).tolist()))

    gf = [disp(g, f, r) for r in (max(1, R // 2), R)]
    fg = [disp(f, g, r) for r in (max(1, R // 2), R)]
    if gf[0] != gf[1]:
        raise CoarseInverseFails("g o f is not close to the identity on the window")
    if fg[0] != fg[1]:
        raise CoarseInverseFails("f o g is not close to the identity on the window")
    fr, gr = defect(f, radii, seed), defect(g, radii, seed)
    assertion = "NOT_APPLICABLE"
    if fr.certified:
        if not gr.certified:
            raise TheoremViolation(f"coarse inverse {g!r} of certified {f!r} is not certified")
        assertion = "HOLDS"
    return InverseVerdict(tuple(sorted(gf[1])), tuple(sorted(fg[1])), fr, gr, assertion)


def image_rank_on_window(f: QhMap, r: int) -> int:
    """Free rank of the subgroup generated by ``f([-r, r]^n)``.

    Search harness for the open question whether quasi-homomorphisms keep
    ``r0`` of the generated subgroup finite; nothing is asserted.
    """
    vals = _value_set(f, _window_points(f.n, r))
    S = Subgroup(f.target, vals)
    return S.free_rank


# ---------------------------------------------------------------------------
# Literals


def parse_qhmap(text: str, target_ideal: str | None = None) -> QhMap:
    """``floor(1/2)``, ``floor(1/2,1/3; 5)``, ``largest-even-below``, ``abs``,
    ``hom [[..]]``, ``compose(a, b)`` (``a o b``), ``table@file.json``."""
    f = _parse(text.strip())
    if target_ideal is not None:
        from .coarse import parse_ideal

        f = f.retarget(parse_ideal(target_ideal, f.target))
    return f


def _parse(t: str) -> QhMap:
    if t == "largest-even-below":
        return LargestEvenBelow()
    if t == "abs":
        return AbsValue()
    m = re.fullmatch(r"floor\((.*)\)", t, re.S)
    if m:
        body = m.group(1)
        slopes, _, off = body.partition(";")
        try:
            return AffineFloor([Fraction(s.strip()) for s in slopes.split(",")], Fraction(off.strip() or 0))
        except (ValueError, ZeroDivisionError):
            raise LiteralError(f"bad floor literal {t!r}") from None
    m = re.fullmatch(r"hom\s*(\[.*\])", t, re.S)
    if m:
        try:
            rows = json.loads(m.group(1))
        except json.JSONDecodeError:
            raise LiteralError(f"bad matrix in {t!r}") from None
        if not rows or not all(isinstance(r, list) and len(r) == len(rows[0]) for r in rows):
            raise LiteralError(f"ragged matrix in {t!r}")
        n = len(rows[0])
        return HomMap(Hom.from_rows(FgAbGroup.free(n), FgAbGroup.free(len(rows)), rows))
    m = re.fullmatch(r"compose\((.*)\)", t, re.S)
    if m:
        parts = _split_top(m.group(1))
        if len(parts) != 2:
            raise LiteralError(f"compose needs two arguments: {t!r}")
        return Compose(_parse(parts[0].strip()), _parse(parts[1].strip()))
    m = re.fullmatch(r"table@(.+)", t)
    if m:
        try:
            with open(m.group(1)) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise LiteralError(f"cannot read table file: {e}") from None
        default = _parse(data.get("default", "hom [[1]]"))
        raw = data.get("entries", {})
        items = raw.items() if isinstance(raw, dict) else [(k, v) for k, v in raw]
        entries = {}
        for k, v in items:
            key = tuple(json.loads(k)) if isinstance(k, str) and k.startswith("[") else k
            entries[int(key) if isinstance(key, str) else key] = v
        return Table(entries, default)
    raise LiteralError(f"bad map literal {t!r}")
