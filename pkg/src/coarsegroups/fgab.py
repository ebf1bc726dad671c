"""Finitely generated abelian groups in Smith normal form and their
homomorphisms.

A group ``Z^n + Z/d1 + ... + Z/dk`` (with ``d1 | d2 | ... | dk``) is stored as
``FgAbGroup(n, (d1, ..., dk))``. Elements are plain integer tuples of length
``n + k`` whose torsion coordinates are reduced into ``[0, di)``.
A homomorphism is an integer matrix whose ``j``-th column is the image of the
``j``-th generator of the source.

Every construction (kernel, quotient, direct sum, pullback, subgroup) goes
through one routine, :func:`_subquotient`, which computes the normal form of
``L/R`` for lattices ``R <= L <= Z^N`` and hands back generator vectors and a
coordinate map.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .cardinals import ALEPH0, INFINITE
from .errors import DomainError, LiteralError
from .intlat import (
    IntMatrix,
    lattice_index,
    lattice_membership,
    right_kernel,
    row_lattice_basis,
    smith_normal_form,
)

__all__ = [
    "FgAbGroup",
    "Hom",
    "Subgroup",
    "GroupInvariants",
    "kernel",
    "image_subgroup",
    "subgroup_index",
    "quotient",
    "direct_sum",
    "pullback",
    "invariants",
    "prime_factors",
]

Element = tuple


@dataclass(frozen=True)
class FgAbGroup:
    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        if self.free_rank < 0:
            raise DomainError("negative free rank")
        for i, d in enumerate(self.torsion):
            if d < 2:
                raise DomainError(f"invariant factor {d} < 2")
            if i and d % self.torsion[i - 1]:
                raise DomainError(f"divisibility chain broken at {self.torsion[i - 1]} | {d}")

    # -- construction -----------------------------------------------------
    @classmethod
    def trivial(cls) -> "FgAbGroup":
        return cls(0, ())

    @classmethod
    def free(cls, n: int) -> "FgAbGroup":
        return cls(n, ())

    @classmethod
    def cyclic(cls, d: int) -> "FgAbGroup":
        """``Z/d``; ``d = 0`` gives ``Z`` and ``d = 1`` the trivial group."""
        return cls.from_orders([d])

    @classmethod
    def from_orders(cls, orders: Sequence[int]) -> "FgAbGroup":
        """Normal form of ``Z/o1 + Z/o2 + ...`` where an order 0 means ``Z``."""
        orders = [abs(int(o)) for o in orders]
        rel = IntMatrix.diagonal(orders) if orders else IntMatrix.zeros(0, 0)
        G, _, _ = _subquotient(IntMatrix.identity(len(orders)), rel)
        return G

    @classmethod
    def parse(cls, text: str) -> "FgAbGroup":
        """Parse a literal such as ``"Z^2 + Z/4 + Z/12"``, ``"Z"`` or ``"0"``."""
        orders: list[int] = []
        text = text.strip()
        if not text:
            raise LiteralError("empty group literal")
        for part in text.split("+"):
            part = part.strip().replace(" ", "")
            if part in ("0", "trivial", "1"):
                continue
            m = re.fullmatch(r"Z(?:\^(\d+))?", part)
            if m:
                orders.extend([0] * int(m.group(1) or 1))
                continue
            m = re.fullmatch(r"Z/(\d+)", part)
            if m:
                d = int(m.group(1))
                if d == 0:
                    raise LiteralError("Z/0 is not allowed; write Z")
                orders.append(d)
                continue
            raise LiteralError(f"bad group summand {part!r} in {text!r}")
        return cls.from_orders(orders)

    # -- basic data -------------------------------------------------------
    @property
    def dim(self) -> int:
        return self.free_rank + len(self.torsion)

    @property
    def moduli(self) -> tuple[int, ...]:
        """Per-coordinate modulus, 0 for free coordinates."""
        return (0,) * self.free_rank + self.torsion

    @property
    def relation_matrix(self) -> IntMatrix:
        n = self.free_rank
        rows = []
        for i, d in enumerate(self.torsion):
            r = [0] * self.dim
            r[n + i] = d
            rows.append(r)
        return IntMatrix(rows, self.dim)

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def order(self):
        return math.prod(self.torsion) if self.is_finite else INFINITE

    @property
    def exponent(self) -> int:
        """Exponent of the torsion part (1 when torsion-free)."""
        return self.torsion[-1] if self.torsion else 1

    def reduce(self, v: Sequence[int]) -> Element:
        if len(v) != self.dim:
            raise DomainError(f"element of length {len(v)} in group of dim {self.dim}")
        return tuple(int(a) % m if m else int(a) for a, m in zip(v, self.moduli))

    def zero(self) -> Element:
        return (0,) * self.dim

    def add(self, x, y) -> Element:
        return self.reduce([a + b for a, b in zip(x, y)])

    def neg(self, x) -> Element:
        return self.reduce([-a for a in x])

    def sub(self, x, y) -> Element:
        return self.reduce([a - b for a, b in zip(x, y)])

    def scale(self, c: int, x) -> Element:
        return self.reduce([c * a for a in x])

    def basis(self) -> list[Element]:
        return [tuple(int(i == j) for j in range(self.dim)) for i in range(self.dim)]

    def elements(self) -> Iterator[Element]:
        """Enumerate a finite group."""
        if not self.is_finite:
            raise DomainError("cannot enumerate an infinite group")
        yield from _product_ranges(self.torsion)

    def __str__(self):
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"


def _product_ranges(bounds: Sequence[int]) -> Iterator[tuple[int, ...]]:
    if not bounds:
        yield ()
        return
    for head in range(bounds[0]):
        for tail in _product_ranges(bounds[1:]):
            yield (head,) + tail


# ---------------------------------------------------------------------------
# The subquotient engine


def _subquotient(L: IntMatrix, R: IntMatrix):
    """Normal form of ``L/R`` for row lattices ``R <= L <= Z^N``.

    Returns ``(G, gens, coords)``: ``gens[i]`` is a vector of ``L`` mapping to
    the ``i``-th normal-form generator, and ``coords(v)`` gives the normal-form
    coordinates of the class of ``v in L``.
    """
    N = L.ncols
    B = row_lattice_basis(L)
    r = B.nrows
    C_rows = []
    for rel in R.rows():
        c = lattice_membership(rel, B)
        if c is None:
            raise DomainError("relation lattice is not contained in the generating lattice")
        C_rows.append(c)
    C = IntMatrix(C_rows, r)
    snf = smith_normal_form(C)
    diag = [snf.D[j, j] if j < min(C.nrows, r) else 0 for j in range(r)]
    free_idx = [j for j in range(r) if diag[j] == 0]
    tors_idx = [j for j in range(r) if diag[j] > 1]
    tors_idx.sort(key=lambda j: diag[j])
    order = free_idx + tors_idx
    G = FgAbGroup(len(free_idx), tuple(diag[j] for j in tors_idx))
    V = snf.V
    gens = []
    for j in order:
        x = V.row(j)
        gens.append(tuple(sum(x[t] * B[t, k] for t in range(r)) for k in range(N)))
    V_inv = snf.V_inv

    def coords(v: Sequence[int]) -> Element:
        x = lattice_membership(tuple(v), B)
        if x is None:
            raise DomainError(f"{tuple(v)} is not in the generating lattice")
        y = [sum(x[t] * V_inv[t, j] for t in range(r)) for j in range(r)]
        return G.reduce([y[j] for j in order])

    return G, gens, coords


# ---------------------------------------------------------------------------
# Homomorphisms


@dataclass(frozen=True)
class Hom:
    """Homomorphism ``source -> target``; ``matrix`` is ``target.dim x source.dim``."""

    source: FgAbGroup
    target: FgAbGroup
    matrix: IntMatrix

    def __post_init__(self):
        M = self.matrix
        if not isinstance(M, IntMatrix):
            M = IntMatrix(M, self.source.dim) if len(M) else IntMatrix.zeros(0, self.source.dim)
        if M.shape != (self.target.dim, self.source.dim):
            raise DomainError(
                f"matrix shape {M.shape} does not match {self.target} <- {self.source}"
            )
        mods = self.target.moduli
        M = IntMatrix(
            [[a % m if m else a for a in row] for row, m in zip(M.rows(), mods)], self.source.dim
        )
        object.__setattr__(self, "matrix", M)
        n = self.source.free_rank
        for i, d in enumerate(self.source.torsion):
            col = M.column(n + i)
            if any(self.target.reduce([d * a for a in col])):
                raise DomainError(
                    f"not well defined: generator of order {d} maps to {col}, "
                    f"which is not killed by {d} in {self.target}"
                )

    @classmethod
    def from_rows(cls, source, target, rows) -> "Hom":
        return cls(source, target, IntMatrix(rows, source.dim) if rows else IntMatrix.zeros(0, source.dim))

    @classmethod
    def from_images(cls, source, target, images: Sequence[Sequence[int]]) -> "Hom":
        """Build from the images of the source generators."""
        return cls(source, target, IntMatrix.from_columns(list(images), target.dim))

    @classmethod
    def identity(cls, G: FgAbGroup) -> "Hom":
        return cls(G, G, IntMatrix.identity(G.dim))

    @classmethod
    def zero(cls, G: FgAbGroup, H: FgAbGroup) -> "Hom":
        return cls(G, H, IntMatrix.zeros(H.dim, G.dim))

    @classmethod
    def scalar(cls, G: FgAbGroup, c: int) -> "Hom":
        return cls(G, G, IntMatrix.identity(G.dim).scale(c))

    def __call__(self, v: Sequence[int]) -> Element:
        return self.target.reduce(self.matrix.apply(tuple(v)))

    def images(self) -> list[Element]:
        return [self(e) for e in self.source.basis()]

    def __matmul__(self, other: "Hom") -> "Hom":
        """Composition ``self o other``."""
        if other.target != self.source:
            raise DomainError(f"cannot compose {self.source} <- ... with ... -> {other.target}")
        return Hom(other.source, self.target, self.matrix @ other.matrix)

    def _check_parallel(self, other):
        if (self.source, self.target) != (other.source, other.target):
            raise DomainError("homomorphisms are not parallel")

    def __add__(self, other: "Hom") -> "Hom":
        self._check_parallel(other)
        return Hom(self.source, self.target, self.matrix + other.matrix)

    def __sub__(self, other: "Hom") -> "Hom":
        self._check_parallel(other)
        return Hom(self.source, self.target, self.matrix - other.matrix)

    def __neg__(self) -> "Hom":
        return Hom(self.source, self.target, -self.matrix)

    def free_block(self) -> list[list[int]]:
        """Free-to-free block: the matrix of ``Q (x) self``."""
        n, m = self.source.free_rank, self.target.free_rank
        return [[self.matrix[i, j] for j in range(n)] for i in range(m)]

    def __str__(self):
        return f"Hom({self.source} -> {self.target}, {self.matrix.tolist()})"


# ---------------------------------------------------------------------------
# Subgroups


class Subgroup:
    """Subgroup of ``ambient`` generated by ``generators``.

    Canonical form: HNF basis of the preimage lattice (generators plus the
    ambient relations) in ``Z^dim``. Two subgroups are equal exactly when
    their canonical forms are.
    """

    __slots__ = ("ambient", "generators", "lattice", "_abstract")

    def __init__(self, ambient: FgAbGroup, generators: Iterable[Sequence[int]] = ()):
        self.ambient = ambient
        self.generators = tuple(ambient.reduce(g) for g in generators)
        rows = [g for g in self.generators if any(g)] + list(ambient.relation_matrix.rows())
        self.lattice = (
            row_lattice_basis(IntMatrix(rows, ambient.dim)) if rows else IntMatrix.zeros(0, ambient.dim)
        )
        self._abstract = None

    @classmethod
    def whole(cls, G: FgAbGroup) -> "Subgroup":
        return cls(G, G.basis())

    @classmethod
    def trivial(cls, G: FgAbGroup) -> "Subgroup":
        return cls(G, [])

    @classmethod
    def torsion_subgroup(cls, G: FgAbGroup) -> "Subgroup":
        return cls(G, G.basis()[G.free_rank:])

    @classmethod
    def multiple(cls, G: FgAbGroup, m: int) -> "Subgroup":
        """``mG``."""
        return cls(G, [G.scale(m, e) for e in G.basis()])

    def __eq__(self, other):
        if not isinstance(other, Subgroup):
            return NotImplemented
        return self.ambient == other.ambient and self.lattice == other.lattice

    def __hash__(self):
        return hash((self.ambient, self.lattice))

    def __repr__(self):
        return f"Subgroup({self.ambient}, {list(self.generators)})"

    def contains(self, v: Sequence[int]) -> bool:
        if self.lattice.nrows == 0:
            return not any(self.ambient.reduce(v))
        return lattice_membership(tuple(v), self.lattice) is not None

    __contains__ = contains

    def issubset(self, other: "Subgroup") -> bool:
        if self.ambient != other.ambient:
            raise DomainError("subgroups of different groups")
        return all(other.contains(g) for g in self.generators)

    def __le__(self, other):
        return self.issubset(other)

    def __add__(self, other: "Subgroup") -> "Subgroup":
        if self.ambient != other.ambient:
            raise DomainError("subgroups of different groups")
        return Subgroup(self.ambient, self.generators + other.generators)

    def intersection(self, other: "Subgroup") -> "Subgroup":
        if self.ambient != other.ambient:
            raise DomainError("subgroups of different groups")
        A, B = self.lattice, other.lattice
        if A.nrows == 0 or B.nrows == 0:
            return Subgroup.trivial(self.ambient)
        # x @ A == y @ B  <=>  (x, -y) in left kernel of [A; B]
        K = right_kernel(A.T.hstack(B.T))
        gens = [tuple(sum(k[t] * A[t, j] for t in range(A.nrows)) for j in range(A.ncols)) for k in K.rows()]
        return Subgroup(self.ambient, gens)

    def abstract(self) -> tuple[FgAbGroup, Hom]:
        """Normal form of the subgroup and its inclusion homomorphism."""
        if self._abstract is None:
            L = self.lattice if self.lattice.nrows else IntMatrix.zeros(0, self.ambient.dim)
            if L.nrows == 0:
                K = FgAbGroup.trivial()
                self._abstract = (K, Hom.zero(K, self.ambient))
            else:
                K, gens, _ = _subquotient(L, self.ambient.relation_matrix)
                self._abstract = (K, Hom.from_images(K, self.ambient, gens))
        return self._abstract

    @property
    def free_rank(self) -> int:
        return self.abstract()[0].free_rank

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def order(self):
        return self.abstract()[0].order

    def index(self):
        return subgroup_index(self)

    def elements(self) -> Iterator[Element]:
        K, incl = self.abstract()
        for x in K.elements():
            yield incl(x)


# ---------------------------------------------------------------------------
# Operations


def kernel(f: Hom) -> tuple[FgAbGroup, Hom]:
    """Normal form of ``ker f`` with its inclusion into ``f.source``."""
    G, H = f.source, f.target
    A = f.matrix
    RH = H.relation_matrix  # rows d_j e_{n+j}
    # A x - RH^T y = 0
    big = A.hstack((-RH).T) if RH.nrows else A
    K = right_kernel(big)
    xs = [r[: G.dim] for r in K.rows()]
    sub = Subgroup(G, xs)
    return sub.abstract()


def kernel_subgroup(f: Hom) -> Subgroup:
    K, incl = kernel(f)
    return Subgroup(f.source, incl.images())


def image_subgroup(f: Hom) -> Subgroup:
    """``f(G)`` as a canonical subgroup of the target."""
    return Subgroup(f.target, f.images())


def preimage_subgroup(f: Hom, S: Subgroup) -> Subgroup:
    """``f^{-1}(S)``."""
    if S.ambient != f.target:
        raise DomainError("subgroup does not live in the target")
    G = f.source
    A = f.matrix
    L = S.lattice
    big = A.hstack((-L).T) if L.nrows else A
    K = right_kernel(big)
    return Subgroup(G, [r[: G.dim] for r in K.rows()])


def subgroup_index(S: Subgroup):
    """``[ambient : S]``: a positive integer or ``INFINITE``."""
    G = S.ambient
    if G.dim == 0:
        return 1
    return lattice_index(S.lattice, G.dim)


def quotient(G: FgAbGroup, N: Subgroup) -> tuple[FgAbGroup, Hom]:
    """``G/N`` in normal form and the projection ``G -> G/N``."""
    if N.ambient != G:
        raise DomainError("N is not a subgroup of G")
    L = N.lattice if N.lattice.nrows else IntMatrix.zeros(0, G.dim)
    Q, _, coords = _subquotient(IntMatrix.identity(G.dim), L)
    proj = Hom.from_images(G, Q, [coords(e) for e in G.basis()])
    return Q, proj


@dataclass(frozen=True)
class DirectSum:
    group: FgAbGroup
    injections: tuple[Hom, ...]
    projections: tuple[Hom, ...]

    def __iter__(self):
        return iter((self.group, self.injections, self.projections))


def direct_sum(*groups: FgAbGroup) -> DirectSum:
    """Normal form of ``G1 + ... + Gm`` with injections and projections."""
    N = sum(G.dim for G in groups)
    rels = []
    offsets = []
    off = 0
    for G in groups:
        offsets.append(off)
        for r in G.relation_matrix.rows():
            rels.append((0,) * off + r + (0,) * (N - off - G.dim))
        off += G.dim
    S, gens, coords = _subquotient(IntMatrix.identity(N), IntMatrix(rels, N))
    injections = []
    projections = []
    for G, o in zip(groups, offsets):
        imgs = []
        for e in G.basis():
            v = (0,) * o + e + (0,) * (N - o - G.dim)
            imgs.append(coords(v))
        injections.append(Hom.from_images(G, S, imgs))
        projections.append(Hom.from_images(S, G, [g[o : o + G.dim] for g in gens]))
    return DirectSum(S, tuple(injections), tuple(projections))


@dataclass(frozen=True)
class Pullback:
    apex: FgAbGroup
    u: Hom  # apex -> X
    v: Hom  # apex -> Y

    def __iter__(self):
        return iter((self.apex, self.u, self.v))


def pullback(f: Hom, g: Hom) -> Pullback:
    """Pullback of ``Y --f--> Z <--g-- X``: ``P = {(x, y) : g(x) = f(y)}``.

    Returns ``(P, u, v)`` with ``u: P -> X``, ``v: P -> Y`` and ``g u = f v``.
    """
    if f.target != g.target:
        raise DomainError("pullback needs a common codomain")
    X, Y = g.source, f.source
    S, (iX, iY), (pX, pY) = direct_sum(X, Y)
    h = g @ pX - f @ pY
    P, incl = kernel(h)
    return Pullback(P, pX @ incl, pY @ incl)


# ---------------------------------------------------------------------------
# Invariants


def prime_factors(n: int) -> list[int]:
    n = abs(n)
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def p_rank(G: FgAbGroup, p: int) -> int:
    return sum(1 for d in G.torsion if d % p == 0)


def rank_r(G: FgAbGroup) -> int:
    """``r(G) = max(r0, sup_p r_p)``."""
    primes = prime_factors(G.exponent)
    return max([G.free_rank] + [p_rank(G, p) for p in primes])


def normalised_cardinality(G: FgAbGroup):
    """``ell``: ``ALEPH0`` for infinite groups, ``log2 |G|`` otherwise."""
    return ALEPH0 if not G.is_finite else math.log2(G.order)


def multiple_group(G: FgAbGroup, m: int) -> FgAbGroup:
    return Subgroup.multiple(G, m).abstract()[0]


@dataclass(frozen=True)
class GroupInvariants:
    r0: int
    r_p: dict
    r: int
    ell: object
    r_d: int
    w_d: object
    w_d_tilde: object

    def as_dict(self):
        from .cardinals import to_json

        return {
            "r0": self.r0,
            "r_p": {str(p): v for p, v in sorted(self.r_p.items())},
            "r": self.r,
            "ell": to_json(self.ell),
            "r_d": self.r_d,
            "w_d": to_json(self.w_d),
            "w_d_tilde": to_json(self.w_d_tilde),
        }


def invariants(G: FgAbGroup, primes: Iterable[int] = (2, 3, 5, 7)) -> GroupInvariants:
    """Cardinal and numerical invariants of ``G``.

    ``r_d`` and ``w_d`` are evaluated at ``m`` = exponent of the torsion part,
    where ``mG`` is already torsion-free (``mG`` is ``Z^r0``).
    """
    primes = sorted(set(primes) | set(prime_factors(G.exponent)))
    mG = multiple_group(G, G.exponent)
    return GroupInvariants(
        r0=G.free_rank,
        r_p={p: p_rank(G, p) for p in primes},
        r=rank_r(G),
        ell=normalised_cardinality(G),
        r_d=rank_r(mG),
        w_d=mG.order if mG.is_finite else ALEPH0,
        w_d_tilde=normalised_cardinality(mG),
    )
