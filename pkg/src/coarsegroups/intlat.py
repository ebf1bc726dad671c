"""Exact integer lattice algebra: Hermite and Smith normal forms, kernels,
lattice membership and index.

All arithmetic uses Python integers, so intermediate entry growth is never a
correctness problem. Matrices are immutable :class:`IntMatrix` values; the
row lattice of a matrix is the set of integer combinations of its rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, prod
from typing import Iterable, Sequence

from .cardinals import INFINITE
from .errors import DomainError

__all__ = [
    "IntMatrix",
    "SnfDecomposition",
    "hermite_normal_form",
    "smith_normal_form",
    "lattice_membership",
    "lattice_index",
    "left_kernel",
    "right_kernel",
    "rank",
    "row_lattice_basis",
    "rational_inverse",
]


class IntMatrix:
    """Immutable integer matrix with explicit shape (so 0×n and m×0 exist)."""

    __slots__ = ("nrows", "ncols", "_rows")

    def __init__(self, rows: Iterable[Sequence[int]], ncols: int | None = None):
        data = tuple(tuple(int(a) for a in r) for r in rows)
        if ncols is None:
            if not data:
                raise ValueError("ncols is required for a matrix without rows")
            ncols = len(data[0])
        for r in data:
            if len(r) != ncols:
                raise ValueError("ragged matrix rows")
        self.nrows = len(data)
        self.ncols = ncols
        self._rows = data

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, m: int, n: int) -> "IntMatrix":
        return cls([[0] * n for _ in range(m)], n)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence[int]], nrows: int) -> "IntMatrix":
        return cls([[c[i] for c in cols] for i in range(nrows)], len(cols))

    @classmethod
    def diagonal(cls, entries: Sequence[int], m: int | None = None, n: int | None = None):
        m = len(entries) if m is None else m
        n = len(entries) if n is None else n
        rows = [[0] * n for _ in range(m)]
        for i, d in enumerate(entries):
            rows[i][i] = d
        return cls(rows, n)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def rows(self) -> tuple[tuple[int, ...], ...]:
        return self._rows

    def row(self, i: int) -> tuple[int, ...]:
        return self._rows[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self._rows)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.ncols)]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self._rows]

    def __getitem__(self, idx):
        i, j = idx
        return self._rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        return hash((self.shape, self._rows))

    def __repr__(self):
        return f"IntMatrix({self.tolist()!r}, ncols={self.ncols})"

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix([self.column(j) for j in range(self.ncols)], self.nrows)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = other.columns()
        return IntMatrix(
            [[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self._rows],
            other.ncols,
        )

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)], self.ncols
        )

    def __neg__(self) -> "IntMatrix":
        return IntMatrix([[-a for a in r] for r in self._rows], self.ncols)

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix([[c * a for a in r] for r in self._rows], self.ncols)

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        """Matrix times column vector."""
        if len(v) != self.ncols:
            raise ValueError("vector length mismatch")
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self._rows)

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.ncols:
            raise ValueError("column count mismatch")
        return IntMatrix(self._rows + other._rows, self.ncols)

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.nrows != other.nrows:
            raise ValueError("row count mismatch")
        return IntMatrix([r + s for r, s in zip(self._rows, other._rows)], self.ncols + other.ncols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "IntMatrix":
        return IntMatrix([[self._rows[i][j] for j in cols] for i in rows], len(cols))

    def nonzero_rows(self) -> "IntMatrix":
        return IntMatrix([r for r in self._rows if any(r)], self.ncols)

    def is_zero(self) -> bool:
        return not any(any(r) for r in self._rows)

    def det(self) -> int:
        if self.nrows != self.ncols:
            raise ValueError("det of non-square matrix")
        return _bareiss_det([list(r) for r in self._rows])


def _bareiss_det(a: list[list[int]]) -> int:
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _as_matrix(a) -> IntMatrix:
    return a if isinstance(a, IntMatrix) else IntMatrix(a)


# ---------------------------------------------------------------------------
# Hermite normal form


def hermite_normal_form(A) -> tuple[IntMatrix, IntMatrix]:
    """Row-style Hermite normal form.

    Returns ``(H, U)`` with ``H = U @ A`` and ``U`` unimodular. ``H`` is in row
    echelon form, every pivot is positive, entries above a pivot lie in
    ``[0, pivot)`` and zero rows come last. The nonzero rows of ``H`` are the
    canonical basis of the row lattice of ``A``.

    >>> H, U = hermite_normal_form([[4, 6], [2, 2]])
    >>> H.tolist()
    [[2, 0], [0, 2]]
    """
    A = _as_matrix(A)
    m, n = A.shape
    h = [list(r) for r in A.rows()]
    u = [[int(i == j) for j in range(m)] for i in range(m)]

    def addrow(dst, src, c):
        if c:
            h[dst] = [x + c * y for x, y in zip(h[dst], h[src])]
            u[dst] = [x + c * y for x, y in zip(u[dst], u[src])]

    def swap(i, j):
        if i != j:
            h[i], h[j] = h[j], h[i]
            u[i], u[j] = u[j], u[i]

    def negate(i):
        h[i] = [-x for x in h[i]]
        u[i] = [-x for x in u[i]]

    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if h[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: (abs(h[i][c]), i))
            swap(r, p)
            done = True
            for i in range(r + 1, m):
                if h[i][c]:
                    addrow(i, r, -(h[i][c] // h[r][c]))
                    if h[i][c]:
                        done = False
            if done:
                break
        if h[r][c] == 0:
            continue
        if h[r][c] < 0:
            negate(r)
        piv = h[r][c]
        for i in range(r):
            addrow(i, r, -(h[i][c] // piv))
        r += 1
    return IntMatrix(h, n), IntMatrix(u, m)


def _pivots(H: IntMatrix) -> list[tuple[int, int]]:
    out = []
    for i, row in enumerate(H.rows()):
        for j, a in enumerate(row):
            if a:
                out.append((i, j))
                break
    return out


def row_lattice_basis(A) -> IntMatrix:
    """Canonical basis (nonzero HNF rows) of the row lattice of ``A``."""
    H, _ = hermite_normal_form(A)
    return H.nonzero_rows()


def rank(A) -> int:
    A = _as_matrix(A)
    if A.nrows == 0 or A.ncols == 0:
        return 0
    return len(_pivots(hermite_normal_form(A)[0]))


def left_kernel(A) -> IntMatrix:
    """Basis (as rows) of ``{x in Z^m : x @ A = 0}``."""
    A = _as_matrix(A)
    H, U = hermite_normal_form(A)
    zero = [i for i, r in enumerate(H.rows()) if not any(r)]
    return IntMatrix([U.row(i) for i in zero], A.nrows)


def right_kernel(A) -> IntMatrix:
    """Basis (as rows) of ``{x in Z^n : A @ x = 0}``."""
    return left_kernel(_as_matrix(A).T)


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SnfDecomposition:
    """``A = U @ D @ V`` with ``U``, ``V`` unimodular and ``D`` in Smith form.

    ``U_inv`` and ``V_inv`` are kept alongside because coordinate changes
    need both directions.
    """

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    U_inv: IntMatrix
    V_inv: IntMatrix

    @property
    def invariant_factors(self) -> tuple[int, ...]:
        k = min(self.D.shape)
        return tuple(self.D[i, i] for i in range(k))


def smith_normal_form(A) -> SnfDecomposition:
    """Smith normal form with deterministic pivoting.

    The pivot at each stage is the nonzero entry of smallest absolute value in
    the remaining block, ties broken by lowest ``(row, col)``.
    """
    A = _as_matrix(A)
    m, n = A.shape
    d = [list(r) for r in A.rows()]
    # Invariant: P @ A @ Q == d, U == P^-1, V == Q^-1.
    P = [[int(i == j) for j in range(m)] for i in range(m)]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    Q = [[int(i == j) for j in range(n)] for i in range(n)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def row_add(dst, src, c):  # row dst += c * row src
        if not c:
            return
        d[dst] = [x + c * y for x, y in zip(d[dst], d[src])]
        P[dst] = [x + c * y for x, y in zip(P[dst], P[src])]
        for row in U:
            row[src] -= c * row[dst]

    def row_swap(i, j):
        if i == j:
            return
        d[i], d[j] = d[j], d[i]
        P[i], P[j] = P[j], P[i]
        for row in U:
            row[i], row[j] = row[j], row[i]

    def row_neg(i):
        d[i] = [-x for x in d[i]]
        P[i] = [-x for x in P[i]]
        for row in U:
            row[i] = -row[i]

    def col_add(dst, src, c):  # col dst += c * col src
        if not c:
            return
        for row in d:
            row[dst] += c * row[src]
        for row in Q:
            row[dst] += c * row[src]
        V[src] = [x - c * y for x, y in zip(V[src], V[dst])]

    def col_swap(i, j):
        if i == j:
            return
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in Q:
            row[i], row[j] = row[j], row[i]
        V[i], V[j] = V[j], V[i]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    a = d[i][j]
                    if a and (best is None or abs(a) < best[0]):
                        best = (abs(a), i, j)
            if best is None:
                break
            _, pi, pj = best
            row_swap(t, pi)
            col_swap(t, pj)
            piv = d[t][t]
            clean = True
            for i in range(t + 1, m):
                if d[i][t]:
                    row_add(i, t, -(d[i][t] // piv))
                    clean = clean and d[i][t] == 0
            for j in range(t + 1, n):
                if d[t][j]:
                    col_add(j, t, -(d[t][j] // piv))
                    clean = clean and d[t][j] == 0
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if d[i][j] % piv),
                None,
            )
            if bad is None:
                break
            row_add(t, bad, 1)
        if best is None:
            break
        if d[t][t] < 0:
            row_neg(t)

    return SnfDecomposition(
        U=IntMatrix(U, m),
        D=IntMatrix(d, n),
        V=IntMatrix(V, n),
        U_inv=IntMatrix(P, m),
        V_inv=IntMatrix(Q, n),
    )


# ---------------------------------------------------------------------------
# Lattices


def lattice_membership(v: Sequence[int], basis) -> tuple[int, ...] | None:
    """Integer coefficients ``c`` with ``c @ basis == v``, or ``None``.

    >>> lattice_membership((3, 3), [[1, 2], [0, 3]])
    (3, -1)
    >>> lattice_membership((1, 0), [[2, 0]]) is None
    True
    """
    basis = _as_matrix(basis) if not isinstance(basis, IntMatrix) else basis
    if len(v) != basis.ncols:
        raise DomainError(f"vector of length {len(v)} against basis of width {basis.ncols}")
    if basis.nrows == 0:
        return () if not any(v) else None
    H, U = hermite_normal_form(basis)
    rem = list(v)
    coeffs = [0] * basis.nrows
    for i, j in _pivots(H):
        if rem[j] % H[i, j]:
            return None
        c = rem[j] // H[i, j]
        coeffs[i] = c
        if c:
            rem = [x - c * y for x, y in zip(rem, H.row(i))]
    if any(rem):
        return None
    # coeffs @ H == v and H == U @ basis
    return tuple(sum(coeffs[i] * U[i, k] for i in range(U.nrows)) for k in range(U.ncols))


def lattice_index(sub, ambient_rank: int):
    """Index of the row lattice of ``sub`` in ``Z^ambient_rank``.

    Returns a positive integer, or ``INFINITE`` on a rank deficit.
    """
    if isinstance(sub, IntMatrix):
        S = sub
    else:
        rows = [tuple(r) for r in sub]
        S = IntMatrix(rows, ambient_rank)
    if S.ncols != ambient_rank:
        raise DomainError("sublattice rows do not live in the ambient lattice")
    if ambient_rank == 0:
        return 1
    if S.nrows == 0:
        return INFINITE
    factors = smith_normal_form(S).invariant_factors
    nonzero = [f for f in factors if f]
    if len(nonzero) < ambient_rank:
        return INFINITE
    return prod(nonzero)


def vector_gcd(v: Iterable[int]) -> int:
    g = 0
    for a in v:
        g = gcd(g, a)
    return g


# ---------------------------------------------------------------------------
# Exact rational matrices (plain lists of Fractions)


def rational_inverse(M: Sequence[Sequence[Fraction]]) -> list[list[Fraction]] | None:
    """Gauss-Jordan inverse over Q; ``None`` when singular."""
    n = len(M)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return None
        a[c], a[p] = a[p], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for i in range(n):
            if i != c and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return [row[n:] for row in a]


def rational_matmul(A, B, inner: int | None = None):
    if not A:
        return []
    k = len(B) if inner is None else inner
    ncols = len(B[0]) if B else 0
    return [[sum((A[i][t] * B[t][j] for t in range(k)), Fraction(0)) for j in range(ncols)] for i in range(len(A))]


def rational_rank(M: Sequence[Sequence]) -> int:
    a = [[Fraction(x) for x in row] for row in M]
    if not a:
        return 0
    r = 0
    ncols = len(a[0])
    for c in range(ncols):
        p = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        for i in range(r + 1, len(a)):
            if a[i][c]:
                f = a[i][c] / a[r][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
        if r == len(a):
            break
    return r
