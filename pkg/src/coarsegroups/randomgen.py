"""Seeded generators of random groups and homomorphisms for audits and tests."""

from __future__ import annotations

import math
import random

from .fgab import FgAbGroup, Hom
from .intlat import IntMatrix

__all__ = ["random_group", "random_hom", "random_ce_hom", "random_unimodular", "random_nonsingular"]

_CHAINS = [(), (2,), (3,), (4,), (6,), (12,), (2, 2), (2, 4), (2, 6), (3, 6), (2, 12), (6, 12), (2, 2, 2)]


def random_group(rng: random.Random, max_free: int = 3, max_exponent: int = 12) -> FgAbGroup:
    chains = [c for c in _CHAINS if not c or c[-1] <= max_exponent]
    return FgAbGroup(rng.randint(0, max_free), rng.choice(chains))


def _torsion_entry(rng: random.Random, d: int | None, e: int) -> int:
    """A residue ``c`` mod ``e`` with ``d c = 0`` (``d=None``: any residue)."""
    if d is None:
        return rng.randrange(e)
    step = e // math.gcd(d, e)
    return (rng.randrange(e // step) * step) % e


def random_hom(rng: random.Random, G: FgAbGroup, H: FgAbGroup, bound: int = 4, free_block=None) -> Hom:
    rows = []
    n, m = G.free_rank, H.free_rank
    orders = [None] * n + list(G.torsion)
    for i in range(H.dim):
        row = []
        for j, d in enumerate(orders):
            if i < m:
                if d is not None:
                    row.append(0)
                elif free_block is not None:
                    row.append(free_block[i][j])
                else:
                    row.append(rng.randint(-bound, bound))
            else:
                row.append(_torsion_entry(rng, d, H.torsion[i - m]))
        rows.append(row)
    return Hom.from_rows(G, H, rows)


def random_nonsingular(rng: random.Random, k: int, bound: int = 3) -> list[list[int]]:
    while True:
        M = [[rng.randint(-bound, bound) for _ in range(k)] for _ in range(k)]
        if k == 0 or IntMatrix(M, k).det() != 0:
            return M


def random_unimodular(rng: random.Random, k: int, steps: int = 6) -> list[list[int]]:
    M = [[int(i == j) for j in range(k)] for i in range(k)]
    for _ in range(steps if k > 1 else 0):
        i, j = rng.sample(range(k), 2)
        c = rng.choice([-2, -1, 1, 2])
        M[i] = [a + c * b for a, b in zip(M[i], M[j])]
    if k and rng.random() < 0.5:
        M[0] = [-a for a in M[0]]
    return M


def random_ce_hom(rng: random.Random, G: FgAbGroup, H: FgAbGroup, bound: int = 3) -> Hom:
    """Random hom whose free block is square and nonsingular (needs equal free ranks)."""
    if G.free_rank != H.free_rank:
        raise ValueError("coarse equivalences need equal free ranks")
    return random_hom(rng, G, H, bound, free_block=random_nonsingular(rng, G.free_rank, bound))
