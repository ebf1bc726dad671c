import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy import Matrix

from coarsegroups import faults
from coarsegroups.cgcat import (
    HomClass,
    RationalMap,
    Span,
    check_homotopical_axioms,
    compose_spans,
    hom_span,
    identity_span,
    is_ce,
    ore_square,
    parse_span,
    rationalize,
    spans_equivalent,
)
from coarsegroups.coarse import GroupIdeal, are_close
from coarsegroups.errors import DomainError, LiteralError
from coarsegroups.fgab import FgAbGroup, Hom
from coarsegroups.randomgen import random_ce_hom, random_group, random_hom

Z = FgAbGroup.free(1)
seeds = st.integers(0, 2**32 - 1)
HALVING = "span{apex: Z, left: [[2]], right: [[1]]}"


def q(*rows):
    return RationalMap.of(rows, len(rows), len(rows[0]))


def random_span(rng, X, Y, max_torsion=6):
    P = FgAbGroup(X.free_rank, random_group(rng, 0, max_torsion).torsion)
    return Span(random_ce_hom(rng, P, X), random_hom(rng, P, Y, 3))


def test_rational_forms():
    h = parse_span(HALVING)
    assert rationalize(h) == q([Fraction(1, 2)])
    hh = compose_spans(h, h)
    assert rationalize(hh) == q([Fraction(1, 4)])
    assert hh.left.matrix.tolist() == [[4]]
    four = hom_span(Hom.scalar(Z, 4))
    assert rationalize(compose_spans(four, h)) == q([2])
    assert rationalize(compose_spans(identity_span(Z), identity_span(Z))) == q([1])
    assert rationalize(HomClass(Hom.scalar(Z, 2))) == q([2])
    G = FgAbGroup.parse("Z + Z/2")
    assert rationalize(Hom.from_rows(G, Z, [[1, 0]])) == q([1])


def test_span_equivalence_examples():
    h = parse_span(HALVING)
    padded = parse_span(
        "span{apex: Z + Z/6, source: Z, target: Z, left: [[2, 0]], right: [[1, 0]]}", normalize=False
    )
    res = spans_equivalent(h, padded)
    assert res.verdict == "EQUIVALENT" and res.witness["found"]
    assert spans_equivalent(h, identity_span(Z)).verdict == "NOT_EQUIVALENT"
    assert spans_equivalent(h, h).equivalent


def test_ore_examples():
    sq = ore_square(Hom.scalar(Z, 2), Hom.scalar(Z, 3))
    assert sq.w_prime.matrix.tolist() == [[2]] and sq.f_prime.matrix.tolist() == [[3]]
    assert is_ce(sq.w_prime)
    f = Hom.scalar(Z, 5)
    sq = ore_square(Hom.identity(Z), f)
    assert is_ce(sq.w_prime)
    assert rationalize(sq.f_prime) == rationalize(f) @ rationalize(sq.w_prime)
    G = FgAbGroup.parse("Z + Z/2")
    sq = ore_square(Hom.from_rows(G, Z, [[1, 0]]), Hom.identity(Z))
    assert sq.w_prime.source == G and is_ce(sq.w_prime)
    with pytest.raises(DomainError):
        ore_square(Hom.zero(Z, Z), Hom.identity(Z))


def test_axiom_examples():
    G = FgAbGroup.parse("Z + Z/2")
    w = Hom.from_rows(G, G, [[2, 0], [0, 1]])
    f = Hom.identity(G)
    g = Hom.from_rows(G, G, [[1, 0], [1, 1]])
    assert are_close(w @ f, w @ g, GroupIdeal.finitary(G)).close
    assert are_close(f, g, GroupIdeal.finitary(G)).close
    a, b, c = Hom.scalar(Z, 2), Hom.scalar(Z, 3), Hom.scalar(Z, 5)
    assert all(is_ce(m) for m in (a, b, c, b @ a, c @ b, c @ b @ a))
    assert check_homotopical_axioms(samples=100, seed=1)["passed"]


def test_left_leg_must_be_ce_and_literals_checked():
    with pytest.raises(DomainError):
        parse_span("span{apex: Z, left: [[0]], right: [[1]]}")
    with pytest.raises(LiteralError):
        parse_span("span{apex: Z, left: [[2]]}")


def test_rational_fault_breaks_functoriality():
    h = parse_span(HALVING)
    with faults.injected("cgcat.rational"):
        assert rationalize(compose_spans(h, h)) != rationalize(h) @ rationalize(h)


@given(seeds)
def test_rationalize_is_functorial_on_homs(seed):
    rng = random.Random(seed)
    G, H, K = (random_group(rng, 3, 6) for _ in range(3))
    f, g = random_hom(rng, G, H), random_hom(rng, H, K)
    assert rationalize(g @ f) == rationalize(g) @ rationalize(f)


@given(seeds)
def test_rationalize_inverts_exactly_ce(seed):
    rng = random.Random(seed)
    G, H = random_group(rng, 3, 6), random_group(rng, 3, 6)
    if rng.random() < 0.5:
        H = FgAbGroup(G.free_rank, H.torsion)
    f = random_hom(rng, G, H, 2)
    B = f.free_block()
    oracle = G.free_rank == H.free_rank and (G.free_rank == 0 or Matrix(B).det() != 0)
    assert is_ce(f) == oracle == rationalize(f).is_invertible


@given(seeds)
def test_span_composition_is_functorial_associative_unital(seed):
    rng = random.Random(seed)
    r = rng.randint(1, 2)
    X, Y, W, V = (FgAbGroup(r, random_group(rng, 0, 6).torsion) for _ in range(4))
    a, b, c = random_span(rng, X, Y), random_span(rng, Y, W), random_span(rng, W, V)
    ab = compose_spans(a, b)
    assert rationalize(ab) == rationalize(b) @ rationalize(a)
    left = compose_spans(ab, c)
    right = compose_spans(a, compose_spans(b, c))
    assert spans_equivalent(left, right, search_bound=2).equivalent
    assert spans_equivalent(compose_spans(identity_span(X), a), a, search_bound=2).equivalent
    assert spans_equivalent(compose_spans(a, identity_span(Y)), a, search_bound=2).equivalent


@given(seeds)
def test_closeness_classes_embed_rationally_on_free_sources(seed):
    rng = random.Random(seed)
    G = FgAbGroup.free(rng.randint(1, 3))
    H = random_group(rng, 3, 6)
    f, g = random_hom(rng, G, H, 2), random_hom(rng, G, H, 2)
    if rng.random() < 0.5:
        # same free block, different torsion rows
        g = Hom.from_rows(G, H, [list(rf) if i < H.free_rank else list(rg)
                                 for i, (rf, rg) in enumerate(zip(f.matrix.rows(), g.matrix.rows()))])
    close = are_close(f, g, GroupIdeal.finitary(H)).close
    assert close == (rationalize(f) == rationalize(g))
    assert close == (HomClass(f) == HomClass(g))


@given(seeds)
def test_ore_squares_commute_with_ce_leg(seed):
    rng = random.Random(seed)
    r = rng.randint(0, 2)
    X, Z_ = FgAbGroup(r, random_group(rng, 0, 6).torsion), FgAbGroup(r, random_group(rng, 0, 6).torsion)
    Y = random_group(rng, 2, 6)
    w = random_ce_hom(rng, X, Z_)
    f = random_hom(rng, Y, Z_, 3)
    sq = ore_square(w, f)
    assert (w @ sq.f_prime).matrix == (f @ sq.w_prime).matrix
    assert is_ce(sq.w_prime)


@given(seeds)
def test_witness_channel_never_contradicts_rational_channel(seed):
    rng = random.Random(seed)
    r = rng.randint(1, 2)
    X, Y = FgAbGroup(r, ()), FgAbGroup(r, random_group(rng, 0, 6).torsion)
    s1 = random_span(rng, X, Y)
    if rng.random() < 0.5:
        s2 = random_span(rng, X, Y)
    else:
        u = random_ce_hom(rng, s1.apex, s1.apex)
        s2 = Span(s1.left @ u, s1.right @ u)
    res = spans_equivalent(s1, s2, search_bound=3, max_candidates=2000)
    # the pullback of the left legs is a witness whenever the rational forms agree
    assert bool(res.witness) == res.equivalent
