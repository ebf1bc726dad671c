import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coarsegroups import faults
from coarsegroups.bigrank import (
    BIG,
    BigSubgroup,
    StructuredEndo,
    analyze_structured,
    classif1_check,
    functoriality_audit,
    kernel_rank,
    parse_endo,
    random_endo,
    rank_of_image,
)
from coarsegroups.cardinals import ALEPH0
from coarsegroups.errors import LiteralError, TheoremViolation
from coarsegroups.fgab import FgAbGroup
from oracles import endo_kernel_finite, endo_large_with_complement

seeds = st.integers(0, 2**32 - 1)


def oracle_args(f):
    return f.head.tolist(), f.m, f.c, f.k


def test_image_ranks():
    assert rank_of_image(StructuredEndo.shift(1)) == ALEPH0
    assert rank_of_image(StructuredEndo.zero([[1]])) == 1
    assert rank_of_image(StructuredEndo.zero([[2]])) == 1


def test_shift_and_projection():
    rep = analyze_structured(StructuredEndo.shift(1))
    assert rep.flags["coarse_equivalence"] and rep.witnesses["complement"] == ["e_0"]
    rep = analyze_structured(StructuredEndo.zero([[1]]))
    assert not rep.flags["coarse_equivalence"] and rep.witnesses["kernel_rank"] == "ALEPH0"


def test_scale_two_escapes():
    rep = analyze_structured(StructuredEndo.scale(2))
    assert not rep.flags["coarse_equivalence"]
    assert rep.flags["large_scale_injective"]
    esc = rep.witnesses["escape"]
    assert esc["modulus"] == 2
    # every element of 2G has even coordinates, so e_i is never in 2G + K past K's support
    f = StructuredEndo.scale(2)
    rng = random.Random(0)
    for _ in range(50):
        x = BIG.random_element(rng)
        assert all(a % 2 == 0 for _, a in f(x))


def test_classif1():
    assert classif1_check(BIG) is False
    assert classif1_check(FgAbGroup.free(100)) is True
    assert classif1_check(FgAbGroup.trivial()) is True


def test_functoriality_examples():
    K = BigSubgroup([{0: 1, 1: 1}])
    f = StructuredEndo.shift(1)
    assert BigSubgroup([f(g) for g in K.generators]).rank == 1
    g = StructuredEndo.zero([[1, 2], [0, 0]])
    K = BigSubgroup([BIG.basis_vector(i) for i in range(5)])
    assert BigSubgroup([g(v) for v in K.generators]).rank <= 1
    assert functoriality_audit(samples=200, seed=5)["passed"]


def test_kernel_fault_is_caught():
    with faults.injected("bigrank.kernel"):
        with pytest.raises(TheoremViolation):
            analyze_structured(StructuredEndo.shift(1))


def test_literal():
    f = parse_endo("endo{head: [[1, 2]], tail: shift(3)}")
    assert (f.m, f.c, f.k) == (2, 1, 3)
    assert parse_endo("endo{head: [], tail: scale(-2)}").c == -2
    with pytest.raises(LiteralError):
        parse_endo("endo{head: [[1]], tail: rotate}")


@pytest.mark.parametrize("k", range(1, 11))
def test_shift_powers_are_ce(k):
    f = StructuredEndo.shift(1)
    g = f
    for _ in range(k - 1):
        g = f @ g
    rep = analyze_structured(g)
    assert rep.flags["coarse_equivalence"] and len(rep.witnesses["complement"]) == k
    assert endo_large_with_complement(*oracle_args(g), J=k)
    assert not endo_large_with_complement(*oracle_args(g), J=k - 1)


@given(seeds)
def test_flags_match_truncation_oracle(seed):
    f = random_endo(random.Random(seed))
    rep = analyze_structured(f)
    assert rep.flags["large_scale_injective"] == endo_kernel_finite(*oracle_args(f))
    assert (kernel_rank(f) == ALEPH0) != endo_kernel_finite(*oracle_args(f))
    J = f.m + abs(f.k) + f.m_out + 1
    assert rep.flags["large_scale_surjective"] == endo_large_with_complement(*oracle_args(f), J=J)
    if "complement" in rep.witnesses:
        assert endo_large_with_complement(*oracle_args(f), J=len(rep.witnesses["complement"]))


@given(seeds)
def test_composition_matches_pointwise(seed):
    rng = random.Random(seed)
    f, g = random_endo(rng), random_endo(rng)
    h = g @ f
    for _ in range(10):
        x = BIG.random_element(rng, 6)
        assert h(x) == g(f(x))
