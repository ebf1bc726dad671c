import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coarsegroups import faults
from coarsegroups.coarse import GroupIdeal
from coarsegroups.errors import DomainError, LiteralError, TheoremViolation
from coarsegroups.fgab import FgAbGroup
from coarsegroups.quasihom import (
    AbsValue,
    AffineFloor,
    Compose,
    HomMap,
    LargestEvenBelow,
    Table,
    coarse_inverse_is_qh_check,
    compose_qh,
    defect,
    parse_qhmap,
    perturb_and_check,
    section_as_coarse_inverse,
)
from oracles import brute_defects

Z = FgAbGroup.free(1)
SMALL = (50, 100)


def floor_half(x):
    return x // 2


def test_floor_half_matches_brute_force():
    rep = defect(AffineFloor(Fraction(1, 2)), SMALL)
    assert rep.verdict == "CERTIFIED_ON_WINDOW"
    assert {d for (d,) in rep.defect_set()} == brute_defects(floor_half, 100) == {0, 1}


def test_largest_even_below():
    rep = defect(LargestEvenBelow(), SMALL)
    assert rep.certified
    leb = lambda x: x - 2 + x % 2  # noqa: E731
    assert {d for (d,) in rep.defect_set()} == brute_defects(leb, 100) == {0, 2}


def test_abs_is_rejected_with_growth_witness():
    rep = defect(AbsValue(), (100, 200))
    assert rep.verdict == "REJECTED"
    (x, y), d = rep.witnesses[200]
    assert (x, y) == ((200,), (-200,)) and d == (-400,)


def test_hom_maps_have_zero_defect():
    assert defect(HomMap.scalar(7), SMALL).defect_set() == {(0,)}
    assert defect(parse_qhmap("hom [[1, 2], [3, -1]]"), (30,), samples=5000).defect_set() == {(0, 0)}


def test_translation_defect():
    g = AffineFloor(1, 5)
    rep = defect(g, SMALL)
    assert rep.certified and rep.defect_set() == {(-5,)}
    assert set(rep.M) >= {(-5,), (5,)}


def test_finite_perturbation_stays_certified():
    f = AffineFloor(Fraction(1, 2))
    g = Table({0: 17}, f)
    v = perturb_and_check(f, g, SMALL)
    assert v.assertion == "HOLDS" and v.g_report.certified


def test_unbounded_difference_is_not_applicable():
    v = perturb_and_check(HomMap.identity(), HomMap.scalar(2), SMALL)
    assert v.assertion == "NOT_APPLICABLE"


def test_compositions():
    half = AffineFloor(Fraction(1, 2))
    c = compose_qh(half, half, SMALL)
    assert c.composite.certified and c.assertion == "HOLDS"
    c = compose_qh(HomMap.scalar(2), HomMap.scalar(3), SMALL)
    assert c.composite.defect_set() == {(0,)}


def test_abs_through_bounded_then_finitary():
    bounded = GroupIdeal.bounded(Z)
    inner = AbsValue().retarget(bounded)
    assert defect(inner, SMALL).certified
    outer = HomMap.identity().with_source_ideal(bounded)
    c = compose_qh(outer, inner, SMALL)
    assert c.composite.verdict == "REJECTED"
    assert not c.outer_bornologous and c.assertion == "NOT_APPLICABLE"


def test_mismatched_ideals_do_not_compose():
    inner = AbsValue().retarget(GroupIdeal.bounded(Z))
    with pytest.raises(DomainError):
        compose_qh(HomMap.identity(), inner, SMALL)


def test_sections():
    res = section_as_coarse_inverse(LargestEvenBelow(), SMALL)
    assert res.report.certified and res.roundtrip and res.assertion == "HOLDS"
    for t in range(-10, 11):
        x = res.section(t)[0]
        assert LargestEvenBelow()(x)[0] == 2 * t
        assert all(abs(z) >= abs(x) for z in range(-40, 41) if LargestEvenBelow()(z)[0] == 2 * t)
    res = section_as_coarse_inverse(AffineFloor(Fraction(1, 2)), SMALL)
    assert all(floor_half(res.section(t)[0]) == t for t in range(-20, 21))
    res = section_as_coarse_inverse(HomMap.identity(), SMALL)
    assert all(res.section(t)[0] == t for t in range(-20, 21))


def test_coarse_inverses():
    halving = Compose(AffineFloor(Fraction(1, 2)), LargestEvenBelow())
    v = coarse_inverse_is_qh_check(HomMap.scalar(2), halving, SMALL)
    assert v.assertion == "HOLDS" and v.g_report.certified
    v = coarse_inverse_is_qh_check(HomMap.identity(), HomMap.identity(), SMALL)
    assert v.assertion == "HOLDS"
    v = coarse_inverse_is_qh_check(AffineFloor(Fraction(1, 3)), HomMap.scalar(3), SMALL)
    assert max(abs(d) for (d,) in v.displacement_fg) <= 2
    assert v.f_report.certified and v.g_report.certified


def test_symbolic_fault_is_caught():
    with faults.injected("quasihom.symbolic"):
        with pytest.raises(TheoremViolation):
            defect(AffineFloor(Fraction(1, 2)), SMALL)


def test_literals():
    assert repr(parse_qhmap("floor(1/2, 1/3; 5)")) == "floor(1/2,1/3; 5)"
    assert isinstance(parse_qhmap("compose(abs, floor(1/2))"), Compose)
    with pytest.raises(LiteralError):
        parse_qhmap("sin")


@given(st.integers(-9, 9), st.integers(1, 8), st.integers(0, 7))
def test_affine_floor_window_equals_brute_force(p, q, b):
    f = AffineFloor(Fraction(p, q), Fraction(b % q, q))
    rep = defect(f, (40,))
    ref = brute_defects(lambda x: math.floor(Fraction(p, q) * x + Fraction(b % q, q)), 40)
    assert {d for (d,) in rep.defect_set()} == ref
    assert rep.certified
    assert rep.defect_set() <= f.symbolic_defect()


@given(st.integers(-9, 9), st.integers(1, 6), st.integers(-5, 5), st.integers(1, 4), st.integers(-3, 3))
def test_composition_and_closeness_stability(p, q, p2, q2, shift):
    f = AffineFloor(Fraction(p, q))
    outer = AffineFloor(Fraction(p2, q2))
    c = compose_qh(outer, f, (40, 80))
    assert c.assertion == "HOLDS"
    g = AffineFloor(f.slopes, f.offset + shift)
    assert perturb_and_check(f, g, (40, 80)).assertion == "HOLDS"
