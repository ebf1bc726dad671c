import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coarsegroups.coarse import GroupIdeal
from coarsegroups.errors import DomainError, LiteralError
from coarsegroups.fgab import FgAbGroup, Subgroup
from coarsegroups.geom import (
    Box,
    CoverWitness,
    PeriodicSet,
    Separation,
    check_cover,
    check_periodic_cover,
    dlt_vs_small,
    is_cellular,
    is_large,
    is_small,
    make_asdim_witness,
    make_periodic_witness,
    merge_families,
    parse_periodic_set,
    smallness_certificate,
)
from oracles import box_cover_ok, max_gap_on_window, periodic_members, small_on_window

Z = FgAbGroup.free(1)


def intervals(W, length, families):
    """Consecutive intervals of ``length`` covering ``[-W, W]``, dealt round-robin."""
    fams = [[] for _ in range(families)]
    for n, a in enumerate(range(-W, W + 1, length)):
        fams[n % families].append(Box((a,), (a + length - 1,)))
    return fams


def test_interval_witness_two_families_versus_one():
    S = Separation.of(range(-3, 4))
    good = CoverWitness(1, 100, intervals(100, 10, 2), 9, S)
    assert check_cover(good).ok
    bad = CoverWitness(1, 100, intervals(100, 10, 1), 9, S)
    res = check_cover(bad)
    assert not res.ok and res.violation["kind"] == "not S-disjoint"


def test_single_block_is_flagged():
    w = CoverWitness(1, 50, [[Box((-50,), (50,))]], 100, Separation.box(1))
    res = check_cover(w)
    assert res.ok and res.unbounded_suspect


def test_uncovered_and_oversized_blocks_are_found():
    S = Separation.box(0)
    gap = CoverWitness(1, 10, [[Box((-10,), (-1,)), Box((1,), (10,))]], 9, S)
    res = check_cover(gap)
    assert not res.ok and res.violation == {"kind": "uncovered point", "point": [0]}
    big = CoverWitness(1, 10, [[Box((-10,), (10,))]], 5, S)
    assert check_cover(big).violation["kind"] == "unbounded block"


@pytest.mark.parametrize("d, S, W", [(1, [-1, 0, 1], 100), (1, [0], 10), (2, Separation.box(2), 60)])
def test_generated_witnesses(d, S, W):
    w = make_asdim_witness(d, S, W)
    assert len(w.families) == d + 1
    assert check_cover(w).ok
    if d == 1 and S == [0]:
        assert w.K_radius + 1 == 2


def test_unsupported_dimension():
    with pytest.raises(DomainError):
        make_asdim_witness(3, Separation.box(1), 5)


@given(st.integers(1, 2), st.integers(0, 6), st.integers(1, 40))
def test_checker_agrees_with_painting_oracle(d, s, W):
    w = make_asdim_witness(d, Separation.box(s), W)
    fams = [[(U.lo, U.hi) for U in f] for f in w.families]
    assert check_cover(w).ok == box_cover_ok(fams, W, d, s, w.K_radius)
    merged = merge_families(w)
    assert check_cover(merged).ok == box_cover_ok([sum(fams, [])], W, d, s, w.K_radius)


@given(st.integers(1, 2), st.integers(0, 30))
def test_periodic_check_agrees_with_explicit_check(d, s):
    pc = make_periodic_witness(d, Separation.box(s))
    assert check_periodic_cover(pc).ok
    W = 3 * (2 * s + 2) + 5
    assert check_cover(pc.explicit(W)).ok
    # bound set depends on S only
    assert pc.explicit(W).K_radius == pc.explicit(2 * W).K_radius


@given(st.integers(1, 20), st.integers(1, 200))
def test_merged_families_fail(s, W):
    w = make_asdim_witness(1, Separation.box(s), W)
    assert not check_cover(merge_families(w)).ok


def test_cellularity():
    assert not is_cellular(GroupIdeal.finitary(Z))
    assert is_cellular(GroupIdeal.linear(Subgroup(Z, [(2,)])))
    assert is_cellular(GroupIdeal.finitary(FgAbGroup.cyclic(6)))
    assert is_cellular(GroupIdeal.bounded(Z)) and is_cellular(GroupIdeal.discrete(Z))


def test_small_set_examples():
    A = PeriodicSet.make(1, toggles=[1, 5, 9])
    assert is_small(A) and smallness_certificate(A)["elements"] == [1, 5, 9]
    A = PeriodicSet.make(2, [0])
    assert is_large(A) and not is_small(A)
    assert smallness_certificate(A)["killing_large_set"] == str(PeriodicSet.make(2, [0]))
    A = PeriodicSet.make(1, [0], [0])
    assert is_large(A) and not is_small(A) and 0 not in A


@pytest.mark.parametrize("text, expected", [
    ("periodic{m: 1, residues: [], except: [+1, +5, +9]}", True),
    ("periodic{m: 3, residues: [1], except: []}", False),
    ("periodic{m: 2, residues: [0], except: [+0, +2]}", False),
])
def test_dlt_examples(text, expected):
    r = dlt_vs_small(parse_periodic_set(text))
    assert r.in_D_less == r.in_S == expected and r.equal_here


def test_literal_round_trip():
    A = parse_periodic_set("periodic{m: 6, residues: [1,3], except: [+7, -1]}")
    assert 7 not in A and -1 in A and 1 in A and 3 in A and 9 in A
    assert parse_periodic_set(str(A)) == A
    # minimal period
    assert parse_periodic_set("periodic{m: 4, residues: [0, 2], except: []}").m == 2
    with pytest.raises(LiteralError):
        parse_periodic_set("primes")


periodic_sets = st.builds(
    lambda m, mask, F: PeriodicSet.make(m, [r for r in range(m) if mask >> r & 1], F),
    st.integers(1, 12),
    st.integers(0, 2**12 - 1),
    st.lists(st.integers(-40, 40), max_size=4),
)


@given(periodic_sets)
def test_members_match_definition(A):
    ref = periodic_members(A.m, A.residues, A.exceptions, -60, 60)
    assert A.members(-60, 60).tolist() == ref


@given(periodic_sets)
def test_is_small_matches_window_oracle(A):
    assert is_small(A) == small_on_window(A.m, A.residues, A.exceptions, 400)


@given(periodic_sets, periodic_sets)
def test_small_sets_do_not_destroy_large_sets(A, L):
    if not (is_small(A) and is_large(L)):
        return
    rest = set(L.members(-800, 800).tolist()) - set(A.members(-800, 800).tolist())
    # bounded gaps: the largest gap does not grow with the window
    assert max_gap_on_window(rest, 400) == max_gap_on_window(rest, 800) <= 2 * 12 + 8 * 2


@given(periodic_sets)
def test_dlt_agrees_with_smallness(A):
    r = dlt_vs_small(A)
    assert r.equal_here
    assert r.in_D_less == (len(A.members(-500, 500)) == len(A.members(-1000, 1000)))


def test_random_sets_are_reproducible():
    rng = random.Random(3)
    sets = [PeriodicSet.make(rng.randint(1, 6), [rng.randrange(6)], [rng.randint(-9, 9)]) for _ in range(5)]
    assert all(dlt_vs_small(A).equal_here for A in sets)
