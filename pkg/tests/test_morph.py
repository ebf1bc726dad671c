import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from coarsegroups import faults
from coarsegroups.cardinals import ALEPH0
from coarsegroups.coarse import GroupIdeal
from coarsegroups.errors import TheoremViolation
from coarsegroups.fgab import FgAbGroup, Hom, Subgroup
from coarsegroups.morph import (
    analyze_hom,
    classify_fg,
    consistency_classif2,
    invariant_ideal,
    quotient_is_ce,
)
from coarsegroups.randomgen import random_group, random_hom
from oracles import finitary_ce, generated

Z = FgAbGroup.free(1)
Z2 = FgAbGroup.free(2)
seeds = st.integers(0, 2**32 - 1)


def fin(G):
    return GroupIdeal.finitary(G)


def test_examples():
    assert analyze_hom(Hom.scalar(Z, 2), fin(Z), fin(Z)).coarse_equivalence
    G = FgAbGroup.parse("Z + Z/2")
    assert analyze_hom(Hom.from_rows(G, Z, [[1, 0]]), fin(G), fin(Z)).coarse_equivalence
    rep = analyze_hom(Hom.from_rows(Z, Z2, [[1], [0]]), fin(Z), fin(Z2))
    assert rep.bornologous and rep.effectively_proper and not rep.large_scale_surjective
    assert rep.witnesses["image_index"] == "ALEPH0"
    assert not analyze_hom(Hom.zero(Z, Z), fin(Z), fin(Z)).large_scale_injective


def test_quotient_examples():
    G = FgAbGroup.parse("Z + Z/4")
    assert quotient_is_ce(G, Subgroup.torsion_subgroup(G), fin(G))
    assert not quotient_is_ce(Z, Subgroup(Z, [(2,)]), fin(Z))
    N = Subgroup(Z2, [(1, 0)])
    assert quotient_is_ce(Z2, N, GroupIdeal.linear(N))


def test_classify_examples():
    c = classify_fg(FgAbGroup.parse("Z^2 + Z/6"), FgAbGroup.parse("Z^2 + Z/35"))
    assert c.verdict == "COARSELY_EQUIVALENT" and c.chain
    assert classify_fg(Z, Z2).verdict == "NOT_COARSELY_EQUIVALENT"
    assert classify_fg(FgAbGroup.trivial(), FgAbGroup.cyclic(7)).equivalent


def test_classif2_examples():
    Z4, Z9 = FgAbGroup.cyclic(4), FgAbGroup.cyclic(9)
    res = consistency_classif2(Hom.zero(Z4, Z9), "r0")
    assert res.verdict == "HOLDS"
    # under the torsion-linear ideal, x0 on Z is not a coarse equivalence
    assert consistency_classif2(Hom.zero(Z, Z), "ell").verdict == "NOT_APPLICABLE"
    from coarsegroups.bigrank import StructuredEndo

    res = consistency_classif2(StructuredEndo.shift(1), "r0")
    assert res.verdict == "HOLDS" and res.values == (ALEPH0, ALEPH0)


def test_unsupported_pairs_are_reported_not_guessed():
    I = GroupIdeal.custom(Z, [[(0,), (1,)]])
    rep = analyze_hom(Hom.identity(Z), I, I)
    assert not rep.supported
    assert rep.as_dict()["flags"]["coarse_equivalence"] == "UNSUPPORTED"


def test_fault_trips_the_cross_check():
    with faults.injected("morph.ce"):
        with pytest.raises(TheoremViolation):
            analyze_hom(Hom.scalar(Z, 2), fin(Z), fin(Z))


@given(seeds)
def test_finitary_flags_match_rank_oracle(seed):
    rng = random.Random(seed)
    G, H = random_group(rng, 4, 12), random_group(rng, 4, 12)
    f = random_hom(rng, G, H)
    rep = analyze_hom(f, fin(G), fin(H))
    ref = finitary_ce(f.free_block(), G.free_rank, H.free_rank)
    for k, v in ref.items():
        assert rep.flags[k] == v, k


def _random_subgroup(rng, G):
    gens = [G.reduce([rng.randint(0, 11) for _ in range(G.dim)]) for _ in range(rng.randint(0, 2))]
    return Subgroup(G, gens), gens


@given(seeds)
def test_linear_flags_match_element_enumeration(seed):
    from oracles import finite_flags

    rng = random.Random(seed)
    G = FgAbGroup(0, random_group(rng, 0, 12).torsion)
    H = FgAbGroup(0, random_group(rng, 0, 12).torsion)
    f = random_hom(rng, G, H)
    A, ga = _random_subgroup(rng, G)
    B, gb = _random_subgroup(rng, H)
    rep = analyze_hom(f, GroupIdeal.linear(A), GroupIdeal.linear(B))
    ref = finite_flags(f.matrix.tolist(), G.torsion, H.torsion, generated(ga, G.torsion), generated(gb, H.torsion))
    for k, v in ref.items():
        assert rep.flags[k] == v, k


@given(seeds)
def test_implication_lattice(seed):
    rng = random.Random(seed)
    G, H = random_group(rng, 2, 6), random_group(rng, 2, 6)
    f = random_hom(rng, G, H, 2)
    for kind_g, kind_h in [("finitary", "bounded"), ("bounded", "finitary"), ("discrete", "finitary"),
                           ("finitary", "linear"), ("linear", "linear")]:
        def ideal(kind, X):
            if kind == "linear":
                return GroupIdeal.linear(_random_subgroup(rng, X)[0])
            return getattr(GroupIdeal, kind)(X)

        rep = analyze_hom(f, ideal(kind_g, G), ideal(kind_h, H))
        fl = rep.flags
        if fl["effectively_proper"]:
            assert fl["uniformly_bounded_copreserving"]
        if fl["large_scale_injective"] and fl["uniformly_bounded_copreserving"]:
            assert fl["effectively_proper"]
        assert fl["coarse_equivalence"] == (fl["bornologous"] and fl["effectively_proper"]
                                           and fl["large_scale_surjective"])


@given(seeds)
def test_classification_iff_free_rank(seed):
    rng = random.Random(seed)
    G, H = random_group(rng, 3, 12), random_group(rng, 3, 12)
    c = classify_fg(G, H)
    assert c.equivalent == (G.free_rank == H.free_rank)
    for _, h, _ in c.chain:
        assert analyze_hom(h, fin(h.source), fin(h.target)).coarse_equivalence


def test_invariant_ideal_shapes():
    G = FgAbGroup.parse("Z + Z/4")
    assert invariant_ideal(G, "r0") == GroupIdeal.bounded(G)
    assert invariant_ideal(G, "ell") == GroupIdeal.linear(Subgroup.torsion_subgroup(G))
