"""
Spans, big groups and covers of Z^d
===================================

Formal inverses of coarse equivalences as spans, the structured
endomorphisms of a countable direct sum of copies of Z, and colored covers
that bound asymptotic dimension.
"""

# %%
# The span Z <-x2- Z -id-> Z is a formal inverse of doubling; composing it
# with itself gives 1/4 in the rational model.
from coarsegroups.cgcat import compose_spans, parse_span, rationalize, spans_equivalent

half = parse_span("span{apex: Z, left: [[2]], right: [[1]]}")
quarter = compose_spans(half, half)
print("rational form:", rationalize(quarter).tolist())
padded = parse_span("span{apex: Z + Z/6, source: Z, target: Z, left: [[2, 0]], right: [[1, 0]]}",
                    normalize=False)
print("torsion in the apex changes nothing:", spans_equivalent(half, padded).verdict)

# %%
# On the direct sum of countably many copies of Z, the shift is a coarse
# equivalence (its image misses only e_0) while doubling is not: e_i escapes
# every 2G + K.
from coarsegroups.bigrank import StructuredEndo, analyze_structured

for f in (StructuredEndo.shift(1), StructuredEndo.scale(2)):
    rep = analyze_structured(f)
    print(f, "->", rep.flags["coarse_equivalence"], rep.witnesses)

# %%
# Two families of intervals cover Z so that each family is S-disjoint;
# three families of bricks do the same for Z^2.
import numpy as np

from coarsegroups.geom import Separation, check_cover, make_asdim_witness, merge_families

w = make_asdim_witness(2, Separation.box(2), 30)
print("families:", len(w.families), "| check:", check_cover(w).ok)
print("one family is not enough:", check_cover(merge_families(make_asdim_witness(1, Separation.box(1), 30))).violation)

grid = np.full((13, 13), ".", dtype="<U1")
for color, fam in enumerate(w.families):
    for U in fam:
        lo = [max(a, -6) + 6 for a in U.lo]
        hi = [min(b, 6) + 6 for b in U.hi]
        if all(a <= b for a, b in zip(lo, hi)):
            grid[lo[1]:hi[1] + 1, lo[0]:hi[0] + 1] = "abc"[color]
print("\n".join("".join(row) for row in grid[::-1]))
