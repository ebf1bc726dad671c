"""
Quasi-homomorphisms on windows
==============================

Defect sets measured on growing windows, a symbolic bound for the affine
floor family, and the section of a surjective quasi-homomorphism.
"""

from fractions import Fraction

from coarsegroups.quasihom import (
    AbsValue,
    AffineFloor,
    Compose,
    HomMap,
    LargestEvenBelow,
    coarse_inverse_is_qh_check,
    defect,
    section_as_coarse_inverse,
)

radii = (250, 500, 1000)

# %%
# Rounding down half of x misses additivity by at most one.
rep = defect(AffineFloor(Fraction(1, 2)), radii)
print(rep.verdict, sorted(d for (d,) in rep.defect_set()))

# %%
# Rounding down to an even number strictly below x: defects 0 and 2.
rep = defect(LargestEvenBelow(), radii)
print(rep.verdict, sorted(d for (d,) in rep.defect_set()))

# %%
# The absolute value is not a quasi-homomorphism. The defect at (r, -r) is
# -2r, and it keeps growing with the window.
rep = defect(AbsValue(), radii)
print(rep.verdict)
for r, (pair, d) in sorted(rep.witnesses.items()):
    print(f"  r={r:5d}  pair={pair}  defect={d}")

# %%
# A minimal section of largest-even-below is a coarse inverse, and halving
# undoes doubling up to a bounded error.
sec = section_as_coarse_inverse(LargestEvenBelow(), (100, 200))
print("section:", [sec.section(t)[0] for t in range(-3, 4)], sec.assertion)
halving = Compose(AffineFloor(Fraction(1, 2)), LargestEvenBelow())
print("halving inverts x2:", coarse_inverse_is_qh_check(HomMap.scalar(2), halving, (100, 200)).assertion)
