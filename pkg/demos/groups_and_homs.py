"""
Coarse equivalences between finitely generated abelian groups
=============================================================

Smith forms, the finitary flags of a homomorphism, and the free-rank
classification, one cell at a time.
"""

# %%
# Lattice algebra first: the Smith form of a small matrix and the index of
# the lattice its rows span.
from coarsegroups.intlat import lattice_index, smith_normal_form

A = [[2, 4], [6, 8]]
print("invariant factors:", smith_normal_form(A).invariant_factors)
print("index of the row lattice:", lattice_index(A, 2))

# %%
# Doubling on Z has finite kernel and finite-index image, so under the
# finitary ideal it is a coarse equivalence even though it is not onto.
from coarsegroups import FgAbGroup, GroupIdeal, Hom, analyze_hom

Z = FgAbGroup.free(1)
rep = analyze_hom(Hom.scalar(Z, 2), GroupIdeal.finitary(Z), GroupIdeal.finitary(Z))
for name, value in rep.flags.items():
    print(f"{name:32s} {value}")

# %%
# The inclusion of Z as the first axis of Z^2 embeds coarsely but leaves
# an infinite-index image behind.
Z2 = FgAbGroup.free(2)
rep = analyze_hom(Hom.from_rows(Z, Z2, [[1], [0]]), GroupIdeal.finitary(Z), GroupIdeal.finitary(Z2))
print("coarse embedding:", rep.flags["coarse_embedding"], "| image index:", rep.witnesses["image_index"])

# %%
# Torsion is invisible at large scale: only the free rank decides.
from coarsegroups import classify_fg

c = classify_fg(FgAbGroup.parse("Z^2 + Z/6"), FgAbGroup.parse("Z^2 + Z/35"))
print(c.verdict)
for step, h, direction in c.chain:
    print(f"  {direction:8s} {step}: {h}")
print(classify_fg(Z, Z2).verdict)
