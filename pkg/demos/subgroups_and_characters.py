"""Word subspace families, their bracket spaces, and characters.

A family of subspaces of the word carriers satisfying the unit,
equivariance, tensor and conjugation conditions plays the role of a
quotient datum; its bracket spaces form the arrow category.  A
*-character on the spectral algebra turns back into such a family via
the maps eta_u[x, t] = chi(c_u[t][x]*).
"""
import numpy as np

from tlspectral.numerics import dagger
from tlspectral.qfunctor import WeightZeroFunctor
from tlspectral.repcat import ObjectWord, rep_category
from tlspectral.spectral import build_algebra, multiplicity_map
from tlspectral.subgroup import (
    SubspaceFamily,
    bracket_space,
    character_from_values,
    character_to_transformation,
    check_family,
    weight_zero_family,
)

MU = 0.5
fam = weight_zero_family(6)
rep = check_family(fam, MU, max_len=5)
print("balanced-string family, words to length 5:")
for key in sorted(rep.residuals):
    print(f"  {key:<26} {rep.residuals[key]:.2e}")

# drop one balanced column: the tensor conditions notice immediately
iso = dict(weight_zero_family(5).isometries)
s = iso[4]
iso[4] = s[:, [c for c in range(s.shape[1]) if s[0b0101, c] == 0]]
bad = check_family(SubspaceFamily(iso), MU, max_len=5)
print(f"\nafter dropping a word-4 column: tensor_product residual "
      f"{bad.residuals['tensor_product']:.2f}")

print("\nbracket space dimensions (weight counting predicts them):")
for p, q in [(1, 1), (2, 2), (1, 3), (1, 2), (3, 3)]:
    print(f"  <H_{p}, H_{q}> : {bracket_space(fam, p, q, MU).dimension}")

cat = rep_category(MU)
bb = bracket_space(fam, 2, 2, MU)
worst = max(bb.span_residual(t) for t in cat.hom_space(2, 2))
print(f"  contains every (2,2) diagram arrow: worst residual {worst:.2e}")

# ---- character -> family, at the classical point
alg = build_algebra(WeightZeroFunctor(1.0), 2)
f = alg.functor

labs = [(n, k, a) for n in range(5) if alg.dim(n) > 0
        for k in range(alg.dim(n)) for a in range(n + 1)]
idx = {lab: c for c, lab in enumerate(labs)}
rows = [np.zeros(len(labs), dtype=np.complex128)]
rows[0][idx[(0, 0, 0)]] = 1.0
rhs = [1.0 + 0j]
for r in range(1, 5):
    mm = multiplicity_map(alg, ObjectWord(r))
    tg = dagger(f.selection(r))
    for t in range(f.dim(r)):
        for xx in range(2 ** r):
            row = np.zeros(len(labs), dtype=np.complex128)
            for lab, c in mm.entries[t][xx].items():
                row[idx[(lab.n, lab.i, lab.a)]] += c
            rows.append(row)
            rhs.append(tg[t, xx])
v, *_ = np.linalg.lstsq(np.stack(rows), np.array(rhs), rcond=None)

chi = character_from_values({lab: v[i] for lab, i in idx.items()})
tr = character_to_transformation(chi, alg, max_word=3)
print(f"\npoint character at mu=1: isometry {tr.isometry_residual:.2e}, "
      f"naturality {tr.naturality_residual:.2e}")
induced = tr.induced_family()
print(f"  induced family dims {[induced.dim(r) for r in range(4)]} "
      f"(balanced family has {[fam.dim(r) for r in range(4)]})")
gap = max(np.abs(induced.projection(r)
                 - weight_zero_family(3).projection(r)).max()
          for r in range(4))
print(f"  projections match the balanced family to {gap:.2e}")
