"""The quantum sphere as a spectral algebra.

The weight-zero functor keeps one copy of every even irreducible, so
its algebra has one generator per even grade.  At the classical point
mu = 1 the algebra is commutative (functions on the 2-sphere); moving
mu off 1 switches on noncommutativity continuously.
"""
import numpy as np

from tlspectral.qfunctor import make_weight_zero
from tlspectral.spectral import build_algebra, commutativity_probe

print("multiplicity pattern (grades 0..6):")
for mu in (0.4, 0.8, 1.0):
    f = make_weight_zero(mu)
    print(f"  mu={mu}: {[f.dim_irrep(n) for n in range(7)]}")

print("\ncommutator size against mu (largest basis commutator, h-norm):")
for mu in (1.0, 0.9, 0.75, 0.5, 0.3):
    alg = build_algebra(make_weight_zero(mu), 3)
    print(f"  mu={mu:<5} probe = {commutativity_probe(alg):.6f}")

mu = 0.5
alg = build_algebra(make_weight_zero(mu), 3)
x = alg.basis_element(2, 0, 0)
y = alg.basis_element(2, 0, 2)
print(f"\nat mu={mu}: grade-2 generators x, y")
print(f"  ||xy - yx|| = {(x * y - y * x).h_norm():.6f}")
print(f"  x* has grades {sorted((x.star()).grades())}, "
      f"||x||_h = {x.h_norm():.6f}")

# the Haar state kills every nontrivial grade
z = x * y
print(f"  h(xy) = {alg.haar(z):.6f}, grades of xy: {sorted(z.grades())}")

g = alg.gram()
eigs = np.linalg.eigvalsh(g)
print(f"\nHaar Gram matrix: {g.shape[0]} basis elements, "
      f"spectrum in [{eigs.min():.4f}, {eigs.max():.4f}] (faithful state)")
