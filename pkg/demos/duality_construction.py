"""From a functor to its dense spectral *-algebra and back.

Basis elements are indexed (grade, functor index, carrier index); the
product runs through fusion cells, the involution through the pushed
conjugate solutions, and the Haar state reads off the grade-0 part.
"""
import numpy as np

from tlspectral.numerics import dagger
from tlspectral.qfunctor import make_embedding, make_fiber
from tlspectral.spectral import (
    build_algebra,
    haar_inner_product,
    induce_isomorphism,
    multiplicity_map,
)
from tlspectral.tlcat import DualityDatum

alg = build_algebra(make_embedding(0.5), 3)
print(f"embedding algebra at mu=0.5, grades {alg.grades}, "
      f"{len(alg.basis())} basis elements")

rng = np.random.default_rng(0)
rand = lambda: alg.element({lab: complex(*rng.standard_normal(2))
                            for lab in alg.basis()})
x, y, z = rand(), rand(), rand()
print(f"  associator   {((x * y) * z - x * (y * z)).h_norm():.2e}")
print(f"  (xy)* - y*x* {((x * y).star() - y.star() * x.star()).h_norm():.2e}")

# same number, two routes: structure constants vs the closed form
v = haar_inner_product(x, y)
print(f"  h(x* y) = {v:.6f} (routes agree)")

mm = multiplicity_map(alg, 2)
print(f"  grade-2 multiplicity map {mm.shape}, "
      f"coisometry defect {mm.coisometry_residual():.2e}")

# rotating the duality datum by a unitary changes nothing up to a
# verified *-isomorphism
mu = 0.2
s = 1 + mu * mu
lam = float(np.sqrt((s + np.sqrt(s * s - 16 * mu * mu)) / 4))
d0 = DualityDatum.pair_blocks(mu, [lam, lam])
fib = build_algebra(make_fiber(mu, d0), 2)

q, _ = np.linalg.qr(rng.standard_normal((4, 4))
                    + 1j * rng.standard_normal((4, 4)))
other = build_algebra(make_fiber(mu, DualityDatum(
    4, mu, q @ d0.j_mat @ q.T)), 2)

u_map = {}
for n in range(5):
    qn = np.eye(1, dtype=np.complex128)
    for _ in range(n):
        qn = np.kron(qn, q)
    u_map[n] = dagger(other.functor.carrier_isometry(n)) \
        @ qn @ fib.functor.carrier_isometry(n)
iso = induce_isomorphism(u_map, fib, other)
a, b = fib.basis_element(1, 2, 0), fib.basis_element(2, 7, 1)
print(f"\nrotated fiber datum: naturality {iso.naturality_residual:.2e}, "
      f"sample {iso.sample_residual:.2e}")
print(f"  phi(ab) - phi(a)phi(b): "
      f"{(iso(a * b) - iso(a) * iso(b)).h_norm():.2e}")
