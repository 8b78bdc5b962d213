"""Tour of the planar diagram layer.

Diagrams are noncrossing pairings of boundary points; stacking them
composes arrows between tensor powers of the fundamental space, a
closed loop is worth delta = mu + 1/mu.  The Wenzl recursion cuts out
the top irreducible of each tensor power.
"""
import numpy as np

from tlspectral.tlcat import (
    DualityDatum,
    LoopParameter,
    compose,
    evaluate,
    jones_wenzl,
    q_number,
    tl_basis,
)

mu = 0.5
delta = mu + 1 / mu
loop = LoopParameter(delta)

print("== counting diagrams ==")
# planar (n -> n) diagrams are counted by Catalan numbers
for n in range(1, 7):
    print(f"  hom({n},{n}) has {len(tl_basis(n, n))} diagrams")

print("\n== loop value and q-integers ==")
print(f"  delta = mu + 1/mu = {delta}")
for k in range(1, 6):
    print(f"  [{k}] = {q_number(k, delta):.6f}")

print("\n== the Wenzl idempotent ==")
p3 = jones_wenzl(3, loop)
print(f"  p_3 is a combination of {len(p3.coeffs)} diagrams")
# idempotent in the diagram algebra: p p = p
sq = compose(p3, p3, loop)
diff = {d: c for d, c in sq.coeffs.items()}
for d, c in p3.coeffs.items():
    diff[d] = diff.get(d, 0.0) - c
print(f"  ||p_3 p_3 - p_3|| = {max(abs(c) for c in diff.values()):.2e}")

print("\n== evaluating through a duality datum ==")
datum = DualityDatum.standard(mu)
m = evaluate(p3, datum)
print(f"  evaluated p_3 has shape {m.shape}")
# the cup / cap pair contracts to -mu on the nose
cup = tl_basis(0, 2)[0]
cap = tl_basis(2, 0)[0]
z = evaluate(cap, datum) @ evaluate(cup, datum)
print(f"  cap after cup = {complex(z[0, 0]):.4f} "
      f"(loop value {1 + mu**2:.4f} on the matrix side)")

print("\n== a bigger datum ==")
# two pair blocks at mu = 0.2 give a 4-dimensional fundamental space
s = 1 + 0.2 ** 2
lam = float(np.sqrt((s + np.sqrt(s * s - 16 * 0.2 ** 2)) / 4))
big = DualityDatum.pair_blocks(0.2, [lam, lam])
print(f"  dim = {big.dim}, loop check = "
      f"{np.vdot(big.R_vec, big.R_vec).real:.4f} = 1 + mu^2")
