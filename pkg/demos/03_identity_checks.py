"""
Residue sums, quadrature and the pair mechanism
===============================================

On a random inhomogeneous XXX chain, compare the residue evaluation of F
with trapezoidal quadrature, then watch the residue pairs cancel on a
solution and fail to cancel once a root is nudged.
"""

import numpy as np

from bethekit import (IdentityQuery, ModelSpec, Sector, eval_F, eval_F_quadrature, residue_pair,
                      solve)

rng = np.random.default_rng(2)
z = tuple(rng.normal(size=3) + 1j * rng.normal(size=3))
spec = ModelSpec.xxx((1, 2, 1), z, mu=0.3 + 1.7j)
sector = Sector.of(spec, 2)
out = solve(spec, sector)
print(len(out.solutions), "solutions")

rs = out.solutions[0]
for n in range(-2, 3):
    q = IdentityQuery.shifted(spec, n)
    print(f"n={n:+d}  normalized |F| = {eval_F(spec, sector, q, rs).normalized:.1e}")

# geometric convergence of the circle rule at alpha = mu
q = IdentityQuery.shifted(spec, 0)
ref = eval_F(spec, sector, q, rs)
for nodes in (8, 16, 32, 64, 128, 256):
    err = abs(eval_F_quadrature(spec, sector, q, rs, nodes=nodes) - ref.value) / ref.scale
    print(f"nodes={nodes:4d}  relative error {err:.1e}")

# each root owns two residues that cancel because of its own Bethe equation
for a in range(sector.k):
    r1, r2 = residue_pair(spec, sector, rs, a)
    print("pair", a, "sum", abs(r1 + r2))

bad = rs.array() + np.array([1e-3, 0])
for a in range(sector.k):
    r1, r2 = residue_pair(spec, sector, bad, a)
    print("perturbed pair", a, "sum", abs(r1 + r2))
