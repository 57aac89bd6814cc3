"""
A multiple solution of the four-site chain
==========================================

For four homogeneous spin-1/2 sites with periodic twist, the two-particle
system has an isolated solution (1/q, q) of multiplicity greater than one.
Double-precision Newton only reaches it to about eps**(1/m), which leaves a
cloud of nearby "solutions".  The solver notices the rank-deficient
Jacobian and polishes in extended precision instead.
"""

import numpy as np

from bethekit import ModelSpec, Sector, classify, normalized_residual, solve
from bethekit.model import bethe_jacobian
from bethekit.polysolve import SolverConfig, newton, set_distance, solution_radius

spec = ModelSpec.xxz((1,) * 4, (1,) * 4, gamma=0.6, mu=0)
sector = Sector.of(spec, 2)
q = spec.q
exact = np.array([1 / q, q])

# singular values of the row-normalized Jacobian at the exact point
jac = bethe_jacobian(spec, sector, exact)
jac = jac / np.linalg.norm(jac, axis=1, keepdims=True)
print("singular values:", np.linalg.svd(jac, compute_uv=False))

# how far from the point the residual stays below 1e-11
print("flat radius:", solution_radius(spec, sector, exact, 1e-11))

# plain Newton from a nearby start stalls on the flat region
start = exact + np.array([1e-2, -2e-2j])
t, ok = newton(spec, sector, start, SolverConfig())
print("double Newton: converged =", ok, " distance to (1/q, q) =", set_distance(t, exact))

# the full solver returns every point once, the multiple one exactly
out = solve(spec, sector)
for j, rs in enumerate(out.solutions):
    c = classify(spec, sector, rs)
    tag = " <- (1/q, q)" if set_distance(rs, exact) < 1e-12 else ""
    print(f"{j:2d} {np.round(rs.array(), 8)} res={normalized_residual(spec, sector, rs):.1e} "
          f"adm={c.admissible} offdiag={c.offdiagonal}{tag}")
