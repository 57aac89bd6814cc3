"""
The periodic six-vertex chain, two sites
========================================

Solve the one-particle sector of the homogeneous spin-1/2 XXZ chain with
periodic twist, check the contour identity G on each solution, and read
off the algebraic sum rule at m = 0.
"""

import numpy as np

from bethekit import (IdentityQuery, ModelSpec, Sector, classify, eval_G, solve, sum_rule_tz,
                      sz0_sum_rule)
from bethekit.completeness import expected_count

# two sites at z = 1, anisotropy q = exp(0.6i), twist q^(2 mu) = 1
spec = ModelSpec.xxz((1, 1), (1, 1), gamma=0.6, mu=0)
sector = Sector.of(spec, 1)
print("q =", np.round(spec.q, 6), " S_z =", sector.s_z)

# the Bethe equation (q t - 1)^2 (...) reduces to t^2 = 1
out = solve(spec, sector)
for rs in out.solutions:
    print("root", np.round(rs.array(), 12), classify(spec, sector, rs).to_dict())

# G(alpha) vanishes at alpha = mu + pi n / gamma for every integer n
for rs in out.solutions:
    vals = [eval_G(spec, sector, IdentityQuery.shifted(spec, n), rs).normalized
            for n in range(-2, 3)]
    print("normalized |G| over n = -2..2:", ["%.1e" % v for v in vals])

# m = S_z = 0 is the only integer exponent compatible with this twist;
# the residues at 0 and infinity then give t_1^2 = z_1 z_2
for rs in out.solutions:
    print("m=0 defect", abs(sum_rule_tz(spec, sector, 0, rs)),
          " closed form", abs(sz0_sum_rule(spec, sector, 0, rs)))

# counting: two admissible offdiagonal roots, the weight-space dimension
print("expected (count, conjectural):", expected_count(spec, sector))
