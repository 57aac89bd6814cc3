"""
The zero root set of the XXZ system
===================================

With two or more particles, t = (0, ..., 0) solves the cleared XXZ
equations: every term carries a factor t_a - q^2 t_b.  It is
inadmissible (t_a = 0), yet no root sits at a plus or minus point, so the
implication "no root at a forbidden point => admissible" does not hold
for it.  This script shows the case explicitly.
"""

import numpy as np

from bethekit import ModelSpec, RootSet, Sector, check_lemma, classify, normalized_residual, solve

spec = ModelSpec.xxz((1, 2), (1.2 + 0.3j, -0.5 + 0.8j), gamma=0.7, mu=0.4 - 0.2j)
sector = Sector.of(spec, 2)
zero = RootSet((0, 0))

print("residual at (0, 0):", normalized_residual(spec, sector, zero))
print("classification:", classify(spec, sector, zero).to_dict())
print("lemma verdict:", check_lemma(spec, sector, zero).to_dict())

# the solver reports it alongside the genuine Bethe roots
for rs in solve(spec, sector).solutions:
    c = classify(spec, sector, rs)
    print(np.round(rs.array(), 8), "admissible" if c.admissible else "inadmissible")
