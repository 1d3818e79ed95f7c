"""An antisymmetric 2-cocycle on C[w]/w^N (x) C[z]/z^N.

The wedge of d/dw and d/dz is a Hochschild 2-cocycle with values in the
symmetric module C[w]/w^(N-1) (x) C[z]/z^(N-1).  Coboundaries of 1-cochains
are symmetric, so a nonzero antisymmetric cocycle cannot be one.
"""

import numpy as np

from opnormlab import cocycle as cc

N = 5
_, _, DA = cc.truncated_poly(N, "w")
_, _, DB = cc.truncated_poly(N, "z")
F = cc.wedge_cocycle(DA, DB)
print("algebra:", F.algebra.label, " dim", F.algebra.dim)
print("cocycle:", cc.cocycle_check(F), " antisymmetric:", cc.antisymmetry_check(F))

rng = np.random.default_rng(0)
psi = cc.random_cochain1(F.algebra, F.module, rng)
print("random coboundary symmetric:", cc.coboundary_symmetry_check(F.algebra, F.module, psi))
print("distance from the symmetric part (lower bound):", cc.distance_to_coboundary_lower(F))

w = cc.nonvanishing_witness(DA, DB, F)
print("witness a =", w["a"], " b =", w["b"])
print("F(a^3 b, a b) agrees with D_A(a^4) D_B(b^2) / 4 up to", w["residual"])

for A in (cc.truncated_poly(4)[0], cc.augmentation_ideal(6)):
    pol = cc.polarization_check(A, samples=200)
    spans = cc.power_span_check(A)
    print(A.label, "polarization", pol["passed"],
          "ranks", {k: spans[k] for k in ("X11", "X2", "X1111", "X22", "X4")})
