"""Schatten norms of two-sided multiplication maps c -> sum a_i c b_i.

The S2 norm is exact (spectral norm of sum kron(a_i, b_i^T)).  The S1 and
S-infinity induced norms are nonconvex, so we only have seesaw lower
bounds.  The interpolation inequality s2^2 <= ||.||_1 ||.||_inf is then
checked on the lower bounds; if they are too weak the diamond norms close
the bracket from above.
"""

import numpy as np

from opnormlab import counterexample as ce
from opnormlab import superop as so

rng = np.random.default_rng(0)

phi = so.random_superoperator((3, 3), 2, rng)
rep = so.interpolation_check(phi, restarts=32, rng=rng)
print(f"s2 = {rep.s2:.5f}  lower1 = {rep.lower1:.5f}  lowerInf = {rep.lowerInf:.5f}")
print(f"s2^2 = {rep.s2**2:.5f} <= {rep.lower1 * rep.lowerInf:.5f}: {rep.verdict}")

# p = inf is the p = 1 problem for the trace-pairing adjoint
print("inf norm / adjoint 1-norm:",
      so.schatten_induced_lower(phi, np.inf), so.schatten_induced_lower(phi.adjoint(), 1))

counts = {"holds": 0, "inconclusive": 0, "failed": 0}
for _ in range(50):
    n, m, k = (int(v) for v in rng.integers(1, 4, size=3))
    counts[so.interpolation_check(so.random_superoperator((n, m), k, rng), rng=rng).verdict] += 1
print("50 random maps:", counts)

# The map of x_n has S2 norm sqrt(n) while the sum of cross norms of x_n is n.
for n in (2, 4, 8):
    s2, proj = so.technical_bound(ce.build_xn(ce.shift_family(n)))
    print(f"n = {n}: s2 = {s2:.4f} <= projective upper bound {proj:.1f}")
