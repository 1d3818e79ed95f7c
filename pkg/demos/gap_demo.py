"""Haagerup formula versus min norm on an isometry family.

x_n = sum_j s_j (x) s_j^T has Haagerup formula value 1 for every n, yet
transposing its second leg gives y_n with min norm sqrt(n).  So the
transpose on one leg cannot be bounded for the Haagerup tensor norm.
"""

import numpy as np

from opnormlab import counterexample as ce
from opnormlab import tensornorm as tn

fam = ce.shift_family(3, d=2)
s = fam.matrices
print("s_1* s_1 = I:", np.array_equal(s[0].conj().T @ s[0], np.eye(2)))
print("s_1* s_3 = 0:", not np.any(s[0].conj().T @ s[2]))

x, y = ce.build_xn(fam), ce.build_yn(fam)
print("haagerup formula on x_3:", tn.haagerup_upper(x))
print("min norm of y_3:        ", tn.min_norm(y))

# The gauge optimizer can only go down from the stored representation,
# and never below the min norm.
res = tn.haagerup_optimize(ce.build_xn(ce.shift_family(2)), restarts=2, iters=40)
print("optimized value on x_2: ", res.value)

print()
print(" n   h_upper   min(y_n)   ratio")
for row in ce.gap_experiment(8):
    print(f"{row['n']:2d}   {row['h_upper']:.3f}     {row['min_flipped']:.6f}   {row['ratio']:.6f}")
