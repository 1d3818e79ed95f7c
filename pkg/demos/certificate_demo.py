"""Brackets for the operator-space projective norm.

The projective norm is not computed directly.  For an element with its
second leg transposed it is squeezed between the min norm of the original
element (lower) and the sum of cross norms (upper).
"""

import numpy as np

from opnormlab import counterexample as ce
from opnormlab import tensornorm as tn

rng = np.random.default_rng(1)
u = tn.random_element((3, 3), (3, 3), 3, rng)
cert = tn.theorem1_certificate(u)
print("random u:  lower %.4f  upper %.4f  consistent %s" % (cert.lower, cert.upper, cert.consistent))

# For y_4 the lower bound is 2, while x_4 = opposite(y_4) has Haagerup formula 1.
fam = ce.shift_family(4)
cert = tn.theorem1_certificate(ce.build_yn(fam))
print("y_4:       lower %.4f  upper %.4f" % (cert.lower, cert.upper))
print("haagerup formula of x_4:", tn.haagerup_upper(ce.build_xn(fam)))

bad = 0
for _ in range(500):
    dims = rng.integers(1, 5, size=4)
    v = tn.random_element(dims[:2], dims[2:], int(rng.integers(1, 6)), rng)
    bad += not tn.theorem1_certificate(v).consistent
print("inconsistent certificates in 500 random draws:", bad)

# elements serialize to plain JSON, which is what `opnormlab theorem1 --input` reads
print(u.to_json()[:80] + " ...")
