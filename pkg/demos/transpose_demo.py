"""The transpose map is an isometry on M_d but its diamond norm is d."""

import numpy as np

from opnormlab import superop as so

for d in (2, 3, 4):
    t = so.transpose_map(d)
    res = so.diamond(t)
    w = so.diamond_lower(t, restarts=4, starts=[so.maximally_entangled(d)])
    print(f"d = {d}: diamond = {res.value:.6f} (gap {res.gap:.1e}), "
          f"entangled witness = {w.value:.6f}, plain trace norm = "
          f"{so.schatten_induced_lower(t, 1, restarts=8):.3f}")

# The Choi matrix of the transpose is the swap operator.
J = so.choi(so.transpose_map(2))
print(J.real.astype(int))

# Conjugating a map by the transpose does not change its cb norm.
rng = np.random.default_rng(3)
phi = so.random_superoperator((2, 2), 2, rng)
print("diamond(phi) =", so.diamond_norm(phi))
print("diamond(T o phi o T) =", so.diamond_norm(phi.conjugated_by_transpose()))
