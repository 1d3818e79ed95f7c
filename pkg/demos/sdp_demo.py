"""The interior-point SDP solver on problems with known answers."""

import numpy as np

from opnormlab import sdp
from opnormlab.linalg import random_matrix, spectral_norm

sol = sdp.solve(sdp.trace_problem(2))
print("max tr X, tr X = 1:", -sol.primal_value, sol.status, "iterations", sol.iterations)

A = random_matrix(4, 3, np.random.default_rng(0))
sol = sdp.solve(sdp.spectral_norm_problem(A), verbose=True)
print("spectral norm by SDP:", -sol.dual_value, " by SVD:", spectral_norm(A))

# an infeasible problem is flagged rather than reported as optimal
bad = sdp.SdpProblem([2], [np.eye(2)], [([np.eye(2)], -1.0)])
print("infeasible:", sdp.solve(bad).status)

records = sdp.selftest(n_random=20)
print("self-test:", sum(r["passed"] for r in records), "/", len(records), "passed")
