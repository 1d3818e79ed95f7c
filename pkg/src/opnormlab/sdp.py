"""Dense complex Hermitian semidefinite programming.

Standard primal/dual pair, with ``<A, X> = Re tr(A^* X)``::

    minimize    sum_k <C_k, X_k>
    subject to  sum_k <A_ik, X_k> = b_i      (i = 1..m)
                X_k >= 0

    maximize    b^T y
    subject to  S_k = C_k - sum_i y_i A_ik >= 0

Solved by an infeasible primal-dual path-following method using the
Nesterov-Todd scaling and Mehrotra's predictor-corrector.  Blocks stay
complex throughout; the Schur complement is real symmetric because every
data matrix is Hermitian.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .linalg import matrix_from_dict, matrix_to_dict

STEP_FRACTION = 0.98
MAX_ITERS = 200
TARGET_GAP = 1e-8
ACCEPT_GAP = 1e-7
DIVERGENCE = 1e10


def _herm(M):
    M = np.asarray(M, dtype=complex)
    return 0.5 * (M + M.conj().T)


def _inner(A, B):
    return float(np.real(np.vdot(A, B)))


@dataclass
class SdpProblem:
    """``minimize <C, X>`` s.t. ``<A_i, X> = b_i``, ``X >= 0`` blockwise.

    ``constraints`` is a list of ``(blocks, b_i)`` where ``blocks`` holds one
    matrix per block (``None`` for a zero block).
    """

    block_dims: list
    objective: list
    constraints: list
    rank_deficient: bool = field(default=False, init=False)

    def __post_init__(self):
        self.block_dims = [int(n) for n in self.block_dims]
        if not self.constraints:
            raise ValueError("an SDP needs at least one constraint")
        self.objective = [self._block(C, n) for C, n in zip(self.objective, self.block_dims)]
        cons = []
        for blocks, rhs in self.constraints:
            if len(blocks) != len(self.block_dims):
                raise ValueError("constraint has the wrong number of blocks")
            cons.append(([self._block(A, n) for A, n in zip(blocks, self.block_dims)], float(rhs)))
        self.constraints = cons
        self.rank_deficient = self._presolve_rank() < len(cons)

    @staticmethod
    def _block(M, n):
        if M is None:
            return np.zeros((n, n), dtype=complex)
        M = np.asarray(M, dtype=complex)
        if M.shape != (n, n):
            raise ValueError(f"block of shape {M.shape}, expected {(n, n)}")
        return _herm(M)

    @property
    def m(self):
        return len(self.constraints)

    @property
    def b(self):
        return np.array([rhs for _, rhs in self.constraints])

    def stacked(self, k):
        """Constraint matrices of block ``k`` as an ``m x n_k^2`` array."""
        return np.array([blocks[k].ravel() for blocks, _ in self.constraints])

    def _presolve_rank(self):
        rows = np.hstack([np.hstack([self.stacked(k).real, self.stacked(k).imag])
                          for k in range(len(self.block_dims))])
        return int(np.linalg.matrix_rank(rows))

    def scaled(self, s):
        """Same feasible set, objective multiplied by ``s``."""
        return SdpProblem(self.block_dims, [s * C for C in self.objective],
                          [(blocks, rhs) for blocks, rhs in self.constraints])

    def to_dict(self):
        return {
            "kind": "sdp-problem",
            "block_dims": self.block_dims,
            "objective": [matrix_to_dict(C) for C in self.objective],
            "constraints": [
                {"blocks": [matrix_to_dict(A) for A in blocks], "b": rhs}
                for blocks, rhs in self.constraints
            ],
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            d["block_dims"],
            [matrix_from_dict(C) for C in d["objective"]],
            [([matrix_from_dict(A) for A in c["blocks"]], c["b"]) for c in d["constraints"]],
        )


@dataclass
class SdpSolution:
    primal_value: float
    dual_value: float
    X: list
    y: np.ndarray
    S: list
    relative_gap: float
    primal_residual: float
    dual_residual: float
    status: str
    iterations: int

    def to_dict(self):
        return {
            "kind": "sdp-solution",
            "primal_value": self.primal_value,
            "dual_value": self.dual_value,
            "X": [matrix_to_dict(M) for M in self.X],
            "y": [float(v) for v in self.y],
            "S": [matrix_to_dict(M) for M in self.S],
            "relative_gap": self.relative_gap,
            "primal_residual": self.primal_residual,
            "dual_residual": self.dual_residual,
            "status": self.status,
            "iterations": self.iterations,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            d["primal_value"], d["dual_value"],
            [matrix_from_dict(M) for M in d["X"]],
            np.array(d["y"], dtype=float),
            [matrix_from_dict(M) for M in d["S"]],
            d["relative_gap"], d["primal_residual"], d["dual_residual"],
            d["status"], d["iterations"],
        )

    def to_json(self):
        return json.dumps(self.to_dict())


# ---------------------------------------------------------------------------
# solver
# ---------------------------------------------------------------------------


class _Block:
    """NT scaling data for one block: ``W = G G^*`` with
    ``G^{-1} X G^{-*} = G^* S G = diag(lam)``."""

    def __init__(self, X, S):
        L = np.linalg.cholesky(X)
        R = np.linalg.cholesky(S)
        U, sv, Vh = np.linalg.svd(R.conj().T @ L)
        self.lam = sv
        self.G = L @ Vh.conj().T / np.sqrt(sv)
        self.Ginv = (np.sqrt(sv)[:, None] * Vh) @ sla.solve_triangular(
            L, np.eye(len(sv)), lower=True)
        self.W = self.G @ self.G.conj().T

    def to_scaled_primal(self, dX):
        return self.Ginv @ dX @ self.Ginv.conj().T

    def to_scaled_dual(self, dS):
        return self.G.conj().T @ dS @ self.G

    def lyap(self, R):
        """Solve ``Lam o Z = R`` (Jordan product) for diagonal ``Lam``."""
        lam = self.lam
        return 2.0 * R / (lam[:, None] + lam[None, :])

    def max_step(self, dscaled):
        """Largest alpha with ``Lam + alpha * dscaled >= 0`` (inf if none)."""
        isq = 1.0 / np.sqrt(self.lam)
        T = _herm(isq[:, None] * dscaled * isq[None, :])
        emin = np.linalg.eigvalsh(T)[0]
        return np.inf if emin >= 0 else -1.0 / emin


def _initial_point(prob):
    """Identity-scaled interior start sized from the data norms."""
    X, S = [], []
    for k, n in enumerate(prob.block_dims):
        Ak = [blocks[k] for blocks, _ in prob.constraints]
        normA = [np.linalg.norm(A) for A in Ak]
        xi = max(10.0, np.sqrt(n), n * max(
            (1 + abs(rhs)) / (1 + nA) for (_, rhs), nA in zip(prob.constraints, normA)))
        eta = max(10.0, np.sqrt(n), max(normA + [np.linalg.norm(prob.objective[k])]))
        X.append(xi * np.eye(n, dtype=complex))
        S.append(eta * np.eye(n, dtype=complex))
    return X, np.zeros(prob.m), S


def solve(prob: SdpProblem, max_iters=MAX_ITERS, target_gap=TARGET_GAP,
          verbose=False) -> SdpSolution:
    """Primal-dual interior point; deterministic for fixed input."""
    nblk = len(prob.block_dims)
    Avec = [prob.stacked(k) for k in range(nblk)]
    C = prob.objective
    b = prob.b
    ntot = sum(prob.block_dims)
    normb, normC = 1 + np.linalg.norm(b), 1 + np.sqrt(sum(np.linalg.norm(c) ** 2 for c in C))

    def A_op(Xs):
        return sum(np.real(Avec[k].conj() @ Xs[k].ravel()) for k in range(nblk))

    def At_op(y):
        return [(y @ Avec[k]).reshape(n, n) for k, n in enumerate(prob.block_dims)]

    X, y, S = _initial_point(prob)
    status = "max-iterations"
    best = None

    def measures():
        pobj = sum(_inner(C[k], X[k]) for k in range(nblk))
        dobj = float(b @ y)
        rp = b - A_op(X)
        AtY = At_op(y)
        Rd = [C[k] - AtY[k] - S[k] for k in range(nblk)]
        pinf = np.linalg.norm(rp) / normb
        dinf = np.sqrt(sum(np.linalg.norm(R) ** 2 for R in Rd)) / normC
        gap = abs(pobj - dobj) / (1 + abs(pobj))
        return pobj, dobj, rp, Rd, pinf, dinf, gap

    it = 0
    for it in range(1, max_iters + 1):
        pobj, dobj, rp, Rd, pinf, dinf, gap = measures()
        score = max(gap, pinf, dinf)
        if best is None or score < best[0]:
            best = (score, [x.copy() for x in X], y.copy(), [s.copy() for s in S])
        if verbose:
            print(f"{it:3d} p={pobj:+.10e} d={dobj:+.10e} gap={gap:.2e} pinf={pinf:.2e} dinf={dinf:.2e}")
        if gap <= target_gap and pinf <= target_gap and dinf <= target_gap:
            status = "optimal"
            break
        if max(max(np.abs(x).max() for x in X), np.abs(y).max() if y.size else 0.0) > DIVERGENCE:
            status = "infeasible-suspected"
            break

        mu = sum(_inner(X[k], S[k]) for k in range(nblk)) / ntot
        try:
            blk = [_Block(X[k], S[k]) for k in range(nblk)]
        except np.linalg.LinAlgError:
            break

        # Schur complement M_ij = <A_i, W A_j W>, real symmetric
        M = np.zeros((prob.m, prob.m))
        for k, n in enumerate(prob.block_dims):
            W = blk[k].W
            A3 = Avec[k].reshape(-1, n, n)
            WAW = W @ A3 @ W
            M += np.real(Avec[k].conj() @ WAW.reshape(prob.m, -1).T)
        M = 0.5 * (M + M.T)
        try:
            factor = sla.cho_factor(M)
            solveM = lambda r: sla.cho_solve(factor, r)  # noqa: E731
        except np.linalg.LinAlgError:
            Mp = np.linalg.pinv(M, rcond=1e-14)
            solveM = lambda r: Mp @ r  # noqa: E731

        WRdW = [blk[k].W @ Rd[k] @ blk[k].W for k in range(nblk)]
        base_rhs = rp + A_op(WRdW)

        def direction(Rc):
            Z = [blk[k].lyap(Rc[k]) for k in range(nblk)]
            GZG = [_herm(blk[k].G @ Z[k] @ blk[k].G.conj().T) for k in range(nblk)]
            dy = solveM(base_rhs - A_op(GZG))
            AtdY = At_op(dy)
            dS = [_herm(Rd[k] - AtdY[k]) for k in range(nblk)]
            dX = [_herm(GZG[k] - blk[k].W @ dS[k] @ blk[k].W) for k in range(nblk)]
            return dX, dy, dS

        def steps(dX, dS):
            ap = min([1.0] + [STEP_FRACTION * blk[k].max_step(blk[k].to_scaled_primal(dX[k]))
                              for k in range(nblk)])
            ad = min([1.0] + [STEP_FRACTION * blk[k].max_step(blk[k].to_scaled_dual(dS[k]))
                              for k in range(nblk)])
            return ap, ad

        # predictor
        Rc = [-np.diag(blk[k].lam ** 2).astype(complex) for k in range(nblk)]
        dXa, dya, dSa = direction(Rc)
        ap, ad = steps(dXa, dSa)
        mu_aff = sum(_inner(X[k] + ap * dXa[k], S[k] + ad * dSa[k]) for k in range(nblk)) / ntot
        sigma = min(1.0, max(0.0, (mu_aff / mu) ** 3)) if mu > 0 else 0.0

        # corrector
        Rc = []
        for k in range(nblk):
            dx = blk[k].to_scaled_primal(dXa[k])
            ds = blk[k].to_scaled_dual(dSa[k])
            R = sigma * mu * np.eye(len(blk[k].lam)) - np.diag(blk[k].lam ** 2)
            Rc.append(R - 0.5 * (dx @ ds + ds @ dx))
        dX, dy, dS = direction(Rc)
        ap, ad = steps(dX, dS)

        X = [_herm(X[k] + ap * dX[k]) for k in range(nblk)]
        y = y + ad * dy
        S = [_herm(S[k] + ad * dS[k]) for k in range(nblk)]
    else:
        it = max_iters

    pobj, dobj, rp, Rd, pinf, dinf, gap = measures()
    if status != "optimal" and best is not None and best[0] < max(gap, pinf, dinf):
        _, X, y, S = best
        pobj, dobj, rp, Rd, pinf, dinf, gap = measures()
    if status != "infeasible-suspected":
        accepted = gap <= ACCEPT_GAP and pinf <= ACCEPT_GAP and dinf <= ACCEPT_GAP
        status = "optimal" if accepted else "max-iterations"
    return SdpSolution(
        primal_value=pobj, dual_value=dobj, X=X, y=y, S=S, relative_gap=gap,
        primal_residual=pinf, dual_residual=dinf, status=status, iterations=it,
    )


# ---------------------------------------------------------------------------
# canned problems used by the self-test
# ---------------------------------------------------------------------------


def trace_problem(n=2):
    """maximize tr(X) s.t. tr(X) = 1: optimal value 1 (as minimization of -tr)."""
    eye = np.eye(n)
    return SdpProblem([n], [-eye], [([eye], 1.0)])


def spectral_norm_problem(A):
    """Hermitian dilation ``H = [[0, A], [A*, 0]]``.

    Primal: ``min <-H, X>`` s.t. ``tr X = 1`` has optimum ``-||A||``.  Its
    dual is ``max y`` s.t. ``-H - y I >= 0``, i.e. with ``t = -y`` it is
    ``min t`` s.t. ``[[tI, A], [A*, tI]] >= 0``.
    """
    A = np.asarray(A, dtype=complex)
    r, c = A.shape
    H = np.zeros((r + c, r + c), dtype=complex)
    H[:r, r:] = A
    H[r:, :r] = A.conj().T
    return SdpProblem([r + c], [-H], [([np.eye(r + c)], 1.0)])


def selftest(seed=0, n_random=100):
    """Run the built-in example suite; returns a list of check records."""
    from .linalg import random_matrix, rng_from, spectral_norm

    rng = rng_from(seed)
    records = []

    sol = solve(trace_problem(2))
    records.append({"name": "trace", "expected": 1.0, "value": -sol.primal_value,
                    "gap": sol.relative_gap, "status": sol.status,
                    "passed": sol.status == "optimal" and abs(-sol.primal_value - 1.0) <= 1e-6})

    sol = solve(spectral_norm_problem(np.diag([3.0, 4.0])))
    records.append({"name": "spectral-diag34", "expected": 4.0, "value": -sol.dual_value,
                    "gap": sol.relative_gap, "status": sol.status,
                    "passed": sol.status == "optimal" and abs(-sol.dual_value - 4.0) <= 1e-6})

    for i in range(n_random):
        A = random_matrix(4, 4, rng)
        sol = solve(spectral_norm_problem(A))
        ref = spectral_norm(A)
        records.append({"name": f"spectral-random-{i}", "expected": ref, "value": -sol.dual_value,
                        "gap": sol.relative_gap, "status": sol.status,
                        "passed": sol.status == "optimal" and abs(-sol.dual_value - ref) <= 1e-6})
    return records
