"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Two
conventions are fixed here and relied upon everywhere else:

* ``kron`` uses the index map ``((i, k), (j, l)) -> A[i, j] * B[k, l]``,
  i.e. ``numpy.kron``.
* ``vec`` stacks ROWS, so that ``vec(a @ c @ b) == kron(a, b.T) @ vec(c)``.

Singular values are computed by a one-sided (Hestenes) Jacobi iteration
with round-robin pair ordering; all Schatten and spectral norms are derived
from it.
"""

from __future__ import annotations

import json
import os

import numpy as np

DEFAULT_CAP = 4096
MAX_SWEEPS = 100


class ShapeError(ValueError):
    pass


class SizeError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    def __init__(self, message, iterations):
        super().__init__(message)
        self.iterations = iterations


def dimension_cap() -> int:
    """Largest admissible leg-product dimension; ``OPNORMLAB_CAP`` overrides."""
    value = os.environ.get("OPNORMLAB_CAP")
    if value is None:
        return DEFAULT_CAP
    cap = int(value)
    if cap < 1:
        raise ValueError("OPNORMLAB_CAP must be a positive integer")
    return cap


def as_matrix(A) -> np.ndarray:
    """Coerce to a finite, nonempty 2-D complex array."""
    M = np.asarray(A, dtype=complex)
    if M.ndim == 1:
        M = M.reshape(-1, 1)
    if M.ndim != 2:
        raise ShapeError(f"expected a matrix, got array of shape {M.shape}")
    if M.size == 0:
        raise ShapeError("matrix must be nonempty")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix entries must be finite")
    return M


# ---------------------------------------------------------------------------
# SVD
# ---------------------------------------------------------------------------


def _round_robin(n):
    """Pairings of ``range(n)`` (n even) covering every pair once per sweep."""
    players = list(range(n))
    rounds = []
    for _ in range(n - 1):
        half = n // 2
        rounds.append((np.array(players[:half]), np.array(players[half:][::-1])))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def _complete_orthonormal(U, keep):
    """Replace the columns of ``U`` not flagged in ``keep`` by an orthonormal
    completion of the kept columns (modified Gram-Schmidt on e_1, e_2, ...)."""
    m = U.shape[0]
    basis = [U[:, j] for j in range(U.shape[1]) if keep[j]]
    out = U.copy()
    candidates = iter(range(m))
    for j in range(U.shape[1]):
        if keep[j]:
            continue
        while True:
            e = np.zeros(m, dtype=complex)
            e[next(candidates)] = 1.0
            for _ in range(2):
                for q in basis:
                    e -= q * np.vdot(q, e)
            nrm = np.linalg.norm(e)
            if nrm > 1e-8:
                e /= nrm
                break
        basis.append(e)
        out[:, j] = e
    return out


def _jacobi_tall(A):
    """One-sided Jacobi for ``m >= n``.  Returns (U, S, V) unsorted."""
    m, n = A.shape
    M = A.copy()
    V = np.eye(n, dtype=complex)
    fro2 = np.sum(np.abs(M) ** 2)
    if fro2 == 0.0:
        return np.eye(m, n, dtype=complex), np.zeros(n), V
    # pairwise criterion relative to the column norms, floored so that
    # numerically-null columns are left alone
    rel_tol = max(m, 2) * np.finfo(float).eps
    abs_tol = 1e-30 * fro2
    padded = n + (n % 2)
    if padded != n:
        M = np.hstack([M, np.zeros((m, 1), dtype=complex)])
        V = np.pad(V, ((0, 1), (0, 1)))
    rounds = _round_robin(padded) if padded > 1 else []
    for sweep in range(1, MAX_SWEEPS + 1):
        rotated = False
        for P, Q in rounds:
            Mp, Mq = M[:, P], M[:, Q]
            alpha = np.sum(np.abs(Mp) ** 2, axis=0)
            beta = np.sum(np.abs(Mq) ** 2, axis=0)
            gamma = np.sum(Mp.conj() * Mq, axis=0)
            g = np.abs(gamma)
            active = (g > rel_tol * np.sqrt(alpha * beta)) & (g > abs_tol)
            if not np.any(active):
                continue
            rotated = True
            P, Q = P[active], Q[active]
            alpha, beta, gamma, g = alpha[active], beta[active], gamma[active], g[active]
            phase = gamma / g
            zeta = (beta - alpha) / (2.0 * g)
            t = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.sqrt(1.0 + zeta**2))
            c = 1.0 / np.sqrt(1.0 + t**2)
            s = c * t
            for X in (M, V):
                Xp, Xq = X[:, P], X[:, Q] * phase.conj()
                X[:, P] = c * Xp - s * Xq
                X[:, Q] = s * Xp + c * Xq
        if not rotated:
            break
    else:
        raise ConvergenceError(
            f"Jacobi SVD did not converge after {MAX_SWEEPS} sweeps", MAX_SWEEPS
        )
    M, V = M[:, :n], V[:n, :n]
    S = np.linalg.norm(M, axis=0)
    smax = S.max()
    keep = S > 1e-13 * smax
    U = np.zeros((m, n), dtype=complex)
    U[:, keep] = M[:, keep] / S[keep]
    if not np.all(keep):
        U = _complete_orthonormal(U, keep)
    return U, S, V


def svd(A):
    """Thin SVD ``A = U @ diag(S) @ V.conj().T`` with ``S`` descending.

    ``U`` is ``m x k`` and ``V`` is ``n x k`` with ``k = min(m, n)``; both have
    orthonormal columns.  Raises :class:`ConvergenceError` if the Jacobi sweep
    cap is reached.
    """
    A = as_matrix(A)
    m, n = A.shape
    if m < n:
        U, S, V = svd(A.conj().T)
        return V, S, U
    # exactly-zero columns contribute nothing; keep them out of the sweeps
    live = np.any(A != 0, axis=0)
    if np.all(live) or not np.any(live):
        U, S, V = _jacobi_tall(A)
    else:
        idx = np.flatnonzero(live)
        Ul, Sl, Vl = _jacobi_tall(A[:, idx])
        r = len(idx)
        U = np.zeros((m, n), dtype=complex)
        S = np.zeros(n)
        V = np.zeros((n, n), dtype=complex)
        U[:, :r], S[:r] = Ul, Sl
        V[np.ix_(idx, np.arange(r))] = Vl
        for col, j in enumerate(np.flatnonzero(~live)):
            V[j, r + col] = 1.0
        keep = np.zeros(n, dtype=bool)
        keep[:r] = Sl > 1e-13 * max(Sl.max(), 1e-300)
        U = _complete_orthonormal(U, keep)
    order = np.argsort(-S, kind="stable")
    return U[:, order], S[order], V[:, order]


def singular_values(A) -> np.ndarray:
    return svd(A)[1]


def spectral_norm(A) -> float:
    """Largest singular value (operator norm on B(H))."""
    return float(singular_values(A)[0])


def schatten_norm(A, p) -> float:
    """Schatten p-norm for p in {1, 2, inf}."""
    s = singular_values(A)
    if p == 1:
        return float(np.sum(s))
    if p == 2:
        return float(np.sqrt(np.sum(s**2)))
    if p in (np.inf, "inf", float("inf")):
        return float(s[0])
    raise ValueError(f"unsupported Schatten exponent {p!r}; use 1, 2 or inf")


def polar_factor(A) -> np.ndarray:
    """Partial isometry ``U V*`` from the SVD; the dual witness of the trace norm."""
    U, _, V = svd(A)
    return U @ V.conj().T


# ---------------------------------------------------------------------------
# Kronecker calculus
# ---------------------------------------------------------------------------


def kron(A, B) -> np.ndarray:
    A, B = as_matrix(A), as_matrix(B)
    cap = dimension_cap()
    rows, cols = A.shape[0] * B.shape[0], A.shape[1] * B.shape[1]
    if rows > cap or cols > cap:
        raise SizeError(f"Kronecker product of shape {(rows, cols)} exceeds cap {cap}")
    return np.kron(A, B)


def vec(C) -> np.ndarray:
    """Row-major stacking as an ``(rows*cols) x 1`` column."""
    C = as_matrix(C)
    return C.reshape(-1, 1)


def unvec(v, rows, cols) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.size != rows * cols:
        raise ShapeError(f"cannot reshape {v.size} entries into {rows}x{cols}")
    return v.reshape(rows, cols)


def partial_transpose(X, dims, leg="second") -> np.ndarray:
    """Transpose one tensor leg of ``X`` acting on C^n (x) C^m.

    ``dims = (n, m)`` and ``X`` must be ``nm x nm``.  No conjugation.
    """
    X = as_matrix(X)
    n, m = dims
    if X.shape != (n * m, n * m):
        raise ShapeError(f"dims {dims} do not factor a matrix of shape {X.shape}")
    T = X.reshape(n, m, n, m)
    if leg == "first":
        T = T.transpose(2, 1, 0, 3)
    elif leg == "second":
        T = T.transpose(0, 3, 2, 1)
    else:
        raise ValueError("leg must be 'first' or 'second'")
    return T.reshape(n * m, n * m).copy()


def zero_pad(A, rows, cols) -> np.ndarray:
    """Embed ``A`` in the top-left corner of a ``rows x cols`` zero matrix."""
    A = as_matrix(A)
    if A.shape[0] > rows or A.shape[1] > cols:
        raise ShapeError(f"cannot pad {A.shape} into {(rows, cols)}")
    out = np.zeros((rows, cols), dtype=complex)
    out[: A.shape[0], : A.shape[1]] = A
    return out


def pad_square(A) -> np.ndarray:
    A = as_matrix(A)
    d = max(A.shape)
    return zero_pad(A, d, d)


def unit(i, j, rows, cols) -> np.ndarray:
    """Matrix unit E_ij."""
    E = np.zeros((rows, cols), dtype=complex)
    E[i, j] = 1.0
    return E


# ---------------------------------------------------------------------------
# random helpers
# ---------------------------------------------------------------------------


def rng_from(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_matrix(rows, cols, rng=None) -> np.ndarray:
    """Complex Ginibre matrix with unit-variance entries."""
    rng = rng_from(rng)
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_unitary(d, rng=None) -> np.ndarray:
    """Haar unitary via QR with phase correction."""
    Q, R = np.linalg.qr(random_matrix(d, d, rng))
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def matrix_to_dict(A) -> dict:
    A = as_matrix(A)
    return {
        "rows": A.shape[0],
        "cols": A.shape[1],
        "entries": [[float(z.real), float(z.imag)] for z in A.ravel()],
    }


def matrix_from_dict(d) -> np.ndarray:
    rows, cols = int(d["rows"]), int(d["cols"])
    if rows < 1 or cols < 1:
        raise ShapeError("rows and cols must be positive")
    entries = d["entries"]
    if len(entries) != rows * cols:
        raise ShapeError(f"expected {rows * cols} entries, got {len(entries)}")
    flat = np.array([complex(re, im) for re, im in entries])
    return as_matrix(flat.reshape(rows, cols))


def matrix_to_json(A) -> str:
    return json.dumps(matrix_to_dict(A))


def matrix_from_json(text) -> np.ndarray:
    return matrix_from_dict(json.loads(text))
