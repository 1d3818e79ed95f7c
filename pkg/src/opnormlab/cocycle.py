"""Hochschild 2-cochains on finite-dimensional commutative algebras.

Algebras and modules are given by structure constants on a basis:
``e_i e_j = sum_k mu[i, j, k] e_k`` and ``e_i . f_x = sum_y act[i, x, y] f_y``.
Modules are symmetric (left and right actions coincide).  Elements are
coefficient vectors.  Integer structure constants are kept integral so that
the cocycle identities are checked exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import rng_from, singular_values

TOL = 1e-10


def _is_exact(*arrays):
    return all(np.issubdtype(np.asarray(a).dtype, np.integer) for a in arrays)


def _num(a):
    """Float view for BLAS contractions; small integers stay exact."""
    a = np.asarray(a)
    return a.astype(float) if np.issubdtype(a.dtype, np.integer) else a


def _vanishes(R, exact, tol=TOL):
    R = np.asarray(R)
    if exact:
        return not np.any(R)
    return bool(np.max(np.abs(R), initial=0.0) <= tol)


@dataclass(frozen=True)
class FinAlgebra:
    mu: np.ndarray
    label: str = ""
    unit: np.ndarray | None = None

    def __post_init__(self):
        mu = np.asarray(self.mu)
        d = mu.shape[0]
        if mu.shape != (d, d, d):
            raise ValueError("structure constants must have shape (dim, dim, dim)")
        exact = _is_exact(mu)
        if not _vanishes(mu - mu.transpose(1, 0, 2), exact):
            raise ValueError(f"algebra {self.label!r} is not commutative")
        m = _num(mu)
        left = np.tensordot(m, m, axes=([2], [0]))                       # (e_i e_j) e_k
        right = np.tensordot(m, m, axes=([2], [1])).transpose(2, 0, 1, 3)  # e_i (e_j e_k)
        if not _vanishes(left - right, exact):
            raise ValueError(f"algebra {self.label!r} is not associative")

    @property
    def dim(self):
        return self.mu.shape[0]

    @property
    def unital(self):
        return self.unit is not None

    def mul(self, a, b):
        return np.einsum("i,j,ijk->k", a, b, self.mu)

    def power(self, a, k):
        out = a
        for _ in range(k - 1):
            out = self.mul(out, a)
        return out


@dataclass(frozen=True)
class FinModule:
    algebra: FinAlgebra
    act: np.ndarray

    def __post_init__(self):
        act = np.asarray(self.act)
        if act.shape[0] != self.algebra.dim or act.shape[1] != act.shape[2]:
            raise ValueError("action tensor must have shape (dim A, dim X, dim X)")
        exact = _is_exact(act, self.algebra.mu)
        # (e_i e_j) . x = e_i . (e_j . x)
        a = _num(act)
        lhs = np.tensordot(_num(self.algebra.mu), a, axes=([2], [0]))
        rhs = np.tensordot(a, a, axes=([2], [1])).transpose(2, 0, 1, 3)
        if not _vanishes(lhs - rhs, exact):
            raise ValueError("action does not satisfy the module law")

    @property
    def dim(self):
        return self.act.shape[1]

    def action(self, a, x):
        return np.einsum("i,x,ixy->y", a, x, self.act)


@dataclass(frozen=True)
class Derivation:
    algebra: FinAlgebra
    module: FinModule
    D: np.ndarray  # shape (dim X, dim A)

    def __post_init__(self):
        if self.D.shape != (self.module.dim, self.algebra.dim):
            raise ValueError("derivation matrix has the wrong shape")
        res = leibniz_residual(self)
        if res > 1e-12:
            raise ValueError(f"Leibniz rule fails (residual {res:.3e})")

    def __call__(self, a):
        return self.D @ a


def leibniz_residual(der: Derivation) -> float:
    """``max |D(e_i e_j) - e_i.D(e_j) - D(e_i).e_j|`` over basis pairs."""
    mu, act, D = der.algebra.mu, der.module.act, der.D
    lhs = np.einsum("ijt,xt->ijx", mu, D)
    t1 = np.einsum("yj,iyx->ijx", D, act)
    t2 = np.einsum("yi,jyx->ijx", D, act)
    return float(np.max(np.abs(lhs - t1 - t2), initial=0.0))


@dataclass(frozen=True)
class Cochain2:
    """Bilinear map ``(A x A) -> X`` stored on basis pairs: ``F[u, v, :]``."""

    algebra: FinAlgebra
    module: FinModule
    F: np.ndarray

    def __call__(self, u, v):
        return np.einsum("p,q,pqr->r", u, v, self.F)

    @property
    def exact(self):
        return _is_exact(self.F, self.algebra.mu, self.module.act)


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------


def truncated_poly(N, label="z"):
    """``A = C[z]/z^N``, ``X = C[z]/z^(N-1)`` and ``D = d/dz : A -> X``.

    ``X`` is an ``A``-module through the quotient map; ``d/dz`` is not a
    derivation of ``A`` into itself (the top degree breaks Leibniz), but it is
    one into ``X``.
    """
    if N < 2:
        raise ValueError("truncation degree must be at least 2")
    mu = np.zeros((N, N, N), dtype=np.int64)
    for i in range(N):
        for j in range(N - i):
            mu[i, j, i + j] = 1
    unit = np.zeros(N, dtype=np.int64)
    unit[0] = 1
    A = FinAlgebra(mu, f"C[{label}]/{label}^{N}", unit)
    M = N - 1
    act = np.zeros((N, M, M), dtype=np.int64)
    for i in range(N):
        for x in range(M - i):
            act[i, x, x + i] = 1
    X = FinModule(A, act)
    D = np.zeros((M, N), dtype=np.int64)
    for k in range(1, N):
        D[k - 1, k] = k
    return A, X, Derivation(A, X, D)


def augmentation_ideal(N, label="z"):
    """The non-unital algebra ``z C[z]/z^N`` (basis z, ..., z^(N-1))."""
    if N < 3:
        raise ValueError("need N >= 3 for a nonzero product")
    d = N - 1
    mu = np.zeros((d, d, d), dtype=np.int64)
    for i in range(d):
        for j in range(d):
            k = (i + 1) + (j + 1)
            if k < N:
                mu[i, j, k - 1] = 1
    return FinAlgebra(mu, f"{label}C[{label}]/{label}^{N}")


def tensor_algebra(A: FinAlgebra, B: FinAlgebra) -> FinAlgebra:
    mu = np.einsum("ijp,klq->ikjlpq", A.mu, B.mu).reshape(A.dim * B.dim, A.dim * B.dim, -1)
    unit = np.kron(A.unit, B.unit) if A.unital and B.unital else None
    return FinAlgebra(mu, f"{A.label} (x) {B.label}", unit)


def tensor_module(AB: FinAlgebra, X: FinModule, Y: FinModule) -> FinModule:
    """``X (x) Y`` with the componentwise action of ``A (x) B``."""
    act = np.einsum("ixz,kyw->ikxyzw", X.act, Y.act)
    P = X.act.shape[0] * Y.act.shape[0]
    Q = X.dim * Y.dim
    return FinModule(AB, act.reshape(P, Q, Q))


def wedge_cocycle(DA: Derivation, DB: Derivation) -> Cochain2:
    """The antisymmetric 2-cocycle on ``A (x) B`` with values in ``X (x) Y``::

        F(a1 (x) b1, a2 (x) b2) = [D_A(a1).a2] (x) [b1.D_B(b2)]
                                - [a1.D_A(a2)] (x) [D_B(b1).b2]
    """
    A, X, B, Y = DA.algebra, DA.module, DB.algebra, DB.module
    AB = tensor_algebra(A, B)
    XY = tensor_module(AB, X, Y)
    ta1 = np.einsum("xi,jxy->ijy", DA.D, X.act)   # D_A(e_i) . e_j
    ta2 = np.einsum("xj,ixy->ijy", DA.D, X.act)   # e_i . D_A(e_j)
    tb1 = np.einsum("xl,kxy->kly", DB.D, Y.act)   # e_k . D_B(e_l)
    tb2 = np.einsum("xk,lxy->kly", DB.D, Y.act)   # D_B(e_k) . e_l
    F = (np.einsum("ijx,kly->ikjlxy", ta1, tb1)
         - np.einsum("ijx,kly->ikjlxy", ta2, tb2))
    P, Q = AB.dim, XY.dim
    return Cochain2(AB, XY, F.reshape(P, P, Q))


def coboundary(algebra: FinAlgebra, module: FinModule, psi) -> Cochain2:
    """``(delta psi)(u, v) = u.psi(v) - psi(uv) + psi(u).v`` for ``psi: A -> X``."""
    psi = np.asarray(psi)
    act, mu = module.act, algebra.mu
    F = (np.einsum("xv,uxy->uvy", psi, act)
         - np.einsum("uvt,yt->uvy", mu, psi)
         + np.einsum("xu,vxy->uvy", psi, act))
    return Cochain2(algebra, module, F)


def random_cochain1(algebra, module, rng=None):
    rng = rng_from(rng)
    shape = (module.dim, algebra.dim)
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------


def hochschild_differential(c: Cochain2, u) -> np.ndarray:
    """Slice ``(delta F)(e_u, e_v, e_w)`` for all v, w at fixed basis index u."""
    F, mu, act = _num(c.F), _num(c.algebra.mu), _num(c.module.act)
    t1 = np.tensordot(F, act[u], axes=([2], [0]))
    t2 = np.tensordot(mu[u], F, axes=([1], [0]))
    t3 = np.tensordot(mu, F[u], axes=([2], [0]))
    t4 = np.tensordot(F[u], act, axes=([1], [1]))
    return t1 - t2 + t3 - t4


def cocycle_check(c: Cochain2, tol=TOL) -> bool:
    """``u.F(v,w) - F(uv,w) + F(u,vw) - F(u,v).w = 0`` on all basis triples."""
    exact = c.exact
    return all(_vanishes(hochschild_differential(c, u), exact, tol)
               for u in range(c.algebra.dim))


def antisymmetry_check(c: Cochain2, tol=TOL) -> bool:
    return _vanishes(c.F + c.F.transpose(1, 0, 2), c.exact, tol)


def symmetry_check(c: Cochain2, tol=1e-12) -> bool:
    return _vanishes(c.F - c.F.transpose(1, 0, 2), c.exact, tol)


def coboundary_symmetry_check(algebra, module, psi, tol=1e-12) -> bool:
    return symmetry_check(coboundary(algebra, module, psi), tol)


def antisymmetric_part(c: Cochain2) -> np.ndarray:
    return 0.5 * (c.F - c.F.transpose(1, 0, 2))


def distance_to_coboundary_lower(c: Cochain2) -> float:
    """``||F - delta psi|| >= ||antisym(F)||`` for every 1-cochain ``psi``."""
    return float(np.linalg.norm(antisymmetric_part(c)))


def _candidates(A: FinAlgebra, rng, cap=1000):
    grid = (1.0, 2.0, -1.0, 0.5, 3.0)
    out = []
    if A.unital:
        for t in grid:
            for j in range(A.dim):
                e = np.zeros(A.dim)
                e[j] = 1.0
                a = A.unit + t * e
                if np.any(a):
                    out.append(a)
    while len(out) < cap:
        out.append(rng.integers(-2, 3, size=A.dim).astype(float))
    return out[:cap]


def nonvanishing_witness(DA: Derivation, DB: Derivation, F: Cochain2 | None = None,
                         rng=0, cap=1000):
    """Search ``a, b`` with ``F(a^3 (x) b, a (x) b) != 0``.

    The value is cross-checked against ``1/4 D_A(a^4) (x) D_B(b^2)``.  Returns a
    dict ``{a, b, value, expected, residual}`` or ``None``.
    """
    rng = rng_from(rng)
    F = F if F is not None else wedge_cocycle(DA, DB)
    A, B = DA.algebra, DB.algebra
    As = _candidates(A, rng, cap)
    Bs = _candidates(B, rng, cap)
    for a, b in zip(As, Bs):
        u = np.kron(A.power(a, 3), b)
        v = np.kron(a, b)
        value = F(u, v)
        if np.max(np.abs(value)) <= 1e-12:
            continue
        expected = 0.25 * np.kron(DA(A.power(a, 4)), DB(B.power(b, 2)))
        return {
            "a": a.tolist(),
            "b": b.tolist(),
            "value": [complex(z) for z in value],
            "expected": [complex(z) for z in expected],
            "residual": float(np.max(np.abs(value - expected))),
        }
    return None


def polarization_check(A: FinAlgebra, samples=1000, rng=0, tol=TOL) -> dict:
    """Residuals of ``ab = [(a+b)^2 - (a-b)^2]/4`` and
    ``x^2 y^2 = [(x+y)^4 + (x-y)^4 - (x+iy)^4 - (x-iy)^4]/24``."""
    rng = rng_from(rng)
    r1 = r2 = 0.0
    sq = lambda a: A.mul(a, a)  # noqa: E731
    fourth = lambda a: sq(sq(a))  # noqa: E731
    for _ in range(samples):
        a, b = (rng.standard_normal(A.dim) + 1j * rng.standard_normal(A.dim) for _ in range(2))
        r1 = max(r1, np.max(np.abs(A.mul(a, b) - 0.25 * (sq(a + b) - sq(a - b)))))
        x, y = a, b
        rhs = (fourth(x + y) + fourth(x - y) - fourth(x + 1j * y) - fourth(x - 1j * y)) / 24
        scale = max(1.0, np.max(np.abs(rhs)))
        r2 = max(r2, np.max(np.abs(A.mul(sq(x), sq(y)) - rhs)) / scale)
    return {"product_residual": float(r1), "square_residual": float(r2),
            "passed": bool(r1 <= tol and r2 <= tol)}


def _rank(vectors, rtol=1e-9):
    M = np.array(vectors, dtype=complex)
    s = singular_values(M)
    if s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def power_span_check(A: FinAlgebra, rng=0, factor=3) -> dict:
    """Ranks of sampled ``X_{1,1}, X_2, X_{1,1,1,1}, X_{2,2}, X_4``.

    Samples are small-integer elements, so products are exact in floating
    point.  Expected: ``rank X_{1,1} = rank X_2`` and
    ``rank X_{1,1,1,1} = rank X_{2,2} = rank X_4``.
    """
    rng = rng_from(rng)
    n = factor * A.dim + 2

    def draw():
        return rng.integers(-3, 4, size=A.dim).astype(float)

    sq = lambda a: A.mul(a, a)  # noqa: E731
    X11 = [A.mul(draw(), draw()) for _ in range(n)]
    X2 = [sq(draw()) for _ in range(n)]
    X1111 = [A.mul(A.mul(draw(), draw()), A.mul(draw(), draw())) for _ in range(n)]
    X22 = [A.mul(sq(draw()), sq(draw())) for _ in range(n)]
    X4 = [sq(sq(draw())) for _ in range(n)]
    ranks = {"X11": _rank(X11), "X2": _rank(X2), "X1111": _rank(X1111),
             "X22": _rank(X22), "X4": _rank(X4), "dim": A.dim}
    ranks["passed"] = bool(ranks["X11"] == ranks["X2"]
                           and ranks["X1111"] == ranks["X22"] == ranks["X4"])
    return ranks
