"""Norms of elements of M(n1 x n2) (x) M(m1 x m2).

An element ``u = sum_i a_i (x) b_i`` is stored as its list of pairs.  Only
the min norm is computed exactly.  The Haagerup norm is bracketed from
above by the value of its defining formula on a representation (optionally
improved by a gauge search), and the operator-space projective norm by the
triangle inequality; the min norm of the untwisted element is a certified
lower bound for the projective norm of the element with its second leg
transposed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla

from .linalg import (
    ShapeError, as_matrix, kron, matrix_from_dict, matrix_to_dict, pad_square,
    rng_from, spectral_norm,
)

CONSISTENCY_TOL = 1e-9


@dataclass(frozen=True)
class TensorElement:
    pairs: tuple

    def __init__(self, pairs):
        pairs = [(as_matrix(a), as_matrix(b)) for a, b in pairs]
        if not pairs:
            raise ValueError("a tensor element needs at least one pair")
        ls, rs = pairs[0][0].shape, pairs[0][1].shape
        for a, b in pairs:
            if a.shape != ls or b.shape != rs:
                raise ShapeError("all left (resp. right) factors must share a shape")
        object.__setattr__(self, "pairs", tuple(pairs))

    @classmethod
    def zero(cls, left_shape, right_shape):
        return cls([(np.zeros(left_shape), np.zeros(right_shape))])

    @property
    def left_shape(self):
        return self.pairs[0][0].shape

    @property
    def right_shape(self):
        return self.pairs[0][1].shape

    def __len__(self):
        return len(self.pairs)

    def matrix(self) -> np.ndarray:
        """``sum_i kron(a_i, b_i)``."""
        return sum(kron(a, b) for a, b in self.pairs)

    def __sub__(self, other):
        return TensorElement(list(self.pairs) + [(-a, b) for a, b in other.pairs])

    def padded(self):
        """Zero-pad every factor to a square matrix."""
        return TensorElement([(pad_square(a), pad_square(b)) for a, b in self.pairs])

    def to_dict(self):
        return {
            "left_shape": list(self.left_shape),
            "right_shape": list(self.right_shape),
            "pairs": [{"a": matrix_to_dict(a), "b": matrix_to_dict(b)} for a, b in self.pairs],
        }

    @classmethod
    def from_dict(cls, d):
        u = cls([(matrix_from_dict(p["a"]), matrix_from_dict(p["b"])) for p in d["pairs"]])
        if list(u.left_shape) != list(d["left_shape"]) or list(u.right_shape) != list(d["right_shape"]):
            raise ShapeError("declared shapes disagree with the stored pairs")
        return u

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def random_element(left_shape, right_shape, k, rng=None) -> TensorElement:
    from .linalg import random_matrix

    rng = rng_from(rng)
    return TensorElement([(random_matrix(*left_shape, rng), random_matrix(*right_shape, rng))
                          for _ in range(k)])


def _is_zero(u):
    return all(not np.any(a) or not np.any(b) for a, b in u.pairs)


def min_norm(u: TensorElement) -> float:
    """Injective (minimal) tensor norm: spectral norm of ``sum kron(a_i, b_i)``."""
    if _is_zero(u):
        return 0.0
    return spectral_norm(u.matrix())


def opposite(u: TensorElement, leg="second") -> TensorElement:
    """Transpose every factor on one leg (rectangular legs are zero-padded first)."""
    if leg not in ("first", "second"):
        raise ValueError("leg must be 'first' or 'second'")
    out = []
    for a, b in u.pairs:
        if leg == "first":
            a = (a if a.shape[0] == a.shape[1] else pad_square(a)).T
        else:
            b = (b if b.shape[0] == b.shape[1] else pad_square(b)).T
        out.append((a, b))
    return TensorElement(out)


def _row_col_norms(As, Bs):
    """``||sum a a*||^(1/2)`` and ``||sum b* b||^(1/2)`` via Hermitian eigenvalues."""
    AA = np.einsum("kij,klj->il", As, As.conj())
    BB = np.einsum("kji,kjl->il", Bs.conj(), Bs)
    ra = np.sqrt(max(np.linalg.eigvalsh(AA)[-1], 0.0))
    cb = np.sqrt(max(np.linalg.eigvalsh(BB)[-1], 0.0))
    return ra, cb


def haagerup_upper(u: TensorElement) -> float:
    """The Haagerup formula on the STORED representation (an upper bound)."""
    if _is_zero(u):
        return 0.0
    As = np.array([a for a, _ in u.pairs])
    Bs = np.array([b for _, b in u.pairs])
    ra, cb = _row_col_norms(As, Bs)
    return float(ra * cb)


def gauge(u: TensorElement, M) -> TensorElement:
    """Re-represent ``u`` as ``a'_i = sum_j M_ji a_j``, ``b'_i = sum_j (M^-1)_ij b_j``."""
    M = np.asarray(M, dtype=complex)
    Minv = np.linalg.inv(M)
    As = np.array([a for a, _ in u.pairs])
    Bs = np.array([b for _, b in u.pairs])
    A2 = np.einsum("ji,jrc->irc", M, As)
    B2 = np.einsum("ij,jrc->irc", Minv, Bs)
    return TensorElement(list(zip(A2, B2)))


class GaugeResult(NamedTuple):
    value: float
    gauge: np.ndarray
    diagnostics: dict


def haagerup_optimize(u: TensorElement, restarts=8, iters=300, rng=0) -> GaugeResult:
    """Minimize the Haagerup formula over gauge transforms ``M = expm(G)``.

    Local descent (forward-difference gradient on the log objective with
    Armijo backtracking).  Restart 0 starts from the identity, so the result
    never exceeds :func:`haagerup_upper`.
    """
    k = len(u)
    if _is_zero(u):
        return GaugeResult(0.0, np.eye(k, dtype=complex), {"restarts": 0, "jittered": 0})
    if k == 1:
        return GaugeResult(haagerup_upper(u), np.eye(1, dtype=complex),
                           {"restarts": 0, "jittered": 0})
    rng = rng_from(rng)
    As = np.array([a for a, _ in u.pairs])
    Bs = np.array([b for _, b in u.pairs])
    npar = 2 * k * k

    def unpack(theta):
        return (theta[: k * k] + 1j * theta[k * k:]).reshape(k, k)

    def objective(theta):
        M = sla.expm(unpack(theta))
        # det(expm(G)) = exp(tr G) never vanishes; guard only conditioning
        Minv = sla.expm(-unpack(theta))
        A2 = np.einsum("ji,jrc->irc", M, As)
        B2 = np.einsum("ij,jrc->irc", Minv, Bs)
        ra, cb = _row_col_norms(A2, B2)
        if ra <= 0 or cb <= 0:
            return -np.inf
        return np.log(ra) + np.log(cb)

    best_val, best_theta = np.inf, np.zeros(npar)
    jittered = 0
    h = 1e-7
    for r in range(restarts):
        theta = np.zeros(npar) if r == 0 else 0.5 * rng.standard_normal(npar)
        f = objective(theta)
        if not np.isfinite(f):
            jittered += 1
            theta = 1e-3 * rng.standard_normal(npar)
            f = objective(theta)
        step = 1.0
        for _ in range(iters):
            grad = np.array([(objective(theta + h * e) - f) / h for e in np.eye(npar)])
            gn = np.linalg.norm(grad)
            if gn < 1e-10:
                break
            while step > 1e-12:
                trial = theta - step * grad
                if np.linalg.cond(sla.expm(unpack(trial))) > 1e12:
                    jittered += 1
                    step *= 0.5
                    continue
                ft = objective(trial)
                if ft <= f - 1e-4 * step * gn**2:
                    break
                step *= 0.5
            else:
                break
            theta, f = trial, ft
            step = min(2.0 * step, 10.0)
        if f < best_val:
            best_val, best_theta = f, theta
    value = float(np.exp(best_val))
    value = min(value, haagerup_upper(u))
    return GaugeResult(value, sla.expm(unpack(best_theta)),
                       {"restarts": restarts, "jittered": jittered})


def projective_upper(u: TensorElement) -> float:
    """``sum_i ||a_i|| ||b_i||`` over the stored pairs."""
    if _is_zero(u):
        return 0.0
    return float(sum(spectral_norm(a) * spectral_norm(b) for a, b in u.pairs))


@dataclass
class Certificate:
    lower: float
    upper: float
    consistent: bool

    def to_dict(self):
        return {"lower": self.lower, "upper": self.upper, "consistent": self.consistent}


def theorem1_certificate(u: TensorElement) -> Certificate:
    """Bracket the projective norm of ``opposite(u, 'second')``.

    The min norm of ``u`` bounds it from below (the identity on the algebraic
    tensor product is contractive from the projective tensor product with the
    twisted second factor into the min tensor product); the sum of cross
    norms bounds it from above.  ``consistent`` is False only if the
    implementation is broken.
    """
    u = u.padded()
    lower = min_norm(u)
    upper = projective_upper(opposite(u, "second"))
    return Certificate(lower, upper, bool(lower <= upper + CONSISTENCY_TOL))
