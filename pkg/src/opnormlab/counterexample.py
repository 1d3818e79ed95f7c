"""Isometries with orthogonal ranges and the Haagerup-vs-min gap.

With ``s_j = e_j (x) I_d`` (shape ``nd x d``) we have ``s_j* s_k = delta_jk I``
and ``sum_j s_j s_j* = I``.  The element ``x_n = sum s_j (x) s_j^T`` has
Haagerup formula value 1, while transposing its second leg gives
``y_n = sum s_j (x) s_j`` with ``y_n* y_n = n I (x) I``, so its min norm is
``sqrt(n)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import SizeError, dimension_cap, zero_pad
from .tensornorm import TensorElement, haagerup_upper, min_norm, theorem1_certificate


@dataclass(frozen=True)
class IsometryFamily:
    n: int
    d: int
    matrices: tuple

    def padded(self):
        """Each ``s_j`` embedded in an ``nd x nd`` zero matrix."""
        D = self.n * self.d
        return [zero_pad(s, D, D) for s in self.matrices]


def shift_family(n, d=1) -> IsometryFamily:
    if n < 1 or d < 1:
        raise ValueError("need n >= 1 and d >= 1")
    if (n * d) ** 2 > dimension_cap():
        raise SizeError(f"n*d = {n * d} too large for the dimension cap")
    eye = np.eye(d, dtype=complex)
    mats = []
    for j in range(n):
        e = np.zeros((n, 1), dtype=complex)
        e[j, 0] = 1.0
        mats.append(np.kron(e, eye))
    return IsometryFamily(n, d, tuple(mats))


def build_xn(fam: IsometryFamily) -> TensorElement:
    """``sum_j s_j (x) s_j^T`` with square (padded) legs."""
    return TensorElement([(s, s.T) for s in fam.padded()])


def build_yn(fam: IsometryFamily) -> TensorElement:
    """``sum_j s_j (x) s_j``; equals ``opposite(build_xn(fam), 'second')``."""
    return TensorElement([(s, s) for s in fam.padded()])


def gap_experiment(n_max, d=1):
    """Rows ``{n, h_upper, min_flipped, ratio, certificate}`` for n = 1..n_max."""
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    rows = []
    for n in range(1, n_max + 1):
        fam = shift_family(n, d)
        x, y = build_xn(fam), build_yn(fam)
        h = haagerup_upper(x)
        mf = min_norm(y)
        rows.append({
            "n": n,
            "h_upper": h,
            "min_flipped": mf,
            "ratio": mf / h,
            "certificate": theorem1_certificate(y).to_dict(),
        })
    return rows
