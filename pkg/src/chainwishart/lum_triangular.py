"""Pivot-adapted triangular factorizations with the chain zero pattern.

A matrix is *LU(M) triangular* when its rows up to ``M`` form a lower
triangle and its rows from ``M`` on form an upper triangle (so LU(n) is
plain lower triangular and LU(1) plain upper triangular).  Such matrices
form a group under multiplication.  Restricted to the chain pattern
(``T_ij = 0`` unless ``|i - j| <= 1``) an LU(M) matrix carries only a
positive diagonal, subdiagonal entries below the pivot and superdiagonal
entries from the pivot on -- ``O(n)`` data.

Every positive definite banded ``y`` factors as ``y = T T'`` with ``T`` of
this shape, for every pivot ``M``; the factor is built by peeling vertex 1
while the pivot lies to the right and vertex ``n`` once it is reached.  The
factorization turns the mean map into a diagonal congruence, which is what
makes the closed-form variance function work: with ``y`` the preimage of
``m`` under the mean map, the hat completion is

    hat(m) = T^{-T} diag(s) T^{-1}.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np
from numpy.typing import NDArray

from .matrix_spaces import DenseSym, IncompleteSym, TridiagSym, assert_in_P
from .peeling import phi_inv, phi_tilde_inv
from .power_functions import ShapeParams

__all__ = ["LUMMatrix", "decompose", "multiply", "invert", "is_lum_pattern", "hat_via_T"]


@dataclass(eq=False)
class LUMMatrix:
    """Chain-patterned LU(M) triangular matrix.

    ``sub`` carries the subdiagonal entries ``T_{i+1,i}`` for ``i = 1..M-1``
    (rows below the pivot), ``sup`` the superdiagonal entries ``T_{i,i+1}``
    for ``i = M..n-1`` (rows from the pivot on); the diagonal is positive.
    """

    n: int
    M: int
    diag: NDArray[np.float64]
    sub: NDArray[np.float64]
    sup: NDArray[np.float64]

    def __post_init__(self) -> None:
        self.diag = np.asarray(self.diag, dtype=float).reshape(-1)
        self.sub = np.asarray(self.sub, dtype=float).reshape(-1)
        self.sup = np.asarray(self.sup, dtype=float).reshape(-1)
        if not 1 <= self.M <= self.n:
            raise ValueError(f"pivot M={self.M} out of range 1..{self.n}")
        if self.diag.shape != (self.n,):
            raise ValueError("diag must have length n")
        if self.sub.shape != (self.M - 1,):
            raise ValueError("sub must have length M-1")
        if self.sup.shape != (self.n - self.M,):
            raise ValueError("sup must have length n-M")
        if not np.all(self.diag > 0):
            raise ValueError("diagonal of the factor must be positive")

    def to_dense(self) -> DenseSym:
        t = np.diag(self.diag).astype(float)
        for i in range(1, self.M):  # T_{i+1,i}
            t[i, i - 1] = self.sub[i - 1]
        for i in range(self.M, self.n):  # T_{i,i+1}
            t[i - 1, i] = self.sup[i - self.M]
        return t


def decompose(y: TridiagSym, M: int) -> LUMMatrix:
    """LU(M) factor ``T`` with ``y = T T'``, built by corner peeling.

    Peels vertex 1 while the pivot is still to the right (``M >= 2``) and
    vertex ``n`` once the pivot is leftmost, mirroring the inductive
    construction of the factorization.
    """
    if not 1 <= M <= y.n:
        raise ValueError(f"pivot M={M} out of range 1..{y.n}")
    assert_in_P(y)
    if y.n == 1:
        return LUMMatrix(1, 1, [sqrt(y.diag[0])], [], [])
    if M >= 2:
        p = phi_inv(y)
        v = decompose(p.rest, M - 1)
        sa = sqrt(p.a)
        return LUMMatrix(
            y.n,
            M,
            np.concatenate([[sa], v.diag]),
            np.concatenate([[sa * p.b], v.sub]),
            v.sup,
        )
    p = phi_tilde_inv(y)
    v = decompose(p.rest, 1)
    sa = sqrt(p.a)
    return LUMMatrix(
        y.n,
        1,
        np.concatenate([v.diag, [sa]]),
        v.sub,
        np.concatenate([v.sup, [sa * p.b]]),
    )


def multiply(s: LUMMatrix, t: LUMMatrix) -> DenseSym:
    """Dense product of two factors with the same pivot; stays LU(M) shaped."""
    if (s.n, s.M) != (t.n, t.M):
        raise ValueError("factors must share size and pivot")
    return s.to_dense() @ t.to_dense()


def invert(t: LUMMatrix) -> DenseSym:
    """Dense inverse of the factor; again LU(M) triangular (not chain patterned)."""
    return np.linalg.inv(t.to_dense())


def is_lum_pattern(a: DenseSym, M: int, atol: float = 1e-10) -> bool:
    """Check the LU(M) zero pattern of a dense matrix up to ``atol``."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i < M and j > i and abs(a[i - 1, j - 1]) > atol:
                return False
            if i > M and i > j and abs(a[i - 1, j - 1]) > atol:
                return False
    return True


def hat_via_T(p: ShapeParams, m: IncompleteSym) -> DenseSym:
    """Hat completion of ``m`` through the factorized preimage of the mean map.

    With ``y`` the inverse mean of ``m`` at shape ``(M, s)`` and ``y = T T'``:

        hat(m) = T^{-T} diag(s) T^{-1}.

    At ``s = (1, ..., 1)`` this is the plain positive definite completion.
    """
    from .wishart_q import inverse_mean  # deferred: avoids a module cycle

    y = inverse_mean(p, m)
    t = decompose(y, p.M)
    tinv = invert(t)
    return tinv.T @ np.diag(p.s) @ tinv
