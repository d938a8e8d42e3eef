"""Banded symmetric matrices and the two cones of a chain graphical model.

For the chain graph ``1 - 2 - ... - n`` two linear spaces matter:

* ``Z`` -- symmetric matrices with forced zeros off the tridiagonal band
  (concentration matrices of a nearest-neighbour Gaussian model),
* ``I`` -- "incomplete" symmetric matrices in which only the band entries
  ``(i, j)`` with ``|i - j| <= 1`` are specified (partial covariance data).

Both are coordinatised by ``2n - 1`` numbers (the diagonal and the first
off-diagonal) and are dual to each other under the trace pairing

    <y, x> = sum_i y_ii x_ii + 2 sum_i y_{i,i+1} x_{i,i+1}.

The positive-definite elements of ``Z`` form the open cone ``P``; its dual
cone ``Q`` inside ``I`` consists of the incomplete matrices whose 2x2 clique
blocks ``[[x_ii, x_{i,i+1}], [x_{i,i+1}, x_{i+1,i+1}]]`` are positive
definite.  The map ``y -> pi(y^{-1})`` is a bijection from ``P`` onto ``Q``;
its inverse is the Lauritzen map, and the positive-definite completion of
``x`` in ``Q`` whose inverse is again banded is the "hat" completion.

Vertices are labelled ``1..n`` in the public API; arrays are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "ConeError",
    "TridiagSym",
    "IncompleteSym",
    "DenseSym",
    "project_pi",
    "band_of",
    "is_in_P",
    "is_in_Q",
    "assert_in_P",
    "assert_in_Q",
    "pairing",
    "inverse_image",
    "lauritzen_map",
    "hat_completion",
    "leading_minors",
    "trailing_minors",
    "leading_log_minors",
    "trailing_log_minors",
    "zg_basis",
    "ig_basis",
    "dense_to_csv",
    "dense_from_csv",
]

#: Dense symmetric matrices are carried as plain float arrays.
DenseSym = NDArray[np.float64]

# Cones are open: a pivot within PD_RTOL * scale of zero counts as "outside".
PD_RTOL = 1e-12


class ConeError(ValueError):
    """A matrix failed a cone-membership test.

    The message names the violated minor so CLI diagnostics can surface it.
    """


def _as_vector(v: Iterable[float], length: int, name: str) -> NDArray[np.float64]:
    arr = np.asarray(v, dtype=float).reshape(-1).copy()
    if arr.shape != (length,):
        raise ValueError(f"{name} must have length {length}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


@dataclass(eq=False)
class _BandedSym:
    """Shared storage for banded symmetric data: diagonal plus off-diagonal."""

    n: int
    diag: NDArray[np.float64]
    off: NDArray[np.float64] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("size must be at least 1")
        self.diag = _as_vector(self.diag, self.n, "diag")
        if self.off is None:
            self.off = np.zeros(self.n - 1)
        self.off = _as_vector(self.off, self.n - 1, "off")

    # -- coordinates -------------------------------------------------------

    def coords(self) -> NDArray[np.float64]:
        """Canonical (2n-1)-vector: diagonal entries followed by off entries."""
        return np.concatenate([self.diag, self.off])

    @classmethod
    def from_coords(cls, vec: Iterable[float]):
        vec = np.asarray(vec, dtype=float).reshape(-1)
        if vec.size % 2 == 0:
            raise ValueError("coordinate vector must have odd length 2n-1")
        n = (vec.size + 1) // 2
        return cls(n, vec[:n], vec[n:])

    def clique_dets(self) -> NDArray[np.float64]:
        """Determinants of the 2x2 clique blocks, one per edge."""
        return self.diag[:-1] * self.diag[1:] - self.off**2

    def clique_block(self, i: int) -> NDArray[np.float64]:
        """Dense 2x2 block on vertices ``{i, i+1}`` (1-based ``i``)."""
        if not 1 <= i <= self.n - 1:
            raise ValueError(f"clique index {i} out of range 1..{self.n - 1}")
        d0, d1, o = self.diag[i - 1], self.diag[i], self.off[i - 1]
        return np.array([[d0, o], [o, d1]])

    # -- linear structure ----------------------------------------------------

    def __add__(self, other):
        if type(other) is not type(self) or other.n != self.n:
            return NotImplemented
        return type(self)(self.n, self.diag + other.diag, self.off + other.off)

    def __sub__(self, other):
        if type(other) is not type(self) or other.n != self.n:
            return NotImplemented
        return type(self)(self.n, self.diag - other.diag, self.off - other.off)

    def __rmul__(self, c: float):
        return type(self)(self.n, c * self.diag, c * self.off)

    def __neg__(self):
        return type(self)(self.n, -self.diag, -self.off)

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        return {"n": self.n, "diag": self.diag.tolist(), "off": self.off.tolist()}

    @classmethod
    def from_json_dict(cls, d: dict):
        return cls(int(d["n"]), d["diag"], d.get("off", []))

    def allclose(self, other, rtol: float = 1e-12, atol: float = 1e-12) -> bool:
        return (
            self.n == other.n
            and np.allclose(self.diag, other.diag, rtol=rtol, atol=atol)
            and np.allclose(self.off, other.off, rtol=rtol, atol=atol)
        )


class TridiagSym(_BandedSym):
    """Element of ``Z``: a symmetric matrix vanishing off the tridiagonal band."""

    def to_dense(self) -> DenseSym:
        a = np.diag(self.diag).astype(float)
        idx = np.arange(self.n - 1)
        a[idx, idx + 1] = self.off
        a[idx + 1, idx] = self.off
        return a

    @classmethod
    def from_dense(cls, a: DenseSym) -> "TridiagSym":
        """Band part of a dense symmetric matrix (off-band entries dropped)."""
        a = np.asarray(a, dtype=float)
        n = a.shape[0]
        return cls(n, np.diag(a).copy(), np.diag(a, 1).copy())

    def submatrix(self, lo: int, hi: int) -> "TridiagSym":
        """Principal submatrix on the contiguous vertex set ``{lo..hi}`` (1-based)."""
        if not 1 <= lo <= hi <= self.n:
            raise ValueError("invalid interval")
        return TridiagSym(hi - lo + 1, self.diag[lo - 1 : hi], self.off[lo - 1 : hi - 1])


class IncompleteSym(_BandedSym):
    """Element of ``I``: only entries with ``|i - j| <= 1`` are specified."""


def project_pi(a: DenseSym) -> IncompleteSym:
    """Project a dense symmetric matrix onto ``I`` by keeping the band entries."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    return IncompleteSym(n, np.diag(a).copy(), np.diag(a, 1).copy())


def band_of(a: DenseSym) -> TridiagSym:
    """Band part of a dense matrix, read as an element of ``Z``."""
    return TridiagSym.from_dense(a)


# ---------------------------------------------------------------------------
# cone membership
# ---------------------------------------------------------------------------


def _pivots(diag: NDArray[np.float64], off: NDArray[np.float64]) -> NDArray[np.float64]:
    """LDL pivots of the tridiagonal matrix; product of the first i is the i-th minor.

    Stops with a non-positive pivot left in place when the matrix is not PD.
    """
    n = diag.size
    piv = np.empty(n)
    scale = max(1.0, float(np.max(np.abs(diag))) if n else 1.0)
    tol = PD_RTOL * scale
    piv[0] = diag[0]
    for i in range(1, n):
        if piv[i - 1] <= tol:
            piv[i:] = -np.inf
            return piv
        piv[i] = diag[i] - off[i - 1] ** 2 / piv[i - 1]
    return piv


def is_in_P(y: TridiagSym) -> bool:
    """True iff ``y`` is positive definite (all leading principal minors > 0)."""
    piv = _pivots(y.diag, y.off)
    scale = max(1.0, float(np.max(np.abs(y.diag))))
    return bool(np.all(piv > PD_RTOL * scale))


def assert_in_P(y: TridiagSym, name: str = "y") -> None:
    piv = _pivots(y.diag, y.off)
    scale = max(1.0, float(np.max(np.abs(y.diag))))
    bad = np.nonzero(piv <= PD_RTOL * scale)[0]
    if bad.size:
        i = int(bad[0]) + 1
        raise ConeError(
            f"{name} is not positive definite: leading principal minor {i} "
            f"(pivot {piv[bad[0]]:.6g}) is not positive"
        )


def is_in_Q(x: IncompleteSym) -> bool:
    """True iff every 2x2 clique block of ``x`` is positive definite.

    For ``n = 1`` the condition degenerates to ``x_11 > 0``.
    """
    scale = max(1.0, float(np.max(np.abs(x.diag))))
    tol = PD_RTOL * scale
    if np.any(x.diag <= tol):
        return False
    if x.n == 1:
        return True
    return bool(np.all(x.clique_dets() > tol * scale))


def assert_in_Q(x: IncompleteSym, name: str = "x") -> None:
    scale = max(1.0, float(np.max(np.abs(x.diag))))
    tol = PD_RTOL * scale
    bad = np.nonzero(x.diag <= tol)[0]
    if bad.size:
        i = int(bad[0]) + 1
        raise ConeError(f"{name} is outside the dual cone: diagonal entry {i} is not positive")
    if x.n == 1:
        return
    dets = x.clique_dets()
    bad = np.nonzero(dets <= tol * scale)[0]
    if bad.size:
        i = int(bad[0]) + 1
        raise ConeError(
            f"{name} is outside the dual cone: clique block ({i},{i + 1}) has "
            f"non-positive determinant {dets[bad[0]]:.6g}"
        )


# ---------------------------------------------------------------------------
# pairing and the bijections between the cones
# ---------------------------------------------------------------------------


def pairing(y: TridiagSym, x: IncompleteSym) -> float:
    """Trace pairing ``<y, x>``; off-diagonal entries count twice."""
    if y.n != x.n:
        raise ValueError(f"size mismatch: {y.n} vs {x.n}")
    return float(y.diag @ x.diag + 2.0 * (y.off @ x.off))


def inverse_image(y: TridiagSym) -> IncompleteSym:
    """``pi(y^{-1})`` for positive definite ``y``; lands in the dual cone."""
    assert_in_P(y)
    return project_pi(np.linalg.inv(y.to_dense()))


def lauritzen_map(x: IncompleteSym) -> TridiagSym:
    """The unique positive definite banded ``y`` with ``pi(y^{-1}) = x``.

    Assembled clique by clique:

        y = sum_i ((x_{i,i+1} block)^{-1})^0  -  sum separators (1/x_ii)^0.
    """
    assert_in_Q(x)
    n = x.n
    if n == 1:
        return TridiagSym(1, [1.0 / x.diag[0]], [])
    diag = np.zeros(n)
    off = np.zeros(n - 1)
    for i in range(n - 1):
        b = np.linalg.inv(x.clique_block(i + 1))
        diag[i] += b[0, 0]
        diag[i + 1] += b[1, 1]
        off[i] += b[0, 1]
    diag[1 : n - 1] -= 1.0 / x.diag[1 : n - 1]
    return TridiagSym(n, diag, off)


def hat_completion(x: IncompleteSym) -> DenseSym:
    """Positive definite completion of ``x`` whose inverse is banded.

    Computed as the dense inverse of the Lauritzen image; satisfies
    ``pi(hat) = x`` and ``hat^{-1} in Z``.
    """
    return np.linalg.inv(lauritzen_map(x).to_dense())


# ---------------------------------------------------------------------------
# minors of banded matrices
# ---------------------------------------------------------------------------


def leading_minors(y: TridiagSym) -> NDArray[np.float64]:
    """Leading principal minors ``|y_{1:i}|``, i = 1..n, by the continuant recurrence.

    Plain arithmetic: minors of large well-scaled matrices overflow to
    inf/nan around n ~ 50; use :func:`leading_log_minors` past desk scale.
    """
    n = y.n
    out = np.empty(n)
    prev2, prev1 = 1.0, y.diag[0]
    out[0] = prev1
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(1, n):
            cur = y.diag[i] * prev1 - y.off[i - 1] ** 2 * prev2
            out[i] = cur
            prev2, prev1 = prev1, cur
    return out


def trailing_minors(y: TridiagSym) -> NDArray[np.float64]:
    """Trailing principal minors ``|y_{i:n}|``, i = 1..n."""
    rev = TridiagSym(y.n, y.diag[::-1].copy(), y.off[::-1].copy())
    return leading_minors(rev)[::-1].copy()


def leading_log_minors(y: TridiagSym, name: str = "y") -> NDArray[np.float64]:
    """``log |y_{1:i}|`` for positive definite ``y``.

    Uses LDL pivots (cumulative log products), which stay on the scale of the
    matrix entries, so minors of any magnitude are handled without overflow.
    Raises :class:`ConeError` if ``y`` is not positive definite.
    """
    piv = _pivots(y.diag, y.off)
    scale = max(1.0, float(np.max(np.abs(y.diag))))
    bad = np.nonzero(piv <= PD_RTOL * scale)[0]
    if bad.size:
        raise ConeError(
            f"{name} is not positive definite: leading principal minor {int(bad[0]) + 1} "
            "is not positive"
        )
    return np.cumsum(np.log(piv))


def trailing_log_minors(y: TridiagSym, name: str = "y") -> NDArray[np.float64]:
    """``log |y_{i:n}|`` for positive definite ``y`` (index i stored 0-based)."""
    rev = TridiagSym(y.n, y.diag[::-1].copy(), y.off[::-1].copy())
    return leading_log_minors(rev, name=name)[::-1].copy()


# ---------------------------------------------------------------------------
# canonical bases of the coordinate space
# ---------------------------------------------------------------------------


def dense_to_csv(path: str, a: DenseSym) -> None:
    """Write a dense symmetric matrix as row-major CSV (shortest round-trip reprs)."""
    a = np.asarray(a, dtype=float)
    with open(path, "w", encoding="utf-8") as f:
        for row in a:
            f.write(",".join(repr(float(v)) for v in row) + "\n")


def dense_from_csv(path: str) -> DenseSym:
    """Read a row-major CSV dense matrix."""
    with open(path, "r", encoding="utf-8") as f:
        rows = [
            [float(c) for c in line.strip().split(",")]
            for line in f
            if line.strip() and not line.startswith("#")
        ]
    return np.asarray(rows, dtype=float)


def zg_basis(n: int, k: int) -> TridiagSym:
    """k-th canonical basis element of ``Z`` (0 <= k < 2n-1): e_ii then E_{i,i+1}."""
    vec = np.zeros(2 * n - 1)
    vec[k] = 1.0
    return TridiagSym.from_coords(vec)


def ig_basis(n: int, k: int) -> IncompleteSym:
    """k-th canonical basis element of ``I`` in the same coordinates."""
    vec = np.zeros(2 * n - 1)
    vec[k] = 1.0
    return IncompleteSym.from_coords(vec)
