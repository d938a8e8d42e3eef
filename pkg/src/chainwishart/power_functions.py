"""Generalized power functions on the chain cones, evaluated in log scale.

On the concentration cone ``P`` the pivot-indexed power function is a product
of powers of leading, full, and trailing principal minors,

    Delta_s^(M)(y) = prod_{i<M} |y_{1:i}|^{s_i - s_{i+1}} * |y|^{s_M}
                     * prod_{i>M} |y_{i:n}|^{s_i - s_{i-1}},

while on the dual cone ``Q`` it is a ratio of clique-block determinants and
diagonal entries,

    delta_s^(M)(x) = prod_{i<M} |x_{i,i+1}|^{s_i} * prod_{i>M} |x_{i-1,i}|^{s_i}
                     / ( prod_{i=2}^{M-1} x_ii^{s_{i-1}}
                         * x_MM^{s_{M-1} - s_M + s_{M+1}}
                         * prod_{i=M+1}^{n-1} x_ii^{s_{i+1}} ),

with the boundary convention ``s_0 = s_{n+1} = 0`` baked in, so the same
expression covers pivots at the chain endpoints (where the denominator has
``n - 1`` factors instead of ``n - 2``).

Both functions also exist indexed by an eliminating order; they depend on the
order only through its maximal vertex, which the order-indexed evaluators
here make checkable.  The characteristic function of the dual cone, ``phi``,
is the special product with clique exponents ``-3/2`` and unit separator
exponents.

Everything is computed and returned in log scale: the minors grow or shrink
exponentially with ``n``, so exponentiation is left to the caller.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
from numpy.typing import NDArray

from .chain_graph import EliminatingOrder
from .matrix_spaces import (
    IncompleteSym,
    TridiagSym,
    assert_in_Q,
    leading_log_minors,
    trailing_log_minors,
)

__all__ = [
    "ShapeParams",
    "delta_exponents",
    "phi_exponents",
    "log_delta_M",
    "log_Delta_M",
    "log_delta_order",
    "log_Delta_order",
    "log_phi",
    "homogeneity_degree",
]


@dataclass(frozen=True)
class ShapeParams:
    """Pivot vertex ``M`` (1-based) and shape vector ``s``.

    The domain flags are advisory: the power functions are defined for every
    real ``s``; only densities, normalizing constants and samplers restrict
    to the integrability domains.
    """

    M: int
    s: NDArray[np.float64]

    def __post_init__(self) -> None:
        object.__setattr__(self, "s", np.asarray(self.s, dtype=float).reshape(-1).copy())
        if self.s.size < 1:
            raise ValueError("shape vector must be non-empty")
        if not np.all(np.isfinite(self.s)):
            raise ValueError("shape vector must be finite")
        if not 1 <= self.M <= self.s.size:
            raise ValueError(f"pivot M={self.M} out of range 1..{self.s.size}")

    @property
    def n(self) -> int:
        return self.s.size

    def in_q_domain(self) -> bool:
        """Integrability on ``Q``: s_i > 1/2 off the pivot and s_M > 0."""
        ok = self.s > 0.5
        ok[self.M - 1] = self.s[self.M - 1] > 0.0
        return bool(np.all(ok))

    def in_p_domain(self) -> bool:
        """Integrability on ``P``: s_i > -3/2 off the pivot and s_M > -1."""
        ok = self.s > -1.5
        ok[self.M - 1] = self.s[self.M - 1] > -1.0
        return bool(np.all(ok))

    def to_json_dict(self) -> dict:
        return {"M": self.M, "s": self.s.tolist()}

    @classmethod
    def from_json_dict(cls, d: dict) -> "ShapeParams":
        return cls(int(d["M"]), d["s"])


def _s_ext(s: NDArray[np.float64]) -> NDArray[np.float64]:
    """Shape vector padded with the convention s_0 = s_{n+1} = 0 (1-based access)."""
    return np.concatenate([[0.0], s, [0.0]])


def delta_exponents(s: Iterable[float], M: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Exponent vectors of ``delta_s^(M)`` over its atoms.

    Returns ``(clique_exps, diag_exps)`` such that

        log delta_s^(M)(x) = sum_b clique_exps[b] * log |x_{b,b+1}|
                             + sum_j diag_exps[j] * log x_jj,

    with blocks indexed ``b = 1..n-1`` (stored 0-based) and the endpoint
    convention handled uniformly.  This is the single source of truth reused
    by densities, mean formulas and quadratic-construction bookkeeping.
    """
    s = np.asarray(s, dtype=float).reshape(-1)
    n = s.size
    if not 1 <= M <= n:
        raise ValueError(f"pivot M={M} out of range 1..{n}")
    se = _s_ext(s)
    cliq = np.zeros(max(n - 1, 0))
    for b in range(1, n):  # block {b, b+1}
        cliq[b - 1] = se[b] if b <= M - 1 else se[b + 1]
    diag = np.zeros(n)
    for j in range(2, M):
        diag[j - 1] = -se[j - 1]
    diag[M - 1] = -(se[M - 1] - se[M] + se[M + 1])
    for j in range(M + 1, n):
        diag[j - 1] = -se[j + 1]
    return cliq, diag


def phi_exponents(n: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Exponent vectors of the characteristic function ``phi`` of the dual cone.

    For ``n >= 2``: clique exponents ``-3/2`` and separator exponents ``+1``.
    For ``n = 1`` the function is ``1/x``.
    """
    if n == 1:
        return np.zeros(0), np.array([-1.0])
    cliq = np.full(n - 1, -1.5)
    diag = np.zeros(n)
    diag[1 : n - 1] = 1.0
    return cliq, diag


def _log_atoms(x: IncompleteSym) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Logs of the clique determinants and diagonal entries of ``x`` in ``Q``."""
    assert_in_Q(x)
    if x.n == 1:
        return np.zeros(0), np.log(x.diag)
    return np.log(x.clique_dets()), np.log(x.diag)


def log_delta_M(p: ShapeParams, x: IncompleteSym) -> float:
    """``log delta_s^(M)(x)`` on the dual cone."""
    if p.n != x.n:
        raise ValueError("shape vector and matrix size disagree")
    cliq_e, diag_e = delta_exponents(p.s, p.M)
    log_cliq, log_diag = _log_atoms(x)
    return float(cliq_e @ log_cliq + diag_e @ log_diag)


def log_Delta_M(p: ShapeParams, y: TridiagSym) -> float:
    """``log Delta_s^(M)(y)`` on the concentration cone."""
    if p.n != y.n:
        raise ValueError("shape vector and matrix size disagree")
    n, M, s = p.n, p.M, p.s
    lead = leading_log_minors(y)  # lead[i-1] = log |y_{1:i}|
    trail = trailing_log_minors(y)  # trail[i-1] = log |y_{i:n}|
    total = s[M - 1] * lead[n - 1]
    for i in range(1, M):
        total += (s[i - 1] - s[i]) * lead[i - 1]
    for i in range(M + 1, n + 1):
        total += (s[i - 1] - s[i - 2]) * trail[i - 1]
    return float(total)


def log_phi(x: IncompleteSym) -> float:
    """Log of the characteristic function of the dual cone."""
    cliq_e, diag_e = phi_exponents(x.n)
    log_cliq, log_diag = _log_atoms(x)
    return float(cliq_e @ log_cliq + diag_e @ log_diag)


# ---------------------------------------------------------------------------
# order-indexed power functions
# ---------------------------------------------------------------------------


def log_delta_order(s: Iterable[float], order: EliminatingOrder, x: IncompleteSym) -> float:
    """Order-indexed power function on ``Q``:

        sum_v s_v * log( |x_{v union v+}| / |x_{v+}| )

    where ``v+`` is the future-neighbour set of ``v``.  Equals
    :func:`log_delta_M` at ``M = order.max_vertex``.
    """
    s = np.asarray(s, dtype=float).reshape(-1)
    n = x.n
    if s.size != n or order.n != n:
        raise ValueError("sizes disagree")
    assert_in_Q(x)
    pos = {v: i for i, v in enumerate(order.sequence)}
    total = 0.0
    for v in range(1, n + 1):
        fut = [w for w in (v - 1, v + 1) if 1 <= w <= n and pos[w] > pos[v]]
        if not fut:
            num = np.log(x.diag[v - 1])
            den = 0.0
        else:
            (w,) = fut
            i = min(v, w)
            blk = x.diag[i - 1] * x.diag[i] - x.off[i - 1] ** 2
            num = np.log(blk)
            den = np.log(x.diag[w - 1])
        total += s[v - 1] * (num - den)
    return float(total)


def _log_det_prefix_suffix(lead: NDArray, trail: NDArray, full: float, a: int, b: int, n: int) -> float:
    """``log |y_S|`` for ``S = {1..a} union {b..n}`` (a = 0 / b = n+1 mean absent).

    Disconnected intervals of a banded matrix are block diagonal, so the
    determinant factorizes exactly; touching intervals cover everything.
    """
    if a == 0 and b == n + 1:
        return 0.0
    if b == a + 1:
        return full
    out = 0.0
    if a >= 1:
        out += lead[a - 1]
    if b <= n:
        out += trail[b - 1]
    return out


def log_Delta_order(s: Iterable[float], order: EliminatingOrder, y: TridiagSym) -> float:
    """Order-indexed power function on ``P``:

        sum_v s_v * log( |y_{v union v-}| / |y_{v-}| )

    with ``v-`` the predecessor set.  For an eliminating order the
    predecessor sets are unions of a prefix and a suffix, so every minor
    factorizes over at most two intervals.
    """
    s = np.asarray(s, dtype=float).reshape(-1)
    n = y.n
    if s.size != n or order.n != n:
        raise ValueError("sizes disagree")
    lead = leading_log_minors(y)
    trail = trailing_log_minors(y)
    full = lead[n - 1]
    total = 0.0
    a, b = 0, n + 1  # consumed prefix end / suffix start
    for v in order.sequence:
        log_den = _log_det_prefix_suffix(lead, trail, full, a, b, n)
        if v == a + 1:
            a += 1
        elif v == b - 1:
            b -= 1
        else:  # unreachable for an intertwining order
            raise ValueError(f"order {order.sequence} is not an eliminating order")
        log_num = _log_det_prefix_suffix(lead, trail, full, a, b, n)
        total += s[v - 1] * (log_num - log_den)
    return float(total)


def homogeneity_degree(p: ShapeParams) -> float:
    """Exponent ``kappa`` with ``Delta_s^(M)(c y) = c^kappa Delta_s^(M)(y)``.

    Read off the minor sizes in the defining product:

        kappa = sum_{i<M} i (s_i - s_{i+1}) + n s_M
                + sum_{i>M} (n - i + 1)(s_i - s_{i-1}),

    which telescopes to ``sum_i s_i``.  (A published variant of this constant
    subtracts ``(n - M) s_M``; the scaling identity above is what the
    functions here actually satisfy, and the test suite checks it against a
    numerical scaling oracle.  See README, "Known discrepancies".)
    """
    n, M, s = p.n, p.M, p.s
    total = n * s[M - 1]
    for i in range(1, M):
        total += i * (s[i - 1] - s[i])
    for i in range(M + 1, n + 1):
        total += (n - i + 1) * (s[i - 1] - s[i - 2])
    return float(total)
