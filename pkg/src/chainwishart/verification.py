"""Monte-Carlo and brute-force oracles backing the acceptance checks.

Tolerance policy, by error class:

* deterministic identities: relative 1e-9 .. 1e-12,
* finite-difference derivative checks: relative 1e-5,
* Monte-Carlo estimates: 4 standard errors per reported quantity
  (multi-coordinate reports are many simultaneous 4-sigma checks; with the
  fixed seeds used by the suites each run is bit-reproducible, so a passing
  configuration stays passing).

Randomness follows a counter-based contract: ``stream_rng(seed, k)`` yields
the ``k``-th independent deterministic stream of a root seed, so sharded
estimators stay reproducible.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from numpy.typing import NDArray
from scipy import stats

from . import wishart_p, wishart_q
from .matrix_spaces import IncompleteSym, TridiagSym, pairing
from .power_functions import ShapeParams

__all__ = [
    "MCReport",
    "CheckResult",
    "stream_rng",
    "coordinate_weights",
    "cov_coords_from_operator",
    "mc_laplace_q",
    "mc_laplace_p",
    "mc_mean_cov",
    "fd_jacobian",
    "ks_test_gamma",
    "run_suites",
    "SUITES",
    "format_report",
    "report_json",
]


def stream_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Deterministic generator for (seed, stream); streams are independent."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(stream,)))


@dataclass
class MCReport:
    """One Monte-Carlo estimate against its closed-form value."""

    estimate: float
    stderr: float
    theory: float
    z_score: float
    n_samples: int
    seed: int
    name: str = ""

    @property
    def passed(self) -> bool:
        return abs(self.z_score) < 4.0


def _make_report(
    estimate: float, stderr: float, theory: float, n_samples: int, seed: int, name: str
) -> MCReport:
    if stderr > 0:
        z = (estimate - theory) / stderr
    else:
        z = 0.0 if estimate == theory else float("inf")
    return MCReport(float(estimate), float(stderr), float(theory), float(z), n_samples, seed, name)


@dataclass
class CheckResult:
    """One named deterministic-or-statistical check of a suite."""

    name: str
    passed: bool
    detail: str = ""

    def __post_init__(self) -> None:
        self.passed = bool(self.passed)


def coordinate_weights(n: int) -> NDArray[np.float64]:
    """Pairing weights of the canonical coordinates: 1 on diag, 2 off."""
    return np.concatenate([np.ones(n), 2.0 * np.ones(n - 1)])


def cov_coords_from_operator(v: NDArray[np.float64], n: int) -> NDArray[np.float64]:
    """Coordinate covariance implied by a covariance operator matrix.

    With ``V`` the operator in the canonical basis, ``Cov(c_j, c_k) =
    V_jk / w_k`` (the pairing carries weight 2 on off-diagonal coordinates).
    """
    return v / coordinate_weights(n)[None, :]


# ---------------------------------------------------------------------------
# estimators
# ---------------------------------------------------------------------------


def _mean_se(vals: NDArray[np.float64]) -> tuple[float, float]:
    # jackknife stderr of a sample mean reduces to std(ddof=1)/sqrt(n)
    n = vals.size
    se = float(np.std(vals, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return float(np.mean(vals)), se


def _sharded_draws(
    draw: Callable[[np.random.Generator, int], NDArray[np.float64]],
    n_samples: int,
    seed: int,
    shards: int,
) -> NDArray[np.float64]:
    """Draw across independent deterministic streams, one per shard.

    Shards are reduced in sorted index order, so the result is independent of
    how the shards were scheduled.
    """
    sizes = [n_samples // shards + (1 if i < n_samples % shards else 0) for i in range(shards)]
    parts = [draw(stream_rng(seed, i), sz) for i, sz in enumerate(sizes) if sz > 0]
    return np.vstack(parts)


def mc_laplace_q(
    w: wishart_q.WishartQ,
    z: TridiagSym,
    n_samples: int = 100_000,
    seed: int = 0,
    shards: int = 1,
) -> MCReport:
    """Estimate ``E exp(-<z, X>)`` by exact sampling; theory from the closed form."""
    theory = float(np.exp(wishart_q.log_laplace(w, z)))
    coords = _sharded_draws(
        lambda rng, sz: wishart_q.sample_many(w, rng, sz), n_samples, seed, shards
    )
    t = coords @ (coordinate_weights(w.n) * z.coords())
    est, se = _mean_se(np.exp(-t))
    return _make_report(est, se, theory, n_samples, seed, "laplace_q")


def mc_laplace_p(
    w: wishart_p.WishartP,
    theta: IncompleteSym,
    n_samples: int = 100_000,
    seed: int = 0,
    shards: int = 1,
) -> MCReport:
    """Estimate ``E exp(-<theta, Y>)`` on the concentration-cone family."""
    theory = float(np.exp(wishart_p.log_laplace_p(w, theta)))
    coords = _sharded_draws(
        lambda rng, sz: wishart_p.sample_p_many(w, rng, sz), n_samples, seed, shards
    )
    t = coords @ (coordinate_weights(w.n) * theta.coords())
    est, se = _mean_se(np.exp(-t))
    return _make_report(est, se, theory, n_samples, seed, "laplace_p")


def mc_mean_cov(
    draw: Callable[[np.random.Generator, int], NDArray[np.float64]],
    theory_mean: NDArray[np.float64],
    theory_cov: Optional[NDArray[np.float64]],
    n_samples: int = 100_000,
    seed: int = 0,
    n_batches: int = 50,
    name: str = "",
) -> list[MCReport]:
    """Per-coordinate mean reports and per-entry covariance reports.

    Covariance entries use batch means for their standard errors.
    """
    rng = stream_rng(seed)
    coords = draw(rng, n_samples)
    d = coords.shape[1]
    reports = []
    for j in range(d):
        est, se = _mean_se(coords[:, j])
        reports.append(
            _make_report(est, se, float(theory_mean[j]), n_samples, seed, f"{name}.mean[{j}]")
        )
    if theory_cov is not None:
        batches = np.array_split(coords, n_batches, axis=0)
        covs = np.stack([np.atleast_2d(np.cov(b, rowvar=False)) for b in batches])
        for j in range(d):
            for k in range(j, d):
                vals = covs[:, j, k]
                est = float(np.mean(vals))
                se = float(np.std(vals, ddof=1) / np.sqrt(len(batches)))
                reports.append(
                    _make_report(
                        est, se, float(theory_cov[j, k]), n_samples, seed, f"{name}.cov[{j},{k}]"
                    )
                )
    return reports


def fd_jacobian(
    fn: Callable[[NDArray[np.float64]], NDArray[np.float64]],
    point: NDArray[np.float64],
    step: float = 1e-5,
) -> NDArray[np.float64]:
    """Central-difference Jacobian of a coordinate map.

    Steps scale with the coordinate magnitude; cone errors from probing past
    a boundary propagate to the caller.
    """
    point = np.asarray(point, dtype=float)
    d = point.size
    cols = []
    for k in range(d):
        h = step * max(1.0, abs(point[k]))
        ep = point.copy()
        em = point.copy()
        ep[k] += h
        em[k] -= h
        cols.append((fn(ep) - fn(em)) / (2.0 * h))
    return np.column_stack(cols)


def ks_test_gamma(draws: NDArray[np.float64], shape: float, rate: float) -> float:
    """Kolmogorov-Smirnov p-value of draws against Gamma(shape, rate)."""
    draws = np.asarray(draws, dtype=float).reshape(-1)
    if draws.size == 0:
        raise ValueError("no draws")
    return float(stats.kstest(draws, stats.gamma(a=shape, scale=1.0 / rate).cdf).pvalue)


# ---------------------------------------------------------------------------
# named suites (drive the CLI `verify` command)
# ---------------------------------------------------------------------------


def _random_pd(rng: np.random.Generator, n: int) -> TridiagSym:
    # T T' with a positive bidiagonal factor: always PD, modest conditioning
    d = rng.uniform(0.7, 1.5, size=n)
    sub = rng.uniform(-0.6, 0.6, size=n - 1)
    diag = d**2
    diag[1:] += sub**2
    off = sub * d[:-1]
    return TridiagSym(n, diag, off)


def _random_q(rng: np.random.Generator, n: int) -> IncompleteSym:
    d = rng.uniform(0.5, 2.0, size=n)
    rho = rng.uniform(-0.7, 0.7, size=n - 1)
    off = rho * np.sqrt(d[:-1] * d[1:])
    return IncompleteSym(n, d, off)


def _random_shape_q(rng: np.random.Generator, n: int, M: int) -> ShapeParams:
    s = rng.uniform(0.8, 2.5, size=n)
    return ShapeParams(M, s)


def _random_shape_p(rng: np.random.Generator, n: int, M: int) -> ShapeParams:
    s = rng.uniform(-0.7, 1.5, size=n)
    return ShapeParams(M, s)


def _mutated_mean_q(w: wishart_q.WishartQ, mutations: frozenset) -> IncompleteSym:
    m = wishart_q.mean(w)
    if "mean-sign" in mutations:
        # deliberately flip the sign of the off-diagonal assembly
        return IncompleteSym(m.n, m.diag, -m.off)
    return m


def _reports_to_checks(reports: Iterable[MCReport], label: str) -> list[CheckResult]:
    worst = max(reports, key=lambda r: abs(r.z_score) if np.isfinite(r.z_score) else np.inf)
    ok = all(r.passed for r in reports)
    return [
        CheckResult(
            label,
            ok,
            f"worst |z| = {abs(worst.z_score):.2f} at {worst.name}",
        )
    ]


def suite_laplace(seed: int, mutations: frozenset = frozenset()) -> list[CheckResult]:
    """Monte-Carlo checks of both closed-form Laplace transforms (n = 2, 3)."""
    out = []
    k = 0
    for n in (2, 3):
        for M in range(1, n + 1):
            rng = stream_rng(seed, 100 + k)
            y = _random_pd(rng, n)
            p = _random_shape_q(rng, n, M)
            w = wishart_q.WishartQ(p, y)
            z = 0.3 * _random_pd(rng, n)
            rep = mc_laplace_q(w, z, n_samples=100_000, seed=seed * 1000 + k)
            out.append(
                CheckResult(f"laplace_q[n={n},M={M}]", rep.passed, f"|z| = {abs(rep.z_score):.2f}")
            )
            k += 1
    for n in (2, 3):
        for M in range(1, n + 1):
            rng = stream_rng(seed, 200 + k)
            x = _random_q(rng, n)
            p = _random_shape_p(rng, n, M)
            w = wishart_p.WishartP(p, x)
            theta = 0.3 * _random_q(rng, n)
            rep = mc_laplace_p(w, theta, n_samples=100_000, seed=seed * 1000 + k)
            out.append(
                CheckResult(f"laplace_p[n={n},M={M}]", rep.passed, f"|z| = {abs(rep.z_score):.2f}")
            )
            k += 1
    return out


def suite_mean(seed: int, mutations: frozenset = frozenset()) -> list[CheckResult]:
    """Empirical means of all three samplers against the closed forms."""
    out = []
    n = 4
    for M in (1, 2, 4):
        rng = stream_rng(seed, 300 + M)
        y = _random_pd(rng, n)
        p = _random_shape_q(rng, n, M)
        w = wishart_q.WishartQ(p, y)
        theory = _mutated_mean_q(w, mutations).coords()
        reports = mc_mean_cov(
            lambda r, sz: wishart_q.sample_many(w, r, sz),
            theory,
            None,
            n_samples=100_000,
            seed=seed * 100 + M,
            name=f"q[n={n},M={M}]",
        )
        out.extend(_reports_to_checks(reports, f"mean_q[n={n},M={M}]"))
    for M in (1, 3):
        rng = stream_rng(seed, 320 + M)
        x = _random_q(rng, 3)
        p = _random_shape_p(rng, 3, M)
        w = wishart_p.WishartP(p, x)
        reports = mc_mean_cov(
            lambda r, sz: wishart_p.sample_p_many(w, r, sz),
            wishart_p.mean_p(w).coords(),
            None,
            n_samples=100_000,
            seed=seed * 100 + 10 + M,
            name=f"p[n=3,M={M}]",
        )
        out.extend(_reports_to_checks(reports, f"mean_p[n=3,M={M}]"))
    # quadratic construction, integer multiplicities
    rng = stream_rng(seed, 340)
    y = _random_pd(rng, 3)
    sigma = np.array([2, 2, 1])
    M = 2
    p = wishart_q.sigma_to_shape(sigma, M)
    w = wishart_q.WishartQ(p, y)
    theory = _mutated_mean_q(w, mutations).coords()
    reports = mc_mean_cov(
        lambda r, sz: wishart_q.sample_quadratic_many(sigma, M, y, r, sz),
        theory,
        None,
        n_samples=100_000,
        seed=seed * 100 + 40,
        name="quad[n=3,M=2]",
    )
    out.extend(_reports_to_checks(reports, "mean_quadratic[n=3,M=2]"))
    return out


def suite_variance(seed: int, mutations: frozenset = frozenset()) -> list[CheckResult]:
    """Variance formulas against finite differences, each other, and sampling."""
    out = []
    rng = stream_rng(seed, 400)
    n, M = 5, 3
    y = _random_pd(rng, n)
    p = _random_shape_q(rng, n, M)
    w = wishart_q.WishartQ(p, y)

    def mean_map(coords: NDArray[np.float64]) -> NDArray[np.float64]:
        return wishart_q.mean_formula(p, TridiagSym.from_coords(coords)).coords()

    jac = fd_jacobian(mean_map, y.coords())
    v = wishart_q.covariance_matrix(w)
    err = float(np.max(np.abs(v + jac)) / np.max(np.abs(v)))
    out.append(CheckResult("covariance_q_vs_fd[n=5]", err < 1e-5, f"rel err = {err:.2e}"))

    m = wishart_q.mean(w)
    v_nice = wishart_q.operator_matrix(lambda u: wishart_q.variance_apply_nice(p, m, u), n)
    v_exp = wishart_q.operator_matrix(lambda u: wishart_q.variance_apply_expanded(p, m, u), n)
    scale = float(np.max(np.abs(v)))
    err_triple = float(
        max(np.max(np.abs(v_nice - v_exp)), np.max(np.abs(v_nice - v))) / scale
    )
    out.append(
        CheckResult("variance_triple_agreement[n=5]", err_triple < 1e-8, f"rel err = {err_triple:.2e}")
    )

    rng = stream_rng(seed, 410)
    x = _random_q(rng, 3)
    pp = _random_shape_p(rng, 3, 2)
    wp = wishart_p.WishartP(pp, x)

    def mean_map_p(coords: NDArray[np.float64]) -> NDArray[np.float64]:
        return wishart_p.mean_p_formula(pp, IncompleteSym.from_coords(coords)).coords()

    jac_p = fd_jacobian(mean_map_p, x.coords())
    v_p = wishart_p.covariance_p_matrix(wp)
    err_p = float(np.max(np.abs(v_p + jac_p)) / np.max(np.abs(v_p)))
    out.append(CheckResult("covariance_p_vs_fd[n=3]", err_p < 1e-5, f"rel err = {err_p:.2e}"))

    # empirical coordinate covariance, both families
    rng = stream_rng(seed, 420)
    y3 = _random_pd(rng, 3)
    p3 = _random_shape_q(rng, 3, 2)
    w3 = wishart_q.WishartQ(p3, y3)
    theory_mean = _mutated_mean_q(w3, mutations).coords()
    theory_cov = cov_coords_from_operator(wishart_q.covariance_matrix(w3), 3)
    reports = mc_mean_cov(
        lambda r, sz: wishart_q.sample_many(w3, r, sz),
        theory_mean,
        theory_cov,
        n_samples=100_000,
        seed=seed * 100 + 42,
        name="q_cov[n=3,M=2]",
    )
    out.extend(_reports_to_checks(reports, "cov_empirical_q[n=3,M=2]"))
    theory_cov_p = cov_coords_from_operator(wishart_p.covariance_p_matrix(wp), 3)
    reports = mc_mean_cov(
        lambda r, sz: wishart_p.sample_p_many(wp, r, sz),
        wishart_p.mean_p(wp).coords(),
        theory_cov_p,
        n_samples=100_000,
        seed=seed * 100 + 43,
        name="p_cov[n=3,M=2]",
    )
    out.extend(_reports_to_checks(reports, "cov_empirical_p[n=3,M=2]"))
    return out


def suite_moments(seed: int, mutations: frozenset = frozenset()) -> list[CheckResult]:
    """Cycle-expansion moments: exact at orders 1-2, Monte-Carlo at order 3."""
    out = []
    rng = stream_rng(seed, 500)
    n, M = 3, 2
    y = _random_pd(rng, n)
    p = _random_shape_q(rng, n, M)
    w = wishart_q.WishartQ(p, y)
    zs = [TridiagSym.from_coords(rng.uniform(-1, 1, size=2 * n - 1)) for _ in range(3)]
    m = wishart_q.mean(w)
    m1 = wishart_q.moment(w, wishart_q.MomentSpec(zs[:1]))
    exact1 = pairing(zs[0], m)
    ok1 = abs(m1 - exact1) <= 1e-9 * max(1.0, abs(exact1))
    out.append(CheckResult("moment_q_order1", ok1, f"diff = {abs(m1 - exact1):.2e}"))
    m2 = wishart_q.moment(w, wishart_q.MomentSpec(zs[:2]))
    exact2 = pairing(zs[1], wishart_q.covariance_apply(w, zs[0])) + exact1 * pairing(zs[1], m)
    ok2 = abs(m2 - exact2) <= 1e-9 * max(1.0, abs(exact2))
    out.append(CheckResult("moment_q_order2", ok2, f"diff = {abs(m2 - exact2):.2e}"))

    theory3 = wishart_q.moment(w, wishart_q.MomentSpec(zs))
    rng2 = stream_rng(seed, 501)
    coords = wishart_q.sample_many(w, rng2, 100_000)
    weights = coordinate_weights(n)
    prods = np.prod([coords @ (weights * z.coords()) for z in zs], axis=0)
    est, se = _mean_se(prods)
    zsc = (est - theory3) / se if se > 0 else 0.0
    out.append(CheckResult("moment_q_order3_mc", abs(zsc) < 4.0, f"|z| = {abs(zsc):.2f}"))

    rng = stream_rng(seed, 510)
    x = _random_q(rng, n)
    pp = _random_shape_p(rng, n, M)
    wp = wishart_p.WishartP(pp, x)
    xs = [IncompleteSym.from_coords(rng.uniform(-1, 1, size=2 * n - 1)) for _ in range(3)]
    mp = wishart_p.mean_p(wp)
    p1 = wishart_p.moment_p(wp, xs[:1])
    exact1p = pairing(mp, xs[0])
    out.append(
        CheckResult(
            "moment_p_order1",
            abs(p1 - exact1p) <= 1e-9 * max(1.0, abs(exact1p)),
            f"diff = {abs(p1 - exact1p):.2e}",
        )
    )
    p2 = wishart_p.moment_p(wp, xs[:2])
    exact2p = pairing(wishart_p.covariance_p_apply(wp, xs[0]), xs[1]) + exact1p * pairing(mp, xs[1])
    out.append(
        CheckResult(
            "moment_p_order2",
            abs(p2 - exact2p) <= 1e-9 * max(1.0, abs(exact2p)),
            f"diff = {abs(p2 - exact2p):.2e}",
        )
    )
    theory3p = wishart_p.moment_p(wp, xs)
    rng2 = stream_rng(seed, 511)
    coords = wishart_p.sample_p_many(wp, rng2, 100_000)
    prods = np.prod([coords @ (weights * x.coords()) for x in xs], axis=0)
    est, se = _mean_se(prods)
    zsc = (est - theory3p) / se if se > 0 else 0.0
    out.append(CheckResult("moment_p_order3_mc", abs(zsc) < 4.0, f"|z| = {abs(zsc):.2f}"))
    return out


def suite_samplers(seed: int, mutations: frozenset = frozenset()) -> list[CheckResult]:
    """Base-case distribution tests and recursive/quadratic cross-checks."""
    out = []
    # gamma base cases on one vertex
    for shape, rate, label in ((1.0, 1.0, "exp1"), (0.75, 1.0, "gamma075")):
        p = ShapeParams(1, [shape])
        w = wishart_q.WishartQ(p, TridiagSym(1, [rate], []))
        draws = wishart_q.sample_many(w, stream_rng(seed, 600), 10_000)[:, 0]
        pval = ks_test_gamma(draws, shape, rate)
        out.append(CheckResult(f"ks_q_base[{label}]", pval > 0.01, f"p = {pval:.4f}"))
    wp = wishart_p.WishartP(ShapeParams(1, [0.0]), IncompleteSym(1, [1.0], []))
    draws = wishart_p.sample_p_many(wp, stream_rng(seed, 601), 10_000)[:, 0]
    pval = ks_test_gamma(draws, 1.0, 1.0)
    out.append(CheckResult("ks_p_base[exp1]", pval > 0.01, f"p = {pval:.4f}"))

    # recursive vs quadratic: same law, so means must agree within joint error
    rng = stream_rng(seed, 610)
    y = _random_pd(rng, 3)
    sigma = np.array([2, 2, 1])
    M = 2
    p = wishart_q.sigma_to_shape(sigma, M)
    w = wishart_q.WishartQ(p, y)
    a = wishart_q.sample_many(w, stream_rng(seed, 611), 100_000)
    b = wishart_q.sample_quadratic_many(sigma, M, y, stream_rng(seed, 612), 100_000)
    worst = 0.0
    for j in range(a.shape[1]):
        ma, sa = _mean_se(a[:, j])
        mb, sb = _mean_se(b[:, j])
        zsc = abs(ma - mb) / np.hypot(sa, sb)
        worst = max(worst, zsc)
    out.append(CheckResult("recursive_vs_quadratic_mean", worst < 4.0, f"worst |z| = {worst:.2f}"))
    return out


SUITES: dict[str, Callable[[int, frozenset], list[CheckResult]]] = {
    "laplace": suite_laplace,
    "mean": suite_mean,
    "variance": suite_variance,
    "moments": suite_moments,
    "samplers": suite_samplers,
}


def run_suites(
    which: str = "all", seed: int = 0, mutations: frozenset = frozenset()
) -> tuple[list[CheckResult], bool]:
    """Run one named suite or all of them; returns results and overall pass."""
    if which == "all":
        names = list(SUITES)
    elif which in SUITES:
        names = [which]
    else:
        raise ValueError(f"unknown suite {which!r}; choose from {['all', *SUITES]}")
    results: list[CheckResult] = []
    for name in names:
        results.extend(SUITES[name](seed, mutations))
    return results, all(r.passed for r in results)


def format_report(results: Sequence[CheckResult]) -> str:
    """Human-readable pass/fail table."""
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  status  detail", "-" * (width + 30)]
    for r in results:
        lines.append(f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL':<6}  {r.detail}")
    n_fail = sum(not r.passed for r in results)
    lines.append("-" * (width + 30))
    lines.append(f"{len(results)} checks, {n_fail} failed")
    return "\n".join(lines)


def report_json(results: Sequence[CheckResult]) -> str:
    return json.dumps([asdict(r) for r in results], indent=2)
