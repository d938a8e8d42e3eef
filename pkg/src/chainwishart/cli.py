"""Command-line front end.

Subcommands: ``sample``, ``eval``, ``orders``, ``lm-convert``,
``missing-stat``, ``verify``.  Banded matrices travel as JSON objects
``{"n": int, "diag": [...], "off": [...]}``; family parameters as
``{"M": int, "s": [...], "y": {...}}`` (dual-cone family) or with ``"x"``
(concentration-cone family); samples as CSV rows of ``2n - 1`` coordinates,
diagonal columns first, with ``#`` metadata lines recording seed and
parameters.  The default seed comes from ``CHAINWISHART_SEED``.

Exit codes: 0 success; 1 verification failure; 2 parameter-domain or cone
violation (the diagnostic names the failed minor); 3 I/O failure; 4
inconvertible clique/separator parameters; 5 non-monotone missing-data
pattern; 6 no consistent pivot for a missing-data pattern.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import verification, wishart_p, wishart_q
from .chain_graph import (
    build_chain,
    enumerate_eliminating_orders,
    enumerate_perfect_clique_orders,
    first_separator,
)
from .letac_massam import LMParams, lm_to_sM, sM_to_lm
from .matrix_spaces import ConeError, IncompleteSym, TridiagSym, dense_to_csv
from .power_functions import ShapeParams

__all__ = ["main", "MissingDataset", "ObservationRow", "missing_statistic"]

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_DOMAIN = 2
EXIT_IO = 3
EXIT_NO_CONVERSION = 4
EXIT_NOT_MONOTONE = 5
EXIT_NO_PIVOT = 6

DEFAULT_SEED = int(os.environ.get("CHAINWISHART_SEED", "20260810"))


class CliError(Exception):
    def __init__(self, code: int, message: str) -> None:
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# monotone missing data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ObservationRow:
    """One record: the observed index interval (1-based, inclusive) and values."""

    lo: int
    hi: int
    values: tuple[float, ...]


@dataclass(frozen=True)
class MissingDataset:
    """Rows whose observed sets are left prefixes, right suffixes, or full."""

    n: int
    rows: tuple[ObservationRow, ...]


def _classify_row(cells: Sequence[str], n: int, row_no: int) -> ObservationRow:
    observed = [j for j, c in enumerate(cells, start=1) if c.strip() != ""]
    if not observed:
        raise CliError(EXIT_NOT_MONOTONE, f"row {row_no}: no observed entries")
    lo, hi = observed[0], observed[-1]
    if observed != list(range(lo, hi + 1)):
        raise CliError(
            EXIT_NOT_MONOTONE,
            f"row {row_no}: observed set {observed} is not contiguous",
        )
    if lo != 1 and hi != n:
        raise CliError(
            EXIT_NOT_MONOTONE,
            f"row {row_no}: observed set {{{lo}..{hi}}} is neither a left prefix "
            f"nor a right suffix of 1..{n}",
        )
    values = tuple(float(cells[j - 1]) for j in range(lo, hi + 1))
    return ObservationRow(lo, hi, values)


def parse_missing_csv(text: str) -> MissingDataset:
    """Parse a CSV with empty cells marking missing coordinates."""
    rows = []
    n: Optional[int] = None
    row_no = 0
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        row_no += 1
        cells = line.split(",")
        if n is None:
            n = len(cells)
        elif len(cells) != n:
            raise CliError(EXIT_IO, f"row {row_no}: expected {n} columns, got {len(cells)}")
        rows.append(_classify_row(cells, n, row_no))
    if n is None:
        raise CliError(EXIT_IO, "no data rows")
    return MissingDataset(n, tuple(rows))


def missing_statistic(ds: MissingDataset) -> tuple[IncompleteSym, np.ndarray, int]:
    """Band-projected Gram statistic, multiplicity vector and inferred pivot.

    ``T = sum_rows pi(v v')`` with ``v`` the zero-padded observation.  The
    pivot must separate prefixes from suffixes strictly: every prefix length
    below it, every suffix start above it; full rows count in the pivot slot.
    When a range of pivots is consistent the smallest is chosen (the law of
    ``T`` does not depend on the choice).

    Under per-row Gaussians with covariance ``(2 y_I)^{-1}`` on the observed
    interval ``I`` (the tilted-construction convention; see README), ``T`` is
    an exact draw from the quadratic construction at ``(sigma, M, y)``.
    """
    n = ds.n
    prefix_lens = []
    suffix_starts = []
    n_full = 0
    for r in ds.rows:
        if r.lo == 1 and r.hi == n:
            n_full += 1
        elif r.lo == 1:
            prefix_lens.append(r.hi)
        else:
            suffix_starts.append(r.lo)
    lo_m = max(prefix_lens) + 1 if prefix_lens else 1
    hi_m = min(suffix_starts) - 1 if suffix_starts else n
    if lo_m > hi_m:
        raise CliError(
            EXIT_NO_PIVOT,
            f"no consistent pivot: prefixes force M >= {lo_m} but suffixes force M <= {hi_m}",
        )
    if prefix_lens:
        m = lo_m
    elif suffix_starts:
        m = hi_m
    else:
        m = n
    sigma = np.zeros(n, dtype=int)
    sigma[m - 1] = n_full
    for i in prefix_lens:
        sigma[i - 1] += 1
    for k in suffix_starts:
        sigma[k - 1] += 1
    diag = np.zeros(n)
    off = np.zeros(n - 1)
    for r in ds.rows:
        v = np.asarray(r.values)
        diag[r.lo - 1 : r.hi] += v**2
        if v.size >= 2:
            off[r.lo - 1 : r.hi - 1] += v[:-1] * v[1:]
    return IncompleteSym(n, diag, off), sigma, m


# ---------------------------------------------------------------------------
# I/O helpers
# ---------------------------------------------------------------------------


def _read_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise CliError(EXIT_IO, f"cannot read {path}: {e}") from e


def _load_family(params: dict, family: str):
    try:
        p = ShapeParams.from_json_dict(params)
        if family == "q":
            return wishart_q.WishartQ(p, TridiagSym.from_json_dict(params["y"]))
        return wishart_p.WishartP(p, IncompleteSym.from_json_dict(params["x"]))
    except KeyError as e:
        raise CliError(EXIT_IO, f"missing parameter field {e}") from e
    except (ConeError, ValueError) as e:
        raise CliError(EXIT_DOMAIN, str(e)) from e


def _print_json(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_sample(args: argparse.Namespace) -> int:
    params = _read_json(args.params)
    seed = args.seed if args.seed is not None else DEFAULT_SEED
    rng = verification.stream_rng(seed)
    if args.sigma is not None:
        if args.family != "q":
            raise CliError(EXIT_DOMAIN, "--sigma applies to the dual-cone family only")
        try:
            sigma = np.asarray([int(t) for t in args.sigma.split(",")])
            y = TridiagSym.from_json_dict(params["y"])
            m_pivot = int(params["M"])
            coords = wishart_q.sample_quadratic_many(sigma, m_pivot, y, rng, args.n)
        except (ConeError, ValueError) as e:
            raise CliError(EXIT_DOMAIN, str(e)) from e
        meta = {"family": "q-quadratic", "sigma": sigma.tolist(), "M": m_pivot}
        n = y.n
    else:
        w = _load_family(params, args.family)
        n = w.n
        if args.family == "q":
            coords = wishart_q.sample_many(w, rng, args.n)
        else:
            coords = wishart_p.sample_p_many(w, rng, args.n)
        meta = {"family": args.family}
    header = [
        "# chainwishart sample",
        f"# seed: {seed}",
        f"# meta: {json.dumps(meta)}",
        f"# params: {json.dumps(params)}",
        "# columns: " + ",".join([f"d{i}" for i in range(1, n + 1)] + [f"o{i}" for i in range(1, n)]),
    ]
    try:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write("\n".join(header) + "\n")
            for row in coords:
                f.write(",".join(repr(float(v)) for v in row) + "\n")
    except OSError as e:
        raise CliError(EXIT_IO, f"cannot write {args.out}: {e}") from e
    print(f"wrote {args.n} draws to {args.out}")
    return EXIT_OK


def _eval_point(args: argparse.Namespace) -> dict:
    if args.point is None:
        raise CliError(EXIT_IO, f"--what {args.what} needs --point")
    return _read_json(args.point)


def _cmd_eval(args: argparse.Namespace) -> int:
    params = _read_json(args.params)
    family = args.family
    what = args.what
    try:
        if what == "inverse-mean":
            p = ShapeParams.from_json_dict(params)
            point = _eval_point(args)
            if family == "q":
                m = IncompleteSym.from_json_dict(point)
                y = wishart_q.inverse_mean(p, m)
                _print_json({"inverse_mean": y.to_json_dict()})
            else:
                target = TridiagSym.from_json_dict(point)
                x = wishart_p.newton_inverse_mean_p(p, target)
                _print_json({"inverse_mean": x.to_json_dict(), "method": "newton"})
            return EXIT_OK
        w = _load_family(params, family)
        if what == "density":
            point = _eval_point(args)
            if family == "q":
                val = wishart_q.log_density(w, IncompleteSym.from_json_dict(point))
            else:
                val = wishart_p.log_density_p(w, TridiagSym.from_json_dict(point))
            _print_json({"log_density": val})
        elif what == "laplace":
            point = _eval_point(args)
            if family == "q":
                val = wishart_q.log_laplace(w, TridiagSym.from_json_dict(point))
            else:
                val = wishart_p.log_laplace_p(w, IncompleteSym.from_json_dict(point))
            _print_json({"log_laplace": val})
        elif what == "mean":
            m = wishart_q.mean(w) if family == "q" else wishart_p.mean_p(w)
            _print_json({"mean": m.to_json_dict()})
        elif what == "variance":
            if family == "q":
                if args.point is not None:
                    m = IncompleteSym.from_json_dict(_eval_point(args))
                    mat = wishart_q.operator_matrix(
                        lambda u: wishart_q.variance_apply_nice(w.params, m, u), w.n
                    )
                else:
                    mat = wishart_q.covariance_matrix(w)
            else:
                mat = wishart_p.covariance_p_matrix(w)
            if args.out is not None:
                try:
                    dense_to_csv(args.out, mat)
                except OSError as e:
                    raise CliError(EXIT_IO, f"cannot write {args.out}: {e}") from e
            _print_json({"variance_matrix": mat.tolist()})
        elif what == "moment":
            point = _eval_point(args)
            if family == "q":
                zs = [TridiagSym.from_json_dict(d) for d in point["z_list"]]
                val = wishart_q.moment(w, wishart_q.MomentSpec(zs))
            else:
                xs = [IncompleteSym.from_json_dict(d) for d in point["x_list"]]
                val = wishart_p.moment_p(w, xs)
            _print_json({"moment": val})
        else:  # pragma: no cover - argparse restricts choices
            raise CliError(EXIT_IO, f"unknown eval target {what}")
    except (ConeError,) as e:
        raise CliError(EXIT_DOMAIN, str(e)) from e
    return EXIT_OK


def _cmd_orders(args: argparse.Namespace) -> int:
    g = build_chain(args.n)
    elim = [
        {"sequence": list(o.sequence), "max_vertex": o.max_vertex}
        for o in enumerate_eliminating_orders(g)
    ]
    perfect = []
    if g.n >= 2:
        for order in enumerate_perfect_clique_orders(g):
            entry = {"cliques": [list(c) for c in order.cliques()]}
            entry["first_separator"] = (
                first_separator(order) if len(order.sequence) >= 2 else None
            )
            perfect.append(entry)
    _print_json(
        {"n": g.n, "eliminating_orders": elim, "perfect_clique_orders": perfect}
    )
    return EXIT_OK


def _cmd_lm_convert(args: argparse.Namespace) -> int:
    data = _read_json(args.file)
    if args.direction == "lm-to-s":
        lm = LMParams.from_json_dict(data)
        p = lm_to_sM(lm)
        if p is None:
            raise CliError(
                EXIT_NO_CONVERSION,
                "no pivot form exists: the clique/separator exponents match no "
                "interior-pivot compatibility pattern",
            )
        _print_json(p.to_json_dict())
    else:
        p = ShapeParams.from_json_dict(data)
        try:
            lm = sM_to_lm(p)
        except ValueError as e:
            raise CliError(EXIT_NO_CONVERSION, str(e)) from e
        _print_json(lm.to_json_dict())
    return EXIT_OK


def _cmd_missing_stat(args: argparse.Namespace) -> int:
    try:
        with open(args.file, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise CliError(EXIT_IO, f"cannot read {args.file}: {e}") from e
    ds = parse_missing_csv(text)
    t, sigma, m = missing_statistic(ds)
    _print_json(
        {
            "T": t.to_json_dict(),
            "sigma": sigma.tolist(),
            "M": m,
            "n_rows": len(ds.rows),
        }
    )
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else DEFAULT_SEED
    mutations = frozenset(args.inject_bug or [])
    results, ok = verification.run_suites(args.suite, seed, mutations)
    print(verification.format_report(results))
    if args.json:
        try:
            with open(args.json, "w", encoding="utf-8") as f:
                f.write(verification.report_json(results))
        except OSError as e:
            raise CliError(EXIT_IO, f"cannot write {args.json}: {e}") from e
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chainwishart",
        description="Wishart families on the cones of chain graphical models",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw exact samples to CSV")
    p.add_argument("--family", choices=["q", "p"], required=True)
    p.add_argument("--params", required=True, help="JSON parameter file")
    p.add_argument("--n", type=int, default=1000, help="number of draws")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument(
        "--sigma",
        default=None,
        help="comma-separated multiplicities; routes to the quadratic sampler",
    )
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("eval", help="evaluate family quantities (log scale)")
    p.add_argument(
        "--what",
        choices=["density", "laplace", "mean", "inverse-mean", "variance", "moment"],
        required=True,
    )
    p.add_argument("--family", choices=["q", "p"], default="q")
    p.add_argument("--params", required=True)
    p.add_argument("--point", default=None, help="JSON point file where needed")
    p.add_argument("--out", default=None, help="also write matrix results as row-major CSV")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("orders", help="enumerate eliminating and perfect clique orders")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=_cmd_orders)

    p = sub.add_parser("lm-convert", help="convert clique/separator and pivot parameters")
    p.add_argument("--direction", choices=["lm-to-s", "s-to-lm"], required=True)
    p.add_argument("--file", required=True)
    p.set_defaults(func=_cmd_lm_convert)

    p = sub.add_parser("missing-stat", help="sufficient statistic of a monotone-missing CSV")
    p.add_argument("--file", required=True)
    p.set_defaults(func=_cmd_missing_stat)

    p = sub.add_parser("verify", help="run the Monte-Carlo/brute-force check suites")
    p.add_argument("--suite", choices=["all", *verification.SUITES], default="all")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--json", default=None, help="also write the report as JSON")
    p.add_argument(
        "--inject-bug",
        action="append",
        choices=["mean-sign"],
        help="deliberately corrupt a formula (harness self-test; must flip exit to 1)",
    )
    p.set_defaults(func=_cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
