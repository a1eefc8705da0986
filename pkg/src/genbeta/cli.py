"""Command-line entry point: ``eval``, ``simulate``, ``fit`` and ``rv-report``.

Exit codes are 0 on success, 2 for usage or input errors and 3 for numeric
failures. All outputs are plain TSV or JSON; nothing is plotted.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path

import numpy as np

from . import distributions as dist
from . import fit as fitmod
from . import rvpipe
from . import sde
from .distributions import FAMILIES, DistSpec
from .errors import DomainError, NumericError

log = logging.getLogger(__name__)

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3
SUMMARY_COLUMNS = ("n", "alpha", "beta1", "beta2", "p", "q", "ks", "ks_table")
CURVE_POINTS = 200


class UsageError(Exception):
    pass


def _read_json_arg(value: str) -> str:
    """Accept inline JSON or a path to a JSON file."""
    text = value.strip()
    if not text.startswith("{") and Path(value).is_file():
        return Path(value).read_text()
    return value


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _fmt(v) -> str:
    return f"{float(v):.10g}"


def _parse_floats(tokens) -> np.ndarray:
    out = []
    for tok in tokens:
        for part in str(tok).split(","):
            part = part.strip()
            if not part:
                continue
            try:
                out.append(float(part))
            except ValueError as exc:
                raise UsageError(f"cannot parse point {part!r}") from exc
    if not out:
        raise UsageError("no points given")
    return np.array(out)


def _parse_ints(text: str) -> list:
    try:
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse integer list {text!r}") from exc
    return values


def _versions() -> dict:
    def ver(name):
        try:
            return metadata.version(name)
        except metadata.PackageNotFoundError:
            return "unknown"

    return {"artifact": ver("artifact"), "numpy": np.__version__, "scipy": ver("scipy"),
            "python": sys.version.split()[0]}


# --------------------------------------------------------------------------
# eval

def cmd_eval(args) -> int:
    spec = DistSpec.from_json(_read_json_arg(args.spec))
    pts = _parse_floats(args.points)
    func = {"pdf": dist.pdf, "cdf": dist.cdf, "ccdf": dist.ccdf, "quantile": dist.quantile}[args.quantity]
    values = np.atleast_1d(func(spec, pts))
    lines = [f"{_fmt(x)}\t{v:.17g}" for x, v in zip(pts, values)]
    print("\n".join(lines))
    return EXIT_OK


# --------------------------------------------------------------------------
# simulate

def cmd_simulate(args) -> int:
    spec = sde.SdeSpec.from_json(_read_json_arg(args.sde))
    config = sde.IntegrationConfig(dt=args.dt, burn_in=args.burn_in, paths=args.paths,
                                   samples_per_path=args.samples_per_path, seed=args.seed,
                                   boundary_policy=args.boundary, variable=args.variable)
    ens = sde.integrate(spec, config)
    if ens.target is None:
        line = "ks=nan, threshold=nan, no stationary target (noise-free model)"
    else:
        ks = fitmod.ks_statistic(ens.samples, ens.target)
        thr = fitmod.ks_threshold(ens.effective_count, args.alpha_level)
        line = f"ks={ks:.6g}, threshold={thr:.6g}, {'pass' if ks < thr else 'fail'}"
    print(line)
    if args.out:
        out = Path(args.out)
        sde.export(ens, out / "ensemble")
        _write_atomic(out / "summary.txt", line + "\n")
    return EXIT_OK


# --------------------------------------------------------------------------
# fit

def _read_samples(path) -> np.ndarray:
    try:
        x = np.loadtxt(path, dtype=float, ndmin=1)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read samples from {path}: {exc}") from exc
    return x.ravel()


def _fit_one(samples, family, method, alpha_level):
    fitter = fitmod.fit_mle if method == "mle" else fitmod.fit_cdf_lsq
    return fitter(samples, family, alpha_level=alpha_level)


def _curve_grid(samples) -> np.ndarray:
    lo, hi = float(np.min(samples)), float(np.max(samples))
    grid = np.geomspace(lo, hi, CURVE_POINTS)
    grid[0], grid[-1] = lo, hi
    return grid


def cmd_fit(args) -> int:
    x = _read_samples(args.samples)
    res = _fit_one(x, args.family, args.method, args.alpha_level)
    text = json.dumps(res.to_dict(), indent=2, sort_keys=True)
    print(text)
    if args.out:
        out = Path(args.out)
        _write_atomic(out / f"fit_{args.family}.json", text + "\n")
        if args.bootstrap:
            band = fitmod.bootstrap_ci(res.spec, x.size, args.bootstrap, 0.95, _curve_grid(x),
                                       seed=args.seed, method=args.method)
            _write_atomic(out / f"band_{args.family}.tsv", band.to_tsv())
    return EXIT_OK


# --------------------------------------------------------------------------
# rv-report

@dataclass
class ReportBundle:
    """Everything an ``rv-report`` run produced, keyed by window length."""

    fits: dict = field(default_factory=dict)
    empirical: dict = field(default_factory=dict)
    fitted: dict = field(default_factory=dict)
    bands: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def summary_tsv(self, family: str) -> str:
        rows = ["\t".join(SUMMARY_COLUMNS)]
        for n in sorted(self.fits):
            res = self.fits[n].get(family)
            if res is None:
                continue
            s = res.spec
            vals = [s.alpha, s.beta1, s.beta2, s.p, s.q, res.ks, res.ks_threshold]
            rows.append("\t".join([str(n)] + [_fmt(v) for v in vals]))
        return "\n".join(rows) + "\n"


def _curve_tsv(header, x, *cols) -> str:
    lines = ["\t".join(header)]
    lines += ["\t".join(f"{v:.10g}" for v in row) for row in zip(x, *cols)]
    return "\n".join(lines) + "\n"


def cmd_rv_report(args) -> int:
    n_list = _parse_ints(args.n_list)
    if not n_list:
        raise UsageError("empty n-list")
    families = [f.strip() for f in args.families.split(",") if f.strip()]
    if not families or any(f not in FAMILIES for f in families):
        raise UsageError(f"families must be drawn from {FAMILIES}, got {args.families!r}")
    out = Path(args.out)
    series = rvpipe.read_csv(args.prices)
    config = rvpipe.RvConfig(stride=args.stride)
    datasets = rvpipe.build_all(series, n_list, config)
    bundle = ReportBundle(metadata={
        "seed": args.seed, "versions": _versions(), "input_digest": series.source_digest,
        "n_list": n_list, "families": families, "stride": args.stride, "method": args.method,
        "bootstrap": args.bootstrap, "alpha_level": args.alpha_level,
    })
    for ds in datasets:
        n = ds.n
        ndir = out / f"n{n}"
        rvpipe.export(ds, ndir / "rv", source_digest=series.source_digest)
        ex, ec = rvpipe.empirical_ccdf(ds)
        bundle.empirical[n] = (ex, ec)
        grid = _curve_grid(ds.values)
        bundle.fits[n] = {}
        for family in families:
            try:
                res = _fit_one(ds.values, family, args.method, args.alpha_level)
            except (DomainError, NumericError) as exc:
                bundle.failures.setdefault(n, {})[family] = str(exc)
                log.error("n=%d %s: fit failed: %s", n, family, exc)
                continue
            if not res.converged:
                bundle.failures.setdefault(n, {})[family] = "not converged"
            bundle.fits[n][family] = res
            _write_atomic(ndir / f"fit_{family}.json", json.dumps(res.to_dict(), indent=2, sort_keys=True) + "\n")
            fitted = np.asarray(dist.ccdf(res.spec, grid))
            bundle.fitted[(n, family)] = (grid, fitted)
            _write_atomic(ndir / f"ccdf_fit_{family}.tsv", _curve_tsv(("x", "ccdf"), grid, fitted))
            if args.bootstrap:
                try:
                    band = fitmod.bootstrap_ci(res.spec, ds.count, args.bootstrap, 0.95, grid,
                                               seed=args.seed, method=args.method)
                except NumericError as exc:
                    bundle.failures.setdefault(n, {})[f"{family}_band"] = str(exc)
                    continue
                bundle.bands[(n, family)] = band
                _write_atomic(ndir / f"band_{family}.tsv", band.to_tsv())
        print(f"n={n}\tcount={ds.count}\t" + "\t".join(
            f"{fam}:ks={bundle.fits[n][fam].ks:.4g}" for fam in families if fam in bundle.fits[n]))
    for family in families:
        _write_atomic(out / f"summary_{family}.tsv", bundle.summary_tsv(family))
    meta = dict(bundle.metadata, failures={str(k): v for k, v in bundle.failures.items()})
    _write_atomic(out / "run.json", json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="genbeta", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate pdf, cdf, ccdf or quantile of a distribution")
    p.add_argument("spec", help="distribution JSON (inline or file path)")
    p.add_argument("quantity", choices=("pdf", "cdf", "ccdf", "quantile"))
    p.add_argument("points", nargs="+", help="evaluation points (space or comma separated)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("simulate", help="integrate an SDE and compare with its stationary law")
    p.add_argument("sde", help="SDE JSON (inline or file path)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dt", type=float)
    p.add_argument("--burn-in", type=float)
    p.add_argument("--paths", type=int, default=1000)
    p.add_argument("--samples-per-path", type=int, default=100)
    p.add_argument("--boundary", choices=("reflect", "clamp"), default="reflect")
    p.add_argument("--variable", choices=("native", "power"), default="native")
    p.add_argument("--alpha-level", type=float, default=0.05)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="fit a family to samples (one value per line)")
    p.add_argument("samples")
    p.add_argument("--family", choices=FAMILIES, default="GB")
    p.add_argument("--method", choices=("mle", "lsq"), default="mle")
    p.add_argument("--bootstrap", type=int, default=0, metavar="REPLICAS")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha-level", type=float, default=0.05)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("rv-report", help="realized volatility fits per window length")
    p.add_argument("prices", help="CSV of date,close")
    p.add_argument("--n-list", default=",".join(map(str, rvpipe.DEFAULT_WINDOWS)))
    p.add_argument("--families", default="GB,mGB")
    p.add_argument("--method", choices=("mle", "lsq"), default="mle")
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--bootstrap", type=int, default=0, metavar="REPLICAS")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha-level", type=float, default=0.05)
    p.add_argument("--out", default="rv-report")
    p.set_defaults(func=cmd_rv_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
