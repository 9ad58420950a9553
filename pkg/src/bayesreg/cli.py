"""Command-line front end.

Subcommands: ``fit``, ``reproduce-paper``, ``risk-sim``, ``condition-scan`` and
``contours``. Exit codes: 0 success, 1 reproduction thresholds not met,
2 usage/validation, 3 I/O, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    BayesRegError,
    NonNumericCell,
    NumericalError,
    ParseError,
    RaggedRows,
    ValidationError,
)
from .model_core import Dataset, condition_scan, ols_fit, ridge_fit, standardize
from .priors import PriorSpec, penalty_contours
from .reproduce import METHODS, SyntheticSpec, evaluate, generate_synthetic, run_seed
from .risk_lab import js_vs_threshold_experiment, risk_table_csv
from .samplers import (
    LambdaMode,
    RngStream,
    horseshoe_gibbs_run,
    inclusion_probabilities,
    lasso_gibbs_run,
    spike_slab_gibbs_run,
    summarize,
)
from .samplers.state import PosteriorSamples

log = logging.getLogger("bayesreg")

EXIT_OK, EXIT_THRESHOLDS, EXIT_USAGE, EXIT_IO, EXIT_NUMERICAL = 0, 1, 2, 3, 4

FIT_PRIORS = ("ridge", "lasso", "horseshoe", "spike-slab", "all")
# arguments that do not change any computed number
_NON_SEMANTIC = {"out", "workers", "config", "func", "verbose"}


def load_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a headed numeric CSV; the last column is the response."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("file is empty", line=1) from None
        width = len(header)
        if width < 2:
            raise ParseError("need at least one predictor and a response column", line=1)
        rows = []
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != width:
                raise RaggedRows(f"expected {width} cells, found {len(row)}", line=line)
            vals = []
            for col, cell in enumerate(row, start=1):
                try:
                    v = float(cell)
                except ValueError:
                    raise NonNumericCell(f"not a number: {cell!r}", line=line, column=col) from None
                if not math.isfinite(v):
                    raise NonNumericCell(f"non-finite value {cell!r}", line=line, column=col)
                vals.append(v)
            rows.append(vals)
    if not rows:
        raise ParseError("no data rows after the header", line=2)
    if len(rows) < 2:
        raise ParseError("need at least two data rows", line=2)
    data = np.array(rows)
    return data[:, :-1], data[:, -1]


def _semantic_config(args: argparse.Namespace) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in _NON_SEMANTIC}
    if cfg.get("input"):
        cfg["input"] = os.path.basename(cfg["input"])
    return cfg


def config_hash(args: argparse.Namespace) -> str:
    blob = json.dumps(_semantic_config(args), sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _header(args: argparse.Namespace) -> tuple[str, ...]:
    return (f"bayesreg {__version__} command={args.command} seed={args.seed} config={config_hash(args)}",)


def _meta(args: argparse.Namespace) -> dict:
    return {
        "version": __version__,
        "command": args.command,
        "seed": args.seed,
        "config_hash": config_hash(args),
        "config": _semantic_config(args),
    }


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isfinite(v):
            return v
        return {"value": None, "reason": "nan" if math.isnan(v) else ("+inf" if v > 0 else "-inf")}
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _dump_json(obj) -> str:
    return json.dumps(_json_safe(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _prepare_out(path) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror or exc}") from exc
    if not os.access(out, os.W_OK | os.X_OK):
        raise PermissionError(f"output directory {out} is not writable")
    return out


def _write(files: dict[str, str], out: Path) -> None:
    for name, text in files.items():
        (out / name).write_text(text, encoding="utf-8")


def _fmt(v) -> str:
    if v is None:
        return ""
    return repr(float(v))


# ---------------------------------------------------------------- fit


def _load_data(args) -> tuple[Dataset, np.ndarray | None]:
    if args.input and args.synthetic:
        raise ValidationError("use either --input or --synthetic, not both")
    if args.synthetic:
        return generate_synthetic(RngStream(args.seed, 0), SyntheticSpec())
    if not args.input:
        raise ValidationError("fit needs --input <csv> or --synthetic")
    x, y = load_csv(args.input)
    return standardize(x, y), None


def _run_chains(args, d: Dataset, method: str, index: int) -> list[PosteriorSamples]:
    lambda_mode = LambdaMode.parse(args.lambda_mode)

    def one(chain: int) -> PosteriorSamples:
        # stream 0 is reserved for synthetic data
        rng = RngStream(args.seed, 1 + 16 * chain + index)
        if method == "lasso":
            return lasso_gibbs_run(rng, d, args.iters, args.burn_in, args.thin, lambda_mode)
        if method == "horseshoe":
            return horseshoe_gibbs_run(rng, d, args.iters, args.burn_in, args.thin)
        return spike_slab_gibbs_run(rng, d, args.theta, args.slab_variance, args.iters, args.burn_in, args.thin)

    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as pool:
        return list(pool.map(one, range(args.chains)))


def _pooled(chains: list[PosteriorSamples]) -> PosteriorSamples:
    first = chains[0]
    return PosteriorSamples(
        states=[s for c in chains for s in c.states],
        burn_in=first.burn_in,
        thin=first.thin,
        seed=first.seed,
        prior=first.prior,
        method=first.method,
        elapsed=sum(c.elapsed for c in chains),
        col_sds=first.col_sds,
    )


def cmd_fit(args) -> int:
    out = _prepare_out(args.out)
    d, beta_true = _load_data(args)
    wanted = ("ridge", "lasso", "horseshoe", "spike-slab") if args.prior == "all" else (args.prior,)
    header = _header(args)

    point: dict[str, np.ndarray] = {}
    intervals: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    summaries: dict[str, dict] = {}
    sample_blocks: dict[str, list[str]] = {}
    inclusion = None
    try:
        point["ols"] = ols_fit(d).beta_raw
    except NumericalError as exc:
        log.warning("OLS skipped: %s", exc)

    sampler_order = [m for m in ("lasso", "horseshoe", "spike-slab") if m in wanted]
    if "ridge" in wanted:
        point["ridge"] = ridge_fit(d, args.ridge_lambda).beta_raw
    for index, method in enumerate(sampler_order):
        t0 = time.perf_counter()
        chains = _run_chains(args, d, method, index)
        log.info("%s: %d chain(s) in %.1fs", method, len(chains), time.perf_counter() - t0)
        sample_blocks[method] = [s.to_csv(chain=c, include_header=False) for c, s in enumerate(chains)]
        pooled = _pooled(chains)
        report = summarize(pooled, "raw")
        entry = report.to_dict()
        if method == "spike-slab":
            inclusion = inclusion_probabilities(pooled)
            for coef, prob in zip(entry["coefficients"], inclusion):
                coef["inclusion_prob"] = float(prob)
        else:
            point[method] = report.mode
            intervals[method] = (report.lower, report.upper)
        summaries[method] = entry

    files: dict[str, str] = {}
    rows = ["coefficient,method,estimate,lower_95,upper_95,inclusion_prob"]
    methods = [m for m in METHODS if m in point]
    for j in range(d.p):
        for m in methods:
            lo, hi = intervals.get(m, (None, None))
            rows.append(
                ",".join(
                    [
                        f"beta_{j + 1}",
                        m,
                        _fmt(point[m][j]),
                        _fmt(None if lo is None else lo[j]),
                        _fmt(None if hi is None else hi[j]),
                        _fmt(None if inclusion is None else inclusion[j]),
                    ]
                )
            )
    files["estimates.csv"] = "".join(f"# {h}\n" for h in header) + "\n".join(rows) + "\n"

    if sample_blocks:
        # samplers have different column sets: one header line per method block
        text = "".join(f"# {h}\n" for h in header) + "# coefficients on the standardized scale\n"
        for method, parts in sample_blocks.items():
            cols = _columns_for(method, d.p)
            text += f"# method={method}\n" + ",".join(["method", "chain", "draw"] + cols) + "\n" + "".join(parts)
        files["samples.csv"] = text

    summary = {
        "meta": _meta(args),
        "data": {"n": d.n, "p": d.p},
        "point_estimates": {m: [float(v) for v in point[m]] for m in methods},
        "methods": summaries,
    }
    if beta_true is not None:
        summary["beta_true"] = [float(v) for v in beta_true]
    files["summary.json"] = _dump_json(summary)
    _write(files, out)
    return EXIT_OK


def _columns_for(method: str, p: int) -> list[str]:
    beta = [f"beta_{j + 1}" for j in range(p)] + ["sigma2"]
    vec = lambda name: [f"{name}_{j + 1}" for j in range(p)]  # noqa: E731
    if method == "lasso":
        return beta + vec("tau2") + ["lambda_shrink"]
    if method == "horseshoe":
        return beta + vec("lambda2") + vec("nu") + ["tau2_global", "xi"]
    return beta + vec("gamma") + vec("alpha")


# ---------------------------------------------------------------- reproduce-paper


def cmd_reproduce_paper(args) -> int:
    out = _prepare_out(args.out)
    seeds = [args.seed + k for k in range(args.seeds)]
    lambda_mode = LambdaMode.parse(args.lambda_mode)
    results = []
    for s in seeds:
        res = run_seed(s, iters=args.iters, burn_in=args.burn_in, thin=args.thin, ridge_lambda=args.ridge_lambda, lambda_mode=lambda_mode)
        log.info("seed %d done in %.1fs: %s", s, res.elapsed, res.checks)
        results.append(res)
    verdict = evaluate(results)
    runtime = verdict.pop("runtime")
    log.info("total runtime %.1fs (limit %.0fs)", runtime["seconds"], runtime["limit"])

    rows = ["seed,coefficient,true,method,estimate"]
    for res in results:
        for j, b in enumerate(res.beta_true):
            for m in METHODS:
                rows.append(f"{res.seed},beta_{j + 1},{float(b)!r},{m},{float(res.estimates[m][j])!r}")
    table = "".join(f"# {h}\n" for h in _header(args)) + "\n".join(rows) + "\n"

    summary = {
        "meta": _meta(args),
        "beta_true": [float(v) for v in results[0].beta_true],
        "seeds": [
            {
                "seed": res.seed,
                "checks": res.checks,
                "median_abs_zero": {m: res.median_abs_zero(m) for m in METHODS},
            }
            for res in results
        ],
        "acceptance": verdict,
        "passed": all(v["passed"] for v in verdict.values()),
    }
    _write({"estimates.csv": table, "summary.json": _dump_json(summary)}, out)
    for name, v in verdict.items():
        print(f"[{'PASS' if v['passed'] else 'FAIL'}] {name}: {v['count']}/{v['seeds']} seeds (need {v['required']})")
    return EXIT_OK if summary["passed"] else EXIT_THRESHOLDS


# ---------------------------------------------------------------- risk / condition / contours


def cmd_risk_sim(args) -> int:
    out = _prepare_out(args.out)
    reports = js_vs_threshold_experiment(
        RngStream(args.seed),
        args.p,
        args.r,
        args.d,
        args.replications,
        threshold=args.threshold,
        positive_part=args.positive_part,
        noise_sd=args.noise_sd,
        workers=args.workers,
    )
    _write({"risk.csv": risk_table_csv(reports, _header(args))}, out)
    return EXIT_OK


def cmd_condition_scan(args) -> int:
    out = _prepare_out(args.out)
    if not 0 < args.eps_min <= args.eps_max:
        raise ValidationError("need 0 < eps-min <= eps-max")
    grid = np.geomspace(args.eps_min, args.eps_max, args.points)
    rows = condition_scan(grid, args.alpha)
    lines = ["".join(f"# {h}\n" for h in _header(args)) + f"# alpha={args.alpha!r}", "eps,kappa,kappa_shifted"]
    lines += [f"{e!r},{k!r},{ks!r}" for e, k, ks in rows.tolist()]
    _write({"condition.csv": "\n".join(lines) + "\n"}, out)
    return EXIT_OK


def cmd_contours(args) -> int:
    out = _prepare_out(args.out)
    if args.prior == "spike-slab":
        prior = PriorSpec.spike_slab(args.theta, args.slab_variance)
    else:
        prior = PriorSpec(args.prior, tau=args.tau)
    grid = penalty_contours(prior, args.lim, args.points)
    _write({"contours.csv": grid.to_csv(_header(args))}, out)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _common(p: argparse.ArgumentParser, out_default: str) -> None:
    p.add_argument("--seed", type=_seed, default=0, help="master seed for all random streams")
    p.add_argument("--out", default=out_default, help="output directory")
    p.add_argument("--workers", type=_positive_int, default=os.cpu_count() or 1, help="worker threads")
    p.add_argument("--config", help="JSON file of option defaults; flags override it")
    p.add_argument("-v", "--verbose", action="store_true")


def _mcmc(p: argparse.ArgumentParser) -> None:
    p.add_argument("--iters", type=_positive_int, default=10_000)
    p.add_argument("--burn-in", type=_nonneg_int, default=2_000)
    p.add_argument("--thin", type=_positive_int, default=1)
    p.add_argument("--lambda-mode", default="hyper", help="lasso rate: 'hyper' or 'fixed:<v>'")
    p.add_argument("--ridge-lambda", type=float, default=1.0, help="ridge penalty on the standardized scale")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(prog="bayesreg", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"bayesreg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    p = sub.add_parser("fit", help="fit OLS/ridge and run Gibbs samplers on a CSV or synthetic data")
    _common(p, "out")
    _mcmc(p)
    p.add_argument("--input", help="CSV with header; last column is the response")
    p.add_argument("--synthetic", action="store_true", help="use the built-in sparse synthetic data set")
    p.add_argument("--prior", choices=FIT_PRIORS, default="all")
    p.add_argument("--chains", type=_positive_int, default=1)
    p.add_argument("--theta", type=float, default=0.5, help="spike-and-slab prior inclusion probability")
    p.add_argument("--slab-variance", type=float, default=1.0)
    p.set_defaults(func=cmd_fit)
    subs["fit"] = p

    p = sub.add_parser("reproduce-paper", help="run the synthetic comparison over several seeds")
    _common(p, "out")
    _mcmc(p)
    p.add_argument("--seeds", type=_positive_int, default=20)
    p.set_defaults(func=cmd_reproduce_paper)
    subs["reproduce-paper"] = p

    p = sub.add_parser("risk-sim", help="Monte Carlo risk of MLE, James-Stein and thresholding")
    _common(p, "out")
    p.add_argument("--p", type=int, default=10)
    p.add_argument("--r", type=_nonneg_int, default=0)
    p.add_argument("--d", type=float, default=None, help="total energy (default: r)")
    p.add_argument("--replications", type=_positive_int, default=100_000)
    p.add_argument("--threshold", type=float, default=None, help="default sqrt(2 log p)")
    p.add_argument("--positive-part", action="store_true")
    p.add_argument("--noise-sd", type=float, default=1.0)
    p.set_defaults(func=cmd_risk_sim)
    subs["risk-sim"] = p

    p = sub.add_parser("condition-scan", help="condition numbers of the collinear 2x2 family")
    _common(p, "out")
    p.add_argument("--eps-min", type=float, default=1e-3)
    p.add_argument("--eps-max", type=float, default=10.0)
    p.add_argument("--points", type=_positive_int, default=50)
    p.add_argument("--alpha", type=float, default=1.0)
    p.set_defaults(func=cmd_condition_scan)
    subs["condition-scan"] = p

    p = sub.add_parser("contours", help="penalty surface phi(b1) + phi(b2) on a grid")
    _common(p, "out")
    p.add_argument("--prior", choices=("ridge", "lasso", "cauchy", "horseshoe", "spike-slab"), default="lasso")
    p.add_argument("--tau", type=float, default=1.0)
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--slab-variance", type=float, default=1.0)
    p.add_argument("--lim", type=float, default=2.0)
    p.add_argument("--points", type=_positive_int, default=101)
    p.set_defaults(func=cmd_contours)
    subs["contours"] = p
    return parser, subs


def parse_args(argv=None) -> argparse.Namespace:
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except OSError as exc:
            raise OSError(f"cannot read config {args.config}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            parser.error(f"config {args.config} is not valid JSON: {exc}")
        if not isinstance(file_cfg, dict):
            parser.error("config file must hold a JSON object")
        sp = subs[args.command]
        known = {a.dest for a in sp._actions}
        unknown = set(k.replace("-", "_") for k in file_cfg) - known
        if unknown:
            parser.error(f"unknown config keys: {sorted(unknown)}")
        sp.set_defaults(**{k.replace("-", "_"): v for k, v in file_cfg.items()})
        args = parser.parse_args(argv)
    return args


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except OSError as exc:
        print(f"bayesreg: {exc}", file=sys.stderr)
        return EXIT_IO
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except (NumericalError, ArithmeticError, np.linalg.LinAlgError) as exc:
        code = EXIT_NUMERICAL
        msg = str(exc)
    except (ValidationError, ValueError) as exc:
        code = EXIT_USAGE
        msg = str(exc)
    except OSError as exc:
        code = EXIT_IO
        msg = str(exc)
    except BayesRegError as exc:
        code = EXIT_USAGE
        msg = str(exc)
    print(f"bayesreg {args.command}: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
