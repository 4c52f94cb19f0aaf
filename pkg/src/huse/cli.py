"""Command-line entry point.

Subcommands: compute, stability, surface, synth, serve.  All outputs are
machine-parseable (JSON or TSV).  Exit codes: 0 success, 2 invalid input,
3 computation precondition failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .classifier import KnnConfig, loo_error
from .dataset import DatasetError, load_dataset
from .metrics import compute_huse, export_surface, stability
from .oracle import (
    DiscretePair,
    RaterModel,
    anneal_pair,
    check_approximation_bound,
    exact_optimal_error_rate,
    exact_tv,
    random_grid_quantizer,
    random_pair,
    sample_eval_dataset,
    sample_opt_features,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PRECONDITION = 3


def _write(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _add_common(parser: argparse.ArgumentParser, *, seed: bool = True):
    parser.add_argument("--input", required=True, help="input JSONL dataset")
    parser.add_argument("--out", default=None, help="output path (default: stdout)")
    parser.add_argument("--k", type=int, default=16, help="number of neighbors (default 16)")
    parser.add_argument(
        "--tie-policy", choices=["half_error", "predict_model"], default="half_error"
    )
    parser.add_argument(
        "--denominator",
        choices=["tokens", "hj"],
        default="tokens",
        help="denominator of the log-probability feature",
    )
    if seed:
        parser.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="huse", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="score a dataset (full report as JSON)")
    _add_common(p, seed=False)
    p.add_argument(
        "--features",
        choices=["huse"],
        default="huse",
        help="feature map for the main score (the report always includes the hj-only score)",
    )
    p.add_argument("--no-diagnostics", action="store_true", help="omit per-example rows")

    p = sub.add_parser("stability", help="bootstrap HUSE under subsampling")
    _add_common(p)
    p.add_argument("--examples", type=int, required=True, help="contexts per replicate")
    p.add_argument("--raters", type=int, required=True, help="ratings per example per replicate")
    p.add_argument("--boot", type=int, default=100, help="number of bootstrap replicates")

    p = sub.add_parser("surface", help="export the 2-D classification surface as TSV")
    _add_common(p, seed=False)
    p.add_argument("--grid", type=int, default=50, help="lattice resolution per axis")
    p.add_argument("--features", choices=["huse"], default="huse")

    p = sub.add_parser("synth", help="oracle validation experiments")
    p.add_argument("--spec", required=True, help="JSON file describing a discrete pair")
    p.add_argument(
        "--mode", choices=["convergence", "bounds", "anneal-sweep"], required=True
    )
    p.add_argument("--n", type=int, default=10000, help="sampled rows per class")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sweep", type=int, default=5, help="number of seeds (convergence) or pairs (bounds)")
    p.add_argument("--k", type=int, default=16)
    p.add_argument(
        "--temperatures",
        default="0.5,0.7,0.9,1.0",
        help="comma-separated temperature grid for anneal-sweep",
    )
    p.add_argument("--out", default=None)

    p = sub.add_parser("serve", help="start the rating-collection service")
    p.add_argument("--pool", required=True, help="JSONL file of rateable examples")
    p.add_argument("--log", required=True, help="append-only rating log path")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--target", type=int, default=20, help="replicate target per example")
    p.add_argument("--batch-size", type=int, default=25)
    p.add_argument("--static", default=None, help="directory of UI assets to serve at /")

    return parser


def _load(path: str):
    try:
        return load_dataset(path)
    except FileNotFoundError:
        raise DatasetError(f"no such file: {path}") from None


def cmd_compute(args) -> int:
    dataset = _load(args.input)
    report = compute_huse(
        dataset, KnnConfig(k=args.k, tie_policy=args.tie_policy), args.denominator
    )
    _write(report.to_json(include_per_example=not args.no_diagnostics) + "\n", args.out)
    return EXIT_OK


def cmd_stability(args) -> int:
    dataset = _load(args.input)
    report = stability(
        dataset,
        n_examples=args.examples,
        n_raters=args.raters,
        n_bootstrap=args.boot,
        seed=args.seed,
        config=KnnConfig(k=args.k, tie_policy=args.tie_policy),
        denominator=args.denominator,
    )
    _write(report.to_json() + "\n", args.out)
    return EXIT_OK


def cmd_surface(args) -> int:
    dataset = _load(args.input)
    surface = export_surface(
        dataset,
        KnnConfig(k=args.k, tie_policy=args.tie_policy),
        grid_resolution=args.grid,
        denominator=args.denominator,
    )
    _write(surface.to_tsv(), args.out)
    return EXIT_OK


def _load_pair(path: str) -> DiscretePair:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise DatasetError(f"no such file: {path}") from None
    try:
        return DiscretePair.from_json(text)
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise DatasetError(f"invalid pair spec: {exc}") from None


def cmd_synth(args) -> int:
    config = KnnConfig(k=args.k)
    if args.mode == "convergence":
        pair = _load_pair(args.spec)
        l_star = exact_optimal_error_rate(pair)
        gaps = []
        estimates = []
        for s in range(args.sweep):
            feats, labels = sample_opt_features(pair, args.n, seed=args.seed + s)
            estimate = 2.0 * loo_error(feats, labels, config)
            estimates.append(estimate)
            gaps.append(abs(estimate - l_star))
        out = {
            "mode": "convergence",
            "l_star": l_star,
            "n_per_class": args.n,
            "k": args.k,
            "seeds": list(range(args.seed, args.seed + args.sweep)),
            "estimates": estimates,
            "mean_abs_gap": float(np.mean(gaps)),
        }
    elif args.mode == "bounds":
        rng = np.random.default_rng(args.seed)
        results = []
        for _ in range(args.sweep):
            pair = random_pair(rng)
            quantizer = random_grid_quantizer(rng)
            results.append(check_approximation_bound(pair, quantizer).to_dict())
        out = {
            "mode": "bounds",
            "n_pairs": args.sweep,
            "all_hold": all(r["holds"] for r in results),
            "results": results,
        }
    else:  # anneal-sweep
        pair = _load_pair(args.spec)
        temperatures = [float(t) for t in args.temperatures.split(",")]
        points = []
        for t in temperatures:
            annealed = anneal_pair(pair, t)
            dataset = sample_eval_dataset(annealed, args.n, RaterModel(), seed=args.seed)
            report = compute_huse(dataset, config, with_diagnostics=False)
            points.append({"t": t, "exact_tv": exact_tv(annealed), "huse": report.huse})
        out = {"mode": "anneal-sweep", "n_per_class": args.n, "points": points}
    _write(json.dumps(out, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import RatingStore, create_app, load_pool

    try:
        pool = load_pool(args.pool)
    except FileNotFoundError:
        raise DatasetError(f"no such file: {args.pool}") from None
    except (KeyError, ValueError) as exc:
        raise DatasetError(f"invalid pool: {exc}") from None
    store = RatingStore(
        pool, args.log, replicate_target=args.target, batch_size=args.batch_size
    )
    app = create_app(store, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


_COMMANDS = {
    "compute": cmd_compute,
    "stability": cmd_stability,
    "surface": cmd_surface,
    "synth": cmd_synth,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except DatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
