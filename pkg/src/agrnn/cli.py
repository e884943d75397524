"""Command-line interface.

Subcommands: ``simulate`` (generate synthetic CSV datasets), ``select``
(bandwidth-based feature selection), ``importance`` (shuffle analysis),
``baseline`` (reference scores) and ``benchmark`` (the comparison harness).
Exit codes: 0 success, 2 input error, 3 numerical failure, 4 I/O error.
All randomness flows from ``--seed``; identical invocations produce
byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys

from .benchmark import (
    EVALUATORS,
    METHODS,
    BenchmarkConfig,
    emit_report,
    run_benchmark,
)
from .baselines import cfs_select, ftest_scores, mi_scores, rrelieff_scores, top_k
from .data import Dataset
from .datasets import (
    DEFAULT_WEIGHT_SEED,
    ButterflySpec,
    FriedmanSpec,
    load_csv,
    make_butterfly,
    make_friedman,
    save_csv,
)
from .errors import InputError, NumericalError
from .optim import OptimizerConfig
from .selector import select, shuffle_importance

_GENERATORS = ("butterfly", "friedman")


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    parser.add_argument("--threads", type=int, default=None, help="cap on parallel workers")
    parser.add_argument("--verbose", "-v", action="count", default=0)


def _input_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("input", nargs="?", help="CSV file with a header row")
    parser.add_argument("--generate", choices=_GENERATORS, help="generate data instead of reading a CSV")
    parser.add_argument("--target", default="y", help="target column name (default y)")
    parser.add_argument("--n", type=int, default=2000, help="generated sample count")
    parser.add_argument("--d", type=int, default=30, help="friedman feature count")
    parser.add_argument("--noise-sd", type=float, default=1.0, help="friedman noise level")
    parser.add_argument("--weight-seed", type=int, default=DEFAULT_WEIGHT_SEED,
                        help="butterfly network weight seed")


def _optimizer_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--threshold", type=float, default=1.0, help="relevance threshold on sigma")
    parser.add_argument("--init-sigma", type=float, default=0.5)
    parser.add_argument("--memory", type=int, default=10)
    parser.add_argument("--max-iter", type=int, default=500)
    parser.add_argument("--grad-tol", type=float, default=1e-6)
    parser.add_argument("--rel-loss-tol", type=float, default=1e-10)
    parser.add_argument("--restarts", type=int, default=0)


def _load_dataset(args) -> tuple[Dataset, str]:
    if args.generate:
        if args.generate == "butterfly":
            spec = ButterflySpec(n=args.n, seed=args.seed, weight_seed=args.weight_seed)
            return make_butterfly(spec), "butterfly"
        spec = FriedmanSpec(n=args.n, d=args.d, noise_sd=args.noise_sd, seed=args.seed)
        return make_friedman(spec), "friedman"
    if not args.input:
        raise InputError("either a CSV path or --generate is required")
    return load_csv(args.input, args.target), args.input


def _optimizer_config(args) -> OptimizerConfig:
    return OptimizerConfig(
        memory=args.memory,
        max_iterations=args.max_iter,
        grad_tol=args.grad_tol,
        rel_loss_tol=args.rel_loss_tol,
        init_sigma=args.init_sigma,
        restarts=args.restarts,
        seed=args.seed,
    )


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(payload: dict, out: str | None) -> None:
    payload = {"schema_version": 1, **payload}
    _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", out)


def _cmd_simulate(args) -> int:
    if args.kind == "butterfly":
        data = make_butterfly(ButterflySpec(n=args.n, seed=args.seed, weight_seed=args.weight_seed))
    else:
        data = make_friedman(FriedmanSpec(n=args.n, d=args.d, noise_sd=args.noise_sd, seed=args.seed))
    if args.out:
        save_csv(data, args.out)
        if args.verbose:
            print(f"wrote {data.n} rows x {data.d} features to {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(",".join(list(data.feature_names) + [data.target_name]) + "\n")
        for i in range(data.n):
            row = [repr(float(v)) for v in data.features[i]]
            row.append(repr(float(data.target[i])))
            sys.stdout.write(",".join(row) + "\n")
    return 0


def _cmd_select(args) -> int:
    data, _ = _load_dataset(args)
    result = select(data, _optimizer_config(args), args.threshold)
    _emit_json(result.to_dict(), args.out)
    return 0


def _cmd_importance(args) -> int:
    data, _ = _load_dataset(args)
    factory = None
    if args.generate == "butterfly":
        n, wseed = args.n, args.weight_seed
        factory = lambda s: make_butterfly(ButterflySpec(n=n, seed=s, weight_seed=wseed))
    elif args.generate == "friedman":
        n, d, sd = args.n, args.d, args.noise_sd
        factory = lambda s: make_friedman(FriedmanSpec(n=n, d=d, noise_sd=sd, seed=s))
    report = shuffle_importance(
        data,
        args.feature,
        _optimizer_config(args),
        repeats=args.repeats,
        seed=args.seed,
        threshold=args.threshold,
        dataset_factory=factory if args.regenerate else None,
    )
    _emit_json(report.to_dict(), args.out)
    return 0


def _cmd_baseline(args) -> int:
    data, _ = _load_dataset(args)
    if args.method == "cfs":
        payload = {"method": "cfs", "selected": cfs_select(data)}
    else:
        if args.method == "ftest":
            scores = ftest_scores(data)
        elif args.method == "mi":
            scores = mi_scores(data, bins=args.bins)
        else:
            scores = rrelieff_scores(
                data, k_neighbors=args.k_neighbors,
                sample_size=args.sample_size, seed=args.seed,
            )
        payload = scores.to_dict()
        if args.k:
            payload["selected"] = top_k(scores, args.k)
    _emit_json(payload, args.out)
    return 0


def _cmd_benchmark(args) -> int:
    data, name = _load_dataset(args)
    config = BenchmarkConfig(
        methods=tuple(m.strip() for m in args.methods.split(",") if m.strip()),
        evaluator=args.evaluator,
        train_fraction=args.train_fraction,
        cv_folds=args.cv_folds,
        repeats=args.repeats,
        seed=args.seed,
        target_column=args.target,
        scale_target=not args.no_scale_target,
        threshold=args.threshold,
        optimizer=_optimizer_config(args),
    )
    report = run_benchmark(data, config, dataset_name=name, threads=args.threads)
    _emit(emit_report(report, args.format, include_timings=args.timings), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agrnn",
        description="Feature selection with anisotropic kernel-regression bandwidths.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic dataset as CSV")
    p.add_argument("kind", choices=_GENERATORS)
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--d", type=int, default=30)
    p.add_argument("--noise-sd", type=float, default=1.0)
    p.add_argument("--weight-seed", type=int, default=DEFAULT_WEIGHT_SEED)
    p.add_argument("--out", help="output CSV path (default stdout)")
    _common_flags(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("select", help="optimize bandwidths and select features")
    _input_flags(p)
    _optimizer_flags(p)
    p.add_argument("--out", help="output JSON path (default stdout)")
    _common_flags(p)
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("importance", help="shuffle one feature and compare bandwidths")
    _input_flags(p)
    _optimizer_flags(p)
    p.add_argument("--feature", required=True, help="feature column to shuffle")
    p.add_argument("--repeats", type=int, default=20)
    p.add_argument("--regenerate", action="store_true",
                   help="with --generate: draw a fresh dataset per repeat")
    p.add_argument("--out", help="output JSON path (default stdout)")
    _common_flags(p)
    p.set_defaults(func=_cmd_importance)

    p = sub.add_parser("baseline", help="score features with a reference method")
    _input_flags(p)
    p.add_argument("--method", required=True, choices=("ftest", "mi", "cfs", "rrelieff"))
    p.add_argument("--k", type=int, default=0, help="also report the top-k features")
    p.add_argument("--bins", type=int, default=10, help="histogram bins for MI")
    p.add_argument("--k-neighbors", type=int, default=10)
    p.add_argument("--sample-size", type=int, default=None)
    p.add_argument("--out", help="output JSON path (default stdout)")
    _common_flags(p)
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("benchmark", help="compare selection methods with an evaluator")
    _input_flags(p)
    _optimizer_flags(p)
    p.add_argument("--methods", default=",".join(METHODS),
                   help=f"comma-separated subset of {{{','.join(METHODS)}}}")
    p.add_argument("--evaluator", default="knn", choices=EVALUATORS)
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--cv-folds", type=int, default=5)
    p.add_argument("--repeats", type=int, default=20)
    p.add_argument("--no-scale-target", action="store_true")
    p.add_argument("--format", default="text-table", choices=("text-table", "text", "json", "csv"))
    p.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")
    p.add_argument("--out", help="output path (default stdout)")
    _common_flags(p)
    p.set_defaults(func=_cmd_benchmark)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
