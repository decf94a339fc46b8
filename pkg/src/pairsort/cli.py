"""Operator command line.

Subcommands: bench (simulation benchmark), preorder (bucket/rating report for
data files), simulate (one headless end-to-end session), serve (HTTP service),
export (dump a stored session). Flag defaults are the published operating
constants; every subcommand takes --json for machine-readable output.

Exit codes: 0 success, 1 invariant violation, 2 usage/input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import SessionConfig
from .errors import InputError, StateError
from .fileio import parse_items_jsonl, parse_similarities, read_text
from .metrics import kendall_tau_b, pearson, ranking_scores, spearman
from .preorder import run_preorder
from .session import SessionStore
from .simulator import OracleConfig, SyntheticPreorderConfig, run_benchmark, run_seed

EXPONENT_MODES = ("as_written", "inverted")


def _add_session_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("session parameters")
    group.add_argument(
        "--buckets", "--k", dest="buckets", type=int, default=5,
        help="pre-order bucket count k",
    )
    group.add_argument("--k-factor", type=float, default=32.0, help="Elo K factor")
    group.add_argument("--theta0", type=float, default=0.15, help="base threshold")
    group.add_argument(
        "--alpha", type=float, default=0.3, help="remaining-budget threshold weight"
    )
    group.add_argument(
        "--beta", type=float, default=0.9, help="accuracy decay base for the threshold"
    )
    group.add_argument(
        "--exponent-mode", choices=EXPONENT_MODES, default="as_written",
        help="sign of the accuracy exponent in the threshold schedule",
    )
    group.add_argument(
        "--batch-size", type=int, default=10,
        help="human judgments per threshold update cycle",
    )
    group.add_argument(
        "--merge-cycle", type=int, default=10,
        help="completed merges per threshold update cycle",
    )
    group.add_argument(
        "--session-seed", type=int, default=0, help="rating-noise RNG seed"
    )


def _session_config(args: argparse.Namespace) -> SessionConfig:
    config = SessionConfig(
        bucket_count=args.buckets,
        rng_seed=args.session_seed,
        k_factor=args.k_factor,
        theta0=args.theta0,
        alpha=args.alpha,
        beta=args.beta,
        exponent_mode=args.exponent_mode,
        batch_size=args.batch_size,
        merge_cycle=args.merge_cycle,
    )
    config.validate()
    return config


def _add_synth_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("synthetic data and annotator")
    group.add_argument(
        "--rho", type=float, default=0.1,
        help="per-level corruption probability of the synthetic pre-order signal",
    )
    group.add_argument(
        "--epsilon", type=float, default=0.0,
        help="annotator flip probability",
    )
    group.add_argument(
        "--tie-threshold", type=float, default=0.0,
        help="annotator indifference zone on ground-truth distance",
    )
    group.add_argument(
        "--depth", type=int, default=4, help="synthetic decision-tree depth"
    )
    group.add_argument(
        "--score-gap", type=float, default=0.1,
        help="synthetic winning-vs-losing similarity gap",
    )
    group.add_argument(
        "--score-base", type=float, default=0.25,
        help="synthetic losing-side similarity score",
    )


def _synth_config(args: argparse.Namespace, seed: int = 0) -> SyntheticPreorderConfig:
    return SyntheticPreorderConfig(
        depth=args.depth,
        per_level_error=args.rho,
        score_base=args.score_base,
        score_gap=args.score_gap,
        rng_seed=seed,
    )


def _oracle_config(args: argparse.Namespace, seed: int = 0) -> OracleConfig:
    return OracleConfig(
        flip_probability=args.epsilon,
        tie_threshold=args.tie_threshold,
        rng_seed=seed,
    )


def cmd_bench(args: argparse.Namespace) -> int:
    seeds = list(range(args.seed_start, args.seed_start + args.seeds))
    report = run_benchmark(
        n=args.n,
        seeds=seeds,
        oracle=_oracle_config(args),
        synth=_synth_config(args),
        session=_session_config(args),
        workers=args.workers,
    )
    if args.out:
        Path(args.out).write_text(report.to_json(), encoding="utf-8")
    if args.csv:
        Path(args.csv).write_text(report.per_seed_csv(), encoding="utf-8")
    sys.stdout.write(report.to_json() if args.json else report.to_text())
    return 0


def cmd_preorder(args: argparse.Namespace) -> int:
    items = parse_items_jsonl(read_text(args.items))
    tau, similarities = parse_similarities(read_text(args.similarities))
    config = _session_config(args)
    results = run_preorder(items, similarities, config.elo_init())
    rows = [
        {
            "id": r.item_id,
            "group_index": r.group_index,
            "bucket": r.bucket,
            "confidence": r.confidence,
            "rating": r.rating,
            "depth": r.depth,
        }
        for r in results
    ]
    if args.json:
        print(json.dumps({"tau": tau, "items": rows}, indent=2, sort_keys=True))
        return 0
    width = max(len(r["id"]) for r in rows)
    print(f"{'id'.ljust(width)}  group  bucket  conf    rating")
    for r in rows:
        print(
            f"{r['id'].ljust(width)}  {r['group_index']:>5}  {r['bucket']:>6}"
            f"  {r['confidence']:.4f}  {r['rating']:.2f}"
        )
    histogram: dict[int, int] = {}
    for r in rows:
        histogram[r["bucket"]] = histogram.get(r["bucket"], 0) + 1
    print("bucket histogram:")
    for bucket in sorted(histogram):
        print(f"  bucket {bucket}: {histogram[bucket]}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    run = run_seed(
        n=args.n,
        seed=args.run_seed,
        oracle=_oracle_config(args),
        synth=_synth_config(args),
        session=_session_config(args),
        with_baseline=False,
    )
    produced = ranking_scores(run.guided_ranking)
    ids = sorted(run.truth)
    a = [produced[i] for i in ids]
    b = [run.truth[i] for i in ids]
    total = run.guided_human + run.guided_auto
    summary = {
        "n": args.n,
        "seed": args.run_seed,
        "human_count": run.guided_human,
        "auto_count": run.guided_auto,
        "human_fraction": run.guided_human / total if total else 0.0,
        "spearman": spearman(a, b),
        "kendall_tau_b": kendall_tau_b(a, b),
        "pearson": pearson(a, b),
        "ranking": run.guided_ranking,
    }
    if args.json:
        print(json.dumps(summary, indent=2, sort_keys=True))
        return 0
    print(f"items            {summary['n']}")
    print(f"seed             {summary['seed']}")
    print(f"human judgments  {summary['human_count']}")
    print(f"auto judgments   {summary['auto_count']}")
    print(f"human fraction   {summary['human_fraction']:.3f}")
    print(f"spearman         {summary['spearman']:.4f}")
    print(f"kendall tau-b    {summary['kendall_tau_b']:.4f}")
    print(f"pearson          {summary['pearson']:.4f}")
    print("ranking (best first): " + ", ".join(run.guided_ranking))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import socket

    import uvicorn

    from .service import create_app

    app = create_app(args.data_dir, cors_origins=args.cors_origin)
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((args.host, args.port))
    except OSError as exc:
        print(f"error: cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return 1
    finally:
        probe.close()
    if args.json:
        print(
            json.dumps(
                {"serving": {"host": args.host, "port": args.port, "data_dir": args.data_dir}}
            ),
            flush=True,
        )
    uvicorn.run(app, host=args.host, port=args.port, log_level=args.log_level)
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    store = SessionStore(args.data_dir)
    try:
        session = store.load(args.session_id)
    except KeyError:
        print(f"error: unknown session {args.session_id!r}", file=sys.stderr)
        return 2
    bundle = store.export_bundle(session)
    text = json.dumps(bundle, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        if args.json:
            print(json.dumps({"written": args.out, "events": len(bundle["events"])}))
        else:
            print(f"wrote {args.out} ({len(bundle['events'])} events)")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pairsort",
        description="Uncertainty-guided pairwise ranking: benchmark, inspect, serve.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p_bench = sub.add_parser(
        "bench",
        help="run the simulation benchmark over many seeds",
        formatter_class=fmt,
    )
    p_bench.add_argument("--n", type=int, default=100, help="items per repetition")
    p_bench.add_argument("--seeds", type=int, default=20, help="number of seeds")
    p_bench.add_argument("--seed-start", type=int, default=0, help="first seed")
    p_bench.add_argument("--workers", type=int, default=1, help="parallel seed workers")
    p_bench.add_argument("--out", help="write the JSON report to this path")
    p_bench.add_argument("--csv", help="write the per-seed CSV to this path")
    p_bench.add_argument("--json", action="store_true", help="print JSON to stdout")
    _add_synth_flags(p_bench)
    _add_session_flags(p_bench)
    p_bench.set_defaults(func=cmd_bench)

    p_pre = sub.add_parser(
        "preorder",
        help="bucket/rating report for an items + similarities pair",
        formatter_class=fmt,
    )
    p_pre.add_argument("--items", required=True, help="items.jsonl path")
    p_pre.add_argument("--similarities", required=True, help="similarities.json path")
    p_pre.add_argument("--json", action="store_true", help="print JSON to stdout")
    _add_session_flags(p_pre)
    p_pre.set_defaults(func=cmd_preorder)

    p_sim = sub.add_parser(
        "simulate",
        help="run one headless synthetic session end to end",
        formatter_class=fmt,
    )
    p_sim.add_argument("--n", type=int, default=50, help="items")
    p_sim.add_argument("--run-seed", type=int, default=0, help="repetition seed")
    p_sim.add_argument("--json", action="store_true", help="print JSON to stdout")
    _add_synth_flags(p_sim)
    _add_session_flags(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_serve = sub.add_parser(
        "serve", help="start the annotation HTTP service", formatter_class=fmt
    )
    p_serve.add_argument("--data-dir", required=True, help="session store directory")
    p_serve.add_argument("--host", default="127.0.0.1", help="bind address")
    p_serve.add_argument("--port", type=int, default=8000, help="bind port")
    p_serve.add_argument(
        "--cors-origin", action="append", default=None,
        help="allowed browser origin (repeatable)",
    )
    p_serve.add_argument("--log-level", default="info", help="uvicorn log level")
    p_serve.add_argument("--json", action="store_true", help="print a JSON start line")
    p_serve.set_defaults(func=cmd_serve)

    p_exp = sub.add_parser(
        "export", help="dump a stored session as one JSON bundle", formatter_class=fmt
    )
    p_exp.add_argument("--data-dir", required=True, help="session store directory")
    p_exp.add_argument("--session-id", required=True, help="session to export")
    p_exp.add_argument("--out", help="write to this path instead of stdout")
    p_exp.add_argument("--json", action="store_true", help="print a JSON status line")
    p_exp.set_defaults(func=cmd_export)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits on bad usage and on --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (StateError, AssertionError) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
