"""Command line front end: pairsort-extract.

    pairsort-extract --images photos/ --tree prompt_tree.json --out similarities.json

produces the ranking engine's input file, a sidecar run report, and
(optionally) a matching items.jsonl. Exit codes: 0 success, 2 bad input.
"""

from __future__ import annotations

import argparse
import logging
import sys

from pairsort.errors import InputError

from .embedder import DEFAULT_HASH_DIM, DEFAULT_MODEL
from .extract import ExtractConfig, extract


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    p = argparse.ArgumentParser(
        prog="pairsort-extract",
        description="Walk a binary prompt tree over an image folder and write similarities.json.",
        formatter_class=fmt,
    )
    p.add_argument("--images", required=True, help="directory of input images")
    p.add_argument("--tree", required=True, help="prompt_tree.json path")
    p.add_argument("--out", required=True, help="similarities.json output path")
    p.add_argument("--tau", type=float, default=0.1, help="softmax temperature stored in the output")
    p.add_argument(
        "--backend",
        choices=("clip", "hash"),
        default="clip",
        help="embedding backend; 'hash' is deterministic and needs no model weights",
    )
    p.add_argument("--model", default=DEFAULT_MODEL, help="model checkpoint for the clip backend")
    p.add_argument("--batch-size", type=int, default=32, help="images per inference batch")
    p.add_argument("--device", default=None, help="inference device, e.g. cpu or cuda:0")
    p.add_argument(
        "--hash-dim", type=int, default=DEFAULT_HASH_DIM, help="vector size for the hash backend"
    )
    p.add_argument("--report", default=None, help="sidecar report path (default: <out>.report.json)")
    p.add_argument("--items-out", default=None, help="also write an items.jsonl next to the scores")
    p.add_argument("--quiet", action="store_true", help="suppress the summary line")
    return p


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    cfg = ExtractConfig(
        tau=args.tau,
        backend=args.backend,
        model=args.model,
        batch_size=args.batch_size,
        device=args.device,
        hash_dim=args.hash_dim,
    )
    try:
        report = extract(
            args.images,
            args.tree,
            args.out,
            cfg,
            report_path=args.report,
            items_path=args.items_out,
        )
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if not args.quiet:
        print(
            f"wrote {report.out_path}: {len(report.processed)} item(s), "
            f"{len(report.skipped)} skipped"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
