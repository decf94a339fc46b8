"""Tree-guided similarity extraction.

For each image the binary prompt tree is walked from the root: the two
prompts of the node selected by the path so far are embedded, their cosine
similarities against the image embedding become that level's score pair,
and the walk descends along the argmax. Only the selected branch's prompts
are ever evaluated, and the walk simply stops where the tree does, so
depth adapts per image.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from pairsort.errors import InputError
from pairsort.fileio import dump_items_jsonl, dump_similarities, parse_prompt_tree, read_text
from pairsort.preorder import ItemRecord, LevelSimilarity

from .embedder import DEFAULT_HASH_DIM, DEFAULT_MODEL, Embedder

log = logging.getLogger(__name__)

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg", ".bmp", ".gif", ".webp")


@dataclass(slots=True)
class ExtractConfig:
    tau: float = 0.1
    backend: str = "clip"  # "clip" | "hash"
    model: str = DEFAULT_MODEL
    batch_size: int = 32
    device: str | None = None
    hash_dim: int = DEFAULT_HASH_DIM

    def validate(self) -> None:
        if not self.tau > 0:
            raise InputError("tau must be positive")
        if self.backend not in ("clip", "hash"):
            raise InputError(f"unknown backend {self.backend!r}")
        if self.batch_size < 1:
            raise InputError("batch_size must be >= 1")


@dataclass(slots=True)
class PromptNode:
    level: int
    path: tuple[int, ...]
    prompts: tuple[str, str]


@dataclass(slots=True)
class ExtractReport:
    """What a run produced: written files plus the skip list."""

    out_path: str
    report_path: str
    items_path: str | None
    processed: list[str] = field(default_factory=list)
    skipped: list[dict] = field(default_factory=list)
    depths: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "out_path": self.out_path,
            "items_path": self.items_path,
            "processed": self.processed,
            "skipped": self.skipped,
            "depths": self.depths,
        }


def build_embedder(cfg: ExtractConfig) -> Embedder:
    if cfg.backend == "hash":
        from .embedder import HashEmbedder

        return HashEmbedder(dim=cfg.hash_dim)
    from .embedder import ClipEmbedder

    return ClipEmbedder(model_name=cfg.model, device=cfg.device, batch_size=cfg.batch_size)


def load_tree(obj_or_text) -> dict[tuple[int, ...], PromptNode]:
    """Engine-grade validation plus the walk's own reachability rules."""
    obj = parse_prompt_tree(obj_or_text)
    nodes: dict[tuple[int, ...], PromptNode] = {}
    for raw in obj["nodes"]:
        path = tuple(raw["path"])
        nodes[path] = PromptNode(
            level=raw["level"], path=path, prompts=(raw["prompts"][0], raw["prompts"][1])
        )
    for path, node in nodes.items():
        children = [b for b in (0, 1) if path + (b,) in nodes]
        # a one-child node dead-ends half the argmax walks mid-branch
        if len(children) == 1:
            missing = path + (1 - children[0],)
            raise InputError(
                f"prompt tree: node at path {list(path)} has one child; "
                f"sibling {list(missing)} is missing"
            )
        if path and path[:-1] not in nodes:
            log.warning("prompt tree: node at path %s is unreachable (no parent)", list(path))
    return nodes


def walk_image(
    vec: np.ndarray,
    nodes: dict[tuple[int, ...], PromptNode],
    node_vectors,
) -> list[tuple[float, float]]:
    """One root-to-leaf descent; returns the per-level score pairs."""
    path: tuple[int, ...] = ()
    pairs: list[tuple[float, float]] = []
    while (node := nodes.get(path)) is not None:
        tvecs = node_vectors(node)
        s0 = _cosine(vec, tvecs[0])
        s1 = _cosine(vec, tvecs[1])
        pairs.append((s0, s1))
        path = path + (1 if s1 > s0 else 0,)  # ties keep branch 0
    return pairs


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    # rows are unit vectors, so the dot product is the cosine; clamp the
    # last-ulp spill so consumers can rely on [-1, 1]
    return max(-1.0, min(1.0, float(a @ b)))


def extract(
    image_dir: str | Path,
    tree_path: str | Path,
    out_path: str | Path,
    cfg: ExtractConfig | None = None,
    *,
    embedder: Embedder | None = None,
    report_path: str | Path | None = None,
    items_path: str | Path | None = None,
) -> ExtractReport:
    """Produce similarities.json (plus sidecar report) from an image folder.

    Unreadable images are skipped with a warning and listed in the report;
    an invalid tree aborts before anything is written. Output files are
    written atomically via rename.
    """
    cfg = cfg or ExtractConfig()
    cfg.validate()
    nodes = load_tree(read_text(tree_path))

    image_dir = Path(image_dir)
    if not image_dir.is_dir():
        raise InputError(f"image directory {str(image_dir)!r} does not exist")
    out_path = Path(out_path)
    report_path = Path(report_path) if report_path else Path(str(out_path) + ".report.json")

    candidates = sorted(
        p for p in image_dir.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES
    )
    if not candidates:
        raise InputError(f"no image files under {str(image_dir)!r}")

    report = ExtractReport(
        out_path=str(out_path),
        report_path=str(report_path),
        items_path=str(items_path) if items_path else None,
    )
    images: list[Image.Image] = []
    ids: list[str] = []
    refs: dict[str, str] = {}
    for path in candidates:
        try:
            with Image.open(path) as im:
                im.load()  # force a full decode so truncated files fail here
                images.append(im.convert("RGB"))
        except (UnidentifiedImageError, OSError) as exc:
            log.warning("skipping unreadable image %s: %s", path.name, exc)
            report.skipped.append({"file": path.name, "error": str(exc)})
            continue
        if path.stem in refs:
            raise InputError(
                f"duplicate item id {path.stem!r} ({refs[path.stem]} vs {path.name}); "
                "item ids come from file stems and must be unique"
            )
        ids.append(path.stem)
        refs[path.stem] = path.name
    if not ids:
        raise InputError(f"no readable images under {str(image_dir)!r}")

    emb = embedder if embedder is not None else build_embedder(cfg)
    vecs = _embed_in_batches(emb, images, cfg.batch_size)

    # prompt embeddings are cached per node: each node's two prompts hit the
    # model once per run, and only if some image's walk reaches that node
    cache: dict[tuple[int, ...], np.ndarray] = {}

    def node_vectors(node: PromptNode) -> np.ndarray:
        got = cache.get(node.path)
        if got is None:
            got = emb.embed_texts(list(node.prompts))
            cache[node.path] = got
        return got

    levels_by_id: dict[str, list[LevelSimilarity]] = {}
    for item_id, vec in zip(ids, vecs):
        pairs = walk_image(vec, nodes, node_vectors)
        levels_by_id[item_id] = [
            LevelSimilarity(level=i, scores=pair, tau=cfg.tau)
            for i, pair in enumerate(pairs, start=1)
        ]
        report.depths[item_id] = len(pairs)
        report.processed.append(item_id)

    _write_atomic(out_path, dump_similarities(cfg.tau, levels_by_id))
    if items_path is not None:
        records = [
            ItemRecord(id=item_id, display_ref=refs[item_id], ground_truth=None)
            for item_id in ids
        ]
        _write_atomic(Path(items_path), dump_items_jsonl(records))
    _write_atomic(report_path, json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return report


def _embed_in_batches(emb: Embedder, images: list, batch_size: int) -> np.ndarray:
    chunks = [
        emb.embed_images(images[i : i + batch_size]) for i in range(0, len(images), batch_size)
    ]
    return np.concatenate(chunks, axis=0)


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise
