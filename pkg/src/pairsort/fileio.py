"""Data file formats: items.jsonl, similarities.json, prompt_tree.json.

items.jsonl      one JSON object per line:
                 {"id": str, "display_ref": str, "ground_truth": number|null}
similarities.json  {"tau": number, "items": {"<id>": {"levels": [[s0, s1], ...]}}}
                 the length of "levels" defines the item's hierarchy depth
prompt_tree.json {"domain": str, "nodes": [{"level": int, "path": [0|1, ...],
                 "prompts": [str, str]}]} -- authored externally, consumed by
                 the extractor; parsed here so files round-trip through one
                 schema definition.

All validation errors are InputError with field-level details.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

from .errors import InputError
from .preorder import ItemRecord, LevelSimilarity, MAX_DEPTH


def parse_items_jsonl(text: str) -> list[ItemRecord]:
    items: list[ItemRecord] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InputError(
                f"items line {lineno}: invalid JSON ({exc.msg})",
                details={"line": lineno},
            ) from None
        if not isinstance(obj, dict):
            raise InputError(f"items line {lineno}: expected an object", details={"line": lineno})
        item_id = obj.get("id")
        if not isinstance(item_id, str) or not item_id:
            raise InputError(
                f"items line {lineno}: 'id' must be a non-empty string",
                details={"line": lineno, "field": "id"},
            )
        if item_id in seen:
            raise InputError(
                f"items line {lineno}: duplicate id {item_id!r}",
                details={"line": lineno, "field": "id", "id": item_id},
            )
        seen.add(item_id)
        display_ref = obj.get("display_ref", "")
        if not isinstance(display_ref, str):
            raise InputError(
                f"items line {lineno}: 'display_ref' must be a string",
                details={"line": lineno, "field": "display_ref"},
            )
        gt = obj.get("ground_truth")
        if gt is not None and not isinstance(gt, (int, float)):
            raise InputError(
                f"items line {lineno}: 'ground_truth' must be a number or null",
                details={"line": lineno, "field": "ground_truth"},
            )
        items.append(
            ItemRecord(
                id=item_id,
                display_ref=display_ref,
                ground_truth=float(gt) if gt is not None else None,
            )
        )
    if not items:
        raise InputError("items file contains no items")
    return items


def dump_items_jsonl(items: list[ItemRecord]) -> str:
    lines = [
        json.dumps(
            {"id": it.id, "display_ref": it.display_ref, "ground_truth": it.ground_truth}
        )
        for it in items
    ]
    return "\n".join(lines) + "\n"


def parse_similarities(obj_or_text) -> tuple[float, dict[str, list[LevelSimilarity]]]:
    """Returns (tau, {item_id: [LevelSimilarity per level]})."""
    if isinstance(obj_or_text, str):
        try:
            obj = json.loads(obj_or_text)
        except json.JSONDecodeError as exc:
            raise InputError(f"similarities: invalid JSON ({exc.msg})") from None
    else:
        obj = obj_or_text
    if not isinstance(obj, dict):
        raise InputError("similarities: expected a JSON object")
    tau = obj.get("tau")
    if not isinstance(tau, (int, float)) or not tau > 0 or not math.isfinite(tau):
        raise InputError(
            "similarities: 'tau' must be a positive finite number",
            details={"field": "tau"},
        )
    tau = float(tau)
    items = obj.get("items")
    if not isinstance(items, dict):
        raise InputError("similarities: 'items' must be an object", details={"field": "items"})
    parsed: dict[str, list[LevelSimilarity]] = {}
    for item_id, rec in items.items():
        levels = rec.get("levels") if isinstance(rec, dict) else None
        if not isinstance(levels, list) or not levels:
            raise InputError(
                f"similarities: item {item_id!r} needs a non-empty 'levels' array",
                details={"id": item_id, "field": "levels"},
            )
        if len(levels) > MAX_DEPTH:
            raise InputError(
                f"similarities: item {item_id!r} has {len(levels)} levels, max is {MAX_DEPTH}",
                details={"id": item_id, "field": "levels"},
            )
        parsed_levels = []
        for idx, pair in enumerate(levels, start=1):
            if (
                not isinstance(pair, list)
                or len(pair) != 2
                or not all(isinstance(s, (int, float)) and math.isfinite(s) for s in pair)
            ):
                raise InputError(
                    f"similarities: item {item_id!r} level {idx} must be a pair of finite numbers",
                    details={"id": item_id, "level": idx},
                )
            parsed_levels.append(
                LevelSimilarity(level=idx, scores=(float(pair[0]), float(pair[1])), tau=tau)
            )
        parsed[item_id] = parsed_levels
    return tau, parsed


def dump_similarities(tau: float, levels_by_id: dict[str, list[LevelSimilarity]]) -> str:
    payload = {
        "tau": tau,
        "items": {
            item_id: {"levels": [[lvl.scores[0], lvl.scores[1]] for lvl in levels]}
            for item_id, levels in levels_by_id.items()
        },
    }
    return json.dumps(payload, indent=2, sort_keys=True)


def cross_reference(items: list[ItemRecord], similarities: dict[str, list]) -> None:
    """Every item must have a similarity record; extras are tolerated."""
    missing = sorted({it.id for it in items} - set(similarities))
    if missing:
        raise InputError(
            f"similarities missing for item(s): {', '.join(missing)}",
            details={"missing_ids": missing},
        )


def parse_prompt_tree(obj_or_text) -> dict:
    """Validate a prompt tree: one node per reachable binary path, two prompts each."""
    if isinstance(obj_or_text, str):
        try:
            obj = json.loads(obj_or_text)
        except json.JSONDecodeError as exc:
            raise InputError(f"prompt tree: invalid JSON ({exc.msg})") from None
    else:
        obj = obj_or_text
    if not isinstance(obj, dict) or not isinstance(obj.get("domain"), str):
        raise InputError("prompt tree: expected {'domain': str, 'nodes': [...]}")
    nodes = obj.get("nodes")
    if not isinstance(nodes, list) or not nodes:
        raise InputError("prompt tree: 'nodes' must be a non-empty array")
    by_path: dict[tuple, dict] = {}
    for idx, node in enumerate(nodes):
        if not isinstance(node, dict):
            raise InputError(f"prompt tree: node {idx} must be an object")
        level = node.get("level")
        path = node.get("path")
        prompts = node.get("prompts")
        if not isinstance(level, int) or level < 1 or level > MAX_DEPTH:
            raise InputError(f"prompt tree: node {idx} has invalid 'level'", details={"node": idx})
        if not isinstance(path, list) or any(b not in (0, 1) for b in path):
            raise InputError(f"prompt tree: node {idx} 'path' must be a list of 0/1 bits")
        if len(path) != level - 1:
            raise InputError(
                f"prompt tree: node {idx} path length {len(path)} does not match level {level}"
            )
        if (
            not isinstance(prompts, list)
            or len(prompts) != 2
            or not all(isinstance(p, str) and p for p in prompts)
        ):
            raise InputError(f"prompt tree: node {idx} needs exactly 2 non-empty prompts")
        key = tuple(path)
        if key in by_path:
            raise InputError(f"prompt tree: duplicate node for path {path}")
        by_path[key] = node
    if () not in by_path:
        raise InputError("prompt tree: missing root node (level 1, empty path)")
    return obj


def read_json(path: str | Path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def read_text(path: str | Path) -> str:
    return Path(path).read_text(encoding="utf-8")
