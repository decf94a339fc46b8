"""Shared builders for the test suite."""

from __future__ import annotations

from pairsort.fileio import dump_items_jsonl, dump_similarities
from pairsort.preorder import ItemRecord, LevelSimilarity
from pairsort.simulator import SyntheticPreorderConfig, make_items, synthesize_similarities


def build_dataset(
    n: int,
    seed: int = 0,
    depth: int = 3,
    rho: float = 0.0,
) -> tuple[list[ItemRecord], dict[str, list[LevelSimilarity]]]:
    """Items with a seeded ground-truth permutation and synthetic scores."""
    items = make_items(n, seed)
    sims = synthesize_similarities(
        items,
        SyntheticPreorderConfig(depth=depth, per_level_error=rho, rng_seed=seed + 1),
    )
    return items, sims


def dataset_texts(n: int, seed: int = 0, depth: int = 3, rho: float = 0.0):
    """Same dataset rendered in the two on-disk formats."""
    items, sims = build_dataset(n, seed=seed, depth=depth, rho=rho)
    return dump_items_jsonl(items), dump_similarities(0.1, sims)


def confident_levels(decisions: list[int], tau: float = 0.1) -> list[LevelSimilarity]:
    """Levels whose softmax confidence is exactly 1.0 for the given decisions."""
    out = []
    for pos, bit in enumerate(decisions, start=1):
        scores = [0.0, 0.0]
        scores[bit] = 10.0  # gap/tau = 100: the softmax rounds to 1.0 exactly
        out.append(LevelSimilarity(level=pos, scores=scores, tau=tau))
    return out


def reference_mergesort(sequence, prefer_left):
    """Plain recursive top-down mergesort used as an independent oracle.

    Splits at len//2, sorts the left half fully before the right, then
    merges; `prefer_left(a, b)` True takes a. Returns (sorted, trace) with
    one (left_head, right_head) entry per comparison in schedule order.
    """
    trace = []

    def rec(a):
        if len(a) <= 1:
            return list(a)
        mid = len(a) // 2
        left = rec(a[:mid])
        right = rec(a[mid:])
        out = []
        i = j = 0
        while i < len(left) and j < len(right):
            trace.append((left[i], right[j]))
            if prefer_left(left[i], right[j]):
                out.append(left[i])
                i += 1
            else:
                out.append(right[j])
                j += 1
        out.extend(left[i:])
        out.extend(right[j:])
        return out

    return rec(list(sequence)), trace
