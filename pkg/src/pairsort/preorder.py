"""Zero-shot pre-ordering: binary decisions to group indices, buckets, and
initial Elo ratings.

Input is a per-item list of similarity score pairs, one pair per hierarchy
level (produced offline by a vision-language extractor, or synthesized by the
simulator). Each level yields a binary decision and a softmax confidence; the
decisions encode a group index, groups merge into k ordinal buckets, and each
bucket anchors a base rating perturbed by seeded noise scaled down for
high-confidence items.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InputError
from .rng import Xoshiro256StarStar

MAX_DEPTH = 16


@dataclass(slots=True)
class ItemRecord:
    """One rankable item. `depth` is bound when similarities are attached."""

    id: str
    display_ref: str = ""
    ground_truth: float | None = None
    depth: int | None = None


@dataclass(slots=True)
class LevelSimilarity:
    """Score pair for one hierarchy level plus the session temperature."""

    level: int
    scores: tuple[float, float]
    tau: float = 0.1

    def classify(self) -> tuple[int, float]:
        return classify_level(self.scores, self.tau)


@dataclass(slots=True)
class PreorderResult:
    item_id: str
    group_index: int
    bucket: int
    confidence: float
    rating: float
    depth: int
    decisions: list[int] = field(default_factory=list)


@dataclass(slots=True)
class EloInitConfig:
    """Bucket-to-rating mapping and the noise term's distribution."""

    bucket_count: int = 5
    rating_base_min: float = 1200.0
    rating_base_max: float = 1800.0
    noise_halfwidth: float = 75.0
    rng_seed: int = 0

    def validate(self) -> None:
        if self.bucket_count < 1:
            raise InputError("bucket_count must be >= 1")
        if self.bucket_count > 1 and not self.rating_base_min < self.rating_base_max:
            raise InputError("rating_base_min must be < rating_base_max when bucket_count > 1")
        if self.noise_halfwidth < 0:
            raise InputError("noise_halfwidth must be >= 0")

    def base_rating(self, bucket: int) -> float:
        """Linear interpolation: bucket 0 at the min, bucket k-1 at the max.

        A single bucket carries no ordering information, so it sits at the
        midpoint.
        """
        k = self.bucket_count
        if not 0 <= bucket < k:
            raise InputError(f"bucket {bucket} out of range for k={k}")
        if k == 1:
            return (self.rating_base_min + self.rating_base_max) / 2.0
        span = self.rating_base_max - self.rating_base_min
        return self.rating_base_min + span * bucket / (k - 1)


def classify_level(scores: tuple[float, float], tau: float) -> tuple[int, float]:
    """Binary decision plus softmax confidence at temperature `tau`.

    Returns (index of the larger score, softmax probability of that score).
    Ties resolve to 0; their ambiguity is fully expressed by confidence 0.5.
    """
    s0, s1 = scores
    if not (math.isfinite(s0) and math.isfinite(s1)):
        raise InputError(f"similarity scores must be finite, got {scores!r}")
    if not (tau > 0 and math.isfinite(tau)):
        raise InputError(f"temperature must be positive and finite, got {tau!r}")
    decision = 1 if s1 > s0 else 0
    lose = min(s0, s1)
    win = max(s0, s1)
    # max-subtracted softmax over two scores: 1 / (1 + e^{(lose-win)/tau})
    confidence = 1.0 / (1.0 + math.exp((lose - win) / tau))
    return decision, confidence


def group_index(decisions: list[int]) -> int:
    """Little-endian binary encoding: level l contributes decision * 2^(l-1)."""
    if not decisions:
        raise InputError("decision list is empty")
    if len(decisions) > MAX_DEPTH:
        raise InputError(f"depth {len(decisions)} exceeds maximum {MAX_DEPTH}")
    g = 0
    for level, c in enumerate(decisions, start=1):
        if c not in (0, 1):
            raise InputError(f"decision at level {level} must be 0 or 1, got {c!r}")
        g += c << (level - 1)
    return g


def bucket_of(g: int, d: int, k: int) -> int:
    """Merge 2^d fine groups into k coarse buckets: floor(g * k / 2^d).

    Monotone nondecreasing in g and surjective onto [0, k) when 2^d >= k.
    """
    if not 1 <= d <= MAX_DEPTH:
        raise InputError(f"depth must be in [1, {MAX_DEPTH}], got {d}")
    if k < 1:
        raise InputError(f"bucket count must be >= 1, got {k}")
    if not 0 <= g < (1 << d):
        raise InputError(f"group index {g} out of range for depth {d}")
    return (g * k) >> d


def item_confidence(level_confidences: list[float]) -> float:
    """Aggregate per-level confidences into one item confidence (their mean)."""
    if not level_confidences:
        raise InputError("no level confidences to aggregate")
    return sum(level_confidences) / len(level_confidences)


def init_rating(
    bucket: int,
    conf: float,
    cfg: EloInitConfig,
    rng: Xoshiro256StarStar,
) -> float:
    """Base rating for the bucket plus noise damped by confidence.

    The noise draw is uniform on [-noise_halfwidth, +noise_halfwidth] and is
    scaled by (1.5 - conf), so confident items stay near their bucket anchor
    while ambiguous ones spread out. Binary softmax confidences are >= 0.5,
    which keeps the scale within [0.5, 1.0]; lower (still positive) values are
    accepted and widen the spread up to 1.5x the nominal halfwidth.
    """
    if not 0.0 < conf <= 1.0:
        raise InputError(f"confidence must be in (0.0, 1.0], got {conf!r}")
    base = cfg.base_rating(bucket)
    eta = rng.uniform(-cfg.noise_halfwidth, cfg.noise_halfwidth)
    return base + eta * (1.5 - conf)


def run_preorder(
    items: list[ItemRecord],
    similarities: dict[str, list[LevelSimilarity]],
    cfg: EloInitConfig,
) -> list[PreorderResult]:
    """Pre-order a batch of items: one PreorderResult per item.

    Deterministic for a fixed cfg.rng_seed: items consume noise draws in
    ascending id order, so the draw sequence does not depend on input order.
    Results are returned in that same order.
    """
    cfg.validate()
    seen: set[str] = set()
    for item in items:
        if item.id in seen:
            raise InputError(f"duplicate item id {item.id!r}")
        seen.add(item.id)

    missing = sorted(seen - set(similarities))
    if missing:
        raise InputError(
            f"no similarity record for item(s): {', '.join(missing)}",
            details={"missing_ids": missing},
        )

    rng = Xoshiro256StarStar(cfg.rng_seed)
    results = []
    for item in sorted(items, key=lambda it: it.id):
        levels = similarities[item.id]
        if not levels:
            raise InputError(f"item {item.id!r} has an empty similarity record")
        if item.depth is not None and item.depth != len(levels):
            raise InputError(
                f"item {item.id!r} declares depth {item.depth} but has {len(levels)} levels"
            )
        decisions = []
        confs = []
        for lvl in levels:
            c, conf = lvl.classify()
            decisions.append(c)
            confs.append(conf)
        d = len(decisions)
        if d > MAX_DEPTH:
            raise InputError(f"item {item.id!r} depth {d} exceeds maximum {MAX_DEPTH}")
        item.depth = d
        g = group_index(decisions)
        b = bucket_of(g, d, cfg.bucket_count)
        conf_i = item_confidence(confs)
        r = init_rating(b, conf_i, cfg, rng)
        results.append(
            PreorderResult(
                item_id=item.id,
                group_index=g,
                bucket=b,
                confidence=conf_i,
                rating=r,
                depth=d,
                decisions=decisions,
            )
        )
    return results
