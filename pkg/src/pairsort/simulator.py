"""Desk-scale benchmark harness.

Builds synthetic ranking problems (known ground truth, corrupted pre-order
signals), answers comparison requests with a noisy simulated annotator, and
reports human/auto comparison counts next to an all-human mergesort baseline
plus rank-correlation quality. Every run is a pure function of its seeds.
"""

from __future__ import annotations

import io
import json
import math
import statistics
from dataclasses import dataclass, field, replace

from .config import SessionConfig
from .errors import InputError, StateError
from .metrics import kendall_tau_b, pearson, ranking_scores, spearman
from .preorder import MAX_DEPTH, ItemRecord, LevelSimilarity, run_preorder
from .rng import Xoshiro256StarStar
from .sorter import (
    EQUAL,
    HUMAN,
    LEFT_FIRST,
    RIGHT_FIRST,
    Judgment,
    comparison_upper_bound,
    start_sort,
    total_schedule_estimate,
)


@dataclass(slots=True)
class OracleConfig:
    """Simulated annotator: error rate, indifference zone, seed."""

    flip_probability: float = 0.0
    tie_threshold: float = 0.0
    rng_seed: int = 0

    def validate(self) -> None:
        if not 0.0 <= self.flip_probability < 0.5:
            raise InputError("flip_probability must lie in [0, 0.5)")
        if not self.tie_threshold >= 0.0:
            raise InputError("tie_threshold must be non-negative")


class SimulatedAnnotator:
    """Answers pairwise requests from hidden scores.

    Ties are declared whenever the hidden scores sit within tie_threshold of
    each other; the error draw only happens for non-tied pairs, so a flip can
    never turn a tie into a preference or vice versa.
    """

    def __init__(self, truth: dict[str, float], config: OracleConfig):
        config.validate()
        self.truth = dict(truth)
        self.config = config
        self.rng = Xoshiro256StarStar(config.rng_seed)
        self.answers = 0
        self.flips = 0

    def answer(self, left: str, right: str) -> str:
        try:
            y_left = self.truth[left]
            y_right = self.truth[right]
        except KeyError as exc:
            raise InputError(f"no ground truth for item {exc.args[0]!r}") from None
        self.answers += 1
        if abs(y_left - y_right) <= self.config.tie_threshold:
            return EQUAL
        honest = LEFT_FIRST if y_left > y_right else RIGHT_FIRST
        if self.config.flip_probability > 0.0:
            if self.rng.random() < self.config.flip_probability:
                self.flips += 1
                return RIGHT_FIRST if honest == LEFT_FIRST else LEFT_FIRST
        return honest


@dataclass(slots=True)
class SyntheticPreorderConfig:
    """Corrupted zero-shot signal built from the true ranking.

    Each item's true group index is the quantile of its rank, expressed in
    `depth` binary digits; every digit is flipped independently with
    probability per_level_error. Scores encode the chosen side as
    score_base + score_gap vs score_base, so per-level confidence is
    1 / (1 + exp(-score_gap / tau)).
    """

    depth: int = 4
    per_level_error: float = 0.0
    score_base: float = 0.25
    score_gap: float = 0.1
    rng_seed: int = 0

    def validate(self) -> None:
        if not 1 <= self.depth <= MAX_DEPTH:
            raise InputError(f"depth must lie in [1, {MAX_DEPTH}]")
        if not 0.0 <= self.per_level_error <= 1.0:
            raise InputError("per_level_error must lie in [0, 1]")
        if not self.score_gap > 0.0:
            raise InputError("score_gap must be positive")
        if not math.isfinite(self.score_base):
            raise InputError("score_base must be finite")


def synthesize_similarities(
    items: list[ItemRecord],
    config: SyntheticPreorderConfig,
    tau: float = 0.1,
) -> dict[str, list[LevelSimilarity]]:
    """Per-item binary decision scores consistent with (a corruption of) truth."""
    config.validate()
    if not items:
        raise InputError("no items to synthesize similarities for")
    for item in items:
        if item.ground_truth is None:
            raise InputError(f"item {item.id!r} has no ground truth value")
    values = [item.ground_truth for item in items]
    if min(values) == max(values):
        raise InputError("ground truth values are all identical")

    n = len(items)
    span = 1 << config.depth
    rng = Xoshiro256StarStar(config.rng_seed)
    by_rank = sorted(items, key=lambda it: (it.ground_truth, it.id))
    out: dict[str, list[LevelSimilarity]] = {}
    # Walk items in id order so the flip stream does not depend on the
    # (possibly tied) ground-truth sort.
    true_group = {item.id: rank * span // n for rank, item in enumerate(by_rank)}
    for item in sorted(items, key=lambda it: it.id):
        group = true_group[item.id]
        levels = []
        for level in range(1, config.depth + 1):
            bit = (group >> (level - 1)) & 1
            if config.per_level_error > 0.0:
                if rng.random() < config.per_level_error:
                    bit ^= 1
            scores = [config.score_base, config.score_base]
            scores[bit] += config.score_gap
            levels.append(LevelSimilarity(level=level, scores=scores, tau=tau))
        out[item.id] = levels
    return out


def make_items(n: int, seed: int) -> list[ItemRecord]:
    """n items with ids item_000... and ground truth a seeded permutation of 0..n-1."""
    if n < 2:
        raise InputError("need at least two items")
    width = max(3, len(str(n - 1)))
    values = list(range(n))
    Xoshiro256StarStar(seed).shuffle(values)
    return [
        ItemRecord(
            id=f"item_{i:0{width}d}",
            display_ref=f"item_{i:0{width}d}",
            ground_truth=float(values[i]),
        )
        for i in range(n)
    ]


@dataclass(slots=True)
class TraceEntry:
    left: str
    right: str
    outcome: str
    source: str


@dataclass(slots=True)
class SeedOutcome:
    """One benchmark repetition."""

    seed: int
    baseline_human: int
    guided_human: int
    guided_auto: int
    human_fraction: float
    spearman: float
    kendall_tau_b: float
    pearson: float

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "baseline_human": self.baseline_human,
            "guided_human": self.guided_human,
            "guided_auto": self.guided_auto,
            "human_fraction": self.human_fraction,
            "spearman": self.spearman,
            "kendall_tau_b": self.kendall_tau_b,
            "pearson": self.pearson,
        }


@dataclass(slots=True)
class BenchReport:
    """Aggregate over seeds. Counts are means; spreads are population stdevs."""

    n: int
    seeds_used: list[int]
    exhaustive_count: int
    schedule_estimate: int
    worst_case_count: int
    all_human_count_mean: float
    all_human_count_std: float
    guided_human_count_mean: float
    guided_human_count_std: float
    guided_auto_count_mean: float
    human_fraction: float
    spearman_mean: float
    spearman_std: float
    kendall_tau_b_mean: float
    kendall_tau_b_std: float
    pearson_mean: float
    pearson_std: float
    per_seed: list[SeedOutcome] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "seeds_used": list(self.seeds_used),
            "exhaustive_count": self.exhaustive_count,
            "schedule_estimate": self.schedule_estimate,
            "worst_case_count": self.worst_case_count,
            "all_human_count_mean": self.all_human_count_mean,
            "all_human_count_std": self.all_human_count_std,
            "guided_human_count_mean": self.guided_human_count_mean,
            "guided_human_count_std": self.guided_human_count_std,
            "guided_auto_count_mean": self.guided_auto_count_mean,
            "human_fraction": self.human_fraction,
            "spearman_mean": self.spearman_mean,
            "spearman_std": self.spearman_std,
            "kendall_tau_b_mean": self.kendall_tau_b_mean,
            "kendall_tau_b_std": self.kendall_tau_b_std,
            "pearson_mean": self.pearson_mean,
            "pearson_std": self.pearson_std,
            "per_seed": [row.to_dict() for row in self.per_seed],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        rows = [
            ("items", f"{self.n}"),
            ("seeds", ", ".join(str(s) for s in self.seeds_used)),
            ("exhaustive pairs", f"{self.exhaustive_count}"),
            ("schedule estimate n*ceil(log2 n)", f"{self.schedule_estimate}"),
            ("mergesort worst case", f"{self.worst_case_count}"),
            (
                "all-human comparisons",
                f"{self.all_human_count_mean:.1f} +/- {self.all_human_count_std:.1f}",
            ),
            (
                "guided human comparisons",
                f"{self.guided_human_count_mean:.1f} +/- {self.guided_human_count_std:.1f}",
            ),
            ("guided auto comparisons", f"{self.guided_auto_count_mean:.1f}"),
            ("human fraction", f"{self.human_fraction:.3f}"),
            ("spearman", f"{self.spearman_mean:.4f} +/- {self.spearman_std:.4f}"),
            (
                "kendall tau-b",
                f"{self.kendall_tau_b_mean:.4f} +/- {self.kendall_tau_b_std:.4f}",
            ),
            ("pearson", f"{self.pearson_mean:.4f} +/- {self.pearson_std:.4f}"),
        ]
        width = max(len(name) for name, _ in rows)
        lines = [f"{name.ljust(width)}  {value}" for name, value in rows]
        return "\n".join(lines) + "\n"

    def per_seed_csv(self) -> str:
        buf = io.StringIO()
        header = [
            "seed",
            "baseline_human",
            "guided_human",
            "guided_auto",
            "human_fraction",
            "spearman",
            "kendall_tau_b",
            "pearson",
        ]
        buf.write(",".join(header) + "\n")
        for row in self.per_seed:
            buf.write(
                f"{row.seed},{row.baseline_human},{row.guided_human},"
                f"{row.guided_auto},{row.human_fraction:.6f},"
                f"{row.spearman:.6f},{row.kendall_tau_b:.6f},{row.pearson:.6f}\n"
            )
        return buf.getvalue()


def _reference_merge_schedule(sequence: list[str], outcome_at) -> tuple[list[str], int]:
    """Plain recursive top-down mergesort over the id list.

    outcome_at(left, right) -> True when left stays first. Returns the sorted
    list and the number of comparisons asked. The split point is len // 2 so
    the comparison schedule matches the incremental scheduler exactly.
    """
    count = 0

    def sort(arr: list[str]) -> list[str]:
        nonlocal count
        if len(arr) <= 1:
            return list(arr)
        mid = len(arr) // 2
        left = sort(arr[:mid])
        right = sort(arr[mid:])
        merged: list[str] = []
        i = j = 0
        while i < len(left) and j < len(right):
            count += 1
            if outcome_at(left[i], right[j]):
                merged.append(left[i])
                i += 1
            else:
                merged.append(right[j])
                j += 1
        merged.extend(left[i:])
        merged.extend(right[j:])
        return merged

    return sort(list(sequence)), count


def _check_schedule(initial: list[str], trace: list[TraceEntry], ranking: list[str]) -> None:
    """Re-derive the comparison schedule from the outcome trace and demand an
    exact match with what the incremental sorter actually asked and produced."""
    cursor = iter(trace)

    def outcome_at(left: str, right: str) -> bool:
        try:
            entry = next(cursor)
        except StopIteration:
            raise StateError("sorter asked fewer comparisons than the schedule") from None
        if (entry.left, entry.right) != (left, right):
            raise StateError(
                "comparison schedule diverged: "
                f"expected ({left!r}, {right!r}), sorter asked ({entry.left!r}, {entry.right!r})"
            )
        return entry.outcome != RIGHT_FIRST

    replayed, count = _reference_merge_schedule(initial, outcome_at)
    leftover = next(cursor, None)
    if leftover is not None or count != len(trace):
        raise StateError("sorter asked more comparisons than the schedule")
    if replayed != ranking:
        raise StateError("replayed ranking does not match the sorter's ranking")


def _drive(sort_obj, annotator: SimulatedAnnotator) -> tuple[list[str], list[TraceEntry]]:
    """Run a sorting session to completion against the simulated annotator."""
    trace: list[TraceEntry] = []

    def hook(kind: str, payload: dict) -> None:
        if kind == "judgment_received":
            trace.append(
                TraceEntry(
                    left=payload["left"],
                    right=payload["right"],
                    outcome=payload["outcome"],
                    source=payload["source"],
                )
            )

    sort_obj.on_event = hook
    while True:
        request = sort_obj.next()
        if request is None:
            break
        outcome = annotator.answer(request.left, request.right)
        sort_obj.submit(Judgment(request_id=request.request_id, outcome=outcome))
    return sort_obj.ranking(), trace


@dataclass(slots=True)
class SeedRun:
    """Everything one repetition produced, for tests and reporting."""

    seed: int
    items: list[ItemRecord]
    truth: dict[str, float]
    baseline_ranking: list[str]
    baseline_count: int
    guided_ranking: list[str]
    guided_human: int
    guided_auto: int
    trace: list[TraceEntry]
    initial_sequence: list[str]


def run_seed(
    n: int,
    seed: int,
    oracle: OracleConfig,
    synth: SyntheticPreorderConfig,
    session: SessionConfig,
    with_baseline: bool = True,
) -> SeedRun:
    """One full repetition: synth data -> pre-order -> guided sort (+ baseline).

    Sub-seeds for ground truth, signal corruption, rating noise, and annotator
    error are all derived from `seed`, so a repetition is reproducible from
    (n, seed, configs) alone.
    """
    master = Xoshiro256StarStar(seed)
    gt_seed = master.next_u64()
    synth_seed = master.next_u64()
    session_seed = master.next_u64()
    oracle_seed = master.next_u64()

    items = make_items(n, gt_seed)
    truth = {item.id: item.ground_truth for item in items}
    similarities = synthesize_similarities(
        items, replace(synth, rng_seed=synth_seed), tau=session.tau
    )
    estimate = total_schedule_estimate(n)
    cap = comparison_upper_bound(n)

    baseline_ranking: list[str] = []
    baseline_count = 0
    if with_baseline:
        all_human = session.threshold(estimate)
        all_human.theta0 = 0.0  # theta == 0 routes every comparison to a human
        base_sort = start_sort(
            run_preorder(
                items, similarities, replace(session.elo_init(), rng_seed=session_seed)
            ),
            k_factor=session.k_factor,
            threshold=all_human,
        )
        base_oracle = SimulatedAnnotator(truth, replace(oracle, rng_seed=oracle_seed))
        baseline_ranking, base_trace = _drive(base_sort, base_oracle)
        baseline_count = len(base_trace)
        if not all(entry.source == HUMAN for entry in base_trace):
            raise StateError("baseline run routed a comparison away from the annotator")

    guided = start_sort(
        run_preorder(items, similarities, replace(session.elo_init(), rng_seed=session_seed)),
        k_factor=session.k_factor,
        threshold=session.threshold(estimate),
    )
    initial_sequence = list(guided.scheduler.sequence)
    guided_oracle = SimulatedAnnotator(truth, replace(oracle, rng_seed=oracle_seed))
    guided_ranking, trace = _drive(guided, guided_oracle)

    human = sum(1 for entry in trace if entry.source == HUMAN)
    auto = len(trace) - human
    if (human, auto) != (guided.stats.human, guided.stats.auto):
        raise StateError("event trace disagrees with sorter counters")
    if len(trace) > cap:
        raise StateError(f"comparison count {len(trace)} exceeds worst case {cap}")
    _check_schedule(initial_sequence, trace, guided_ranking)
    if with_baseline and baseline_count > cap:
        raise StateError(f"baseline count {baseline_count} exceeds worst case {cap}")

    return SeedRun(
        seed=seed,
        items=items,
        truth=truth,
        baseline_ranking=baseline_ranking,
        baseline_count=baseline_count,
        guided_ranking=guided_ranking,
        guided_human=human,
        guided_auto=auto,
        trace=trace,
        initial_sequence=initial_sequence,
    )


def _correlations(ranking: list[str], truth: dict[str, float]) -> tuple[float, float, float]:
    produced = ranking_scores(ranking)
    ids = sorted(truth)
    a = [produced[i] for i in ids]
    b = [truth[i] for i in ids]
    return spearman(a, b), kendall_tau_b(a, b), pearson(a, b)


def _seed_outcome(task: tuple) -> SeedOutcome:
    n, seed, oracle, synth, session = task
    run = run_seed(n, seed, oracle, synth, session)
    sp, kt, pe = _correlations(run.guided_ranking, run.truth)
    total = run.guided_human + run.guided_auto
    return SeedOutcome(
        seed=seed,
        baseline_human=run.baseline_count,
        guided_human=run.guided_human,
        guided_auto=run.guided_auto,
        human_fraction=run.guided_human / total if total else 0.0,
        spearman=sp,
        kendall_tau_b=kt,
        pearson=pe,
    )


def run_benchmark(
    n: int,
    seeds: list[int],
    oracle: OracleConfig | None = None,
    synth: SyntheticPreorderConfig | None = None,
    session: SessionConfig | None = None,
    workers: int = 1,
) -> BenchReport:
    """Full benchmark: repeat run_seed over seeds and aggregate.

    Seeds are independent, so with workers > 1 they run in worker processes;
    the report is identical either way.
    """
    if not seeds:
        raise InputError("need at least one seed")
    if len(set(seeds)) != len(seeds):
        raise InputError("seeds must be distinct")
    oracle = oracle if oracle is not None else OracleConfig()
    synth = synth if synth is not None else SyntheticPreorderConfig()
    session = session if session is not None else SessionConfig()
    oracle.validate()
    synth.validate()
    session.validate()

    tasks = [(n, seed, oracle, synth, session) for seed in seeds]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_seed_outcome, tasks))
    else:
        rows = [_seed_outcome(task) for task in tasks]

    def mean(vals):
        return statistics.fmean(vals)

    def std(vals):
        return statistics.pstdev(vals) if len(vals) > 1 else 0.0

    humans = [r.guided_human for r in rows]
    autos = [r.guided_auto for r in rows]
    baselines = [r.baseline_human for r in rows]
    total_human = sum(humans)
    total_all = sum(humans) + sum(autos)
    return BenchReport(
        n=n,
        seeds_used=list(seeds),
        exhaustive_count=n * (n - 1) // 2,
        schedule_estimate=total_schedule_estimate(n),
        worst_case_count=comparison_upper_bound(n),
        all_human_count_mean=mean(baselines),
        all_human_count_std=std(baselines),
        guided_human_count_mean=mean(humans),
        guided_human_count_std=std(humans),
        guided_auto_count_mean=mean(autos),
        human_fraction=total_human / total_all if total_all else 0.0,
        spearman_mean=mean([r.spearman for r in rows]),
        spearman_std=std([r.spearman for r in rows]),
        kendall_tau_b_mean=mean([r.kendall_tau_b for r in rows]),
        kendall_tau_b_std=std([r.kendall_tau_b for r in rows]),
        pearson_mean=mean([r.pearson for r in rows]),
        pearson_std=std([r.pearson for r in rows]),
        per_seed=rows,
    )
