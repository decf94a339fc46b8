"""Uncertainty-guided human-in-the-loop pairwise ranking.

Coarse zero-shot signals seed bucketed Elo ratings; a resumable MergeSort
then asks a human only for the comparisons whose outcome is genuinely
uncertain and resolves the rest from the ratings, with an adaptive threshold
trading annotation effort against accuracy as the sort progresses.
"""

from .config import SessionConfig
from .errors import InputError, PairsortError, StateError
from .fileio import (
    cross_reference,
    dump_items_jsonl,
    dump_similarities,
    parse_items_jsonl,
    parse_prompt_tree,
    parse_similarities,
)
from .metrics import kendall_tau_b, pearson, ranking_scores, spearman
from .preorder import (
    MAX_DEPTH,
    EloInitConfig,
    ItemRecord,
    LevelSimilarity,
    PreorderResult,
    bucket_of,
    classify_level,
    group_index,
    init_rating,
    item_confidence,
    run_preorder,
)
from .rating import (
    AS_WRITTEN,
    CROSS_BUCKET_BOOST,
    I_WINS,
    INVERTED,
    J_WINS,
    LN2,
    TIE,
    EloState,
    PairAssessment,
    ThresholdState,
    assess_pair,
    current_threshold,
    elo_update,
    expected_score,
    info_gain,
    update_threshold_cycle,
)
from .rng import Xoshiro256StarStar
from .session import Session, SessionStore
from .simulator import (
    BenchReport,
    OracleConfig,
    SeedOutcome,
    SimulatedAnnotator,
    SyntheticPreorderConfig,
    make_items,
    run_benchmark,
    run_seed,
    synthesize_similarities,
)
from .sorter import (
    AUTO,
    EQUAL,
    HUMAN,
    LEFT_FIRST,
    RIGHT_FIRST,
    ComparisonRequest,
    GuidedSort,
    Judgment,
    MergeScheduler,
    SortStats,
    comparison_upper_bound,
    start_sort,
    total_schedule_estimate,
)

__version__ = "0.1.0"

__all__ = [
    "AS_WRITTEN",
    "AUTO",
    "BenchReport",
    "CROSS_BUCKET_BOOST",
    "ComparisonRequest",
    "EQUAL",
    "EloInitConfig",
    "EloState",
    "GuidedSort",
    "HUMAN",
    "INVERTED",
    "I_WINS",
    "InputError",
    "ItemRecord",
    "J_WINS",
    "Judgment",
    "LEFT_FIRST",
    "LN2",
    "LevelSimilarity",
    "MAX_DEPTH",
    "MergeScheduler",
    "OracleConfig",
    "PairAssessment",
    "PairsortError",
    "PreorderResult",
    "RIGHT_FIRST",
    "SeedOutcome",
    "Session",
    "SessionConfig",
    "SessionStore",
    "SimulatedAnnotator",
    "SortStats",
    "StateError",
    "SyntheticPreorderConfig",
    "TIE",
    "ThresholdState",
    "Xoshiro256StarStar",
    "assess_pair",
    "bucket_of",
    "classify_level",
    "comparison_upper_bound",
    "cross_reference",
    "current_threshold",
    "dump_items_jsonl",
    "dump_similarities",
    "elo_update",
    "expected_score",
    "group_index",
    "info_gain",
    "init_rating",
    "item_confidence",
    "kendall_tau_b",
    "make_items",
    "parse_items_jsonl",
    "parse_prompt_tree",
    "parse_similarities",
    "pearson",
    "ranking_scores",
    "run_benchmark",
    "run_preorder",
    "run_seed",
    "spearman",
    "start_sort",
    "synthesize_similarities",
    "total_schedule_estimate",
    "update_threshold_cycle",
]
