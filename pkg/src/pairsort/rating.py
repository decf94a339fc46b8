"""Elo scoring, pair informativeness, and the adaptive routing threshold.

A pair's expected outcome comes from the standard Elo logistic curve. Its
information gain is the KL divergence of that predicted outcome distribution
from a fair coin (natural log); pairs whose outcome is nearly certain carry
high gain. Priority scales gain by a cross-bucket factor and a low-confidence
penalty, and uncertainty is the ln(2)-normalized complement of priority:
high-uncertainty pairs go to humans, the rest resolve automatically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InputError

LN2 = math.log(2.0)

CROSS_BUCKET_BOOST = 1.2

# outcome codes for elo_update
I_WINS = "i_wins"
J_WINS = "j_wins"
TIE = "tie"

_SCORE_OF_OUTCOME = {I_WINS: 1.0, J_WINS: 0.0, TIE: 0.5}

AS_WRITTEN = "as_written"
INVERTED = "inverted"

_MAX_P = math.nextafter(1.0, 0.0)
_MIN_P = math.nextafter(0.0, 1.0)


@dataclass(slots=True)
class EloState:
    """Live ratings for one session."""

    ratings: dict[str, float] = field(default_factory=dict)
    k_factor: float = 32.0

    def rating(self, item_id: str) -> float:
        try:
            return self.ratings[item_id]
        except KeyError:
            raise InputError(f"unknown item id {item_id!r}") from None


@dataclass(slots=True)
class PairAssessment:
    """Routing inputs for one (i, j) comparison, frozen at assessment time."""

    i: str
    j: str
    p_ij: float
    info_gain: float
    priority: float
    uncertainty: float
    cross_bucket: bool
    avg_conf: float


@dataclass(slots=True)
class ThresholdState:
    """Adaptive threshold controller.

    accuracy is the cumulative agreement rate between human answers and the
    Elo-predicted winner at query time; it only moves at cycle boundaries
    (after `batch_size` human judgments or `merge_cycle` completed merges,
    whichever comes first).
    """

    theta0: float = 0.15
    alpha: float = 0.3
    beta: float = 0.9
    cycle: int = 0
    accuracy: float = 0.0
    comparisons_done: int = 0
    comparisons_total_estimate: int = 0
    batch_size: int = 10
    merge_cycle: int = 10
    exponent_mode: str = AS_WRITTEN
    judgments_total: int = 0
    agreements_total: int = 0
    humans_since_cycle: int = 0
    agreements_since_cycle: int = 0
    merges_since_cycle: int = 0

    def validate(self) -> None:
        if self.theta0 < 0:
            raise InputError("theta0 must be >= 0")
        if not 0 < self.beta < 1:
            raise InputError("beta must be in (0, 1)")
        if self.exponent_mode not in (AS_WRITTEN, INVERTED):
            raise InputError(f"unknown exponent_mode {self.exponent_mode!r}")
        if self.batch_size < 1 or self.merge_cycle < 1:
            raise InputError("batch_size and merge_cycle must be >= 1")


def expected_score(r_i: float, r_j: float) -> float:
    """Probability that i beats j: 1 / (1 + 10^((r_j - r_i)/400))."""
    if not (math.isfinite(r_i) and math.isfinite(r_j)):
        raise InputError(f"ratings must be finite, got ({r_i!r}, {r_j!r})")
    x = (r_j - r_i) / 400.0
    # clamp the exponent so absurd rating gaps saturate instead of overflowing
    p = 1.0 / (1.0 + 10.0 ** min(max(x, -308.0), 308.0))
    if p >= 1.0:
        return _MAX_P
    if p <= 0.0:
        return _MIN_P
    return p


def info_gain(p: float) -> float:
    """KL divergence of the outcome distribution [p, 1-p] from uniform, in nats.

    Zero iff p = 0.5; approaches ln(2) as the outcome becomes certain.
    """
    if not 0.0 < p < 1.0:
        raise InputError(f"probability must be in (0, 1), got {p!r}")
    q = 1.0 - p
    return p * math.log(2.0 * p) + q * math.log(2.0 * q)


def _gain_from_gap(gap: float) -> float:
    """info_gain evaluated from the absolute rating gap.

    Computing from |gap| makes the value exactly identical for (i, j) and
    (j, i), so routing cannot depend on presentation order even at the last
    floating-point bit. Saturates at ln(2) for gaps beyond double precision.
    """
    p = 1.0 / (1.0 + 10.0 ** (-abs(gap) / 400.0))
    if p >= 1.0:
        return LN2
    return info_gain(p)


def assess_pair(
    i: str,
    j: str,
    elo: EloState,
    pre: dict,
) -> PairAssessment:
    """Assess a pair from live ratings plus pre-order buckets and confidences.

    `pre` maps item id -> PreorderResult (anything with .bucket and
    .confidence). Priority multiplies the pair's information gain by 1.2 for
    cross-bucket pairs and by (2 - avg confidence); uncertainty is the
    clamped complement 1 - priority/ln(2).
    """
    r_i = elo.rating(i)
    r_j = elo.rating(j)
    try:
        pre_i = pre[i]
        pre_j = pre[j]
    except KeyError as exc:
        raise InputError(f"unknown item id {exc.args[0]!r}") from None

    p_ij = expected_score(r_i, r_j)
    gain = _gain_from_gap(r_i - r_j)
    cross = pre_i.bucket != pre_j.bucket
    gamma = CROSS_BUCKET_BOOST if cross else 1.0
    avg_conf = (pre_i.confidence + pre_j.confidence) / 2.0
    phi = 2.0 - avg_conf
    priority = gain * gamma * phi
    uncertainty = min(max(1.0 - priority / LN2, 0.0), 1.0)
    return PairAssessment(
        i=i,
        j=j,
        p_ij=p_ij,
        info_gain=gain,
        priority=priority,
        uncertainty=uncertainty,
        cross_bucket=cross,
        avg_conf=avg_conf,
    )


def current_threshold(ts: ThresholdState) -> float:
    """theta_t = theta0 * (1 + alpha * remaining/total) * beta^(+/- accuracy).

    The budget factor shrinks toward 1 as comparisons complete. The accuracy
    exponent is +accuracy in as_written mode (the formula as published) and
    -accuracy in inverted mode (the variant matching the published prose,
    where better agreement raises the threshold and automates more).
    """
    total = ts.comparisons_total_estimate
    done = ts.comparisons_done
    if done < 0 or (total > 0 and done > total):
        raise InputError("comparisons_done must be within [0, total estimate]")
    frac_remaining = (total - done) / total if total > 0 else 0.0
    exponent = ts.accuracy if ts.exponent_mode == AS_WRITTEN else -ts.accuracy
    return ts.theta0 * (1.0 + ts.alpha * frac_remaining) * ts.beta ** exponent


def update_threshold_cycle(
    ts: ThresholdState,
    human_judgments_in_batch: int,
    agreements_in_batch: int,
) -> ThresholdState:
    """Close one evaluation cycle: fold the batch into cumulative accuracy.

    Accuracy is the all-time agreement rate, not the batch rate; a batch with
    zero human judgments (a merge-count trigger) leaves it untouched.
    """
    if agreements_in_batch > human_judgments_in_batch:
        raise InputError("agreements cannot exceed judgments")
    if human_judgments_in_batch < 0 or agreements_in_batch < 0:
        raise InputError("batch counts must be >= 0")
    ts.cycle += 1
    ts.judgments_total += human_judgments_in_batch
    ts.agreements_total += agreements_in_batch
    if ts.judgments_total > 0:
        ts.accuracy = ts.agreements_total / ts.judgments_total
    ts.humans_since_cycle = 0
    ts.agreements_since_cycle = 0
    ts.merges_since_cycle = 0
    return ts


def elo_update(elo: EloState, i: str, j: str, outcome: str) -> EloState:
    """Standard Elo update r <- r + K*(s - p). Exactly zero-sum.

    The two deltas are computed as a single value and its negation, so the
    rating sum is conserved to the bit, not just to rounding.
    """
    try:
        s_i = _SCORE_OF_OUTCOME[outcome]
    except KeyError:
        raise InputError(f"unknown outcome {outcome!r}") from None
    if i == j:
        raise InputError(f"cannot update a rating against itself: {i!r}")
    r_i = elo.rating(i)
    r_j = elo.rating(j)
    delta = elo.k_factor * (s_i - expected_score(r_i, r_j))
    elo.ratings[i] = r_i + delta
    elo.ratings[j] = r_j - delta
    return elo
