"""
Routing arithmetic: expected score, information gain, adaptive threshold
========================================================================

Every candidate comparison gets an uncertainty in [0, 1]; a comparison is
sent to the human annotator exactly when uncertainty >= theta_t. This
script prints the moving parts.
"""

import math

from pairsort.preorder import PreorderResult
from pairsort.rating import (
    EloState,
    ThresholdState,
    assess_pair,
    current_threshold,
    expected_score,
    info_gain,
    update_threshold_cycle,
)

# Expected score is the classic Elo logistic in base 10 over a 400 scale.
for gap in (0, 50, 100, 200, 400, 600):
    p = expected_score(1500.0 + gap, 1500.0)
    print(f"gap {gap:>4}: p = {p:.4f}   info gain = {info_gain(p) if 0 < p < 1 else 0:.4f} nats")

# Gain peaks as p leaves 0.5: a coin-flip pair teaches nothing on average,
# a near-certain pair teaches nothing either. The maximum sits below ln 2.
print(f"\nln 2 = {math.log(2):.4f} (gain ceiling)")


def pre(item_id, bucket, conf):
    return PreorderResult(
        item_id=item_id, group_index=bucket, bucket=bucket,
        confidence=conf, rating=0.0, depth=3, decisions=[0, 0, 0],
    )


# A concrete pair: 1600 vs 1400, same bucket, fully confident pre-order.
elo = EloState(ratings={"a": 1600.0, "b": 1400.0})
a = assess_pair("a", "b", elo, {"a": pre("a", 2, 1.0), "b": pre("b", 2, 1.0)})
print(f"\nsame bucket, conf 1.0:  p={a.p_ij:.4f}  priority={a.priority:.4f}  uncertainty={a.uncertainty:.4f}")

# The same ratings across buckets with shakier confidence get a priority
# boost (cross-bucket pairs are structurally informative, low confidence
# means the prior deserves less trust) and so a lower uncertainty.
b = assess_pair("a", "b", elo, {"a": pre("a", 1, 0.6), "b": pre("b", 3, 0.8)})
print(f"cross bucket, conf 0.7: p={b.p_ij:.4f}  priority={b.priority:.4f}  uncertainty={b.uncertainty:.4f}")

# The threshold starts generous and tightens as the schedule burns down;
# human/machine agreement feeds back through beta^accuracy each cycle.
ts = ThresholdState()
ts.comparisons_total_estimate = 100
print("\n  done  accuracy  theta_t")
for done, humans, agreements in ((0, 0, 0), (25, 10, 9), (50, 10, 8), (75, 10, 10)):
    ts.comparisons_done = done
    if humans:
        update_threshold_cycle(ts, humans, agreements)
    print(f"  {done:>4}  {ts.accuracy:>7.3f}  {current_threshold(ts):.5f}")
