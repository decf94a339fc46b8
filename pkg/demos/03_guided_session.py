"""
One guided session, end to end
==============================

Pre-order a small dataset, then let the sorter interleave automatic
resolutions with simulated human judgments until the ranking is complete.
"""

from pairsort.config import SessionConfig
from pairsort.preorder import EloInitConfig, run_preorder
from pairsort.rating import ThresholdState
from pairsort.simulator import (
    OracleConfig,
    SimulatedAnnotator,
    SyntheticPreorderConfig,
    make_items,
    synthesize_similarities,
)
from pairsort.sorter import Judgment, start_sort, total_schedule_estimate

n = 20
items = make_items(n, seed=3)
truth = {it.id: it.ground_truth for it in items}
similarities = synthesize_similarities(
    items, SyntheticPreorderConfig(per_level_error=0.15, rng_seed=4)
)
results = run_preorder(items, similarities, EloInitConfig(rng_seed=5))

cfg = SessionConfig()
sort = start_sort(
    results,
    threshold=ThresholdState(
        comparisons_total_estimate=total_schedule_estimate(n)
    ),
)
print(f"schedule estimate: {total_schedule_estimate(n)} comparisons for n={n}")

# The annotator answers from ground truth. error probability 0 here, so
# any residual disorder comes from the pre-order, not the human.
annotator = SimulatedAnnotator(truth, OracleConfig())

shown = 0
while True:
    req = sort.next()
    if req is None:
        break
    outcome = annotator.answer(req.left, req.right)
    if shown < 6:
        print(
            f"  human: {req.left} vs {req.right}  "
            f"unc {req.assessment.uncertainty:.3f} >= theta {req.theta_at_issue:.3f}"
            f"  -> {outcome}"
        )
        shown += 1
    elif shown == 6:
        print("  ...")
        shown += 1
    sort.submit(Judgment(request_id=req.request_id, outcome=outcome))

print(f"\nhuman judgments: {sort.stats.human}")
print(f"auto resolutions: {sort.stats.auto}")
print(f"final accuracy estimate: {sort.ts.accuracy:.3f}")

ranking = sort.ranking()
ideal = sorted(truth, key=lambda i: -truth[i])
print("\nranking (best first):", " ".join(ranking[:8]), "...")

# Humans answered perfectly, so any residue is auto resolutions trusting a
# noisy prior. With rho = 0 the recovery is exact (the acceptance gate pins
# that); here we measure how close the shaky prior let us get.
from pairsort.metrics import ranking_scores, spearman

scores = ranking_scores(ranking)
ids = sorted(truth)
rho = spearman([scores[i] for i in ids], [truth[i] for i in ids])
print(f"spearman vs ground truth: {rho:.4f}   exact: {ranking == ideal}")
