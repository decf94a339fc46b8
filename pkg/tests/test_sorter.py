"""Resumable merge scheduler and the uncertainty-routed sorting session."""

import itertools
import json
import random

import pytest

from helpers import reference_mergesort
from pairsort.errors import InputError, StateError
from pairsort.preorder import PreorderResult
from pairsort.rating import AS_WRITTEN, ThresholdState
from pairsort.sorter import (
    AUTO,
    EQUAL,
    HUMAN,
    LEFT_FIRST,
    RIGHT_FIRST,
    GuidedSort,
    Judgment,
    MergeScheduler,
    comparison_upper_bound,
    start_sort,
    total_schedule_estimate,
)


def mk_pre(item_id: str, rating: float, bucket: int = 2, conf: float = 1.0) -> PreorderResult:
    return PreorderResult(
        item_id=item_id,
        group_index=bucket,
        bucket=bucket,
        confidence=conf,
        rating=rating,
        depth=3,
        decisions=[0, 0, 0],
    )


def all_human_threshold(**kw) -> ThresholdState:
    return ThresholdState(theta0=0.0, **kw)


def all_auto_threshold(**kw) -> ThresholdState:
    return ThresholdState(theta0=100.0, **kw)


def truth_answer(pos: dict[str, int]):
    def answer(left: str, right: str) -> str:
        return LEFT_FIRST if pos[left] < pos[right] else RIGHT_FIRST

    return answer


def drive(sort: GuidedSort, answer) -> list[tuple[str, dict]]:
    """Run a session to completion, answering every surfaced request."""
    events: list[tuple[str, dict]] = []
    sort.on_event = lambda kind, data: events.append((kind, dict(data)))
    while True:
        req = sort.next()
        if req is None:
            return events
        sort.submit(Judgment(request_id=req.request_id, outcome=answer(req.left, req.right)))


def judgment_trace(events) -> list[tuple[str, str]]:
    return [(d["left"], d["right"]) for kind, d in events if kind == "judgment_received"]


# -- MergeScheduler -----------------------------------------------------------


def test_scheduler_matches_reference_fuzz():
    rng = random.Random(2024)
    for _ in range(150):
        n = rng.randint(1, 64)
        items = [f"i{k:02d}" for k in range(n)]
        truth = items[:]
        rng.shuffle(truth)
        pos = {item: idx for idx, item in enumerate(truth)}
        initial = items[:]
        rng.shuffle(initial)

        sched = MergeScheduler(initial)
        trace = []
        while not sched.done:
            left, right = sched.current_pair()
            trace.append((left, right))
            sched.resolve(pos[left] < pos[right])

        expected, ref_trace = reference_mergesort(initial, lambda a, b: pos[a] < pos[b])
        assert sched.sequence == expected == truth
        assert trace == ref_trace
        assert sched.comparison_count == len(ref_trace)
        assert sched.comparison_count <= comparison_upper_bound(n)
        assert sched.merges_completed == max(n - 1, 0)


def test_upper_bound_is_the_exhaustive_worst_case():
    # enumerate every input permutation for small n; the maximum comparison
    # count must hit n*ceil(lg n) - 2^ceil(lg n) + 1 exactly
    for n in range(2, 8):
        items = list(range(n))
        worst = 0
        for perm in itertools.permutations(items):
            _, trace = reference_mergesort(list(perm), lambda a, b: a < b)
            worst = max(worst, len(trace))
        assert worst == comparison_upper_bound(n)


def test_bound_and_estimate_frozen_values():
    # n*ceil(lg n) and the worst case, computed by hand
    assert total_schedule_estimate(1) == 0
    assert comparison_upper_bound(1) == 0
    assert total_schedule_estimate(2) == 2
    assert comparison_upper_bound(2) == 1
    assert total_schedule_estimate(30) == 150
    assert comparison_upper_bound(30) == 119
    assert total_schedule_estimate(50) == 300
    assert comparison_upper_bound(50) == 237
    assert total_schedule_estimate(64) == 384
    assert comparison_upper_bound(64) == 321
    assert total_schedule_estimate(100) == 700
    assert comparison_upper_bound(100) == 573


def test_scheduler_rejects_empty_and_spent_state():
    with pytest.raises(InputError):
        MergeScheduler([])
    sched = MergeScheduler(["only"])
    assert sched.done
    assert sched.current_pair() is None
    with pytest.raises(StateError):
        sched.resolve(True)


def test_scheduler_state_roundtrip_mid_merge():
    rng = random.Random(7)
    items = [f"x{k}" for k in range(13)]
    truth = items[:]
    rng.shuffle(truth)
    pos = {item: idx for idx, item in enumerate(truth)}

    sched = MergeScheduler(items)
    for _ in range(9):  # stop inside an active merge
        left, right = sched.current_pair()
        sched.resolve(pos[left] < pos[right])

    blob = json.dumps(sched.to_state())
    clone = MergeScheduler.from_state(json.loads(blob))
    assert clone.current_pair() == sched.current_pair()

    # the clone is independent: advancing it must not touch the original
    frozen_pair = sched.current_pair()
    left, right = clone.current_pair()
    clone.resolve(pos[left] < pos[right])
    assert sched.current_pair() == frozen_pair

    for machine in (sched, clone):
        while not machine.done:
            left, right = machine.current_pair()
            machine.resolve(pos[left] < pos[right])
    assert sched.sequence == clone.sequence == truth
    assert sched.comparison_count == clone.comparison_count


# -- GuidedSort: routing extremes ---------------------------------------------


@pytest.mark.parametrize("n", [2, 4, 7, 16, 33])
def test_all_human_drive_matches_reference(n):
    rng = random.Random(100 + n)
    pres = [mk_pre(f"i{k:02d}", rng.uniform(1200, 1800)) for k in range(n)]
    truth = [p.item_id for p in pres]
    rng.shuffle(truth)
    pos = {item: idx for idx, item in enumerate(truth)}

    sort = start_sort(pres, threshold=all_human_threshold())
    events = drive(sort, truth_answer(pos))

    assert sort.ranking() == truth
    initial = [p.item_id for p in sorted(pres, key=lambda r: (-r.rating, r.item_id))]
    _, ref_trace = reference_mergesort(initial, lambda a, b: pos[a] < pos[b])
    assert judgment_trace(events) == ref_trace
    assert sort.stats.human == len(ref_trace)
    assert sort.stats.auto == 0

    completions = [d for kind, d in events if kind == "completed"]
    assert len(completions) == 1
    assert events[-1][0] == "completed"
    assert completions[0]["ranking"] == truth

    # every judgment answers exactly the request issued for it
    issued = {d["request_id"]: d for kind, d in events if kind == "request_issued"}
    for kind, d in events:
        if kind == "judgment_received":
            req = issued[d["request_id"]]
            assert (req["left"], req["right"]) == (d["left"], d["right"])
            assert req["route"] == HUMAN


def test_all_auto_keeps_initial_order_and_ratings():
    rng = random.Random(5)
    pres = [mk_pre(f"i{k:02d}", rng.uniform(1200, 1800)) for k in range(25)]
    sort = start_sort(pres, threshold=all_auto_threshold())
    ratings_before = dict(sort.elo.ratings)

    events = drive(sort, answer=None)  # never consulted

    initial = [p.item_id for p in sorted(pres, key=lambda r: (-r.rating, r.item_id))]
    assert sort.ranking() == initial  # already rating-sorted, nothing moves
    assert sort.stats.human == 0
    assert sort.stats.auto > 0
    assert sort.elo.ratings == ratings_before  # auto judgments never touch Elo
    assert all(d["source"] == AUTO for kind, d in events if kind == "judgment_received")


def test_auto_resolution_consults_live_ratings():
    # disordered start: two items swapped relative to their ratings
    pres = [mk_pre("hi", 1800.0, bucket=4, conf=0.5), mk_pre("lo", 1200.0, bucket=0, conf=0.5)]
    sort = start_sort(pres, threshold=all_auto_threshold())
    drive(sort, answer=None)
    assert sort.ranking() == ["hi", "lo"]
    assert sort.stats.auto == 1


def test_single_item_is_complete_immediately():
    sort = start_sort([mk_pre("only", 1500.0)])
    events = []
    sort.on_event = lambda kind, data: events.append((kind, dict(data)))
    assert sort.done
    assert sort.next() is None
    assert sort.next() is None  # idempotent, no duplicate completion
    assert [kind for kind, _ in events] == ["completed"]
    assert sort.ranking() == ["only"]


def test_empty_start_rejected():
    with pytest.raises(InputError):
        start_sort([])


# -- GuidedSort: single-pair behavior ------------------------------------------


def two_item_sort(**threshold_kw) -> GuidedSort:
    pres = [mk_pre("a", 1600.0), mk_pre("b", 1400.0)]
    ts = ThresholdState(**threshold_kw) if threshold_kw else None
    return start_sort(pres, threshold=ts)


def test_close_pair_routes_to_human():
    sort = two_item_sort()
    req = sort.next()
    assert req is not None
    assert (req.left, req.right) == ("a", "b")
    assert req.route == HUMAN
    assert req.assessment.p_ij == 0.7597469266479578
    assert req.assessment.uncertainty == pytest.approx(0.7954608782887054, rel=1e-12)
    assert req.theta_at_issue == 0.195

    sort.submit(Judgment(request_id=req.request_id, outcome=RIGHT_FIRST))
    assert sort.next() is None
    assert sort.ranking() == ["b", "a"]
    assert sort.elo.rating("a") == 1575.6880983472654
    assert sort.elo.rating("b") == 1424.3119016527346


def test_distant_pair_resolves_automatically():
    # giant gap, cross bucket, weak confidence: uncertainty clamps to 0
    pres = [mk_pre("strong", 3000.0, bucket=4, conf=0.5), mk_pre("weak", 0.0, bucket=0, conf=0.5)]
    sort = start_sort(pres)
    assert sort.next() is None
    assert sort.ranking() == ["strong", "weak"]
    assert sort.stats.auto == 1
    assert sort.elo.rating("strong") == 3000.0
    assert sort.elo.rating("weak") == 0.0


def test_equal_outcome_keeps_left_and_pulls_ratings_together():
    sort = two_item_sort()
    req = sort.next()
    sort.submit(Judgment(request_id=req.request_id, outcome=EQUAL))
    assert sort.ranking() == ["a", "b"]
    assert sort.elo.rating("a") < 1600.0
    assert sort.elo.rating("b") > 1400.0
    assert sort.elo.rating("a") + sort.elo.rating("b") == 3000.0


def test_submit_validation_preserves_pending():
    sort = two_item_sort()
    with pytest.raises(StateError):
        sort.submit(Judgment(request_id=1, outcome=LEFT_FIRST))  # nothing pending

    req = sort.next()
    with pytest.raises(StateError):
        sort.next()  # strictly sequential
    with pytest.raises(StateError):
        sort.submit(Judgment(request_id=req.request_id + 7, outcome=LEFT_FIRST))
    with pytest.raises(InputError):
        sort.submit(Judgment(request_id=req.request_id, outcome="leftish"))

    # the request survived both rejections
    sort.submit(Judgment(request_id=req.request_id, outcome=LEFT_FIRST))
    assert sort.ranking() == ["a", "b"]
    with pytest.raises(StateError):
        sort.submit(Judgment(request_id=req.request_id, outcome=LEFT_FIRST))


def test_ranking_unavailable_while_active():
    sort = two_item_sort()
    with pytest.raises(StateError):
        sort.ranking()


# -- agreement accounting -------------------------------------------------------


def test_agreement_counts_follow_frozen_prediction():
    # p(a over b) = 0.76, so the predicted outcome is left_first
    for outcome, agreed in [(LEFT_FIRST, 1), (RIGHT_FIRST, 0), (EQUAL, 0)]:
        sort = two_item_sort()
        req = sort.next()
        sort.submit(Judgment(request_id=req.request_id, outcome=outcome))
        assert sort.ts.humans_since_cycle == 1
        assert sort.ts.agreements_since_cycle == agreed


def test_even_pair_has_no_prediction_to_agree_with():
    pres = [mk_pre("a", 1500.0), mk_pre("b", 1500.0)]
    sort = start_sort(pres)
    req = sort.next()
    assert req.assessment.p_ij == 0.5
    sort.submit(Judgment(request_id=req.request_id, outcome=LEFT_FIRST))
    assert sort.ts.humans_since_cycle == 1
    assert sort.ts.agreements_since_cycle == 0


# -- threshold cycles ------------------------------------------------------------


def test_cycle_fires_per_human_batch():
    rng = random.Random(3)
    pres = [mk_pre(f"i{k}", rng.uniform(1200, 1800)) for k in range(8)]
    truth = sorted(p.item_id for p in pres)
    pos = {item: idx for idx, item in enumerate(truth)}
    sort = start_sort(pres, threshold=all_human_threshold(batch_size=1, merge_cycle=10**9))
    events = drive(sort, truth_answer(pos))
    cycles = [d for kind, d in events if kind == "threshold_cycled"]
    assert len(cycles) == sort.stats.human
    assert sort.ts.cycle == sort.stats.human
    assert [d["cycle"] for d in cycles] == list(range(1, len(cycles) + 1))
    assert sort.ts.judgments_total == sort.stats.human


def test_cycle_fires_per_completed_merge():
    rng = random.Random(4)
    n = 11
    pres = [mk_pre(f"i{k:02d}", rng.uniform(1200, 1800)) for k in range(n)]
    sort = start_sort(pres, threshold=all_auto_threshold(merge_cycle=1))
    events = drive(sort, answer=None)
    cycles = [d for kind, d in events if kind == "threshold_cycled"]
    assert len(cycles) == n - 1  # one per merge node in the tree
    assert sort.ts.accuracy == 0.0  # auto batches carry no judgments
    assert sort.ts.cycle == n - 1


def test_agreeing_with_live_ratings_yields_perfect_accuracy():
    # answers that echo the current rating order agree with every frozen
    # prediction, so cumulative accuracy stays at 1.0 across all cycles
    rng = random.Random(9)
    pres = [mk_pre(f"i{k}", rng.uniform(1200, 1800)) for k in range(16)]
    ts = ThresholdState(theta0=0.0, batch_size=5, exponent_mode=AS_WRITTEN)
    sort = start_sort(pres, threshold=ts)

    def echo_ratings(left, right):
        r_l, r_r = sort.elo.rating(left), sort.elo.rating(right)
        assert r_l != r_r  # an exact tie would have no prediction to agree with
        return LEFT_FIRST if r_l > r_r else RIGHT_FIRST

    events = drive(sort, echo_ratings)
    cycles = [d for kind, d in events if kind == "threshold_cycled"]
    assert cycles, "expected at least one cycle"
    assert all(d["accuracy"] == 1.0 for d in cycles)
    assert sort.ts.accuracy == 1.0


# -- resumability ----------------------------------------------------------------


def run_with_restarts(pres, ts, pos, restart_every: int):
    """Drive to completion, round-tripping the whole session through JSON
    after every `restart_every` human judgments (and once mid-pending)."""
    pre = {p.item_id: p for p in pres}
    sort = start_sort([p for p in pres], threshold=ts)
    trace = []
    humans = 0
    while True:
        req = sort.next()
        if req is None:
            break
        if humans % restart_every == restart_every - 1:
            # serialize with the request outstanding, answer the restored copy
            blob = json.dumps(sort.to_state())
            sort = GuidedSort.from_state(json.loads(blob), pre)
            req = sort.pending
        trace.append((req.left, req.right))
        sort.submit(Judgment(request_id=req.request_id, outcome=truth_answer(pos)(req.left, req.right)))
        humans += 1
        blob = json.dumps(sort.to_state())
        sort = GuidedSort.from_state(json.loads(blob), pre)
    return sort, trace


def test_resume_is_bit_identical_to_uninterrupted_run():
    rng = random.Random(42)
    n = 23
    pres = [mk_pre(f"i{k:02d}", rng.uniform(1200, 1800), bucket=k % 5, conf=0.5 + (k % 4) / 8) for k in range(n)]
    truth = [p.item_id for p in pres]
    rng.shuffle(truth)
    pos = {item: idx for idx, item in enumerate(truth)}
    ts_a = ThresholdState()
    ts_b = ThresholdState()

    straight = start_sort([p for p in pres], threshold=ts_a)
    events = drive(straight, truth_answer(pos))
    resumed, trace = run_with_restarts(pres, ts_b, pos, restart_every=3)

    assert resumed.ranking() == straight.ranking()
    assert trace == [
        (d["left"], d["right"])
        for kind, d in events
        if kind == "judgment_received" and d["source"] == HUMAN
    ]
    assert resumed.elo.ratings == straight.elo.ratings  # bitwise
    assert resumed.stats.human == straight.stats.human
    assert resumed.stats.auto == straight.stats.auto
    assert resumed.ts.accuracy == straight.ts.accuracy
    assert resumed.ts.cycle == straight.ts.cycle
    assert resumed.ts.comparisons_done == straight.ts.comparisons_done


def test_comparison_count_within_bound_fuzz():
    rng = random.Random(77)
    for _ in range(40):
        n = rng.randint(2, 48)
        pres = [mk_pre(f"i{k:02d}", rng.uniform(1200, 1800), bucket=k % 5) for k in range(n)]
        truth = [p.item_id for p in pres]
        rng.shuffle(truth)
        pos = {item: idx for idx, item in enumerate(truth)}
        theta0 = rng.choice([0.0, 0.1, 0.15, 0.5, 100.0])
        sort = start_sort(pres, threshold=ThresholdState(theta0=theta0))
        drive(sort, truth_answer(pos))
        assert sort.stats.total <= comparison_upper_bound(n)
        assert sort.ts.comparisons_done == sort.stats.total
        assert sort.scheduler.comparison_count == sort.stats.total
