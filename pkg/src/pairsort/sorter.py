"""Resumable merge sorting with per-comparison human/auto routing.

`MergeScheduler` is a pure state machine that replays the exact comparison
schedule of classical top-down MergeSort (left half, right half, merge; split
at (lo+hi)//2) while being pausable between comparisons, so a session can
wait on a human answer indefinitely and survive process restarts.

`GuidedSort` wraps the scheduler with the routing rule: each scheduled pair
is assessed from live Elo ratings, and goes to a human iff its uncertainty is
at or above the current threshold (ties favor the human). Auto-routed pairs
resolve immediately by rating order and never update ratings; human answers
feed the Elo state and the threshold controller's accuracy tracking.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InputError, StateError
from .rating import (
    EloState,
    I_WINS,
    J_WINS,
    PairAssessment,
    TIE,
    ThresholdState,
    assess_pair,
    current_threshold,
    elo_update,
    update_threshold_cycle,
)

LEFT_FIRST = "left_first"
RIGHT_FIRST = "right_first"
EQUAL = "equal"
OUTCOMES = (LEFT_FIRST, RIGHT_FIRST, EQUAL)

HUMAN = "human"
AUTO = "auto"


@dataclass(slots=True)
class ComparisonRequest:
    request_id: int
    left: str
    right: str
    assessment: PairAssessment
    route: str
    theta_at_issue: float


@dataclass(slots=True)
class Judgment:
    request_id: int
    outcome: str
    source: str = HUMAN
    timestamp: float | None = None


class MergeScheduler:
    """Top-down MergeSort over item ids, driven one outcome at a time.

    The recursion is materialized as an explicit frame stack: ("sort", lo, hi)
    frames expand into two child sorts plus a ("merge", lo, mid, hi) frame,
    and the active merge holds copies of both runs with its cursors. All of it
    is plain data, so the machine serializes to JSON and resumes exactly
    where it stopped.
    """

    def __init__(self, sequence: list[str]):
        if not sequence:
            raise InputError("cannot sort an empty sequence")
        self.sequence = list(sequence)
        self.stack: list[list] = [["sort", 0, len(sequence)]]
        self.merge: dict | None = None
        self.comparison_count = 0
        self.merges_completed = 0
        self._advance()

    @property
    def done(self) -> bool:
        return self.merge is None and not self.stack

    def current_pair(self) -> tuple[str, str] | None:
        """The pair awaiting an outcome: (head of left run, head of right run)."""
        if self.merge is None:
            return None
        m = self.merge
        return m["left"][m["i"]], m["right"][m["j"]]

    def resolve(self, left_first: bool) -> int:
        """Apply one outcome and advance. Returns merges completed as a result."""
        if self.merge is None:
            raise StateError("no comparison is pending")
        m = self.merge
        if left_first:
            self.sequence[m["k"]] = m["left"][m["i"]]
            m["i"] += 1
        else:
            self.sequence[m["k"]] = m["right"][m["j"]]
            m["j"] += 1
        m["k"] += 1
        self.comparison_count += 1
        merges_before = self.merges_completed
        self._advance()
        return self.merges_completed - merges_before

    def _advance(self) -> None:
        """Run schedule bookkeeping until a comparison is needed or all done."""
        while True:
            if self.merge is not None:
                m = self.merge
                left, right = m["left"], m["right"]
                if m["i"] < len(left) and m["j"] < len(right):
                    return  # comparison needed
                # one side exhausted: copy the leftover tail, close the merge
                k = m["k"]
                for x in left[m["i"]:]:
                    self.sequence[k] = x
                    k += 1
                for x in right[m["j"]:]:
                    self.sequence[k] = x
                    k += 1
                self.merge = None
                self.merges_completed += 1
                continue
            if not self.stack:
                return  # done
            frame = self.stack.pop()
            if frame[0] == "sort":
                _, lo, hi = frame
                if hi - lo <= 1:
                    continue  # single element, already sorted
                mid = (lo + hi) // 2
                self.stack.append(["merge", lo, mid, hi])
                self.stack.append(["sort", mid, hi])
                self.stack.append(["sort", lo, mid])
            else:
                _, lo, mid, hi = frame
                self.merge = {
                    "left": self.sequence[lo:mid],
                    "right": self.sequence[mid:hi],
                    "i": 0,
                    "j": 0,
                    "k": lo,
                }

    def to_state(self) -> dict:
        return {
            "sequence": list(self.sequence),
            "stack": [list(f) for f in self.stack],
            "merge": dict(self.merge) if self.merge is not None else None,
            "comparison_count": self.comparison_count,
            "merges_completed": self.merges_completed,
        }

    @classmethod
    def from_state(cls, state: dict) -> "MergeScheduler":
        obj = cls.__new__(cls)
        obj.sequence = list(state["sequence"])
        obj.stack = [list(f) for f in state["stack"]]
        m = state["merge"]
        obj.merge = dict(m) if m is not None else None
        obj.comparison_count = state["comparison_count"]
        obj.merges_completed = state["merges_completed"]
        return obj


def comparison_upper_bound(n: int) -> int:
    """MergeSort worst case: n*ceil(log2 n) - 2^ceil(log2 n) + 1."""
    if n <= 1:
        return 0
    ceil_lg = (n - 1).bit_length()
    return n * ceil_lg - (1 << ceil_lg) + 1


def total_schedule_estimate(n: int) -> int:
    """Budget denominator for the threshold controller: n*ceil(log2 n)."""
    if n <= 1:
        return 0
    return n * (n - 1).bit_length()


@dataclass(slots=True)
class SortStats:
    human: int = 0
    auto: int = 0

    @property
    def total(self) -> int:
        return self.human + self.auto


class GuidedSort:
    """The human-in-the-loop sorting session core.

    Strictly sequential: at most one outstanding human request. `next()`
    consumes any run of auto-resolvable comparisons internally and either
    surfaces a human request or reports completion.
    """

    def __init__(
        self,
        scheduler: MergeScheduler,
        elo: EloState,
        pre: dict,
        ts: ThresholdState,
        on_event=None,
    ):
        self.scheduler = scheduler
        self.elo = elo
        self.pre = pre
        self.ts = ts
        self.pending: ComparisonRequest | None = None
        self.stats = SortStats()
        self.next_request_id = 1
        self.on_event = on_event
        self.completion_emitted = False

    @property
    def done(self) -> bool:
        return self.scheduler.done

    def _emit(self, kind: str, **payload) -> None:
        if self.on_event is not None:
            self.on_event(kind, payload)

    def _issue(self, left: str, right: str) -> ComparisonRequest:
        assessment = assess_pair(left, right, self.elo, self.pre)
        theta = current_threshold(self.ts)
        route = HUMAN if assessment.uncertainty >= theta else AUTO
        req = ComparisonRequest(
            request_id=self.next_request_id,
            left=left,
            right=right,
            assessment=assessment,
            route=route,
            theta_at_issue=theta,
        )
        self.next_request_id += 1
        self._emit(
            "request_issued",
            request_id=req.request_id,
            left=left,
            right=right,
            route=route,
            uncertainty=assessment.uncertainty,
            theta=theta,
            p_left=assessment.p_ij,
        )
        return req

    def next(self) -> ComparisonRequest | None:
        """Surface the next human request, or None once sorting is complete.

        Auto-routed comparisons are resolved inline (winner = higher current
        rating; a dead-even tie keeps the left item first for stability) and
        never returned to the caller.
        """
        if self.pending is not None:
            raise StateError("a comparison request is already pending")
        while True:
            pair = self.scheduler.current_pair()
            if pair is None:
                if not self.completion_emitted:
                    self.completion_emitted = True
                    self._emit("completed", ranking=list(self.scheduler.sequence))
                return None
            req = self._issue(*pair)
            if req.route == HUMAN:
                self.pending = req
                return req
            left_first = self.elo.rating(req.left) >= self.elo.rating(req.right)
            outcome = LEFT_FIRST if left_first else RIGHT_FIRST
            self._emit(
                "judgment_received",
                request_id=req.request_id,
                left=req.left,
                right=req.right,
                outcome=outcome,
                source=AUTO,
            )
            self._apply(req, outcome, source=AUTO)

    def submit(self, judgment: Judgment) -> None:
        """Apply a human answer to the pending request."""
        if self.pending is None:
            raise StateError("no pending comparison request")
        if judgment.request_id != self.pending.request_id:
            raise StateError(
                f"judgment for request {judgment.request_id} does not match "
                f"pending request {self.pending.request_id}"
            )
        if judgment.outcome not in OUTCOMES:
            raise InputError(f"unknown outcome {judgment.outcome!r}")
        req = self.pending
        self.pending = None
        self._emit(
            "judgment_received",
            request_id=req.request_id,
            left=req.left,
            right=req.right,
            outcome=judgment.outcome,
            source=HUMAN,
        )
        self._apply(req, judgment.outcome, source=HUMAN)

    def _apply(self, req: ComparisonRequest, outcome: str, source: str) -> None:
        if source == HUMAN:
            # agreement bookkeeping against the prediction frozen at issue time
            if req.assessment.p_ij > 0.5:
                predicted = LEFT_FIRST
            elif req.assessment.p_ij < 0.5:
                predicted = RIGHT_FIRST
            else:
                predicted = None
            self.ts.humans_since_cycle += 1
            if predicted is not None and outcome == predicted:
                self.ts.agreements_since_cycle += 1
            elo_outcome = {LEFT_FIRST: I_WINS, RIGHT_FIRST: J_WINS, EQUAL: TIE}[outcome]
            elo_update(self.elo, req.left, req.right, elo_outcome)
            self.stats.human += 1
        else:
            self.stats.auto += 1

        # "equal" keeps the left item first: merge needs a total order and
        # stability is the least surprising resolution
        merges = self.scheduler.resolve(outcome != RIGHT_FIRST)
        self.ts.comparisons_done += 1
        self.ts.merges_since_cycle += merges
        if (
            self.ts.humans_since_cycle >= self.ts.batch_size
            or self.ts.merges_since_cycle >= self.ts.merge_cycle
        ):
            update_threshold_cycle(
                self.ts, self.ts.humans_since_cycle, self.ts.agreements_since_cycle
            )
            self._emit(
                "threshold_cycled",
                cycle=self.ts.cycle,
                accuracy=self.ts.accuracy,
                theta=current_threshold(self.ts),
            )

    def ranking(self) -> list[str]:
        """Final order, best first. Only valid once sorting is complete."""
        if not self.done:
            raise StateError("sort is not complete")
        return list(self.scheduler.sequence)

    def to_state(self) -> dict:
        pending = None
        if self.pending is not None:
            a = self.pending.assessment
            pending = {
                "request_id": self.pending.request_id,
                "left": self.pending.left,
                "right": self.pending.right,
                "route": self.pending.route,
                "theta_at_issue": self.pending.theta_at_issue,
                "assessment": {
                    "i": a.i,
                    "j": a.j,
                    "p_ij": a.p_ij,
                    "info_gain": a.info_gain,
                    "priority": a.priority,
                    "uncertainty": a.uncertainty,
                    "cross_bucket": a.cross_bucket,
                    "avg_conf": a.avg_conf,
                },
            }
        return {
            "scheduler": self.scheduler.to_state(),
            "ratings": sorted(self.elo.ratings.items()),
            "k_factor": self.elo.k_factor,
            "threshold": {
                "theta0": self.ts.theta0,
                "alpha": self.ts.alpha,
                "beta": self.ts.beta,
                "cycle": self.ts.cycle,
                "accuracy": self.ts.accuracy,
                "comparisons_done": self.ts.comparisons_done,
                "comparisons_total_estimate": self.ts.comparisons_total_estimate,
                "batch_size": self.ts.batch_size,
                "merge_cycle": self.ts.merge_cycle,
                "exponent_mode": self.ts.exponent_mode,
                "judgments_total": self.ts.judgments_total,
                "agreements_total": self.ts.agreements_total,
                "humans_since_cycle": self.ts.humans_since_cycle,
                "agreements_since_cycle": self.ts.agreements_since_cycle,
                "merges_since_cycle": self.ts.merges_since_cycle,
            },
            "pending": pending,
            "stats": {"human": self.stats.human, "auto": self.stats.auto},
            "next_request_id": self.next_request_id,
            "completion_emitted": self.completion_emitted,
        }

    @classmethod
    def from_state(cls, state: dict, pre: dict, on_event=None) -> "GuidedSort":
        elo = EloState(ratings=dict(state["ratings"]), k_factor=state["k_factor"])
        ts = ThresholdState(**state["threshold"])
        obj = cls(MergeScheduler.from_state(state["scheduler"]), elo, pre, ts, on_event)
        obj.stats = SortStats(**state["stats"])
        obj.next_request_id = state["next_request_id"]
        obj.completion_emitted = state.get("completion_emitted", False)
        p = state["pending"]
        if p is not None:
            obj.pending = ComparisonRequest(
                request_id=p["request_id"],
                left=p["left"],
                right=p["right"],
                assessment=PairAssessment(**p["assessment"]),
                route=p["route"],
                theta_at_issue=p["theta_at_issue"],
            )
        return obj


def start_sort(
    preorder_results: list,
    k_factor: float = 32.0,
    threshold: ThresholdState | None = None,
    on_event=None,
) -> GuidedSort:
    """Build a sorting session from pre-order results.

    The initial working array is ordered by initial rating descending (ties
    by id ascending): the pre-ordering only pays off if the array starts
    near-sorted. With a single item the sort is complete immediately.
    """
    if not preorder_results:
        raise InputError("cannot start a sort with no items")
    ordered = sorted(preorder_results, key=lambda r: (-r.rating, r.item_id))
    sequence = [r.item_id for r in ordered]
    elo = EloState(
        ratings={r.item_id: r.rating for r in ordered},
        k_factor=k_factor,
    )
    pre = {r.item_id: r for r in preorder_results}
    ts = threshold if threshold is not None else ThresholdState()
    ts.validate()
    if ts.comparisons_total_estimate == 0:
        ts.comparisons_total_estimate = total_schedule_estimate(len(sequence))
    return GuidedSort(MergeScheduler(sequence), elo, pre, ts, on_event)
