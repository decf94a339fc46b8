"""Durable annotation sessions.

A session is an append-only event log plus an immutable input bundle
(config, items, similarity scores). The log is the source of truth: replaying
it against a fresh sorting machine reconstructs the exact state, rating bits
included, because every non-human step is a deterministic function of the
inputs and the human judgments recorded in the log.

Disk layout per session: <data_dir>/<session_id>/config.json (the input
bundle), events.log (one JSON event per line), snapshot.json (a convenience
copy of the machine state, verified against replay on load, never trusted
over it).
"""

from __future__ import annotations

import json
import os
import uuid
from pathlib import Path

from .config import SessionConfig
from .errors import InputError, StateError
from .fileio import cross_reference
from .preorder import ItemRecord, LevelSimilarity, run_preorder
from .rating import current_threshold
from .sorter import HUMAN, ComparisonRequest, GuidedSort, Judgment, start_sort

ACTIVE = "active"
COMPLETED = "completed"

EXPORT_FORMAT = "pairsort-session-export"
EXPORT_VERSION = 1


def _items_to_rows(items: list[ItemRecord]) -> list[dict]:
    return [
        {"id": it.id, "display_ref": it.display_ref, "ground_truth": it.ground_truth}
        for it in items
    ]


def _rows_to_items(rows: list[dict]) -> list[ItemRecord]:
    return [
        ItemRecord(
            id=row["id"],
            display_ref=row["display_ref"],
            ground_truth=row["ground_truth"],
        )
        for row in rows
    ]


def _similarities_to_obj(tau: float, sims: dict[str, list[LevelSimilarity]]) -> dict:
    return {
        "tau": tau,
        "items": {
            item_id: {"levels": [list(lvl.scores) for lvl in levels]}
            for item_id, levels in sims.items()
        },
    }


def _obj_to_similarities(obj: dict) -> tuple[float, dict[str, list[LevelSimilarity]]]:
    tau = obj["tau"]
    sims = {
        item_id: [
            LevelSimilarity(level=i + 1, scores=list(scores), tau=tau)
            for i, scores in enumerate(entry["levels"])
        ]
        for item_id, entry in obj["items"].items()
    }
    return tau, sims


class Session:
    """One live session: input bundle + sorting machine + event history.

    Events the machine emits are collected into `outbox` until a store flushes
    them to disk; `history` always holds the full stream (persisted + outbox).
    """

    def __init__(
        self,
        session_id: str,
        config: SessionConfig,
        items: list[ItemRecord],
        tau: float,
        similarities: dict[str, list[LevelSimilarity]],
        images_dir: str | None = None,
    ):
        self.session_id = session_id
        self.config = config
        self.items = items
        self.tau = tau
        self.similarities = similarities
        self.images_dir = images_dir
        self.items_by_id = {it.id: it for it in items}
        self.preorder = run_preorder(items, similarities, config.elo_init())
        self.pre_by_id = {p.item_id: p for p in self.preorder}
        self.seq = 0
        self.history: list[dict] = []
        self.outbox: list[dict] = []
        self.sort: GuidedSort = start_sort(
            self.preorder,
            k_factor=config.k_factor,
            threshold=config.threshold(0),
            on_event=self._on_event,
        )

    # -- event plumbing -----------------------------------------------------

    def _on_event(self, kind: str, payload: dict) -> None:
        self._record(kind, payload)

    def _record(self, kind: str, payload: dict) -> dict:
        self.seq += 1
        event = {"seq": self.seq, "kind": kind, "data": dict(payload)}
        self.history.append(event)
        self.outbox.append(event)
        return event

    def _absorb(self, event: dict) -> None:
        """Account for an event that is already persisted (replay path)."""
        if event["seq"] != self.seq + 1:
            raise StateError(
                f"event log has seq {event['seq']} where {self.seq + 1} was expected"
            )
        self.seq = event["seq"]
        self.history.append(event)

    # -- lifecycle ----------------------------------------------------------

    @classmethod
    def create(
        cls,
        session_id: str,
        config: SessionConfig,
        items: list[ItemRecord],
        tau: float,
        similarities: dict[str, list[LevelSimilarity]],
        images_dir: str | None = None,
    ) -> "Session":
        config.validate()
        cross_reference(items, similarities)
        session = cls(session_id, config, items, tau, similarities, images_dir)
        session._record(
            "session_created",
            {
                "session_id": session_id,
                "item_count": len(items),
                "comparisons_total_estimate": session.sort.ts.comparisons_total_estimate,
            },
        )
        if session.sort.done:  # single item: born completed
            session.sort.next()
        return session

    @classmethod
    def replay(cls, bundle: dict, events: list[dict]) -> "Session":
        """Rebuild a session by re-deriving every logged event.

        The machine is driven by the human judgments in the log; everything
        else (issuance, auto resolutions, threshold cycles, completion) is
        recomputed and must match the log exactly, or the log is corrupt.
        A log that ends mid-burst (crash between appends) is completed: the
        re-derived tail lands in the outbox for the store to flush.
        """
        config = SessionConfig.from_dict(bundle["config"])
        items = _rows_to_items(bundle["items"])
        tau, similarities = _obj_to_similarities(bundle["similarities"])
        session = cls(
            bundle["session_id"],
            config,
            items,
            tau,
            similarities,
            bundle.get("images_dir"),
        )
        if not events:
            raise StateError("event log is empty")
        first = events[0]
        if first["kind"] != "session_created":
            raise StateError("event log does not start with session_created")
        expected_created = {
            "session_id": session.session_id,
            "item_count": len(items),
            "comparisons_total_estimate": session.sort.ts.comparisons_total_estimate,
        }
        if first["data"] != expected_created:
            raise StateError("session_created event does not match the input bundle")
        session._absorb(first)

        buffer: list[tuple[str, dict]] = []
        session.sort.on_event = lambda kind, payload: buffer.append((kind, payload))
        idx = 1
        total = len(events)
        while idx < total or buffer:
            if buffer:
                kind, payload = buffer.pop(0)
                if idx < total:
                    expected = events[idx]
                    if expected["kind"] != kind or expected["data"] != payload:
                        raise StateError(
                            f"event log mismatch at seq {expected['seq']}: "
                            f"log has {expected['kind']}, replay produced {kind}"
                        )
                    idx += 1
                    session._absorb(expected)
                else:
                    # log ended mid-burst; re-persist the deterministic tail
                    session._record(kind, payload)
                continue
            expected = events[idx]
            kind = expected["kind"]
            if kind in ("request_issued", "completed"):
                session.sort.next()
                if not buffer:
                    raise StateError(
                        f"log expects {kind} at seq {expected['seq']} but the "
                        "machine had nothing left to do"
                    )
            elif kind == "judgment_received":
                data = expected["data"]
                if data.get("source") != HUMAN:
                    raise StateError(
                        f"auto judgment at seq {expected['seq']} has no "
                        "preceding request in the log"
                    )
                session.sort.submit(
                    Judgment(request_id=data["request_id"], outcome=data["outcome"])
                )
                if session.sort.done:
                    session.sort.next()
            elif kind == "threshold_cycled":
                raise StateError(
                    f"threshold_cycled at seq {expected['seq']} without a "
                    "triggering judgment"
                )
            else:
                raise StateError(f"unknown event kind {kind!r} in log")
        session.sort.on_event = session._on_event
        return session

    # -- annotation surface ---------------------------------------------------

    @property
    def status(self) -> str:
        return COMPLETED if self.sort.done else ACTIVE

    def get_next(self) -> ComparisonRequest | None:
        """The pending human request, issuing one if needed; None when done.

        Idempotent: calling again without an intervening judgment returns the
        same request object.
        """
        if self.sort.pending is not None:
            return self.sort.pending
        return self.sort.next()

    def submit_judgment(self, request_id: int, outcome: str) -> None:
        self.sort.submit(Judgment(request_id=request_id, outcome=outcome))
        if self.sort.done:
            self.sort.next()  # flush the completion event right away

    def stats(self) -> dict:
        ts = self.sort.ts
        done = ts.comparisons_done
        total = ts.comparisons_total_estimate
        return {
            "session_id": self.session_id,
            "status": self.status,
            "item_count": len(self.items),
            "human_count": self.sort.stats.human,
            "auto_count": self.sort.stats.auto,
            "comparisons_done": done,
            "comparisons_total_estimate": total,
            "progress": done / total if total else 1.0,
            "theta": current_threshold(ts),
            "accuracy": ts.accuracy,
            "cycle": ts.cycle,
            "pending_request_id": (
                self.sort.pending.request_id if self.sort.pending is not None else None
            ),
        }

    def ranking_rows(self) -> list[dict]:
        order = self.sort.ranking()  # raises unless completed
        rows = []
        for position, item_id in enumerate(order, start=1):
            rows.append(
                {
                    "rank": position,
                    "id": item_id,
                    "display_ref": self.items_by_id[item_id].display_ref,
                    "rating": self.sort.elo.rating(item_id),
                    "bucket": self.pre_by_id[item_id].bucket,
                }
            )
        return rows

    def bundle(self) -> dict:
        return {
            "session_id": self.session_id,
            "config": self.config.to_dict(),
            "items": _items_to_rows(self.items),
            "similarities": _similarities_to_obj(self.tau, self.similarities),
            "images_dir": self.images_dir,
        }

    def snapshot(self) -> dict:
        return {
            "session_id": self.session_id,
            "seq": self.seq - len(self.outbox),
            "status": self.status,
            "sort": self.sort.to_state(),
        }


def _normalize(obj):
    """JSON round-trip, so tuples become lists and dict ordering is canonical."""
    return json.loads(json.dumps(obj, sort_keys=True))


class SessionStore:
    """Filesystem home for sessions. One directory per session.

    Writes are write-ahead: callers mutate the in-memory session, then flush()
    appends the new events and fsyncs before anyone acknowledges the request.
    """

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)

    def _dir(self, session_id: str) -> Path:
        if not session_id or "/" in session_id or session_id in (".", ".."):
            raise InputError(f"invalid session id {session_id!r}")
        return self.data_dir / session_id

    def exists(self, session_id: str) -> bool:
        return (self._dir(session_id) / "config.json").is_file()

    def list_sessions(self) -> list[str]:
        if not self.data_dir.is_dir():
            return []
        return sorted(
            p.name for p in self.data_dir.iterdir() if (p / "config.json").is_file()
        )

    def create(
        self,
        config: SessionConfig,
        items: list[ItemRecord],
        tau: float,
        similarities: dict[str, list[LevelSimilarity]],
        images_dir: str | None = None,
        session_id: str | None = None,
    ) -> Session:
        session_id = session_id if session_id is not None else uuid.uuid4().hex
        directory = self._dir(session_id)
        if directory.exists():
            raise StateError(f"session {session_id!r} already exists")
        session = Session.create(
            session_id, config, items, tau, similarities, images_dir
        )
        directory.mkdir(parents=True)
        bundle_path = directory / "config.json"
        bundle_path.write_text(
            json.dumps(session.bundle(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        self.flush(session)
        return session

    def flush(self, session: Session) -> None:
        """Append outboxed events (fsync) and refresh the snapshot."""
        if session.outbox:
            path = self._dir(session.session_id) / "events.log"
            with open(path, "a", encoding="utf-8") as fh:
                for event in session.outbox:
                    fh.write(json.dumps(event, sort_keys=True) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            session.outbox.clear()
        snap_path = self._dir(session.session_id) / "snapshot.json"
        tmp_path = snap_path.with_suffix(".json.tmp")
        tmp_path.write_text(
            json.dumps(session.snapshot(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        os.replace(tmp_path, snap_path)

    def _read_events(self, session_id: str) -> list[dict]:
        path = self._dir(session_id) / "events.log"
        if not path.is_file():
            return []
        lines = path.read_bytes().splitlines(keepends=True)
        events = []
        valid = 0
        for lineno, line in enumerate(lines, start=1):
            last = lineno == len(lines)
            text = line.decode("utf-8", errors="replace")
            if not text.strip():
                valid += len(line)
                continue
            try:
                events.append(json.loads(text))
            except json.JSONDecodeError:
                if last:
                    # torn tail write from a crash: drop it, and truncate the
                    # file so repaired events are not appended after garbage
                    with open(path, "r+b") as fh:
                        fh.truncate(valid)
                    break
                raise StateError(
                    f"corrupt event log for session {session_id!r} at line {lineno}"
                ) from None
            if last and not line.endswith(b"\n"):
                # the crash severed only the newline; restore it so the next
                # append starts on a fresh line
                with open(path, "ab") as fh:
                    fh.write(b"\n")
            valid += len(line)
        return events

    def load(self, session_id: str) -> Session:
        """Rebuild from disk. Replay is authoritative; the snapshot only
        cross-checks it when both cover the same prefix."""
        directory = self._dir(session_id)
        bundle_path = directory / "config.json"
        if not bundle_path.is_file():
            raise KeyError(session_id)
        bundle = json.loads(bundle_path.read_text(encoding="utf-8"))
        if bundle.get("session_id") != session_id:
            raise StateError(
                f"bundle in {directory} names session {bundle.get('session_id')!r}"
            )
        events = self._read_events(session_id)
        session = Session.replay(bundle, events)

        snap_path = directory / "snapshot.json"
        if snap_path.is_file():
            snap = json.loads(snap_path.read_text(encoding="utf-8"))
            if snap.get("seq") == session.seq - len(session.outbox):
                if _normalize(snap["sort"]) != _normalize(session.sort.to_state()):
                    raise StateError(
                        f"snapshot for session {session_id!r} disagrees with replay"
                    )
        if session.outbox:
            self.flush(session)  # repair a log that ended mid-burst
        return session

    def export_bundle(self, session: Session) -> dict:
        return {
            "format": EXPORT_FORMAT,
            "version": EXPORT_VERSION,
            "bundle": session.bundle(),
            "events": list(session.history),
            "snapshot": session.snapshot(),
        }

    def import_bundle(self, data: dict) -> Session:
        """Materialize an exported session (validated by full replay)."""
        if data.get("format") != EXPORT_FORMAT or data.get("version") != EXPORT_VERSION:
            raise InputError("not a session export bundle")
        bundle = data["bundle"]
        session_id = bundle["session_id"]
        directory = self._dir(session_id)
        if directory.exists():
            raise StateError(f"session {session_id!r} already exists")
        session = Session.replay(bundle, data["events"])
        directory.mkdir(parents=True)
        (directory / "config.json").write_text(
            json.dumps(bundle, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        persisted = session.history[: len(session.history) - len(session.outbox)]
        with open(directory / "events.log", "a", encoding="utf-8") as fh:
            for event in persisted:
                fh.write(json.dumps(event, sort_keys=True) + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        self.flush(session)
        return session
