"""The experiment facade: every API surface in one place.

HTTP handlers and the CLI are thin adapters over this class; simulations
drive it directly so end-to-end runs exercise exactly the code the wire
API runs. Every mutation appends a short-term-store event and applies it
to live state through the same fold used for replay, so a restart
reconstructs the identical state.

Writes for one participant are serialized behind a single lock (the store
contract allows one writer); reads run on immutable values.
"""

from __future__ import annotations

import heapq
import threading
from datetime import date, datetime, timedelta
from pathlib import Path

from .. import clock
from ..context import (
    DiaryAnswerSet,
    SensorBatch,
    SensorReading,
    annotate_with_sensors,
    build_snapshot,
    snapshot_from_doc,
    snapshot_to_doc,
)
from ..errors import AuthError, ConflictError, NotFoundError
from ..ml import (
    FeatureExtractor,
    collect_training_data,
    derive_avoid_windows,
    evaluate,
    load_model,
    save_model,
    split_chronological,
    train_family,
)
from ..monitor import (
    AlertBook,
    Goal,
    compare,
    evaluate_alert_rules,
    goal_progress,
    rank_participants,
    summarize,
)
from ..planning import (
    AvoidWindow,
    ExperimentPlan,
    ExperimentState,
    ReplanRequest,
    ScheduledAction,
    apply_replan,
    due_actions,
    expand_plan,
    record_outcome,
)
from ..stores import LtmStore, StmStore
from .config import ApiConfig

SCHEMA_VERSION = "1"


class ExperimentService:
    def __init__(self, config: ApiConfig):
        self.config = config
        config.data_dir.mkdir(parents=True, exist_ok=True)
        self.stm = StmStore(config.data_dir / "stm.log", fsync=config.fsync)
        self.ltm = LtmStore(config.data_dir / "ltm.log", fsync=config.fsync)
        self.state = self._load_state()
        self.vocab = config.vocabulary
        self.schema = config.feature_schema
        self.extractor = FeatureExtractor(self.ltm, self.stm, self.schema)
        self.alert_book = AlertBook()
        self.model = None
        model_path = self._model_path()
        if model_path.exists():
            self.model = load_model(model_path)
        self._lock = threading.RLock()
        self._due_heap: dict[str, list[tuple[datetime, str]]] = {}
        self._wake_heap: list[tuple[datetime, str]] = []
        self._expiry_heap: list[tuple[datetime, str]] = []
        for action in self.state.actions.values():
            self._index_action(action)

    # -- lifecycle ---------------------------------------------------------------

    def _load_state(self) -> ExperimentState:
        checkpoint = self.stm.checkpoint
        if checkpoint is not None:
            seq, doc = checkpoint
            state = ExperimentState.from_doc(doc)
            state.last_seq = seq
        else:
            state = ExperimentState()
        for event in self.stm.scan():
            state.apply(event)
        return state

    def _model_path(self) -> Path:
        return self.config.data_dir / "models" / "current.json"

    def close(self) -> None:
        self.stm.close()
        self.ltm.close()

    def __enter__(self) -> "ExperimentService":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def canonical_state(self) -> bytes:
        return self.state.canonical()

    # -- auth --------------------------------------------------------------------

    def _require_researcher(self, token: str | None) -> None:
        if token != self.config.researcher_token:
            raise AuthError("researcher role required")

    def _require_participant(self, token: str | None, participant: str) -> None:
        if token == self.config.researcher_token:
            return
        if participant in self.state.participants and token == self.config.participant_token(participant):
            return
        raise AuthError("participant role required", participant=participant)

    def _known_participant(self, participant: str) -> None:
        if participant not in self.state.participants:
            raise NotFoundError(f"unknown participant: {participant}", participant=participant)

    # -- event plumbing ------------------------------------------------------------

    def _commit(self, kind: str, payload: dict, now: datetime) -> None:
        event = self.stm.append(kind, payload, now)
        self.state.apply(event)
        for aid in _affected_actions(kind, payload):
            action = self.state.actions.get(aid)
            if action is not None:
                self._index_action(action)

    def _index_action(self, action: ScheduledAction) -> None:
        if action.state.kind == "Pending":
            heap = self._due_heap.setdefault(action.participant, [])
            heapq.heappush(heap, (action.due_time, action.id))
        elif action.state.kind == "Notified":
            heapq.heappush(self._expiry_heap, (action.expiry_time, action.id))
        elif action.state.kind == "Snoozed" and action.state.at is not None:
            heapq.heappush(self._wake_heap, (action.state.at, action.id))

    # -- plans and participants ------------------------------------------------------

    def create_plan(self, doc: dict, *, token: str | None, now: datetime) -> dict:
        self._require_researcher(token)
        plan = ExperimentPlan.from_doc(doc)
        if plan.id in self.state.plans:
            raise ConflictError(f"plan already exists: {plan.id}", plan=plan.id)
        with self._lock:
            self._commit("PlanCreated", {"plan": plan.to_doc()}, now)
            for participant in sorted(self.state.participants):
                self._expand_for(plan, participant, now)
        return {"plan": plan.to_doc(), "participants": len(self.state.participants)}

    def _declared_windows(self, participant: str) -> list[AvoidWindow]:
        doc = self.state.participants.get(participant, {})
        return [AvoidWindow.from_doc(w) for w in doc.get("declared_windows", [])]

    def _published_windows(self, participant: str) -> list[AvoidWindow]:
        out = []
        for day_iso, windows in self.state.avoid_windows.get(participant, {}).items():
            out.extend(AvoidWindow.from_doc(w) for w in windows)
        return out

    def _expand_for(self, plan: ExperimentPlan, participant: str, now: datetime) -> None:
        windows = self._declared_windows(participant) + self._published_windows(participant)
        result = expand_plan(
            plan, participant, windows, confidence_threshold=self.config.confidence_threshold
        )
        self._commit(
            "ActionsExpanded",
            {
                "plan": plan.id,
                "participant": participant,
                "actions": [a.to_doc() for a in result.actions],
                "diagnostics": list(result.diagnostics),
            },
            now,
        )

    def enroll_participant(self, doc: dict, *, token: str | None, now: datetime) -> dict:
        self._require_researcher(token)
        participant = doc.get("participant") or f"p{len(self.state.participants) + 1:03d}"
        if participant in self.state.participants:
            raise ConflictError(f"participant already enrolled: {participant}", participant=participant)
        declared = [AvoidWindow.from_doc(w).to_doc() for w in doc.get("declared_windows", [])]
        with self._lock:
            self._commit(
                "ParticipantEnrolled",
                {
                    "participant": participant,
                    "attributes": doc.get("attributes", {}),
                    "declared_windows": declared,
                    "enrolled_at": clock.iso(now),
                },
                now,
            )
            for plan_id in sorted(self.state.plans):
                self._expand_for(self.state.plans[plan_id], participant, now)
        return {"participant": participant, "token": self.config.participant_token(participant)}

    # -- delivery and outcomes ---------------------------------------------------------

    def _sweep(self, now: datetime) -> None:
        """Apply due snooze wake-ups and expirations (lazy clock effects)."""
        while self._wake_heap and self._wake_heap[0][0] <= now:
            until, aid = heapq.heappop(self._wake_heap)
            action = self.state.actions.get(aid)
            if action is None or action.state.kind != "Snoozed" or action.state.at != until:
                continue  # stale heap entry
            self._commit(
                "StateTransition",
                {
                    "participant": action.participant,
                    "action": aid,
                    "to": {"kind": "Pending"},
                    "at": clock.iso(until),
                    "due_time": clock.iso(until),
                },
                now,
            )
        while self._expiry_heap and self._expiry_heap[0][0] < now:
            expiry, aid = heapq.heappop(self._expiry_heap)
            action = self.state.actions.get(aid)
            if action is None or action.state.kind != "Notified" or action.expiry_time != expiry:
                continue
            settle = record_outcome(action, "expired", now)
            if settle.event_payload is not None:
                self._commit("Outcome", settle.event_payload, now)

    def next_due(self, participant: str) -> datetime | None:
        """Cheap peek used by pollers; may return a slightly stale value."""
        heap = self._due_heap.get(participant)
        while heap:
            due, aid = heap[0]
            action = self.state.actions.get(aid)
            if action is None or action.state.kind != "Pending" or action.due_time != due:
                heapq.heappop(heap)
                continue
            return due
        return None

    def get_tasks(self, participant: str, *, token: str | None, now: datetime) -> list[dict]:
        self._known_participant(participant)
        self._require_participant(token, participant)
        with self._lock:
            self._sweep(now)
            delivered = []
            for action in due_actions(self.state.actions, participant, now):
                self._commit(
                    "StateTransition",
                    {
                        "participant": participant,
                        "action": action.id,
                        "to": {"kind": "Notified", "at": clock.iso(now)},
                        "at": clock.iso(now),
                    },
                    now,
                )
                delivered.append(self.state.actions[action.id].to_doc())
            return delivered

    def schedule(self, participant: str, *, token: str | None) -> list[dict]:
        """Read-only view of the participant's non-terminal actions, soonest
        first; the dashboard browses the schedule without triggering delivery."""
        self._known_participant(participant)
        self._require_participant(token, participant)
        actions = [
            a
            for a in self.state.actions.values()
            if a.participant == participant and not a.state.terminal
        ]
        actions.sort(key=lambda a: (a.due_time, a.id))
        return [a.to_doc() for a in actions]

    def _get_action(self, action_id: str) -> ScheduledAction:
        action = self.state.actions.get(action_id)
        if action is None:
            raise NotFoundError(f"unknown action: {action_id}", action=action_id)
        return action

    def submit_answers(self, doc: dict, *, token: str | None, now: datetime) -> dict:
        action = self._get_action(doc.get("action", ""))
        self._require_participant(token, action.participant)
        with self._lock:
            if action.state.terminal:
                raise ConflictError(
                    "action already settled", action=action.id, state=action.state.to_doc()
                )
            if action.state.kind != "Notified":
                raise ConflictError(
                    "action not delivered yet", action=action.id, state=action.state.to_doc()
                )
            if now > action.expiry_time:
                settle = record_outcome(action, "expired", now)
                if settle.event_payload is not None:
                    self._commit("Outcome", settle.event_payload, now)
                raise ConflictError(
                    "action expired",
                    action=action.id,
                    state=self.state.actions[action.id].state.to_doc(),
                )

            answers = DiaryAnswerSet.from_doc(doc.get("answers", {}))
            notified_at = action.state.at or now
            snapshot = build_snapshot(
                action.participant,
                now,
                answers,
                self._recent_sensor_batch(action.participant, now),
                vocab=self.vocab,
                notified_at=notified_at,
                answered_at=now,
            )

            settle = record_outcome(action, "answered", now)
            if settle.event_payload is not None:
                self._commit("Outcome", settle.event_payload, now)
            answer_payload = {
                "action": action.id,
                "answers": answers.to_doc(),
                "notified_at": clock.iso(notified_at),
                "answered_at": clock.iso(now),
            }
            answer_id, _ = self.ltm.append(action.participant, "Answer", answer_payload, now)
            snapshot_id, _ = self.ltm.append(
                action.participant, "Snapshot", snapshot_to_doc(snapshot), now
            )
            return {
                "action": action.id,
                "outcome": self.state.outcomes[action.id],
                "answer_record": answer_id,
                "snapshot_record": snapshot_id,
            }

    def _recent_sensor_batch(self, participant: str, now: datetime) -> SensorBatch:
        window = timedelta(minutes=15)
        readings = tuple(
            SensorReading.from_doc(rec.payload)
            for rec in self.ltm.window(participant, "Sensor", now - window, now + window)
        )
        return SensorBatch(participant=participant, readings=readings)

    def submit_sensors(self, doc: dict, *, token: str | None, now: datetime) -> dict:
        batch = SensorBatch.from_doc(doc)
        self._known_participant(batch.participant)
        self._require_participant(token, batch.participant)
        with self._lock:
            stored = deduped = 0
            for reading in batch.readings:
                _, created = self.ltm.append(batch.participant, "Sensor", reading.to_doc(), now)
                stored += int(created)
                deduped += int(not created)

            annotated = self._annotate_pending_snapshots(batch, now)

            action_id = doc.get("action")
            if action_id:
                action = self._get_action(action_id)
                if action.kind == "sensor" and action.state.kind == "Notified":
                    settle = record_outcome(action, "answered", now)
                    if settle.event_payload is not None:
                        self._commit("Outcome", settle.event_payload, now)
            return {"stored": stored, "deduplicated": deduped, "snapshots_annotated": annotated}

    def _annotate_pending_snapshots(self, batch: SensorBatch, now: datetime) -> int:
        """Late-arriving sensors refresh recent snapshots that lack them."""
        geo = [r for r in batch.readings if r.kind == "geo"]
        if not geo:
            return 0
        window = timedelta(minutes=15)
        lo = min(r.ts for r in geo) - window
        hi = max(r.ts for r in geo) + window
        updated = 0
        for rec in list(self.ltm.window(batch.participant, "Snapshot", lo, hi)):
            snapshot = snapshot_from_doc(rec.payload)
            if snapshot.we is None:
                continue
            refreshed = annotate_with_sensors(snapshot, batch)
            if refreshed != snapshot:
                _, created = self.ltm.append(
                    batch.participant, "Snapshot", snapshot_to_doc(refreshed), now
                )
                updated += int(created)
        return updated

    def replan(self, doc: dict, *, token: str | None, now: datetime) -> dict:
        action = self._get_action(doc.get("action", ""))
        self._require_participant(token, action.participant)
        req = ReplanRequest(
            action_id=action.id,
            participant=action.participant,
            op=doc.get("op", ""),
            requested_at=now,
            snooze_minutes=doc.get("snooze_minutes"),
            new_time=clock.parse_iso(doc["new_time"]) if doc.get("new_time") else None,
        )
        plan = self.state.plans.get(action.plan_id)
        if plan is None:
            raise NotFoundError(f"unknown plan: {action.plan_id}")
        with self._lock:
            outcome = apply_replan(self.state.actions, plan, req, now)
            self._commit("Replan", outcome.event_payload, now)
            return {"action": self.state.actions[action.id].to_doc()}

    # -- scheduler --------------------------------------------------------------------

    def train(self, doc: dict, *, token: str | None, now: datetime) -> dict:
        self._require_researcher(token)
        family = doc.get("family", "random_forest")
        params = dict(doc.get("params", {}))
        seed = int(doc.get("seed", 0))
        train_fraction = float(doc.get("train_fraction", 0.7))
        include_replans = bool(doc.get("include_replans", True))

        examples = collect_training_data(
            self.stm,
            self.ltm,
            self.schema,
            self.vocab,
            include_replans=include_replans,
            extractor=self.extractor,
            until=now,
        )
        if not examples:
            raise ConflictError("no labeled data to train on")
        train_set, test_set = split_chronological(examples, train_fraction)
        if not train_set:
            train_set, test_set = examples, []
        model = train_family(
            family, train_set, seed=seed, feature_schema=self.schema.to_doc(), **params
        )
        metrics = evaluate(model, test_set).to_doc() if test_set else None
        with self._lock:
            self.model = model
            save_model(model, self._model_path())
            save_model(model, self.config.data_dir / "models" / f"{family}.json")
        return {
            "family": family,
            "examples": len(examples),
            "train_size": len(train_set),
            "test_size": len(test_set),
            "metrics": metrics,
            "model": {"path": str(self._model_path()), "seed": seed},
        }

    def avoid_windows(self, participant: str, day: date, *, token: str | None) -> list[dict]:
        self._known_participant(participant)
        self._require_participant(token, participant)
        return self.state.windows_for(participant, clock.iso_date(day))

    def _refresh_windows(self, participant: str, day: date, now: datetime) -> None:
        windows = derive_avoid_windows(
            self.model,
            self.ltm,
            participant,
            day,
            stm=self.stm,
            slot_minutes=self.config.slot_minutes,
            tau=self.config.tau,
            extractor=self.extractor,
        )
        self._commit(
            "AvoidWindowsPublished",
            {
                "participant": participant,
                "date": clock.iso_date(day),
                "windows": [w.to_doc() for w in windows],
            },
            now,
        )
        if windows:
            self._reschedule_day(participant, day, windows, now)

    def _reschedule_day(
        self, participant: str, day: date, windows: list[AvoidWindow], now: datetime
    ) -> None:
        """Move still-pending future questions of `day` out of the windows."""
        qualifying = [
            w
            for w in windows
            if w.source == "declared" or w.confidence >= self.config.confidence_threshold
        ]
        if not qualifying:
            return
        day_actions = [
            a
            for a in self.state.actions.values()
            if a.participant == participant and a.due_time.date() == day and a.kind == "question"
        ]
        movable = sorted(
            (a for a in day_actions if a.state.kind == "Pending" and a.due_time > now),
            key=lambda a: (a.due_time, a.id),
        )
        if not movable:
            return
        fixed_minutes = [
            clock.minute_of_day(a.due_time) for a in day_actions if a not in movable
        ]
        plans = {a.plan_id for a in movable}
        constraints = self.state.plans[next(iter(plans))].constraints

        placed: list[int] = []
        moves: list[list[str]] = []
        dropped: list[str] = []

        def feasible(minute: int) -> bool:
            if constraints.quiet_hours.covers(minute):
                return False
            if any(w.covers(minute) for w in qualifying):
                return False
            others = fixed_minutes + placed
            return all(abs(minute - o) >= constraints.min_gap_minutes for o in others)

        floor_minute = clock.minute_of_day(now) + 1 if now.date() == day else 0
        for action in movable:
            current = clock.minute_of_day(action.due_time)
            if feasible(current):
                placed.append(current)
                continue
            start = max(current, floor_minute)
            slot = next((m for m in range(start, 1440) if feasible(m)), None)
            if slot is None:
                dropped.append(action.id)
            else:
                placed.append(slot)
                moves.append([action.id, clock.iso(clock.at_minute(day, slot))])
        if moves or dropped:
            self._commit(
                "ActionsRescheduled",
                {
                    "participant": participant,
                    "date": clock.iso_date(day),
                    "moves": moves,
                    "dropped": dropped,
                    "reason": "avoid_windows",
                    "at": clock.iso(now),
                },
                now,
            )

    def tick(self, now: datetime) -> dict:
        """Clock-driven work: sweeps plus the daily avoid-window refresh."""
        with self._lock:
            self._sweep(now)
            refreshed = 0
            if self.model is not None:
                day = now.date()
                day_iso = clock.iso_date(day)
                for participant in sorted(self.state.participants):
                    if day_iso not in self.state.avoid_windows.get(participant, {}):
                        self._refresh_windows(participant, day, now)
                        refreshed += 1
            return {"refreshed": refreshed}

    # -- dashboard ----------------------------------------------------------------------

    def _auth_dashboard(self, token: str | None, participant: str | None) -> None:
        if token == self.config.researcher_token:
            return
        if participant is not None:
            self._require_participant(token, participant)
            return
        raise AuthError("researcher role required")

    def summary(
        self, participant: str, start: date, end: date, *, token: str | None
    ) -> dict:
        self._known_participant(participant)
        self._require_participant(token, participant)
        return summarize(participant, self.stm, self.ltm, start, end).to_doc()

    def compare(
        self, participants: list[str], start: date, end: date, metric: str, *, token: str | None
    ) -> dict:
        for participant in participants:
            self._known_participant(participant)
        if token != self.config.researcher_token:
            # participants may compare, but must themselves be in the set
            if not any(
                token == self.config.participant_token(p) for p in participants
            ):
                raise AuthError("token does not match any requested participant")
        series = compare(participants, self.stm, self.ltm, start, end, metric)
        return {
            "metric": metric,
            "start": clock.iso_date(start),
            "end": clock.iso_date(end),
            "series": series,
        }

    def rank(
        self, start: date, end: date, *, order: str, limit: int | None, token: str | None
    ) -> list[dict]:
        self._require_researcher(token)
        ranked = rank_participants(self.stm, self.ltm, start, end, order=order, limit=limit)
        return [{"participant": p, "contribution": value} for p, value in ranked]

    def alerts(self, now: datetime, *, token: str | None, participant: str | None = None) -> list[dict]:
        self._auth_dashboard(token, participant)
        current = evaluate_alert_rules(self.stm, self.ltm, now, self.config.alert_config)
        merged = self.alert_book.update(current, now)
        docs = [a.to_doc() for a in merged]
        if participant is not None and token != self.config.researcher_token:
            docs = [d for d in docs if d["participant"] == participant]
        return docs

    # -- goals --------------------------------------------------------------------------

    def set_goal(self, doc: dict, *, token: str | None, now: datetime) -> dict:
        goal = Goal.from_doc(doc)
        self._known_participant(goal.participant)
        self._require_participant(token, goal.participant)
        with self._lock:
            self._commit("GoalSet", {"goal": goal.to_doc()}, now)
        return {"goal": goal.to_doc()}

    def remove_goal(self, goal_id: str, *, token: str | None, now: datetime) -> dict:
        goal_doc = self.state.goals.get(goal_id)
        if goal_doc is None:
            raise NotFoundError(f"unknown goal: {goal_id}", goal=goal_id)
        self._require_participant(token, goal_doc["participant"])
        with self._lock:
            self._commit("GoalRemoved", {"goal": goal_id}, now)
        return {"removed": goal_id}

    def goals(self, *, token: str | None, participant: str | None, now: datetime) -> list[dict]:
        self._auth_dashboard(token, participant)
        out = []
        for goal_doc in sorted(self.state.goals.values(), key=lambda g: g["id"]):
            if participant is not None and goal_doc["participant"] != participant:
                continue
            goal = Goal.from_doc(goal_doc)
            end = now.date() + timedelta(days=1)
            start = end - timedelta(days=goal.window_days)
            summary = summarize(goal.participant, self.stm, self.ltm, start, end)
            fraction, on_track = goal_progress(goal, summary)
            out.append({"goal": goal.to_doc(), "progress": fraction, "on_track": on_track})
        return out


def _affected_actions(kind: str, payload: dict) -> list[str]:
    if kind == "ActionsExpanded":
        return [a["id"] for a in payload["actions"]]
    if kind == "ActionsRescheduled":
        return [m[0] for m in payload.get("moves", [])] + list(payload.get("dropped", []))
    if kind in ("Replan", "StateTransition", "Outcome"):
        return [payload["action"]]
    return []
