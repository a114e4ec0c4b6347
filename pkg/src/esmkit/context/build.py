"""Snapshot construction, sensor annotation, dimension queries, validation."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta

from .. import clock
from ..errors import SchemaError
from ..vocab import DEFAULT_VOCABULARY, Vocabulary
from .model import (
    AttributeValue,
    ContextSnapshot,
    DiaryAnswerSet,
    Entity,
    Graph,
    Relation,
    SensorBatch,
    ValidationIssue,
    ValidationReport,
)

DEFAULT_SENSOR_WINDOW = timedelta(minutes=15)


@dataclass
class AnnotationStats:
    """Mutable counter for readings rejected as outside the time window."""

    skipped: int = 0


def build_snapshot(
    participant: str,
    ts: datetime,
    answers: DiaryAnswerSet,
    sensors: SensorBatch | None = None,
    *,
    vocab: Vocabulary = DEFAULT_VOCABULARY,
    notified_at: datetime | None = None,
    answered_at: datetime | None = None,
    sensor_window: timedelta = DEFAULT_SENSOR_WINDOW,
) -> ContextSnapshot:
    """Turn one answer set (plus optional sensor batch) into a snapshot.

    The graph gets the subject entity, one entity per named answer element,
    the location containment chain, an activity edge on the location, and
    containment edges placing subject, objects and companions at the
    location. Mood is stored as a subject attribute, not an entity.
    """
    if not participant:
        raise SchemaError("participant id is required")
    ts = clock.ensure_utc(ts)

    me_attrs: dict[str, AttributeValue] = {}
    if answers.mood is not None:
        me_attrs["Mood"] = AttributeValue.text(vocab.require_mood(answers.mood))
    if notified_at is not None:
        me_attrs["NotificationTime"] = AttributeValue.timestamp(notified_at)
    if answered_at is not None:
        me_attrs["AnswerTime"] = AttributeValue.timestamp(answered_at)
    me = Entity.make("Person", participant, me_attrs)

    entities: dict[str, Entity] = {me.id: me}
    relations: list[Relation] = []

    wa_id = None
    if answers.what is not None:
        activity = Entity.make("Activity", vocab.require_activity(answers.what))
        entities[activity.id] = activity
        wa_id = activity.id

    we_id = None
    if answers.where is not None:
        chain = vocab.location_chain(answers.where)
        chain_entities = [Entity.make(spec.entity_class, spec.name) for spec in chain]
        for ent in chain_entities:
            entities.setdefault(ent.id, ent)
        for inner, outer in zip(chain_entities, chain_entities[1:]):
            relations.append(Relation(inner.id, "PartOf", outer.id))
        we_id = chain_entities[0].id

    wo_ids: list[str] = []
    for name in answers.objects:
        cls = vocab.require_object(name)
        ent = Entity.make(cls, name)
        entities.setdefault(ent.id, ent)
        wo_ids.append(ent.id)

    wu_ids: list[str] = []
    for name in answers.who:
        vocab.require_person(name)
        ent = Entity.make("Person", name)
        entities.setdefault(ent.id, ent)
        wu_ids.append(ent.id)

    if we_id is not None and wa_id is not None:
        relations.append(Relation(we_id, "HasActivity", wa_id))
    if we_id is not None:
        for eid in (*wo_ids, *wu_ids, me.id):
            relations.append(Relation(eid, "In", we_id))
    else:
        # keep companions attached to the subject when no location anchors them
        for eid in wu_ids:
            relations.append(Relation(me.id, "With", eid))

    snapshot = ContextSnapshot(
        participant=participant,
        timestamp=ts,
        me=me.id,
        graph=Graph(entities=tuple(entities.values()), relations=tuple(relations)),
        wa=wa_id,
        we=we_id,
        wi=answers.mood,
        wo=tuple(wo_ids),
        wu=tuple(wu_ids),
    )
    if sensors is not None:
        snapshot = annotate_with_sensors(snapshot, sensors, window=sensor_window)
    return snapshot


def _we_chain_root(snapshot: ContextSnapshot) -> str | None:
    """Follow PartOf edges from the location reference to its outermost holder."""
    if snapshot.we is None:
        return None
    part_of = {r.subject: r.object for r in snapshot.graph.relations if r.predicate == "PartOf"}
    current = snapshot.we
    seen = {current}
    while current in part_of and part_of[current] not in seen:
        current = part_of[current]
        seen.add(current)
    return current


def annotate_with_sensors(
    snapshot: ContextSnapshot,
    batch: SensorBatch,
    *,
    window: timedelta = DEFAULT_SENSOR_WINDOW,
    stats: AnnotationStats | None = None,
) -> ContextSnapshot:
    """Fold sensor readings into snapshot attributes.

    Geo becomes latitude/longitude on the location chain's root entity
    (nearest-in-time reading wins); accelerometer and app-usage summaries
    land on the subject. Readings outside the window are skipped and
    counted on `stats`.
    """
    in_window = []
    for reading in batch.readings:
        if abs(reading.ts - snapshot.timestamp) <= window:
            in_window.append(reading)
        elif stats is not None:
            stats.skipped += 1

    if not in_window:
        return snapshot

    graph = snapshot.graph

    geo_readings = [r for r in in_window if r.kind == "geo"]
    root_id = _we_chain_root(snapshot)
    if geo_readings and root_id is not None:
        nearest = min(geo_readings, key=lambda r: (abs(r.ts - snapshot.timestamp), r.ts))
        root = graph.get(root_id)
        if root is not None:
            graph = graph.replace_entity(
                root.with_attributes(
                    {
                        "latitude": AttributeValue.number(nearest.value_map["lat"], unit="deg"),
                        "longitude": AttributeValue.number(nearest.value_map["lon"], unit="deg"),
                    }
                )
            )

    me_extra: dict[str, AttributeValue] = {}
    accel = [r.value_map.get("magnitude", 0.0) for r in in_window if r.kind == "accelerometer"]
    if accel:
        me_extra["AccelerometerMean"] = AttributeValue.number(sum(accel) / len(accel))
    usage = [r.value_map.get("seconds", 0.0) for r in in_window if r.kind == "app_usage"]
    if usage:
        me_extra["AppUsageMinutes"] = AttributeValue.number(sum(usage) / 60.0, unit="min")
    if me_extra:
        me_entity = graph.get(snapshot.me)
        if me_entity is not None:
            graph = graph.replace_entity(me_entity.with_attributes(me_extra))

    return ContextSnapshot(
        participant=snapshot.participant,
        timestamp=snapshot.timestamp,
        me=snapshot.me,
        graph=graph,
        wa=snapshot.wa,
        we=snapshot.we,
        wi=snapshot.wi,
        wo=snapshot.wo,
        wu=snapshot.wu,
    )


def query_dimension(snapshot: ContextSnapshot, dim: str):
    """Resolve one dimension: entities for WA/WE/WO/WU, the mood text for WI."""
    dim = dim.upper()
    if dim == "WI":
        return snapshot.wi
    if dim == "WA":
        ids = [snapshot.wa] if snapshot.wa else []
    elif dim == "WE":
        ids = [snapshot.we] if snapshot.we else []
    elif dim == "WO":
        ids = list(snapshot.wo)
    elif dim == "WU":
        ids = list(snapshot.wu)
    else:
        raise SchemaError(f"unknown dimension: {dim}")
    return [snapshot.graph.entity_map[i] for i in ids if i in snapshot.graph.entity_map]


def validate_graph(graph: Graph) -> ValidationReport:
    """Report duplicate ids, dangling relation endpoints and PartOf cycles."""
    issues: list[ValidationIssue] = []

    seen: set[str] = set()
    for ent in graph.entities:
        if ent.id in seen:
            issues.append(ValidationIssue("duplicate", f"duplicate entity id {ent.id}", (ent.id,)))
        seen.add(ent.id)

    for rel in graph.relations:
        for endpoint in (rel.subject, rel.object):
            if endpoint not in seen:
                issues.append(
                    ValidationIssue(
                        "dangling",
                        f"{rel.predicate} references missing entity {endpoint}",
                        (endpoint,),
                    )
                )

    issues.extend(_part_of_cycles(graph))
    return ValidationReport(issues=tuple(issues))


def _part_of_cycles(graph: Graph) -> list[ValidationIssue]:
    """Each strongly connected PartOf component with a cycle is one issue."""
    edges: dict[str, list[str]] = {}
    for rel in graph.relations:
        if rel.predicate == "PartOf":
            edges.setdefault(rel.subject, []).append(rel.object)

    issues: list[ValidationIssue] = []
    index: dict[str, int] = {}
    lowlink: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    counter = [0]

    def strongconnect(v: str) -> None:
        index[v] = lowlink[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on_stack.add(v)
        for w in edges.get(v, ()):  # pragma: no branch
            if w not in index:
                strongconnect(w)
                lowlink[v] = min(lowlink[v], lowlink[w])
            elif w in on_stack:
                lowlink[v] = min(lowlink[v], index[w])
        if lowlink[v] == index[v]:
            component = []
            while True:
                w = stack.pop()
                on_stack.discard(w)
                component.append(w)
                if w == v:
                    break
            has_self_loop = v in edges.get(v, ())
            if len(component) > 1 or has_self_loop:
                members = tuple(sorted(component))
                issues.append(ValidationIssue("cycle", f"PartOf cycle through {', '.join(members)}", members))

    nodes = set(edges)
    for targets in edges.values():
        nodes.update(targets)
    for node in sorted(nodes):
        if node not in index:
            strongconnect(node)
    return issues


def validate_snapshot(snapshot: ContextSnapshot, vocab: Vocabulary | None = None) -> ValidationReport:
    """Graph validation plus dimension-reference resolution and mood vocabulary."""
    issues = list(validate_graph(snapshot.graph).issues)
    refs = [snapshot.me, snapshot.wa, snapshot.we, *snapshot.wo, *snapshot.wu]
    for ref in refs:
        if ref is not None and snapshot.graph.get(ref) is None:
            issues.append(ValidationIssue("dangling", f"snapshot reference missing entity {ref}", (ref,)))
    if vocab is not None and snapshot.wi is not None and snapshot.wi not in vocab.moods:
        issues.append(ValidationIssue("dangling", f"mood outside vocabulary: {snapshot.wi}", ()))
    return ValidationReport(issues=tuple(issues))
