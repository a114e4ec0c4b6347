"""Typed knowledge-graph values: entities, attributes, relations, snapshots.

Everything here is an immutable value; transformations return new objects,
so snapshots can be shared across threads without coordination.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from functools import cached_property

from .. import clock
from ..canonical import short_hash
from ..errors import SchemaError

RELATION_PREDICATES = ("PartOf", "In", "HasActivity", "With")


@dataclass(frozen=True)
class AttributeValue:
    """Tagged attribute value: text, number (optional unit), timestamp or geo."""

    kind: str
    value: object = None
    unit: str | None = None
    lat: float | None = None
    lon: float | None = None

    @staticmethod
    def text(value: str) -> "AttributeValue":
        return AttributeValue(kind="text", value=str(value))

    @staticmethod
    def number(value: float, unit: str | None = None) -> "AttributeValue":
        return AttributeValue(kind="number", value=float(value), unit=unit)

    @staticmethod
    def timestamp(value: datetime) -> "AttributeValue":
        return AttributeValue(kind="timestamp", value=clock.ensure_utc(value))

    @staticmethod
    def geo(lat: float, lon: float) -> "AttributeValue":
        if not -90.0 <= lat <= 90.0:
            raise SchemaError(f"latitude out of range: {lat}")
        if not -180.0 <= lon <= 180.0:
            raise SchemaError(f"longitude out of range: {lon}")
        return AttributeValue(kind="geo", lat=float(lat), lon=float(lon))

    def to_doc(self) -> dict:
        if self.kind == "text":
            return {"type": "text", "value": self.value}
        if self.kind == "number":
            doc = {"type": "number", "value": self.value}
            if self.unit is not None:
                doc["unit"] = self.unit
            return doc
        if self.kind == "timestamp":
            return {"type": "timestamp", "value": clock.iso(self.value)}
        if self.kind == "geo":
            return {"type": "geo", "lat": self.lat, "lon": self.lon}
        raise SchemaError(f"unknown attribute kind: {self.kind}")

    @staticmethod
    def from_doc(doc: dict) -> "AttributeValue":
        kind = doc.get("type")
        if kind == "text":
            return AttributeValue.text(doc["value"])
        if kind == "number":
            return AttributeValue.number(doc["value"], doc.get("unit"))
        if kind == "timestamp":
            return AttributeValue.timestamp(clock.parse_iso(doc["value"]))
        if kind == "geo":
            return AttributeValue.geo(doc["lat"], doc["lon"])
        raise SchemaError(f"unknown attribute kind: {kind}")


def entity_id(entity_class: str, name: str) -> str:
    """Content-derived id: repeated answers yield the same node."""
    return short_hash(entity_class, name)


@dataclass(frozen=True)
class Entity:
    id: str
    entity_class: str
    attributes: tuple[tuple[str, AttributeValue], ...] = ()

    def __post_init__(self):
        if not self.entity_class:
            raise SchemaError("entity class must be non-empty")

    @staticmethod
    def make(entity_class: str, name: str, attributes: dict[str, AttributeValue] | None = None) -> "Entity":
        attrs = {"Class": AttributeValue.text(entity_class), "Name": AttributeValue.text(name)}
        if attributes:
            attrs.update(attributes)
        return Entity(
            id=entity_id(entity_class, name),
            entity_class=entity_class,
            attributes=tuple(sorted(attrs.items())),
        )

    @cached_property
    def attribute_map(self) -> dict[str, AttributeValue]:
        return dict(self.attributes)

    @property
    def name(self) -> str:
        attr = self.attribute_map.get("Name")
        return attr.value if attr is not None else self.id

    def with_attributes(self, extra: dict[str, AttributeValue]) -> "Entity":
        merged = dict(self.attributes)
        merged.update(extra)
        return Entity(id=self.id, entity_class=self.entity_class, attributes=tuple(sorted(merged.items())))


@dataclass(frozen=True)
class Relation:
    subject: str
    predicate: str
    object: str

    def __post_init__(self):
        if self.predicate not in RELATION_PREDICATES:
            raise SchemaError(f"unknown predicate: {self.predicate}")


@dataclass(frozen=True)
class Graph:
    """Entity/relation set in canonical order (sorted), so structurally
    equal graphs compare equal regardless of construction order."""

    entities: tuple[Entity, ...] = ()
    relations: tuple[Relation, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entities", tuple(sorted(self.entities, key=lambda e: e.id)))
        object.__setattr__(
            self,
            "relations",
            tuple(sorted(self.relations, key=lambda r: (r.predicate, r.subject, r.object))),
        )

    @cached_property
    def entity_map(self) -> dict[str, Entity]:
        return {e.id: e for e in self.entities}

    def get(self, eid: str) -> Entity | None:
        return self.entity_map.get(eid)

    def replace_entity(self, entity: Entity) -> "Graph":
        return Graph(
            entities=tuple(entity if e.id == entity.id else e for e in self.entities),
            relations=self.relations,
        )


@dataclass(frozen=True)
class ContextSnapshot:
    participant: str
    timestamp: datetime
    me: str
    graph: Graph
    wa: str | None = None
    we: str | None = None
    wi: str | None = None
    wo: tuple[str, ...] = ()
    wu: tuple[str, ...] = ()

    def entity(self, eid: str) -> Entity | None:
        return self.graph.get(eid)


@dataclass(frozen=True)
class DiaryAnswerSet:
    """One delivery's answers; at most one value per question kind."""

    what: str | None = None
    where: str | None = None
    mood: str | None = None
    objects: tuple[str, ...] = ()
    who: tuple[str, ...] = ()

    @staticmethod
    def from_doc(doc: dict) -> "DiaryAnswerSet":
        allowed = {"what", "where", "mood", "objects", "who"}
        unknown = set(doc) - allowed
        if unknown:
            raise SchemaError(f"unknown answer fields: {sorted(unknown)}")
        for single in ("what", "where", "mood"):
            if isinstance(doc.get(single), (list, tuple)):
                raise SchemaError(f"at most one value allowed for {single}")
        return DiaryAnswerSet(
            what=doc.get("what"),
            where=doc.get("where"),
            mood=doc.get("mood"),
            objects=tuple(doc.get("objects") or ()),
            who=tuple(doc.get("who") or ()),
        )

    def to_doc(self) -> dict:
        doc: dict = {}
        if self.what is not None:
            doc["what"] = self.what
        if self.where is not None:
            doc["where"] = self.where
        if self.mood is not None:
            doc["mood"] = self.mood
        if self.objects:
            doc["objects"] = list(self.objects)
        if self.who:
            doc["who"] = list(self.who)
        return doc


SENSOR_KINDS = ("geo", "accelerometer", "app_usage")


@dataclass(frozen=True)
class SensorReading:
    kind: str
    ts: datetime
    values: tuple[tuple[str, float | str], ...]

    @staticmethod
    def make(kind: str, ts: datetime, **values) -> "SensorReading":
        if kind not in SENSOR_KINDS:
            raise SchemaError(f"unknown sensor kind: {kind}")
        if kind == "geo":
            AttributeValue.geo(values["lat"], values["lon"])  # bounds check
        return SensorReading(kind=kind, ts=clock.ensure_utc(ts), values=tuple(sorted(values.items())))

    @property
    def value_map(self) -> dict:
        return dict(self.values)

    def to_doc(self) -> dict:
        return {"kind": self.kind, "ts": clock.iso(self.ts), "values": self.value_map}

    @staticmethod
    def from_doc(doc: dict) -> "SensorReading":
        return SensorReading.make(doc["kind"], clock.parse_iso(doc["ts"]), **doc["values"])


@dataclass(frozen=True)
class SensorBatch:
    participant: str
    readings: tuple[SensorReading, ...] = ()

    @staticmethod
    def from_doc(doc: dict) -> "SensorBatch":
        return SensorBatch(
            participant=doc["participant"],
            readings=tuple(SensorReading.from_doc(r) for r in doc.get("readings", [])),
        )


@dataclass(frozen=True)
class ValidationIssue:
    kind: str  # dangling | cycle | duplicate
    detail: str
    subjects: tuple[str, ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[ValidationIssue, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.issues

    def by_kind(self, kind: str) -> list[ValidationIssue]:
        return [i for i in self.issues if i.kind == kind]
