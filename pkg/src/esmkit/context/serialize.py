"""Snapshot documents: one self-contained JSON object per snapshot.

Field ordering is stable (entities sorted by id, relations by triple) so
serialized snapshots can be compared byte-for-byte in golden tests and
deduplicated by content hash in the long-term store.
"""

from __future__ import annotations

from .. import clock
from .model import AttributeValue, ContextSnapshot, Entity, Graph, Relation


def snapshot_to_doc(snapshot: ContextSnapshot) -> dict:
    entities = sorted(snapshot.graph.entities, key=lambda e: e.id)
    relations = sorted(snapshot.graph.relations, key=lambda r: (r.predicate, r.subject, r.object))
    return {
        "participant": snapshot.participant,
        "timestamp": clock.iso(snapshot.timestamp),
        "me": snapshot.me,
        "wa": snapshot.wa,
        "we": snapshot.we,
        "wi": snapshot.wi,
        "wo": list(snapshot.wo),
        "wu": list(snapshot.wu),
        "entities": [
            {
                "id": e.id,
                "class": e.entity_class,
                "attributes": {name: value.to_doc() for name, value in e.attributes},
            }
            for e in entities
        ],
        "relations": [
            {"subject": r.subject, "predicate": r.predicate, "object": r.object} for r in relations
        ],
    }


def snapshot_from_doc(doc: dict) -> ContextSnapshot:
    entities = tuple(
        Entity(
            id=item["id"],
            entity_class=item["class"],
            attributes=tuple(
                sorted((name, AttributeValue.from_doc(value)) for name, value in item["attributes"].items())
            ),
        )
        for item in doc["entities"]
    )
    relations = tuple(
        Relation(item["subject"], item["predicate"], item["object"]) for item in doc["relations"]
    )
    return ContextSnapshot(
        participant=doc["participant"],
        timestamp=clock.parse_iso(doc["timestamp"]),
        me=doc["me"],
        graph=Graph(entities=entities, relations=relations),
        wa=doc.get("wa"),
        we=doc.get("we"),
        wi=doc.get("wi"),
        wo=tuple(doc.get("wo", ())),
        wu=tuple(doc.get("wu", ())),
    )
