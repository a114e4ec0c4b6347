"""Situational-context knowledge graphs built from diary answers and sensors.

A snapshot captures one participant's world at an instant: the subject
entity plus five dimension references (current activity, location, mood,
nearby objects and companions) over a small typed entity/relation graph.
"""

from .model import (
    AttributeValue,
    ContextSnapshot,
    DiaryAnswerSet,
    Entity,
    Graph,
    Relation,
    SensorBatch,
    SensorReading,
    ValidationIssue,
    ValidationReport,
)
from .build import (
    AnnotationStats,
    annotate_with_sensors,
    build_snapshot,
    query_dimension,
    validate_graph,
    validate_snapshot,
)
from .serialize import snapshot_from_doc, snapshot_to_doc

__all__ = [
    "AttributeValue",
    "ContextSnapshot",
    "DiaryAnswerSet",
    "Entity",
    "Graph",
    "Relation",
    "SensorBatch",
    "SensorReading",
    "ValidationIssue",
    "ValidationReport",
    "AnnotationStats",
    "annotate_with_sensors",
    "build_snapshot",
    "query_dimension",
    "validate_graph",
    "validate_snapshot",
    "snapshot_from_doc",
    "snapshot_to_doc",
]
