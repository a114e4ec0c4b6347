"""Closed vocabularies for diary answers.

Activities, locations, moods, objects and persons come from experiment
configuration, not free text: downstream label encoding and graph building
need stable terms. Locations form a containment hierarchy (a sitting room
is part of a home) and every term carries the entity class it instantiates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import VocabularyError


@dataclass(frozen=True)
class LocationSpec:
    name: str
    entity_class: str
    part_of: str | None = None


@dataclass(frozen=True)
class Vocabulary:
    activities: tuple[str, ...]
    busy_activities: frozenset[str]
    locations: dict[str, LocationSpec]
    moods: tuple[str, ...]
    objects: dict[str, str]  # name -> entity class
    persons: tuple[str, ...]

    def require_activity(self, term: str) -> str:
        if term not in self.activities:
            raise VocabularyError(f"unknown activity: {term!r}", field="what")
        return term

    def require_location(self, term: str) -> LocationSpec:
        spec = self.locations.get(term)
        if spec is None:
            raise VocabularyError(f"unknown location: {term!r}", field="where")
        return spec

    def require_mood(self, term: str) -> str:
        if term not in self.moods:
            raise VocabularyError(f"unknown mood: {term!r}", field="mood")
        return term

    def require_object(self, term: str) -> str:
        cls = self.objects.get(term)
        if cls is None:
            raise VocabularyError(f"unknown object: {term!r}", field="objects")
        return cls

    def require_person(self, term: str) -> str:
        if term not in self.persons:
            raise VocabularyError(f"unknown person: {term!r}", field="who")
        return term

    def mood_index(self, term: str | None) -> int:
        if term is None or term not in self.moods:
            return -1
        return self.moods.index(term)

    def location_chain(self, term: str) -> list[LocationSpec]:
        """The location and its ancestors, innermost first."""
        chain = [self.require_location(term)]
        seen = {term}
        while chain[-1].part_of is not None:
            parent = chain[-1].part_of
            if parent in seen:  # defensive; config cycles are rejected at load
                break
            seen.add(parent)
            chain.append(self.require_location(parent))
        return chain

    def to_doc(self) -> dict:
        return {
            "activities": list(self.activities),
            "busy_activities": sorted(self.busy_activities),
            "locations": [
                {"name": s.name, "class": s.entity_class, "part_of": s.part_of}
                for s in self.locations.values()
            ],
            "moods": list(self.moods),
            "objects": dict(self.objects),
            "persons": list(self.persons),
        }

    @staticmethod
    def from_doc(doc: dict) -> "Vocabulary":
        locations = {
            item["name"]: LocationSpec(item["name"], item["class"], item.get("part_of"))
            for item in doc["locations"]
        }
        for spec in locations.values():
            if spec.part_of is not None and spec.part_of not in locations:
                raise VocabularyError(f"location parent missing: {spec.part_of!r}", field="locations")
        # reject containment cycles up front
        for name in locations:
            seen: set[str] = set()
            cur: str | None = name
            while cur is not None:
                if cur in seen:
                    raise VocabularyError(f"location containment cycle at {cur!r}", field="locations")
                seen.add(cur)
                cur = locations[cur].part_of
        vocab = Vocabulary(
            activities=tuple(doc["activities"]),
            busy_activities=frozenset(doc["busy_activities"]),
            locations=locations,
            moods=tuple(doc["moods"]),
            objects=dict(doc["objects"]),
            persons=tuple(doc["persons"]),
        )
        unknown_busy = vocab.busy_activities - set(vocab.activities)
        if unknown_busy:
            raise VocabularyError(f"busy activities not in vocabulary: {sorted(unknown_busy)}", field="busy_activities")
        return vocab

    @staticmethod
    def load(path: str | Path) -> "Vocabulary":
        return Vocabulary.from_doc(json.loads(Path(path).read_text()))


DEFAULT_VOCABULARY_DOC = {
    "activities": [
        "lecture",
        "study_alone",
        "study_group",
        "discussion",
        "meal",
        "sleep",
        "free_time",
        "sport",
        "social",
        "commute",
        "shopping",
    ],
    "busy_activities": ["lecture", "study_alone", "study_group"],
    "locations": [
        {"name": "home", "class": "Home", "part_of": None},
        {"name": "sitting room", "class": "Room", "part_of": "home"},
        {"name": "kitchen", "class": "Room", "part_of": "home"},
        {"name": "bedroom", "class": "Room", "part_of": "home"},
        {"name": "campus", "class": "Campus", "part_of": None},
        {"name": "classroom", "class": "Room", "part_of": "campus"},
        {"name": "library", "class": "Library", "part_of": "campus"},
        {"name": "canteen", "class": "Canteen", "part_of": "campus"},
        {"name": "gym", "class": "Gym", "part_of": None},
        {"name": "shop", "class": "Shop", "part_of": None},
        {"name": "outdoors", "class": "Outdoors", "part_of": None},
    ],
    "moods": ["happy", "sad", "stressed", "relaxed", "tired", "focused", "bored"],
    "objects": {
        "dining table": "Table",
        "book": "Book",
        "laptop": "Computer",
        "phone": "Phone",
        "notes": "Document",
        "coffee": "Drink",
    },
    "persons": ["Peter", "classmate", "friend", "family", "roommate", "colleague"],
}

DEFAULT_VOCABULARY = Vocabulary.from_doc(DEFAULT_VOCABULARY_DOC)
