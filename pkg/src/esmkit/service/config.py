"""Service configuration."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import SchemaError
from ..ml.features import FeatureSchema
from ..monitor import AlertConfig
from ..vocab import DEFAULT_VOCABULARY, Vocabulary


@dataclass
class ApiConfig:
    data_dir: Path
    experiment_id: str = "exp-1"
    host: str = "127.0.0.1"
    port: int = 8000
    researcher_token: str = "researcher-token"
    participant_secret: str = "participant-secret"
    tick_seconds: int = 60
    fsync: bool = True
    vocabulary: Vocabulary = field(default_factory=lambda: DEFAULT_VOCABULARY)
    feature_schema: FeatureSchema = field(default_factory=FeatureSchema)
    alert_config: AlertConfig = field(default_factory=AlertConfig)
    confidence_threshold: float = 0.6
    slot_minutes: int = 30
    tau: float = 0.6
    static_ui_dir: Path | None = None

    def __post_init__(self):
        self.data_dir = Path(self.data_dir)
        if self.tick_seconds < 1:
            raise SchemaError("tick interval must be at least one second")
        if self.researcher_token == self.participant_secret:
            raise SchemaError("researcher and participant credentials must differ")

    def participant_token(self, participant: str) -> str:
        raw = f"{self.participant_secret}|{participant}".encode("utf-8")
        return hashlib.sha256(raw).hexdigest()[:32]

    @staticmethod
    def load(path: str | Path, **overrides) -> "ApiConfig":
        doc = json.loads(Path(path).read_text())
        return ApiConfig.from_doc(doc, **overrides)

    @staticmethod
    def from_doc(doc: dict, **overrides) -> "ApiConfig":
        kwargs: dict = {
            "data_dir": doc.get("data_dir", "data"),
            "experiment_id": doc.get("experiment_id", "exp-1"),
            "host": doc.get("host", "127.0.0.1"),
            "port": doc.get("port", 8000),
            "researcher_token": doc.get("researcher_token", "researcher-token"),
            "participant_secret": doc.get("participant_secret", "participant-secret"),
            "tick_seconds": doc.get("tick_seconds", 60),
            "fsync": doc.get("fsync", True),
            "confidence_threshold": doc.get("confidence_threshold", 0.6),
            "slot_minutes": doc.get("slot_minutes", 30),
            "tau": doc.get("tau", 0.6),
        }
        if "vocabulary" in doc:
            kwargs["vocabulary"] = Vocabulary.from_doc(doc["vocabulary"])
        if "feature_schema" in doc:
            kwargs["feature_schema"] = FeatureSchema.from_doc(doc["feature_schema"])
        if "alert_config" in doc:
            kwargs["alert_config"] = AlertConfig(**doc["alert_config"])
        kwargs.update(overrides)
        return ApiConfig(**kwargs)
