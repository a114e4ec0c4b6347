"""Service layer: configuration, the experiment facade, HTTP API and CLI."""

from .config import ApiConfig
from .core import ExperimentService

__all__ = ["ApiConfig", "ExperimentService"]
