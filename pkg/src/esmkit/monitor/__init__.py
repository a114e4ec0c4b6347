"""Dashboard datasets: progress summaries, comparisons, rankings, alerts,
goal tracking. Read-only over store snapshots."""

from .summaries import (
    DayCounts,
    Goal,
    ParticipantSummary,
    compare,
    goal_progress,
    rank_participants,
    summarize,
)
from .alerts import Alert, AlertBook, AlertConfig, evaluate_alert_rules

__all__ = [
    "DayCounts",
    "Goal",
    "ParticipantSummary",
    "compare",
    "goal_progress",
    "rank_participants",
    "summarize",
    "Alert",
    "AlertBook",
    "AlertConfig",
    "evaluate_alert_rules",
]
