"""Deterministic synthetic student cohorts standing in for real participants.

Behavior is timetable-driven with stochastic response so the simulator can
serve as an inspectable ground-truth oracle: activities come straight from
the weekly timetable plus a fixed clock heuristic, and only the answer /
snooze / delay decisions are random (seeded per participant).
"""

from .cohort import (
    BehaviorProfile,
    CohortConfig,
    TimetableBlock,
    activity_at,
    busy_minutes,
    generate_cohort,
    location_at,
)
from .engine import RunResult, SimEvent, Simulation, analyze_run, default_plan_doc, run_experiment

__all__ = [
    "BehaviorProfile",
    "CohortConfig",
    "TimetableBlock",
    "activity_at",
    "busy_minutes",
    "generate_cohort",
    "location_at",
    "RunResult",
    "SimEvent",
    "Simulation",
    "analyze_run",
    "default_plan_doc",
    "run_experiment",
]
