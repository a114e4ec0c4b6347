"""Plan expansion, action lifecycle and event-sourced schedule state.

A researcher plan declares task templates and constraints; expansion turns
it into per-participant timed actions. Actions move through a small state
machine (pending, notified, snoozed, answered, expired, skipped) driven by
deliveries, participant replans and clock sweeps. Every mutation is one
short-term-store event; live state is a fold over the stream.
"""

from .types import (
    ActionState,
    AvoidWindow,
    ExperimentPlan,
    PlanConstraints,
    QuietHours,
    Recurrence,
    ReplanRequest,
    ScheduledAction,
    TaskTemplate,
)
from .expand import ExpandResult, expand_plan, verify_expansion
from .lifecycle import (
    apply_replan,
    due_actions,
    record_outcome,
    sweep,
)
from .state import ExperimentState

__all__ = [
    "ActionState",
    "AvoidWindow",
    "ExperimentPlan",
    "PlanConstraints",
    "QuietHours",
    "Recurrence",
    "ReplanRequest",
    "ScheduledAction",
    "TaskTemplate",
    "ExpandResult",
    "expand_plan",
    "verify_expansion",
    "apply_replan",
    "due_actions",
    "record_outcome",
    "sweep",
    "ExperimentState",
]
