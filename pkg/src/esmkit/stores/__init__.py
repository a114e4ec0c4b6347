"""Persistence: append-only event logs with snapshot queries.

Two stores back every experiment. The short-term store (STM) holds the
operational state stream: plans, expanded actions, state transitions,
replans, outcomes and published avoid windows. The long-term store (LTM)
archives collected data: diary answers, sensor readings and context
snapshots, deduplicated by content id.
"""

from .log import LogStore, LogRecoveryReport, rebuild_state
from .stm import StmEvent, StmStore, STM_EVENT_KINDS
from .ltm import LtmRecord, LtmStore, LTM_RECORD_KINDS

__all__ = [
    "LogStore",
    "LogRecoveryReport",
    "rebuild_state",
    "StmEvent",
    "StmStore",
    "STM_EVENT_KINDS",
    "LtmRecord",
    "LtmStore",
    "LTM_RECORD_KINDS",
]
