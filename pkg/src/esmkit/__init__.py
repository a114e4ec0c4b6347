"""Experience-sampling experiment orchestration toolkit.

Plans and delivers context questions and sensor-collection tasks to
participants, stores answers as personal-context knowledge graphs, learns
each participant's busy periods to reschedule around them, and exposes a
monitoring API plus report tooling for researchers and participants.
"""

__version__ = "0.1.0"
