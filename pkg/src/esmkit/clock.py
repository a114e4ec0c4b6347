"""UTC time helpers shared by every module.

All domain timestamps are timezone-aware UTC datetimes truncated to whole
seconds; serialized form is ``YYYY-MM-DDTHH:MM:SSZ``. Clock times within a
day are minutes-of-day integers (0..1440, end-exclusive intervals may use
1440 for midnight).
"""

from __future__ import annotations

from datetime import date, datetime, timedelta, timezone

MINUTE = timedelta(minutes=1)
DAY = timedelta(days=1)


def utc(year: int, month: int, day: int, hour: int = 0, minute: int = 0, second: int = 0) -> datetime:
    return datetime(year, month, day, hour, minute, second, tzinfo=timezone.utc)


def ensure_utc(ts: datetime) -> datetime:
    """Normalize to tz-aware UTC at second precision."""
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    else:
        ts = ts.astimezone(timezone.utc)
    return ts.replace(microsecond=0)


def now_utc() -> datetime:
    return ensure_utc(datetime.now(timezone.utc))


def iso(ts: datetime) -> str:
    return ensure_utc(ts).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_iso(text: str) -> datetime:
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    return ensure_utc(datetime.fromisoformat(text))


def iso_date(d: date) -> str:
    return d.strftime("%Y-%m-%d")


def parse_iso_date(text: str) -> date:
    return date.fromisoformat(text)


def minute_of_day(ts: datetime) -> int:
    ts = ensure_utc(ts)
    return ts.hour * 60 + ts.minute


def at_minute(day: date, minute: int) -> datetime:
    """Instant at `minute` minutes past midnight UTC of `day` (1440 = next midnight)."""
    base = datetime(day.year, day.month, day.day, tzinfo=timezone.utc)
    return base + timedelta(minutes=minute)


def hhmm(minute: int) -> str:
    return f"{minute // 60:02d}:{minute % 60:02d}"


def parse_hhmm(text: str) -> int:
    h, m = text.split(":")
    value = int(h) * 60 + int(m)
    if not 0 <= value <= 1440:
        raise ValueError(f"clock time out of range: {text}")
    return value


def fractional_hour(ts: datetime) -> float:
    ts = ensure_utc(ts)
    return ts.hour + ts.minute / 60.0 + ts.second / 3600.0
