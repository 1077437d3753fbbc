"""Periodic, categorical and ordinal encodings for schedule fields."""

from __future__ import annotations

import calendar
import datetime as _dt
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import ConfigError, ValidationError

MINUTES_PER_DAY = 1440
_SEASON_DAYS = 365.25 / 4.0  # 91.3125


def encode_time_of_day(minute: float) -> tuple[float, float]:
    """(sin, cos) of the 24-hour clock phase."""
    if not 0 <= minute < MINUTES_PER_DAY:
        raise ValidationError(f"minute must lie in [0, 1440): {minute}")
    phase = 2.0 * math.pi * minute / MINUTES_PER_DAY
    return math.sin(phase), math.cos(phase)


@dataclass(frozen=True)
class ShiftSchedule:
    """Work shifts of equal length whose starts tile the 24-hour day."""

    starts: tuple[int, ...] = (360, 840, 1320)  # 06:00 / 14:00 / 22:00
    length: int = 480

    def __post_init__(self):
        if self.length <= 0:
            raise ConfigError("shift length must be positive")
        if not self.starts:
            raise ConfigError("shift schedule needs at least one start")
        starts = sorted(s % MINUTES_PER_DAY for s in self.starts)
        object.__setattr__(self, "starts", tuple(starts))
        # no gaps: each start must be reached before the previous shift ends
        for i, start in enumerate(starts):
            nxt = starts[(i + 1) % len(starts)]
            gap = (nxt - start) % MINUTES_PER_DAY or MINUTES_PER_DAY
            if gap > self.length:
                raise ConfigError(
                    f"shift starting {start} ends before the next begins (gap {gap} "
                    f"> length {self.length})"
                )


def encode_shift_fraction(minute: float, schedule: ShiftSchedule) -> tuple[float, float]:
    """Fraction of the current work shift elapsed, plus its cosine phase.

    When shifts overlap, the most recently started shift wins.
    """
    if not 0 <= minute < MINUTES_PER_DAY:
        raise ValidationError(f"minute must lie in [0, 1440): {minute}")
    elapsed = min((minute - s) % MINUTES_PER_DAY for s in schedule.starts)
    fraction = (elapsed % schedule.length) / schedule.length
    return fraction, math.cos(2.0 * math.pi * fraction)


def encode_date(date: _dt.date) -> dict[str, tuple[float, float]]:
    """Four (sin, cos) pairs: season, month-of-year, day-of-week, day-of-year.

    Day-of-week phase 0 is Monday; day-of-year phase 0 is January 1st.
    """
    doy = date.timetuple().tm_yday
    days_in_year = 366 if calendar.isleap(date.year) else 365
    days_in_month = calendar.monthrange(date.year, date.month)[1]

    def pair(phase_turns: float) -> tuple[float, float]:
        phase = 2.0 * math.pi * phase_turns
        return math.sin(phase), math.cos(phase)

    return {
        "season": pair((doy / _SEASON_DAYS) % 1.0),
        "moy": pair((date.day - 1) / days_in_month),
        "dow": pair(date.weekday() / 7.0),
        "doy": pair((doy - 1) / days_in_year),
    }


def one_hot(labels: Sequence[str]) -> tuple[np.ndarray, tuple[str, ...]]:
    """Indicator matrix over the distinct labels, columns in lexicographic order."""
    if len(labels) == 0:
        raise ValidationError("cannot one-hot encode an empty column")
    names = tuple(sorted(set(labels)))
    index = {name: j for j, name in enumerate(names)}
    matrix = np.zeros((len(labels), len(names)))
    for i, label in enumerate(labels):
        matrix[i, index[label]] = 1.0
    return matrix, names


def aircraft_seats(code: str, seat_map: dict[str, int]) -> int:
    """Seat count for an aircraft model code from the supplied table."""
    try:
        return seat_map[code]
    except KeyError:
        known = ", ".join(sorted(seat_map))
        raise ValidationError(
            f"unknown aircraft code {code!r}; known codes: {known}"
        ) from None
