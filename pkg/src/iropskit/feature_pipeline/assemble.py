"""First-degree feature engineering: flight records -> numeric FeatureMatrix.

Cancelled and diverted schedules are excluded here; the downstream embedding
and regression stages only ever see non-disrupted and delayed flights.
"""

from __future__ import annotations

import warnings
from typing import Optional, Sequence

import numpy as np

from ..errors import ValidationError
from ..flight_data import (
    AbstractionClass,
    DisruptionEffect,
    FeatureCategory,
    FeatureDescriptor,
    FeatureMatrix,
    FlightDataset,
    FlightRecord,
    descriptor_for,
)
from .encodings import ShiftSchedule, aircraft_seats, encode_date, encode_shift_fraction, encode_time_of_day
from .geodesy import latlon_to_unit_vector, vincenty_distance


def _base_columns(record: FlightRecord, schedule: ShiftSchedule, seat_map: dict[str, int]) -> dict[str, float]:
    date_pairs = encode_date(record.flight_date)
    ox, oy, oz = latlon_to_unit_vector(record.orig_lat, record.orig_lon)
    dx, dy, dz = latlon_to_unit_vector(record.dest_lat, record.dest_lon)
    dist = vincenty_distance(
        (record.orig_lat, record.orig_lon), (record.dest_lat, record.dest_lon)
    )
    dep_sin, dep_cos = encode_time_of_day(record.sched_dep_min)
    arr_sin, arr_cos = encode_time_of_day(record.sched_arr_min)
    dep_frac, dep_fcos = encode_shift_fraction(record.sched_dep_min, schedule)
    arr_frac, arr_fcos = encode_shift_fraction(record.sched_arr_min, schedule)

    return {
        "sin_date": date_pairs["doy"][0],
        "cos_date": date_pairs["doy"][1],
        "sin_season": date_pairs["season"][0],
        "cos_season": date_pairs["season"][1],
        "sin_moy": date_pairs["moy"][0],
        "cos_moy": date_pairs["moy"][1],
        "sin_dow": date_pairs["dow"][0],
        "cos_dow": date_pairs["dow"][1],
        "orig_x_dir": ox,
        "orig_y_dir": oy,
        "orig_z_dir": oz,
        "dest_x_dir": dx,
        "dest_y_dir": dy,
        "dest_z_dir": dz,
        "route_dist_m": dist,
        "sin_dep_tod": dep_sin,
        "cos_dep_tod": dep_cos,
        "sin_arr_tod": arr_sin,
        "cos_arr_tod": arr_cos,
        "dep_shift_frac": dep_frac,
        "dep_shift_cos": dep_fcos,
        "arr_shift_frac": arr_frac,
        "arr_shift_cos": arr_fcos,
        "route_originator": 1.0 if record.route_originator else 0.0,
        "ONBD_CT": float(record.onboard_count),
        "SCHED_TURN_MINS": float(record.sched_turn_mins),
        "ADJST_TURN_MINS": float(record.adjst_turn_mins),
        "ACTL_TURN_MINS": float(record.actl_turn_mins),
        "schd_acft_type": float(aircraft_seats(record.sched_acft_code, seat_map)),
        "actl_acft_type": float(aircraft_seats(record.actl_acft_code, seat_map)),
        "SWAP_FLT_FLAG": 1.0 if record.swap_flag else 0.0,
    }


def engineer_features(
    dataset: FlightDataset,
    shift_schedule: Optional[ShiftSchedule] = None,
    seat_map: Optional[dict[str, int]] = None,
    row_ids: Optional[Sequence[str]] = None,
) -> FeatureMatrix:
    """Build the engineered design matrix for the ML-eligible records.

    Delay codes become one-hot indicator columns over the codes present in
    the dataset; records without a code (non-disrupted flights) get all-zero
    indicators. Rows keep their dataset order; row ids default to the record's
    position in the input dataset.
    """
    if shift_schedule is None:
        shift_schedule = ShiftSchedule()
    if seat_map is None:
        from ..synth import DEFAULT_SEAT_MAP

        seat_map = dict(DEFAULT_SEAT_MAP)

    eligible: list[tuple[int, FlightRecord]] = [
        (i, r)
        for i, r in enumerate(dataset)
        if r.disruption_effect in (DisruptionEffect.NONE, DisruptionEffect.DELAYED)
    ]
    if not eligible:
        raise ValidationError("no ML-eligible records (all cancelled/diverted?)")

    code_vocab = tuple(sorted({r.delay_code for _, r in eligible if r.delay_code}))

    rows = []
    for _, record in eligible:
        columns = _base_columns(record, shift_schedule, seat_map)
        for code in code_vocab:
            columns[code] = 1.0 if record.delay_code == code else 0.0
        rows.append(columns)

    names = list(rows[0].keys())
    values = np.array([[row[name] for name in names] for row in rows])

    descriptors = []
    for name in names:
        descriptor = descriptor_for(name)
        if descriptor is None:
            warnings.warn(f"no taxonomy entry for feature {name!r}; "
                          "classifying as indeterminate categorical", stacklevel=2)
            descriptor = FeatureDescriptor(
                name, AbstractionClass.INDETERMINATE_ALEATORIC, FeatureCategory.CATEGORICAL
            )
        descriptors.append(descriptor)

    if row_ids is None:
        ids = tuple(str(i) for i, _ in eligible)
    else:
        ids = tuple(row_ids[i] for i, _ in eligible)

    return FeatureMatrix(values=values, descriptors=tuple(descriptors), row_ids=ids)


def delay_code_labels(dataset: FlightDataset) -> tuple[str, ...]:
    """Per ML-eligible record: its delay code, or 'none' for clean flights."""
    return tuple(
        r.delay_code or "none"
        for r in dataset
        if r.disruption_effect in (DisruptionEffect.NONE, DisruptionEffect.DELAYED)
    )
