"""Flight-record schema, feature taxonomy, CSV ingestion and disruption reporting.

The record model covers one scheduled direct flight with its planning,
execution and disruption fields. Disruption ownership is described by eleven
operations-control functional domains; each disrupted flight carries exactly
one domain, one effect (delayed / cancelled / diverted) and one delay code.
"""

from __future__ import annotations

import csv
import datetime as _dt
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .errors import SchemaError, ValidationError


class FunctionalDomain(Enum):
    """Operations-control roles that own disruption resolution."""

    CUSTOMER_HOLD = "Customer Hold"
    DISPATCH_CSC = "Dispatch CSC"
    FLIGHT_OPERATIONS = "Flight Operations"
    FUEL_MANAGEMENT = "Fuel Management"
    GROUND_OPERATIONS = "Ground Operations"
    INFLIGHT = "Inflight"
    MAINTENANCE = "Maintenance"
    NAS = "NAS"
    SECURITY = "Security"
    TECHNOLOGY = "Technology"
    WEATHER = "Weather"


class DisruptionEffect(Enum):
    NONE = "None"
    DELAYED = "Delayed"
    CANCELLED = "Cancelled"
    DIVERTED = "Diverted"


DISRUPTED_EFFECTS = (
    DisruptionEffect.DELAYED,
    DisruptionEffect.CANCELLED,
    DisruptionEffect.DIVERTED,
)


class AbstractionClass(Enum):
    DETERMINATE_ALEATORIC = "Determinate Aleatoric"
    INDETERMINATE_ALEATORIC = "Indeterminate Aleatoric"
    EPISTEMIC = "Epistemic"


class FeatureCategory(Enum):
    GEOGRAPHICAL = "Geographical"
    TEMPORAL = "Temporal"
    CATEGORICAL = "Categorical"
    CONTINUOUS = "Continuous"


class TemporalSubtype(Enum):
    ORDINAL = "Ordinal"
    INTERVAL = "Interval"
    CYCLIC = "Cyclic"
    BRANCHING = "Branching"


#: Delay-code vocabulary per functional domain. The Weather list holds the four
#: dominant weather codes; the remaining weather codes known to the taxonomy
#: (ice, lightning, turbulence) occur too rarely to ship in the default
#: generator vocabulary.
DOMAIN_DELAY_CODES: dict[FunctionalDomain, tuple[str, ...]] = {
    FunctionalDomain.CUSTOMER_HOLD: ("Passenger Connection Hold", "Wheelchair Assistance"),
    FunctionalDomain.DISPATCH_CSC: ("Dispatch Paperwork", "International Slot Hold"),
    FunctionalDomain.FLIGHT_OPERATIONS: ("Late Inbound Crew", "Pilot Rest Requirement"),
    FunctionalDomain.FUEL_MANAGEMENT: ("Refueling Delay", "Fuel Truck Unavailable"),
    FunctionalDomain.GROUND_OPERATIONS: ("Ramp Congestion", "Late Baggage Loading", "Aircraft Towing"),
    FunctionalDomain.INFLIGHT: ("Cabin Crew Shortage", "Late Cabin Service"),
    FunctionalDomain.MAINTENANCE: ("Unscheduled Inspection", "Component Replacement"),
    FunctionalDomain.NAS: ("ATC Flow Program", "Airport Congestion"),
    FunctionalDomain.SECURITY: ("Security Screening Backlog", "Checkpoint Closure"),
    FunctionalDomain.TECHNOLOGY: ("Reservation System Outage", "Crew Scheduling System Outage"),
    FunctionalDomain.WEATHER: (
        "ATC Hold at Origin",
        "ATC Hold at Destination",
        "Deicing at Gate",
        "Hail or Snow Damage",
    ),
}

#: Rare weather codes present in the taxonomy but not in the default generator.
EXTRA_WEATHER_CODES = ("Ice on Wings", "Lightning Strike", "Turbulence")

ALL_DELAY_CODES: frozenset[str] = frozenset(
    code for codes in DOMAIN_DELAY_CODES.values() for code in codes
) | frozenset(EXTRA_WEATHER_CODES)


@dataclass(frozen=True)
class FlightRecord:
    """One scheduled direct flight with planning, execution and disruption fields."""

    flight_date: _dt.date
    orig_iata: str
    dest_iata: str
    orig_lat: float
    orig_lon: float
    dest_lat: float
    dest_lon: float
    sched_dep_min: int
    sched_arr_min: int
    route_originator: bool
    onboard_count: int
    sched_turn_mins: int
    adjst_turn_mins: int
    actl_turn_mins: int
    sched_acft_code: str
    actl_acft_code: str
    swap_flag: bool
    functional_domain: Optional[FunctionalDomain]
    disruption_effect: DisruptionEffect
    delay_code: Optional[str]
    delay_mins: int

    def __post_init__(self):
        for label, value in (("orig_lat", self.orig_lat), ("dest_lat", self.dest_lat)):
            if not -90.0 <= value <= 90.0:
                raise ValidationError(f"{label} latitude out of range: {value}")
        for label, value in (("orig_lon", self.orig_lon), ("dest_lon", self.dest_lon)):
            if not -180.0 <= value <= 180.0:
                raise ValidationError(f"{label} longitude out of range: {value}")
        for label, value in (
            ("sched_dep_min", self.sched_dep_min),
            ("sched_arr_min", self.sched_arr_min),
        ):
            if not 0 <= value < 1440:
                raise ValidationError(f"{label} must lie in [0, 1440): {value}")
        for label, value in (
            ("onboard_count", self.onboard_count),
            ("sched_turn_mins", self.sched_turn_mins),
            ("adjst_turn_mins", self.adjst_turn_mins),
            ("actl_turn_mins", self.actl_turn_mins),
            ("delay_mins", self.delay_mins),
        ):
            if value < 0:
                raise ValidationError(f"{label} must be non-negative: {value}")
        if len(self.orig_iata) != 3 or len(self.dest_iata) != 3:
            raise ValidationError("airport codes must be 3-letter IATA identifiers")

        disrupted = self.disruption_effect is not DisruptionEffect.NONE
        if disrupted != (self.functional_domain is not None):
            raise ValidationError("functional_domain present iff flight is disrupted")
        if disrupted != (self.delay_code is not None):
            raise ValidationError("delay_code present iff flight is disrupted")
        if disrupted != (self.delay_mins > 0):
            raise ValidationError("delay_mins positive iff flight is disrupted")
        if self.delay_code is not None and self.functional_domain is not None:
            known = set(DOMAIN_DELAY_CODES[self.functional_domain])
            if self.functional_domain is FunctionalDomain.WEATHER:
                known |= set(EXTRA_WEATHER_CODES)
            if self.delay_code not in known:
                raise ValidationError(
                    f"delay code {self.delay_code!r} not known for domain "
                    f"{self.functional_domain.value}"
                )


@dataclass(frozen=True)
class RowError:
    """A rejected CSV data row, identified by its 1-based line number."""

    line_no: int
    message: str


@dataclass(frozen=True)
class FlightDataset:
    """Parsed flight records plus the rows that failed validation."""

    records: tuple[FlightRecord, ...]
    row_errors: tuple[RowError, ...] = ()

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[FlightRecord]:
        return iter(self.records)


@dataclass(frozen=True)
class FeatureDescriptor:
    """Column metadata: abstraction class, category and temporal subtype."""

    name: str
    abstraction_class: AbstractionClass
    category: FeatureCategory
    temporal_subtype: Optional[TemporalSubtype] = None

    def __post_init__(self):
        if (self.temporal_subtype is not None) != (self.category is FeatureCategory.TEMPORAL):
            raise ValidationError(
                f"feature {self.name!r}: temporal_subtype present iff category is Temporal"
            )


@dataclass(frozen=True)
class FeatureMatrix:
    """Numeric n-by-m design matrix with per-column descriptors and row ids."""

    values: np.ndarray
    descriptors: tuple[FeatureDescriptor, ...]
    row_ids: tuple[str, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if values.ndim != 2:
            raise ValidationError("feature matrix must be 2-D")
        if values.shape[1] != len(self.descriptors):
            raise ValidationError(
                f"descriptor count {len(self.descriptors)} != column count {values.shape[1]}"
            )
        if values.shape[0] != len(self.row_ids):
            raise ValidationError("row_id count must equal row count")
        names = [d.name for d in self.descriptors]
        if len(set(names)) != len(names):
            raise ValidationError("feature names must be unique within a matrix")
        if not np.isfinite(values).all():
            raise ValidationError("feature matrix contains NaN or infinite entries")

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.descriptors)

    def column_index(self, name: str) -> int:
        try:
            return self.feature_names.index(name)
        except ValueError:
            raise ValidationError(f"feature {name!r} not found") from None

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.column_index(name)]

    def without_column(self, name: str) -> "FeatureMatrix":
        idx = self.column_index(name)
        keep = [i for i in range(self.values.shape[1]) if i != idx]
        return FeatureMatrix(
            values=self.values[:, keep],
            descriptors=tuple(self.descriptors[i] for i in keep),
            row_ids=self.row_ids,
        )

    def take_rows(self, indices: Sequence[int]) -> "FeatureMatrix":
        idx = np.asarray(indices, dtype=int)
        return FeatureMatrix(
            values=self.values[idx],
            descriptors=self.descriptors,
            row_ids=tuple(self.row_ids[i] for i in idx),
        )


@dataclass(frozen=True)
class DisruptionReport:
    """Cross-tabulation of disrupted flights by functional domain and effect."""

    counts: dict[tuple[FunctionalDomain, DisruptionEffect], int]
    non_disrupted_count: int
    total_records: int
    effect_totals: dict[DisruptionEffect, int] = field(default_factory=dict)
    domain_shares_pct: dict[tuple[FunctionalDomain, DisruptionEffect], float] = field(
        default_factory=dict
    )

    @property
    def disrupted_count(self) -> int:
        return self.total_records - self.non_disrupted_count

    @property
    def delayed_share_of_disrupted_pct(self) -> float:
        disrupted = self.disrupted_count
        if disrupted == 0:
            return 0.0
        return 100.0 * self.effect_totals[DisruptionEffect.DELAYED] / disrupted

    @property
    def disrupted_share_of_total_pct(self) -> float:
        if self.total_records == 0:
            return 0.0
        return 100.0 * self.disrupted_count / self.total_records


CSV_COLUMNS = (
    "flight_date",
    "orig_iata",
    "dest_iata",
    "orig_lat",
    "orig_lon",
    "dest_lat",
    "dest_lon",
    "sched_dep_min",
    "sched_arr_min",
    "route_originator",
    "onboard_count",
    "sched_turn_mins",
    "adjst_turn_mins",
    "actl_turn_mins",
    "sched_acft_code",
    "actl_acft_code",
    "swap_flag",
    "functional_domain",
    "disruption_effect",
    "delay_code",
    "delay_mins",
)

_DOMAIN_BY_NAME = {d.value: d for d in FunctionalDomain}
_EFFECT_BY_NAME = {e.value: e for e in DisruptionEffect}
_BOOL_BY_NAME = {"true": True, "false": False, "1": True, "0": False}


def _parse_bool(text: str, column: str) -> bool:
    try:
        return _BOOL_BY_NAME[text.strip().lower()]
    except KeyError:
        raise ValidationError(f"{column}: cannot parse boolean from {text!r}") from None


def _parse_int(text: str, column: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ValidationError(f"{column}: cannot parse integer from {text!r}") from None


def _parse_float(text: str, column: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ValidationError(f"{column}: cannot parse number from {text!r}") from None


def _record_from_row(row: dict[str, str]) -> FlightRecord:
    try:
        flight_date = _dt.date.fromisoformat(row["flight_date"].strip())
    except ValueError:
        raise ValidationError(
            f"flight_date: cannot parse ISO date from {row['flight_date']!r}"
        ) from None

    domain_text = row["functional_domain"].strip()
    if domain_text == "":
        domain = None
    elif domain_text in _DOMAIN_BY_NAME:
        domain = _DOMAIN_BY_NAME[domain_text]
    else:
        raise ValidationError(f"functional_domain: unknown domain {domain_text!r}")

    effect_text = row["disruption_effect"].strip()
    if effect_text not in _EFFECT_BY_NAME:
        raise ValidationError(f"disruption_effect: unknown effect {effect_text!r}")

    code_text = row["delay_code"].strip()

    return FlightRecord(
        flight_date=flight_date,
        orig_iata=row["orig_iata"].strip(),
        dest_iata=row["dest_iata"].strip(),
        orig_lat=_parse_float(row["orig_lat"], "orig_lat"),
        orig_lon=_parse_float(row["orig_lon"], "orig_lon"),
        dest_lat=_parse_float(row["dest_lat"], "dest_lat"),
        dest_lon=_parse_float(row["dest_lon"], "dest_lon"),
        sched_dep_min=_parse_int(row["sched_dep_min"], "sched_dep_min"),
        sched_arr_min=_parse_int(row["sched_arr_min"], "sched_arr_min"),
        route_originator=_parse_bool(row["route_originator"], "route_originator"),
        onboard_count=_parse_int(row["onboard_count"], "onboard_count"),
        sched_turn_mins=_parse_int(row["sched_turn_mins"], "sched_turn_mins"),
        adjst_turn_mins=_parse_int(row["adjst_turn_mins"], "adjst_turn_mins"),
        actl_turn_mins=_parse_int(row["actl_turn_mins"], "actl_turn_mins"),
        sched_acft_code=row["sched_acft_code"].strip(),
        actl_acft_code=row["actl_acft_code"].strip(),
        swap_flag=_parse_bool(row["swap_flag"], "swap_flag"),
        functional_domain=domain,
        disruption_effect=_EFFECT_BY_NAME[effect_text],
        delay_code=code_text if code_text else None,
        delay_mins=_parse_int(row["delay_mins"], "delay_mins"),
    )


def parse_flight_csv(path, strict: bool = False) -> FlightDataset:
    """Read a flight-schedule CSV into validated records.

    Every data row becomes either a FlightRecord or a line-numbered RowError;
    nothing is dropped silently. With ``strict=True`` the first bad row raises
    instead of being collected.
    """
    records: list[FlightRecord] = []
    errors: list[RowError] = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: file is empty, expected a header row")
        missing = [c for c in CSV_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise SchemaError(f"{path}: missing column(s): {', '.join(missing)}")
        for row in reader:
            line_no = reader.line_num
            try:
                if any(row.get(c) is None for c in CSV_COLUMNS):
                    raise ValidationError("row has fewer cells than the header")
                records.append(_record_from_row(row))
            except ValidationError as exc:
                if strict:
                    raise ValidationError(f"line {line_no}: {exc}") from exc
                errors.append(RowError(line_no=line_no, message=str(exc)))
    return FlightDataset(records=tuple(records), row_errors=tuple(errors))


def _record_to_row(record: FlightRecord) -> list[str]:
    return [
        record.flight_date.isoformat(),
        record.orig_iata,
        record.dest_iata,
        f"{record.orig_lat:.6f}",
        f"{record.orig_lon:.6f}",
        f"{record.dest_lat:.6f}",
        f"{record.dest_lon:.6f}",
        str(record.sched_dep_min),
        str(record.sched_arr_min),
        "true" if record.route_originator else "false",
        str(record.onboard_count),
        str(record.sched_turn_mins),
        str(record.adjst_turn_mins),
        str(record.actl_turn_mins),
        record.sched_acft_code,
        record.actl_acft_code,
        "true" if record.swap_flag else "false",
        record.functional_domain.value if record.functional_domain else "",
        record.disruption_effect.value,
        record.delay_code or "",
        str(record.delay_mins),
    ]


def write_flight_csv(dataset: Iterable[FlightRecord], path) -> None:
    """Write records in the documented 21-column CSV layout."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_COLUMNS)
        for record in dataset:
            writer.writerow(_record_to_row(record))


def macroscopic_report(dataset: FlightDataset) -> DisruptionReport:
    """Cross-tabulate disruption counts by functional domain and effect."""
    if len(dataset) == 0:
        raise ValidationError("cannot build a disruption report from an empty dataset")

    counts = {
        (domain, effect): 0
        for domain in FunctionalDomain
        for effect in DISRUPTED_EFFECTS
    }
    non_disrupted = 0
    for record in dataset:
        if record.disruption_effect is DisruptionEffect.NONE:
            non_disrupted += 1
        else:
            counts[(record.functional_domain, record.disruption_effect)] += 1

    effect_totals = {
        effect: sum(counts[(d, effect)] for d in FunctionalDomain)
        for effect in DISRUPTED_EFFECTS
    }
    shares: dict[tuple[FunctionalDomain, DisruptionEffect], float] = {}
    for effect in DISRUPTED_EFFECTS:
        total = effect_totals[effect]
        for domain in FunctionalDomain:
            shares[(domain, effect)] = (
                100.0 * counts[(domain, effect)] / total if total else 0.0
            )

    return DisruptionReport(
        counts=counts,
        non_disrupted_count=non_disrupted,
        total_records=len(dataset),
        effect_totals=effect_totals,
        domain_shares_pct=shares,
    )


def filter_subset(
    dataset: FlightDataset,
    domain: Optional[FunctionalDomain],
    effect: DisruptionEffect,
) -> FlightDataset:
    """Records matching both predicates, in their original order."""
    matched = tuple(
        r
        for r in dataset
        if r.functional_domain is domain and r.disruption_effect is effect
    )
    return FlightDataset(records=matched)


def _temporal(name, abstraction, subtype):
    return FeatureDescriptor(name, abstraction, FeatureCategory.TEMPORAL, subtype)


def default_descriptors() -> tuple[FeatureDescriptor, ...]:
    """Built-in taxonomy for every feature the engineering pipeline can emit.

    Covers the eighteen features reported for the weather turnaround study
    (day-of-year pair, origin direction vector, onboard count, turnaround
    fields, aircraft types, swap flag and the seven weather delay codes) plus
    the remaining engineered encodings.
    """
    det = AbstractionClass.DETERMINATE_ALEATORIC
    ind = AbstractionClass.INDETERMINATE_ALEATORIC
    epi = AbstractionClass.EPISTEMIC
    geo = FeatureCategory.GEOGRAPHICAL
    cat = FeatureCategory.CATEGORICAL
    cont = FeatureCategory.CONTINUOUS
    cyc = TemporalSubtype.CYCLIC
    ordn = TemporalSubtype.ORDINAL
    intv = TemporalSubtype.INTERVAL

    descriptors = [
        _temporal("sin_date", det, cyc),
        _temporal("cos_date", det, cyc),
        _temporal("sin_season", det, cyc),
        _temporal("cos_season", det, cyc),
        _temporal("sin_moy", det, cyc),
        _temporal("cos_moy", det, cyc),
        _temporal("sin_dow", det, cyc),
        _temporal("cos_dow", det, cyc),
        FeatureDescriptor("orig_x_dir", det, geo),
        FeatureDescriptor("orig_y_dir", det, geo),
        FeatureDescriptor("orig_z_dir", det, geo),
        FeatureDescriptor("dest_x_dir", det, geo),
        FeatureDescriptor("dest_y_dir", det, geo),
        FeatureDescriptor("dest_z_dir", det, geo),
        FeatureDescriptor("route_dist_m", det, geo),
        _temporal("sin_dep_tod", epi, ordn),
        _temporal("cos_dep_tod", epi, ordn),
        _temporal("sin_arr_tod", epi, ordn),
        _temporal("cos_arr_tod", epi, ordn),
        _temporal("dep_shift_frac", epi, ordn),
        _temporal("dep_shift_cos", epi, ordn),
        _temporal("arr_shift_frac", epi, ordn),
        _temporal("arr_shift_cos", epi, ordn),
        FeatureDescriptor("route_originator", det, cat),
        FeatureDescriptor("ONBD_CT", det, cont),
        _temporal("SCHED_TURN_MINS", det, intv),
        _temporal("ADJST_TURN_MINS", epi, intv),
        _temporal("ACTL_TURN_MINS", epi, intv),
        FeatureDescriptor("schd_acft_type", det, cat),
        FeatureDescriptor("actl_acft_type", epi, cat),
        FeatureDescriptor("SWAP_FLT_FLAG", epi, cat),
    ]
    for code in sorted(ALL_DELAY_CODES):
        descriptors.append(FeatureDescriptor(code, ind, cat))
    return tuple(descriptors)


_DEFAULT_TAXONOMY: dict[str, FeatureDescriptor] = {}


def descriptor_for(name: str) -> Optional[FeatureDescriptor]:
    """Look up a feature name in the built-in taxonomy (None when unknown)."""
    if not _DEFAULT_TAXONOMY:
        _DEFAULT_TAXONOMY.update({d.name: d for d in default_descriptors()})
    return _DEFAULT_TAXONOMY.get(name)
