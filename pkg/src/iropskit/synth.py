"""Seeded synthetic flight-schedule generator.

Cell weights default to the published one-year disruption outlook (eleven
functional domains crossed with delayed/cancelled/diverted counts, plus the
620,000 non-disrupted schedules), so desk-scale samples reproduce the
macroscopic proportions of the original data. Actual turnaround follows a
documented lognormal model so that downstream feature-selection runs have a
known ground truth:

    ln(actl_turn) = base_log_mean + coef_adjst * adjst_turn
                    + coef_onboard * onboard + coef_delaycode[code]
                    + Normal(0, log_sigma)
"""

from __future__ import annotations

import datetime as _dt
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .flight_data import (
    DISRUPTED_EFFECTS,
    DOMAIN_DELAY_CODES,
    DisruptionEffect,
    FlightDataset,
    FlightRecord,
    FunctionalDomain,
)

#: Published disruption counts per (domain, effect) over the one-year period.
TABLE1_COUNTS: dict[tuple[FunctionalDomain, DisruptionEffect], int] = {
    (FunctionalDomain.CUSTOMER_HOLD, DisruptionEffect.DELAYED): 46_870,
    (FunctionalDomain.CUSTOMER_HOLD, DisruptionEffect.CANCELLED): 0,
    (FunctionalDomain.CUSTOMER_HOLD, DisruptionEffect.DIVERTED): 0,
    (FunctionalDomain.DISPATCH_CSC, DisruptionEffect.DELAYED): 17_468,
    (FunctionalDomain.DISPATCH_CSC, DisruptionEffect.CANCELLED): 0,
    (FunctionalDomain.DISPATCH_CSC, DisruptionEffect.DIVERTED): 0,
    (FunctionalDomain.FLIGHT_OPERATIONS, DisruptionEffect.DELAYED): 36_370,
    (FunctionalDomain.FLIGHT_OPERATIONS, DisruptionEffect.CANCELLED): 1_099,
    (FunctionalDomain.FLIGHT_OPERATIONS, DisruptionEffect.DIVERTED): 909,
    (FunctionalDomain.FUEL_MANAGEMENT, DisruptionEffect.DELAYED): 4_841,
    (FunctionalDomain.FUEL_MANAGEMENT, DisruptionEffect.CANCELLED): 0,
    (FunctionalDomain.FUEL_MANAGEMENT, DisruptionEffect.DIVERTED): 0,
    (FunctionalDomain.GROUND_OPERATIONS, DisruptionEffect.DELAYED): 168_375,
    (FunctionalDomain.GROUND_OPERATIONS, DisruptionEffect.CANCELLED): 2_518,
    (FunctionalDomain.GROUND_OPERATIONS, DisruptionEffect.DIVERTED): 460,
    (FunctionalDomain.INFLIGHT, DisruptionEffect.DELAYED): 79_444,
    (FunctionalDomain.INFLIGHT, DisruptionEffect.CANCELLED): 984,
    (FunctionalDomain.INFLIGHT, DisruptionEffect.DIVERTED): 67,
    (FunctionalDomain.MAINTENANCE, DisruptionEffect.DELAYED): 33_518,
    (FunctionalDomain.MAINTENANCE, DisruptionEffect.CANCELLED): 55,
    (FunctionalDomain.MAINTENANCE, DisruptionEffect.DIVERTED): 0,
    (FunctionalDomain.NAS, DisruptionEffect.DELAYED): 22_644,
    (FunctionalDomain.NAS, DisruptionEffect.CANCELLED): 2_619,
    (FunctionalDomain.NAS, DisruptionEffect.DIVERTED): 433,
    (FunctionalDomain.SECURITY, DisruptionEffect.DELAYED): 2_955,
    (FunctionalDomain.SECURITY, DisruptionEffect.CANCELLED): 6,
    (FunctionalDomain.SECURITY, DisruptionEffect.DIVERTED): 11,
    (FunctionalDomain.TECHNOLOGY, DisruptionEffect.DELAYED): 8_953,
    (FunctionalDomain.TECHNOLOGY, DisruptionEffect.CANCELLED): 0,
    (FunctionalDomain.TECHNOLOGY, DisruptionEffect.DIVERTED): 0,
    (FunctionalDomain.WEATHER, DisruptionEffect.DELAYED): 12_659,
    (FunctionalDomain.WEATHER, DisruptionEffect.CANCELLED): 12_156,
    (FunctionalDomain.WEATHER, DisruptionEffect.DIVERTED): 4_905,
}

NON_DISRUPTED_COUNT = 620_000

#: Twenty synthetic stations (code, lat, lon); coordinates are fictitious but
#: continental-US-plausible so geodesics stay far from the antipodal regime.
DEFAULT_AIRPORTS: tuple[tuple[str, float, float], ...] = (
    ("ABL", 33.4342, -112.0116),
    ("BRV", 36.0840, -115.1537),
    ("CDX", 32.8998, -97.0403),
    ("DNE", 39.8561, -104.6737),
    ("ELM", 29.6454, -95.2789),
    ("FRH", 41.9742, -87.9073),
    ("GSA", 33.6407, -84.4277),
    ("HBK", 42.3656, -71.0096),
    ("IVR", 38.8512, -77.0402),
    ("JQL", 40.6413, -73.7781),
    ("KMD", 25.7959, -80.2870),
    ("LSP", 34.0522, -118.2437),
    ("MRT", 44.8848, -93.2223),
    ("NOV", 35.2140, -80.9431),
    ("OKT", 45.5898, -122.5951),
    ("PLD", 39.8729, -75.2437),
    ("QSF", 37.6213, -122.3790),
    ("RNB", 27.9772, -82.5311),
    ("SGW", 47.4480, -122.3088),
    ("TUV", 36.1263, -86.6774),
)

#: 737-family style seat map; two codes share a count on purpose (the seat
#: encoding collapses them).
DEFAULT_SEAT_MAP: dict[str, int] = {
    "733": 143,
    "735": 122,
    "73H": 175,
    "73W": 143,
    "7M8": 175,
}


@dataclass(frozen=True)
class TurnaroundModel:
    """Coefficients of the lognormal actual-turnaround model."""

    base_log_mean: float
    coef_adjst: float
    coef_onboard: float
    coef_delaycode: dict[str, float]
    log_sigma: float


def default_turnaround_model() -> TurnaroundModel:
    coef = {code: 0.0 for codes in DOMAIN_DELAY_CODES.values() for code in codes}
    coef.update(
        {
            "ATC Hold at Origin": 0.00,
            "ATC Hold at Destination": 0.03,
            "Deicing at Gate": 0.15,
            "Hail or Snow Damage": 0.22,
            "Ramp Congestion": 0.08,
            "Late Baggage Loading": 0.10,
            "Unscheduled Inspection": 0.12,
        }
    )
    # base puts mean actual turnaround near 40 min at typical covariate
    # levels (adjst ~= 40, onboard ~= 120)
    return TurnaroundModel(
        base_log_mean=2.62,
        coef_adjst=0.022,
        coef_onboard=0.0008,
        coef_delaycode=coef,
        log_sigma=0.015,
    )


@dataclass(frozen=True)
class SynthConfig:
    """Full description of one reproducible synthetic dataset."""

    n_total: int
    domain_effect_weights: dict[tuple[FunctionalDomain, DisruptionEffect], float]
    non_disrupted_weight: float
    airport_pool: tuple[tuple[str, float, float], ...] = DEFAULT_AIRPORTS
    seat_map: dict[str, int] = field(default_factory=lambda: dict(DEFAULT_SEAT_MAP))
    turnaround_model: TurnaroundModel = field(default_factory=default_turnaround_model)
    seed: int = 0

    def validate(self) -> None:
        if self.n_total < 1:
            raise ConfigError(f"n_total must be >= 1, got {self.n_total}")
        weights = list(self.domain_effect_weights.values()) + [self.non_disrupted_weight]
        if any(w < 0 for w in weights):
            raise ConfigError("all cell weights must be non-negative")
        total = sum(weights)
        if abs(total - 1.0) > 1e-9:
            raise ConfigError(f"cell weights must sum to 1, got {total!r}")
        if self.turnaround_model.log_sigma <= 0:
            raise ConfigError("turnaround log_sigma must be positive")
        if len(self.airport_pool) < 2:
            raise ConfigError("airport pool needs at least two stations")
        if not self.seat_map:
            raise ConfigError("seat map must not be empty")
        for (domain, effect), weight in self.domain_effect_weights.items():
            if weight > 0:
                missing = [
                    c
                    for c in DOMAIN_DELAY_CODES[domain]
                    if c not in self.turnaround_model.coef_delaycode
                ]
                if missing:
                    raise ConfigError(
                        f"turnaround model lacks delay-code coefficients: {missing}"
                    )


def default_table1_config(n_total: int, seed: int = 0) -> SynthConfig:
    """Config whose cell weights are proportional to the published counts."""
    if n_total < 1:
        raise ConfigError(f"n_total must be >= 1, got {n_total}")
    grand_total = sum(TABLE1_COUNTS.values()) + NON_DISRUPTED_COUNT
    weights = {cell: count / grand_total for cell, count in TABLE1_COUNTS.items()}
    return SynthConfig(
        n_total=n_total,
        domain_effect_weights=weights,
        non_disrupted_weight=NON_DISRUPTED_COUNT / grand_total,
        seed=seed,
    )


def weather_delayed_config(n_total: int, seed: int = 0) -> SynthConfig:
    """Config concentrating all mass on weather-delayed schedules.

    Convenience for desk-scale turnaround studies, which the original analysis
    ran on the weather-delayed subset only.
    """
    weights = {cell: 0.0 for cell in TABLE1_COUNTS}
    weights[(FunctionalDomain.WEATHER, DisruptionEffect.DELAYED)] = 1.0
    return SynthConfig(
        n_total=n_total,
        domain_effect_weights=weights,
        non_disrupted_weight=0.0,
        seed=seed,
    )


def _quota_counts(config: SynthConfig) -> list[tuple[object, int]]:
    """Largest-remainder allocation of n_total records to cells.

    Deterministic proportional allocation keeps empirical cell frequencies
    within 1/n_total of the configured weights at any sample size, which iid
    multinomial draws cannot guarantee for the thin cancelled/diverted cells.
    """
    cells: list[tuple[object, float]] = [("__none__", config.non_disrupted_weight)]
    for domain in FunctionalDomain:
        for effect in DISRUPTED_EFFECTS:
            weight = config.domain_effect_weights.get((domain, effect), 0.0)
            cells.append(((domain, effect), weight))

    raw = [config.n_total * w for _, w in cells]
    counts = [math.floor(r) for r in raw]
    shortfall = config.n_total - sum(counts)
    by_remainder = sorted(range(len(cells)), key=lambda i: (-(raw[i] - counts[i]), i))
    for i in by_remainder[:shortfall]:
        counts[i] += 1
    return [(cells[i][0], counts[i]) for i in range(len(cells))]


_PERIOD_START = _dt.date(2016, 9, 1)
_PERIOD_DAYS = 365

#: Dominant weather delay code per meteorological season (DJF/MAM/JJA/SON).
#: Uniform flight dates keep the marginal code distribution uniform, but the
#: seasonal preference gives date features real cluster structure (deicing and
#: hail damage concentrate in winter, ATC holds elsewhere).
_WEATHER_SEASON_CODE = {
    0: "Deicing at Gate",
    1: "ATC Hold at Origin",
    2: "ATC Hold at Destination",
    3: "Hail or Snow Damage",
}
_WEATHER_SEASON_PREFERENCE = 0.55


def _season_index(month: int) -> int:
    return {12: 0, 1: 0, 2: 0, 3: 1, 4: 1, 5: 1, 6: 2, 7: 2, 8: 2}.get(month, 3)


def _draw_delay_code(
    domain: FunctionalDomain, flight_date: _dt.date, rng: np.random.Generator
) -> str:
    vocab = DOMAIN_DELAY_CODES[domain]
    if domain is FunctionalDomain.WEATHER:
        preferred = _WEATHER_SEASON_CODE[_season_index(flight_date.month)]
        if rng.random() < _WEATHER_SEASON_PREFERENCE:
            return preferred
        others = [c for c in vocab if c != preferred]
        return others[int(rng.integers(0, len(others)))]
    return vocab[int(rng.integers(0, len(vocab)))]


def _generate_record(cell, config: SynthConfig, rng: np.random.Generator) -> FlightRecord:
    airports = config.airport_pool
    model = config.turnaround_model

    i, j = rng.choice(len(airports), size=2, replace=False)
    orig, dest = airports[i], airports[j]

    flight_date = _PERIOD_START + _dt.timedelta(days=int(rng.integers(0, _PERIOD_DAYS)))
    sched_dep = int(rng.integers(300, 1380))
    # crude block time from great-circle-ish scale: 1 min per degree is enough
    # structure for the schedule fields, which downstream models never invert.
    approx_deg = math.hypot(orig[1] - dest[1], orig[2] - dest[2])
    block = 40 + int(round(8.0 * approx_deg)) + int(rng.integers(0, 25))
    sched_arr = (sched_dep + block) % 1440

    route_originator = bool(rng.random() < (0.85 if sched_dep < 420 else 0.08))

    codes = sorted(config.seat_map)
    sched_code = codes[int(rng.integers(0, len(codes)))]
    if rng.random() < 0.07:
        others = [c for c in codes if c != sched_code] or [sched_code]
        actl_code = others[int(rng.integers(0, len(others)))]
    else:
        actl_code = sched_code
    swap = actl_code != sched_code

    seats = config.seat_map[sched_code]
    onboard = int(round(seats * rng.uniform(0.45, 0.99)))

    sched_turn = int(np.clip(round(rng.normal(35.0, 6.0)), 20, 70))

    if cell == "__none__":
        domain, effect = None, DisruptionEffect.NONE
        delay_code = None
        delay_mins = 0
        adjst_turn = max(15, sched_turn + int(round(rng.normal(0.0, 3.0))))
    else:
        domain, effect = cell
        delay_code = _draw_delay_code(domain, flight_date, rng)
        delay_mins = max(1, int(round(rng.lognormal(math.log(25.0), 0.6))))
        adjst_turn = max(15, sched_turn + int(round(abs(rng.normal(8.0, 6.0)))))

    log_mean = (
        model.base_log_mean
        + model.coef_adjst * adjst_turn
        + model.coef_onboard * onboard
        + (model.coef_delaycode[delay_code] if delay_code else 0.0)
    )
    actl_turn = max(1, int(round(math.exp(log_mean + rng.normal(0.0, model.log_sigma)))))

    return FlightRecord(
        flight_date=flight_date,
        orig_iata=orig[0],
        dest_iata=dest[0],
        orig_lat=orig[1],
        orig_lon=orig[2],
        dest_lat=dest[1],
        dest_lon=dest[2],
        sched_dep_min=sched_dep,
        sched_arr_min=sched_arr,
        route_originator=route_originator,
        onboard_count=onboard,
        sched_turn_mins=sched_turn,
        adjst_turn_mins=adjst_turn,
        actl_turn_mins=actl_turn,
        sched_acft_code=sched_code,
        actl_acft_code=actl_code,
        swap_flag=swap,
        functional_domain=domain,
        disruption_effect=effect,
        delay_code=delay_code,
        delay_mins=delay_mins,
    )


def generate(config: SynthConfig) -> FlightDataset:
    """Generate exactly n_total records; a fixed seed fixes every byte."""
    config.validate()
    rng = np.random.Generator(np.random.PCG64(config.seed))

    assignments: list[object] = []
    for cell, count in _quota_counts(config):
        assignments.extend([cell] * count)
    order = rng.permutation(len(assignments))

    records = tuple(_generate_record(assignments[k], config, rng) for k in order)
    return FlightDataset(records=records)
