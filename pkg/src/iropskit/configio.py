"""Keyed-text (INI) readers and writers for generator, scaler and pipeline config."""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .artifacts import atomic_write_text, format_float
from .errors import ConfigError
from .feature_pipeline.scaling import ScalerMethod, ScalerModel
from .flight_data import DisruptionEffect, FunctionalDomain
from .synth import (
    DEFAULT_AIRPORTS,
    DEFAULT_SEAT_MAP,
    SynthConfig,
    TurnaroundModel,
    default_table1_config,
    default_turnaround_model,
)

_DOMAIN_BY_NAME = {d.value: d for d in FunctionalDomain}
_EFFECT_BY_NAME = {e.value: e for e in DisruptionEffect}


def _parser() -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keys are case-sensitive (delay codes, columns)
    return parser


def _load(path) -> configparser.ConfigParser:
    parser = _parser()
    read = parser.read(path, encoding="utf-8")
    if not read:
        raise ConfigError(f"config file not found: {path}")
    return parser


def read_synth_config(path) -> SynthConfig:
    """Read a generator config; omitted sections fall back to the defaults."""
    parser = _load(path)
    if "synth" not in parser:
        raise ConfigError(f"{path}: missing [synth] section")
    section = parser["synth"]
    try:
        n_total = section.getint("n_total")
        seed = section.getint("seed", fallback=0)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if n_total is None:
        raise ConfigError(f"{path}: [synth] n_total is required")

    if "weights" in parser:
        weights: dict[tuple[FunctionalDomain, DisruptionEffect], float] = {}
        for key, value in parser["weights"].items():
            domain_name, _, effect_name = key.rpartition(".")
            if domain_name not in _DOMAIN_BY_NAME or effect_name not in _EFFECT_BY_NAME:
                raise ConfigError(f"{path}: bad weight key {key!r}")
            weights[(_DOMAIN_BY_NAME[domain_name], _EFFECT_BY_NAME[effect_name])] = float(value)
        non_disrupted = section.getfloat("non_disrupted_weight", fallback=0.0)
    else:
        base = default_table1_config(n_total)
        weights = base.domain_effect_weights
        non_disrupted = base.non_disrupted_weight

    if "airports" in parser:
        airports = tuple(
            (code, float(value.split(",")[0]), float(value.split(",")[1]))
            for code, value in parser["airports"].items()
        )
    else:
        airports = DEFAULT_AIRPORTS

    if "seats" in parser:
        seat_map = {code: int(value) for code, value in parser["seats"].items()}
    else:
        seat_map = dict(DEFAULT_SEAT_MAP)

    if "turnaround" in parser:
        t = parser["turnaround"]
        coef = dict(default_turnaround_model().coef_delaycode)
        if "turnaround.delay_codes" in parser:
            coef.update(
                {code: float(v) for code, v in parser["turnaround.delay_codes"].items()}
            )
        model = TurnaroundModel(
            base_log_mean=t.getfloat("base_log_mean"),
            coef_adjst=t.getfloat("coef_adjst"),
            coef_onboard=t.getfloat("coef_onboard"),
            coef_delaycode=coef,
            log_sigma=t.getfloat("log_sigma"),
        )
    else:
        model = default_turnaround_model()

    return SynthConfig(
        n_total=n_total,
        domain_effect_weights=weights,
        non_disrupted_weight=non_disrupted,
        airport_pool=airports,
        seat_map=seat_map,
        turnaround_model=model,
        seed=seed,
    )


def write_synth_config(config: SynthConfig, path) -> None:
    parser = _parser()
    parser["synth"] = {
        "n_total": str(config.n_total),
        "seed": str(config.seed),
        "non_disrupted_weight": format_float(config.non_disrupted_weight),
    }
    parser["weights"] = {
        f"{domain.value}.{effect.value}": format_float(weight)
        for (domain, effect), weight in sorted(
            config.domain_effect_weights.items(),
            key=lambda item: (item[0][0].value, item[0][1].value),
        )
    }
    parser["airports"] = {
        code: f"{lat},{lon}" for code, lat, lon in config.airport_pool
    }
    parser["seats"] = {code: str(n) for code, n in sorted(config.seat_map.items())}
    model = config.turnaround_model
    parser["turnaround"] = {
        "base_log_mean": format_float(model.base_log_mean),
        "coef_adjst": format_float(model.coef_adjst),
        "coef_onboard": format_float(model.coef_onboard),
        "log_sigma": format_float(model.log_sigma),
    }
    parser["turnaround.delay_codes"] = {
        code: format_float(v) for code, v in sorted(model.coef_delaycode.items())
    }
    buffer = io.StringIO()
    parser.write(buffer)
    atomic_write_text(path, buffer.getvalue())


def write_scaler_params(model: ScalerModel, names, path) -> None:
    """Persist fitted scaler parameters with full float precision."""
    parser = _parser()
    parser["scaler"] = {
        "method": model.method.value,
        "n_columns": str(model.n_columns),
    }
    parser["names"] = {str(j): names[j] for j in range(model.n_columns)}
    for label, array in (
        ("mean", model.mean),
        ("std", model.std),
        ("min", model.col_min),
        ("max", model.col_max),
        ("lambda", model.lmbda),
    ):
        if array is not None:
            parser[label] = {str(j): format_float(array[j]) for j in range(model.n_columns)}
    if model.constant_columns:
        parser["constant"] = {
            str(j): format_float(model.constant_values[j]) for j in model.constant_columns
        }
    buffer = io.StringIO()
    parser.write(buffer)
    atomic_write_text(path, buffer.getvalue())


def read_scaler_params(path) -> tuple[ScalerModel, tuple[str, ...]]:
    parser = _load(path)
    method = ScalerMethod(parser["scaler"]["method"])
    n_columns = int(parser["scaler"]["n_columns"])
    names = tuple(parser["names"][str(j)] for j in range(n_columns))

    def array(label):
        if label not in parser:
            return None
        return np.array([float(parser[label][str(j)]) for j in range(n_columns)])

    constant_values = {}
    if "constant" in parser:
        constant_values = {int(j): float(v) for j, v in parser["constant"].items()}
    model = ScalerModel(
        method=method,
        n_columns=n_columns,
        mean=array("mean"),
        std=array("std"),
        col_min=array("min"),
        col_max=array("max"),
        lmbda=array("lambda"),
        constant_columns=tuple(sorted(constant_values)),
        constant_values=constant_values,
    )
    return model, names


@dataclass(frozen=True)
class PipelineConfig:
    """End-to-end run description for the pipeline subcommand."""

    input_csv: Optional[str] = None        # None -> synthesize
    synth_config: Optional[str] = None     # path to a generator config
    synth_n: int = 20_000
    subset_domain: Optional[FunctionalDomain] = FunctionalDomain.WEATHER
    subset_effect: DisruptionEffect = DisruptionEffect.DELAYED
    scaler: ScalerMethod = ScalerMethod.RANGE
    pca_dims: int = 2
    tsne_perplexity: float = 30.0
    tsne_iters: int = 1000
    mir_k: int = 3
    gpr_restarts: int = 5
    target: str = "ACTL_TURN_MINS"
    split_fraction: float = 0.7
    seed: int = 0
    outdir: str = "pipeline_out"

    def validate(self) -> None:
        if not 0.0 < self.split_fraction < 1.0:
            raise ConfigError("split fraction must lie in (0, 1)")
        if self.synth_n < 1:
            raise ConfigError("synth_n must be >= 1")
        if self.pca_dims < 1:
            raise ConfigError("pca_dims must be >= 1")


def read_pipeline_config(path) -> PipelineConfig:
    parser = _load(path)
    if "pipeline" not in parser:
        raise ConfigError(f"{path}: missing [pipeline] section")
    s = parser["pipeline"]

    domain_text = s.get("subset_domain", fallback="Weather")
    if domain_text.lower() == "none":
        domain = None
    elif domain_text in _DOMAIN_BY_NAME:
        domain = _DOMAIN_BY_NAME[domain_text]
    else:
        raise ConfigError(f"{path}: unknown subset_domain {domain_text!r}")

    effect_text = s.get("subset_effect", fallback="Delayed")
    if effect_text not in _EFFECT_BY_NAME:
        raise ConfigError(f"{path}: unknown subset_effect {effect_text!r}")

    try:
        scaler = ScalerMethod(s.get("scaler", fallback="range"))
    except ValueError:
        raise ConfigError(f"{path}: unknown scaler {s.get('scaler')!r}") from None

    config = PipelineConfig(
        input_csv=s.get("input", fallback=None) or None,
        synth_config=s.get("synth_config", fallback=None) or None,
        synth_n=s.getint("synth_n", fallback=20_000),
        subset_domain=domain,
        subset_effect=_EFFECT_BY_NAME[effect_text],
        scaler=scaler,
        pca_dims=s.getint("pca_dims", fallback=2),
        tsne_perplexity=s.getfloat("tsne_perplexity", fallback=30.0),
        tsne_iters=s.getint("tsne_iters", fallback=1000),
        mir_k=s.getint("mir_k", fallback=3),
        gpr_restarts=s.getint("gpr_restarts", fallback=5),
        target=s.get("target", fallback="ACTL_TURN_MINS"),
        split_fraction=s.getfloat("split_fraction", fallback=0.7),
        seed=s.getint("seed", fallback=0),
        outdir=s.get("outdir", fallback="pipeline_out"),
    )
    config.validate()
    return config
