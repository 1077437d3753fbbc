import numpy as np
import pytest
from scipy.stats import skew

from iropskit.errors import ConfigError
from iropskit.flight_data import (
    DisruptionEffect,
    FunctionalDomain,
    write_flight_csv,
)
from iropskit.synth import (
    NON_DISRUPTED_COUNT,
    TABLE1_COUNTS,
    SynthConfig,
    TurnaroundModel,
    default_table1_config,
    generate,
    weather_delayed_config,
)

WEATHER_DELAYED = (FunctionalDomain.WEATHER, DisruptionEffect.DELAYED)
GROUND_DELAYED = (FunctionalDomain.GROUND_OPERATIONS, DisruptionEffect.DELAYED)


class TestDefaultConfig:
    def test_weight_ratios_follow_published_counts(self):
        config = default_table1_config(100)
        ratio = (
            config.domain_effect_weights[WEATHER_DELAYED]
            / config.domain_effect_weights[GROUND_DELAYED]
        )
        assert ratio == pytest.approx(12_659 / 168_375, rel=1e-12)

    def test_weights_sum_to_one(self):
        config = default_table1_config(100)
        total = sum(config.domain_effect_weights.values()) + config.non_disrupted_weight
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_delayed_share_of_disrupted(self):
        delayed = sum(
            count
            for (domain, effect), count in TABLE1_COUNTS.items()
            if effect is DisruptionEffect.DELAYED
        )
        disrupted = sum(TABLE1_COUNTS.values())
        assert 100 * delayed / disrupted == pytest.approx(94.0, abs=1.0)

    def test_n_total_must_be_positive(self):
        with pytest.raises(ConfigError):
            default_table1_config(0)


class TestConfigValidation:
    def test_bad_weight_sum_rejected(self):
        config = default_table1_config(10)
        bad = SynthConfig(
            n_total=10,
            domain_effect_weights=config.domain_effect_weights,
            non_disrupted_weight=0.9,  # breaks the sum
        )
        with pytest.raises(ConfigError, match="sum to 1"):
            generate(bad)

    def test_zero_log_sigma_rejected(self):
        config = default_table1_config(10)
        model = config.turnaround_model
        bad_model = TurnaroundModel(
            base_log_mean=model.base_log_mean,
            coef_adjst=model.coef_adjst,
            coef_onboard=model.coef_onboard,
            coef_delaycode=model.coef_delaycode,
            log_sigma=0.0,
        )
        bad = SynthConfig(
            n_total=10,
            domain_effect_weights=config.domain_effect_weights,
            non_disrupted_weight=config.non_disrupted_weight,
            turnaround_model=bad_model,
        )
        with pytest.raises(ConfigError, match="log_sigma"):
            generate(bad)


class TestGenerate:
    def test_exact_count_and_record_validity(self):
        dataset = generate(default_table1_config(500, seed=2))
        assert len(dataset) == 500  # FlightRecord validates itself on build

    def test_same_seed_identical_csv_bytes(self, tmp_path):
        config = default_table1_config(300, seed=42)
        contents = []
        for name in ("a.csv", "b.csv"):
            path = tmp_path / name
            write_flight_csv(generate(config), path)
            contents.append(path.read_bytes())
        assert contents[0] == contents[1]

    def test_different_seeds_differ(self):
        a = generate(default_table1_config(100, seed=1))
        b = generate(default_table1_config(100, seed=2))
        assert a.records != b.records

    def test_empirical_frequencies_match_weights(self):
        config = default_table1_config(20_000, seed=5)
        dataset = generate(config)
        counts = {cell: 0 for cell in config.domain_effect_weights}
        clean = 0
        for record in dataset:
            if record.disruption_effect is DisruptionEffect.NONE:
                clean += 1
            else:
                counts[(record.functional_domain, record.disruption_effect)] += 1
        for cell, weight in config.domain_effect_weights.items():
            assert counts[cell] / 20_000 == pytest.approx(weight, abs=0.01)
        assert clean / 20_000 == pytest.approx(config.non_disrupted_weight, abs=0.01)

    def test_weather_code_marginal_is_uniform(self):
        dataset = generate(weather_delayed_config(8000, seed=7))
        codes = [r.delay_code for r in dataset]
        for code in set(codes):
            assert codes.count(code) / len(codes) == pytest.approx(0.25, abs=0.03)

    def test_log_turnaround_is_normal_when_conditioning_fixed(self):
        # zero coefficients remove every conditioning variable from the model
        config = weather_delayed_config(20_000, seed=5)
        coef = {c: 0.0 for c in config.turnaround_model.coef_delaycode}
        model = TurnaroundModel(
            base_log_mean=3.7, coef_adjst=0.0, coef_onboard=0.0,
            coef_delaycode=coef, log_sigma=0.25,
        )
        config = SynthConfig(**{**config.__dict__, "turnaround_model": model})
        ln_turn = np.log([r.actl_turn_mins for r in generate(config)])
        assert abs(skew(ln_turn)) <= 0.1

    def test_quota_totals(self):
        # table counts themselves recover the published totals
        assert sum(TABLE1_COUNTS.values()) == 460_319
        assert sum(TABLE1_COUNTS.values()) + NON_DISRUPTED_COUNT == 1_080_319
