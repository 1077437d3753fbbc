import datetime as dt

import pytest

from iropskit.errors import SchemaError, ValidationError
from iropskit.flight_data import (
    CSV_COLUMNS,
    AbstractionClass,
    DisruptionEffect,
    FeatureCategory,
    FlightDataset,
    FlightRecord,
    FunctionalDomain,
    default_descriptors,
    descriptor_for,
    filter_subset,
    macroscopic_report,
    parse_flight_csv,
    write_flight_csv,
)
from iropskit.synth import default_table1_config, generate


def make_record(**overrides) -> FlightRecord:
    base = dict(
        flight_date=dt.date(2017, 3, 14),
        orig_iata="ABL",
        dest_iata="BRV",
        orig_lat=33.4342,
        orig_lon=-112.0116,
        dest_lat=36.0840,
        dest_lon=-115.1537,
        sched_dep_min=480,
        sched_arr_min=560,
        route_originator=False,
        onboard_count=120,
        sched_turn_mins=35,
        adjst_turn_mins=40,
        actl_turn_mins=42,
        sched_acft_code="73H",
        actl_acft_code="73H",
        swap_flag=False,
        functional_domain=None,
        disruption_effect=DisruptionEffect.NONE,
        delay_code=None,
        delay_mins=0,
    )
    base.update(overrides)
    return FlightRecord(**base)


def weather_delayed(**overrides) -> FlightRecord:
    fields = dict(
        functional_domain=FunctionalDomain.WEATHER,
        disruption_effect=DisruptionEffect.DELAYED,
        delay_code="Deicing at Gate",
        delay_mins=25,
    )
    fields.update(overrides)
    return make_record(**fields)


class TestRecordInvariants:
    def test_latitude_out_of_range(self):
        with pytest.raises(ValidationError, match="latitude out of range"):
            make_record(orig_lat=91.0)

    def test_disruption_fields_must_be_consistent(self):
        with pytest.raises(ValidationError):
            make_record(functional_domain=FunctionalDomain.WEATHER)
        with pytest.raises(ValidationError):
            make_record(delay_mins=10)
        with pytest.raises(ValidationError):
            weather_delayed(delay_mins=0)

    def test_unknown_delay_code_for_domain(self):
        with pytest.raises(ValidationError, match="not known for domain"):
            weather_delayed(delay_code="Ramp Congestion")


class TestCsv:
    def test_header_only_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text(",".join(CSV_COLUMNS) + "\n")
        dataset = parse_flight_csv(path)
        assert len(dataset) == 0
        assert dataset.row_errors == ()

    def test_missing_column_is_schema_error(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(",".join(CSV_COLUMNS[:-1]) + "\n")
        with pytest.raises(SchemaError, match="delay_mins"):
            parse_flight_csv(path)

    def test_out_of_range_latitude_is_row_error(self, tmp_path):
        good = make_record()
        path = tmp_path / "flights.csv"
        write_flight_csv([good], path)
        text = path.read_text().replace("33.434200", "91.000000")
        path.write_text(text)
        dataset = parse_flight_csv(path)
        assert len(dataset) == 0
        assert len(dataset.row_errors) == 1
        assert dataset.row_errors[0].line_no == 2
        assert "latitude out of range" in dataset.row_errors[0].message

    def test_parsing_is_total(self, tmp_path):
        records = [make_record(), weather_delayed(), make_record(sched_dep_min=700)]
        path = tmp_path / "flights.csv"
        write_flight_csv(records, path)
        lines = path.read_text().splitlines()
        lines[2] = lines[2].replace("Weather", "Gremlins")
        path.write_text("\n".join(lines) + "\n")
        dataset = parse_flight_csv(path)
        assert len(dataset) + len(dataset.row_errors) == 3
        assert len(dataset.row_errors) == 1

    def test_synth_round_trip(self, tmp_path):
        dataset = generate(default_table1_config(10, seed=3))
        path = tmp_path / "flights.csv"
        write_flight_csv(dataset, path)
        back = parse_flight_csv(path)
        assert back.row_errors == ()
        assert len(back) == 10
        for original, reread in zip(dataset, back):
            assert original == reread


class TestReport:
    def test_empty_dataset_rejected(self):
        with pytest.raises(ValidationError, match="empty"):
            macroscopic_report(FlightDataset(records=()))

    def test_single_clean_flight(self):
        report = macroscopic_report(FlightDataset(records=(make_record(),)))
        assert report.disrupted_count == 0
        assert report.disrupted_share_of_total_pct == 0.0
        assert all(v == 0 for v in report.counts.values())

    def test_counts_reproduce_cross_tabulation(self):
        records = [make_record()] * 3 + [weather_delayed()] * 2
        report = macroscopic_report(FlightDataset(records=tuple(records)))
        assert report.counts[(FunctionalDomain.WEATHER, DisruptionEffect.DELAYED)] == 2
        assert report.total_records == 5
        assert report.non_disrupted_count == 3

    def test_cell_matches_input_count(self):
        # the published weather-delayed count, fed straight back in
        records = tuple(weather_delayed() for _ in range(659))
        report = macroscopic_report(FlightDataset(records=records))
        assert report.counts[(FunctionalDomain.WEATHER, DisruptionEffect.DELAYED)] == 659

    def test_per_effect_shares_sum_to_100(self):
        dataset = generate(default_table1_config(5000, seed=9))
        report = macroscopic_report(dataset)
        for effect in (DisruptionEffect.DELAYED, DisruptionEffect.CANCELLED):
            total = sum(
                report.domain_shares_pct[(d, effect)] for d in FunctionalDomain
            )
            assert total == pytest.approx(100.0, abs=0.1)

    def test_cross_tab_total_equals_cardinality(self):
        dataset = generate(default_table1_config(2000, seed=1))
        report = macroscopic_report(dataset)
        assert sum(report.counts.values()) + report.non_disrupted_count == len(dataset)


class TestFilterSubset:
    def test_no_matching_rows(self):
        dataset = FlightDataset(records=(make_record(),))
        subset = filter_subset(dataset, FunctionalDomain.WEATHER, DisruptionEffect.DELAYED)
        assert len(subset) == 0

    def test_filter_preserves_order_and_matches_report_cell(self):
        dataset = generate(default_table1_config(3000, seed=4))
        report = macroscopic_report(dataset)
        subset = filter_subset(dataset, FunctionalDomain.WEATHER, DisruptionEffect.DELAYED)
        assert len(subset) == report.counts[
            (FunctionalDomain.WEATHER, DisruptionEffect.DELAYED)
        ]
        sub_report = macroscopic_report(subset)
        nonzero = {cell for cell, count in sub_report.counts.items() if count}
        assert nonzero == {(FunctionalDomain.WEATHER, DisruptionEffect.DELAYED)}
        # original order preserved
        positions = [i for i, r in enumerate(dataset)
                     if r.functional_domain is FunctionalDomain.WEATHER
                     and r.disruption_effect is DisruptionEffect.DELAYED]
        assert [dataset.records[i] for i in positions] == list(subset.records)


class TestTaxonomy:
    def test_table_feature_classes(self):
        assert descriptor_for("ADJST_TURN_MINS").abstraction_class is AbstractionClass.EPISTEMIC
        assert (
            descriptor_for("ATC Hold at Origin").abstraction_class
            is AbstractionClass.INDETERMINATE_ALEATORIC
        )
        orig_x = descriptor_for("orig_x_dir")
        assert orig_x.abstraction_class is AbstractionClass.DETERMINATE_ALEATORIC
        assert orig_x.category is FeatureCategory.GEOGRAPHICAL

    def test_reference_eighteen_features_covered(self):
        names = {d.name for d in default_descriptors()}
        reference = {
            "sin_date", "cos_date", "orig_x_dir", "orig_y_dir", "orig_z_dir",
            "ONBD_CT", "SCHED_TURN_MINS", "ADJST_TURN_MINS", "schd_acft_type",
            "actl_acft_type", "SWAP_FLT_FLAG", "ATC Hold at Origin",
            "ATC Hold at Destination", "Deicing at Gate", "Ice on Wings",
            "Lightning Strike", "Turbulence", "Hail or Snow Damage",
        }
        assert len(reference) == 18
        assert reference <= names

    def test_names_unique(self):
        descriptors = default_descriptors()
        assert len({d.name for d in descriptors}) == len(descriptors)
