"""Command-line pipeline: synth -> report -> transform -> pca/tsne -> mir/gpr.

Every subcommand writes its artifacts atomically into --outdir together with
a keyed-text manifest (inputs, seeds, version, output hashes). All randomness
derives from one root seed, forked per stage through documented labels, so a
rerun with the same configuration reproduces every byte.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .artifacts import (
    atomic_write_csv,
    format_float,
    read_feature_matrix_csv,
    read_labels_csv,
    sha256_file,
    write_feature_matrix_csv,
    write_labels_csv,
    write_manifest,
)
from .configio import (
    PipelineConfig,
    read_pipeline_config,
    read_synth_config,
    write_scaler_params,
    write_synth_config,
)
from .dimred import TsneParams, active_backend, pca_fit, pca_transform, tsne_embed
from .errors import IropsKitError, ValidationError
from .feature_pipeline import (
    ScalerMethod,
    ShiftSchedule,
    apply_scaler,
    delay_code_labels,
    engineer_features,
    fit_scaler,
)
from .featsel import gpr_fit, gpr_predict, mir_rank, sme_qq
from .flight_data import (
    DISRUPTED_EFFECTS,
    DisruptionEffect,
    DisruptionReport,
    FeatureMatrix,
    FlightDataset,
    FunctionalDomain,
    filter_subset,
    macroscopic_report,
    parse_flight_csv,
    write_flight_csv,
)
from .synth import default_table1_config, generate

#: Stage labels for forking the root seed; fixed, so manifests stay stable.
STAGE_SEED_LABELS = {"synth": 0, "split": 1, "tsne": 2, "gpr": 3, "mi": 4}


def fork_seed(root_seed: int, stage: str) -> int:
    """Derive a stage seed from the root seed and the stage's fixed label."""
    sequence = np.random.SeedSequence([root_seed, STAGE_SEED_LABELS[stage]])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def split_train_test(
    matrix: FeatureMatrix, fraction: float, seed: int
) -> tuple[FeatureMatrix, FeatureMatrix]:
    """Seeded disjoint row split: floor(fraction * n) rows train, rest test."""
    n = matrix.n_rows
    if n < 10:
        raise ValidationError(f"need at least 10 rows to split, got {n}")
    if not 0.0 < fraction < 1.0:
        raise ValidationError("split fraction must lie in (0, 1)")
    rng = np.random.Generator(np.random.PCG64(seed))
    order = rng.permutation(n)
    cut = int(fraction * n)
    if cut == 0 or cut == n:
        raise ValidationError("split leaves one side empty")
    return matrix.take_rows(order[:cut]), matrix.take_rows(order[cut:])


class RunContext:
    """Accumulates manifest entries for one subcommand invocation."""

    def __init__(self, outdir: str, command: str):
        self.outdir = outdir
        self.entries: dict[str, object] = {
            "command": command,
            "version": __version__,
            "tsne_backend": active_backend(),
        }
        os.makedirs(outdir, exist_ok=True)

    def path(self, name: str) -> str:
        return os.path.join(self.outdir, name)

    def param(self, key: str, value) -> None:
        self.entries[f"param.{key}"] = value

    def record_input(self, path) -> None:
        name = os.path.basename(os.fspath(path))
        self.entries[f"input.{name}.sha256"] = sha256_file(path)

    def record_output(self, name: str) -> None:
        self.entries[f"output.{name}.sha256"] = sha256_file(self.path(name))

    def finish(self) -> None:
        write_manifest(self.path("manifest.txt"), self.entries)
        print(f"wrote {self.path('manifest.txt')}")


# ---------------------------------------------------------------- reporting

_EFFECT_HEADERS = ("Delayed", "Cancelled", "Diverted")


def render_report_text(report: DisruptionReport) -> str:
    """Aligned cross-tab: count and share-of-effect percentage per cell."""
    width = max(len(d.value) for d in FunctionalDomain) + 2
    lines = [
        f"{'Functional Domain':<{width}}"
        + "".join(f"{h + ' n (share)':>22}" for h in _EFFECT_HEADERS)
    ]
    for domain in FunctionalDomain:
        cells = []
        for effect in DISRUPTED_EFFECTS:
            count = report.counts[(domain, effect)]
            share = report.domain_shares_pct[(domain, effect)]
            cells.append(f"{count:>13,} ({share:5.1f}%)")
        lines.append(f"{domain.value:<{width}}" + "".join(f"{c:>22}" for c in cells))
    totals = "".join(
        f"{report.effect_totals[e]:>14,}{'':8}" for e in DISRUPTED_EFFECTS
    )
    lines.append(f"{'Total disrupted':<{width}}" + totals)
    lines.append("")
    lines.append(f"Non-disrupted schedules     : {report.non_disrupted_count:,}")
    lines.append(f"Total schedules             : {report.total_records:,}")
    lines.append(
        f"Disrupted share of total    : {report.disrupted_share_of_total_pct:.1f}%"
    )
    lines.append(
        f"Delayed share of disrupted  : {report.delayed_share_of_disrupted_pct:.1f}%"
    )
    return "\n".join(lines)


def write_report_csv(report: DisruptionReport, path) -> None:
    rows = []
    for domain in FunctionalDomain:
        for effect in DISRUPTED_EFFECTS:
            rows.append(
                (
                    domain.value,
                    effect.value,
                    report.counts[(domain, effect)],
                    format_float(report.domain_shares_pct[(domain, effect)]),
                )
            )
    rows.append(("(none)", "None", report.non_disrupted_count, ""))
    atomic_write_csv(path, ("functional_domain", "effect", "count", "share_of_effect_pct"), rows)


# ------------------------------------------------------------- subcommands


def _load_dataset(path) -> FlightDataset:
    dataset = parse_flight_csv(path)
    if dataset.row_errors:
        for error in dataset.row_errors[:10]:
            print(f"warning: line {error.line_no}: {error.message}", file=sys.stderr)
        print(
            f"warning: {len(dataset.row_errors)} row(s) rejected in {path}",
            file=sys.stderr,
        )
    return dataset


def cmd_synth(args) -> int:
    run = RunContext(args.outdir, "synth")
    if args.config:
        config = read_synth_config(args.config)
        run.record_input(args.config)
    else:
        config = default_table1_config(args.n, seed=args.seed)
    if args.n is not None and args.config:
        config = type(config)(**{**config.__dict__, "n_total": args.n})
    if args.seed is not None:
        config = type(config)(**{**config.__dict__, "seed": args.seed})

    dataset = generate(config)
    write_flight_csv(dataset, run.path("flights.csv"))
    write_synth_config(config, run.path("synth_config.txt"))
    run.param("n_total", config.n_total)
    run.entries["seed.synth"] = config.seed
    run.record_output("flights.csv")
    run.record_output("synth_config.txt")
    run.finish()
    return 0


def cmd_report(args) -> int:
    run = RunContext(args.outdir, "report")
    dataset = _load_dataset(args.input)
    run.record_input(args.input)
    report = macroscopic_report(dataset)
    print(render_report_text(report))
    write_report_csv(report, run.path("report.csv"))
    run.record_output("report.csv")
    run.finish()
    return 0


def _parse_domain(text: Optional[str]) -> Optional[FunctionalDomain]:
    if text is None or text.lower() == "none":
        return None
    for domain in FunctionalDomain:
        if domain.value.lower() == text.lower():
            return domain
    raise ValidationError(f"unknown functional domain {text!r}")


def _parse_effect(text: str) -> DisruptionEffect:
    for effect in DisruptionEffect:
        if effect.value.lower() == text.lower():
            return effect
    raise ValidationError(f"unknown disruption effect {text!r}")


def _transform(
    dataset: FlightDataset,
    run: RunContext,
    scaler: ScalerMethod,
    shift_starts: Sequence[int],
    shift_length: int,
    seat_map: Optional[dict[str, int]] = None,
) -> FeatureMatrix:
    schedule = ShiftSchedule(starts=tuple(shift_starts), length=shift_length)
    matrix = engineer_features(dataset, shift_schedule=schedule, seat_map=seat_map)
    labels = delay_code_labels(dataset)

    model = fit_scaler(matrix.values, scaler)
    scaled = FeatureMatrix(
        values=apply_scaler(model, matrix.values),
        descriptors=matrix.descriptors,
        row_ids=matrix.row_ids,
    )
    write_feature_matrix_csv(scaled, run.path("features.csv"))
    write_labels_csv(scaled.row_ids, labels, run.path("labels.csv"))
    write_scaler_params(model, scaled.feature_names, run.path("scaler_params.txt"))
    run.param("scaler", scaler.value)
    run.param("shift_starts", ",".join(str(s) for s in shift_starts))
    run.param("shift_length", shift_length)
    for name in ("features.csv", "labels.csv", "scaler_params.txt"):
        run.record_output(name)
    return scaled


def _read_seat_map(path) -> dict[str, int]:
    import configparser

    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    if not parser.read(path, encoding="utf-8") or "seats" not in parser:
        raise ValidationError(f"{path}: expected a [seats] section")
    return {code: int(v) for code, v in parser["seats"].items()}


def cmd_transform(args) -> int:
    run = RunContext(args.outdir, "transform")
    dataset = _load_dataset(args.input)
    run.record_input(args.input)
    if args.domain or args.effect:
        domain = _parse_domain(args.domain)
        effect = _parse_effect(args.effect or "Delayed")
        dataset = filter_subset(dataset, domain, effect)
        run.param("subset", f"{args.domain}/{args.effect}")
    seat_map = _read_seat_map(args.seat_map) if args.seat_map else None
    if args.seat_map:
        run.record_input(args.seat_map)
    starts = [int(s) for s in args.shift_starts.split(",")]
    _transform(dataset, run, ScalerMethod(args.scaler), starts, args.shift_length, seat_map)
    run.finish()
    return 0


def _attach_labels(matrix: FeatureMatrix, labels_path) -> list[str]:
    if labels_path is None:
        return [""] * matrix.n_rows
    mapping = read_labels_csv(labels_path)
    return [mapping.get(rid, "") for rid in matrix.row_ids]


def cmd_pca(args) -> int:
    run = RunContext(args.outdir, "pca")
    matrix = read_feature_matrix_csv(args.input)
    run.record_input(args.input)
    labels = _attach_labels(matrix, args.labels)
    if args.labels:
        run.record_input(args.labels)

    model = pca_fit(matrix.values, args.dims)
    embedding = pca_transform(model, matrix.values)
    run.param("dims", args.dims)

    dim_names = tuple(f"dim{i + 1}" for i in range(args.dims))
    atomic_write_csv(
        run.path("pca_embedding.csv"),
        ("row_id",) + dim_names + ("label",),
        (
            [matrix.row_ids[i]]
            + [format_float(v) for v in embedding[i]]
            + [labels[i]]
            for i in range(matrix.n_rows)
        ),
    )
    atomic_write_csv(
        run.path("pca_spectrum.csv"),
        ("component", "eigenvalue", "explained_variance_ratio"),
        (
            (i + 1, format_float(model.eigenvalues[i]),
             format_float(model.explained_variance_ratio[i]))
            for i in range(model.n_components)
        ),
    )
    run.record_output("pca_embedding.csv")
    run.record_output("pca_spectrum.csv")
    run.finish()
    return 0


def cmd_tsne(args) -> int:
    run = RunContext(args.outdir, "tsne")
    matrix = read_feature_matrix_csv(args.input)
    run.record_input(args.input)
    labels = _attach_labels(matrix, args.labels)
    if args.labels:
        run.record_input(args.labels)

    params = TsneParams(
        perplexity=args.perplexity, n_iter=args.iters, seed=args.seed
    )
    result = tsne_embed(matrix.values, params)
    run.param("perplexity", args.perplexity)
    run.param("iters", args.iters)
    run.entries["seed.tsne"] = args.seed

    atomic_write_csv(
        run.path("tsne_embedding.csv"),
        ("row_id", "dim1", "dim2", "label"),
        (
            [matrix.row_ids[i]]
            + [format_float(v) for v in result.embedding[i]]
            + [labels[i]]
            for i in range(matrix.n_rows)
        ),
    )
    atomic_write_csv(
        run.path("tsne_kl_trace.csv"),
        ("iteration", "kl"),
        ((it, format_float(kl)) for it, kl in result.kl_trace),
    )
    run.record_output("tsne_embedding.csv")
    run.record_output("tsne_kl_trace.csv")
    run.finish()
    return 0


def _pop_target(matrix: FeatureMatrix, target: str) -> tuple[FeatureMatrix, np.ndarray]:
    if target not in matrix.feature_names:
        raise ValidationError(f"target feature not found: {target!r}")
    y = matrix.column(target)
    return matrix.without_column(target), y


def cmd_mir(args) -> int:
    run = RunContext(args.outdir, "mir")
    matrix = read_feature_matrix_csv(args.input)
    run.record_input(args.input)
    features, target = _pop_target(matrix, args.target)

    seed = fork_seed(args.seed, "mi")
    scores = mir_rank(features, target, k=args.k_neighbors, seed=seed,
                      target_name=args.target)
    run.param("target", args.target)
    run.param("k_neighbors", args.k_neighbors)
    run.entries["seed.root"] = args.seed
    run.entries["seed.mi"] = seed

    atomic_write_csv(
        run.path("mir_scores.csv"),
        ("rank", "feature_name", "mi_nats"),
        (
            (rank + 1, name, format_float(value))
            for rank, (name, value) in enumerate(scores.entries)
        ),
    )
    run.record_output("mir_scores.csv")
    run.finish()
    return 0


def cmd_gpr(args) -> int:
    run = RunContext(args.outdir, "gpr")
    matrix = read_feature_matrix_csv(args.input)
    run.record_input(args.input)
    features, target = _pop_target(matrix, args.target)

    # regression runs on standardized features and target (zero-mean prior)
    x_model = fit_scaler(features.values, ScalerMethod.STANDARD)
    x_std = apply_scaler(x_model, features.values)
    y_model = fit_scaler(target.reshape(-1, 1), ScalerMethod.STANDARD)
    y_std = apply_scaler(y_model, target.reshape(-1, 1)).ravel()

    std_matrix = FeatureMatrix(
        values=np.column_stack([x_std, y_std]),
        descriptors=features.descriptors
        + (matrix.descriptors[matrix.column_index(args.target)],),
        row_ids=features.row_ids,
    )
    split_seed = fork_seed(args.seed, "split")
    train, test = split_train_test(std_matrix, args.split, split_seed)
    x_train, y_train = train.values[:, :-1], train.values[:, -1]
    x_test, y_test = test.values[:, :-1], test.values[:, -1]

    fit_seed = fork_seed(args.seed, "gpr")
    model = gpr_fit(x_train, y_train, restarts=args.restarts, seed=fit_seed)
    pred_mean, pred_var = gpr_predict(model, x_test)
    predictive_var = pred_var + model.noise_var

    rmse = float(np.sqrt(np.mean((pred_mean - y_test) ** 2)))
    within = float(
        np.mean(np.abs(y_test - pred_mean) <= 3.0 * np.sqrt(predictive_var))
    )
    theoretical, observed = sme_qq(pred_mean, predictive_var, y_test)

    atomic_write_csv(
        run.path("gpr_lengthscales.csv"),
        ("lengthscale", "feature_class", "feature_name"),
        (
            (
                format_float(model.lengthscales[j]),
                features.descriptors[j].abstraction_class.value,
                features.descriptors[j].name,
            )
            for j in range(len(features.descriptors))
        ),
    )
    atomic_write_csv(
        run.path("gpr_predictions.csv"),
        ("row_id", "y_test_std", "pred_mean_std", "pred_sd_std"),
        (
            (
                test.row_ids[i],
                format_float(y_test[i]),
                format_float(pred_mean[i]),
                format_float(np.sqrt(predictive_var[i])),
            )
            for i in range(len(y_test))
        ),
    )
    atomic_write_csv(
        run.path("gpr_qq.csv"),
        ("theoretical_quantile", "observed_quantile"),
        (
            (format_float(theoretical[i]), format_float(observed[i]))
            for i in range(len(observed))
        ),
    )

    summary = {
        "target": args.target,
        "n_train": len(y_train),
        "n_test": len(y_test),
        "split_fraction": args.split,
        "seed.root": args.seed,
        "seed.split": split_seed,
        "seed.gpr": fit_seed,
        "restarts": args.restarts,
        "log_marginal_likelihood": format_float(model.log_marginal),
        "rmse_standardized": format_float(rmse),
        "within_3sd_fraction": format_float(within),
        "signal_var": format_float(model.signal_var),
        "noise_var": format_float(model.noise_var),
    }
    write_manifest(run.path("gpr_summary.txt"), summary)

    run.param("target", args.target)
    run.param("split", args.split)
    run.param("restarts", args.restarts)
    run.entries["seed.root"] = args.seed
    for name in ("gpr_lengthscales.csv", "gpr_predictions.csv", "gpr_qq.csv",
                 "gpr_summary.txt"):
        run.record_output(name)
    run.finish()
    print(f"standardized RMSE: {rmse:.4f} (n_test={len(y_test)})")
    return 0


def cmd_pipeline(args) -> int:
    config = read_pipeline_config(args.config)
    if args.outdir:
        config = type(config)(**{**config.__dict__, "outdir": args.outdir})
    if args.seed is not None:
        config = type(config)(**{**config.__dict__, "seed": args.seed})

    run = RunContext(config.outdir, "pipeline")
    run.record_input(args.config)
    run.entries["seed.root"] = config.seed

    # stage 1: data
    if config.input_csv:
        dataset = _load_dataset(config.input_csv)
        run.record_input(config.input_csv)
    else:
        if config.synth_config:
            synth_config = read_synth_config(config.synth_config)
            run.record_input(config.synth_config)
        else:
            synth_config = default_table1_config(
                config.synth_n, seed=fork_seed(config.seed, "synth")
            )
        dataset = generate(synth_config)
        write_flight_csv(dataset, run.path("flights.csv"))
        run.record_output("flights.csv")
        run.entries["seed.synth"] = synth_config.seed

    # stage 2: macroscopic report
    report = macroscopic_report(dataset)
    print(render_report_text(report))
    write_report_csv(report, run.path("report.csv"))
    run.record_output("report.csv")

    # stage 3: subset + transform
    if config.subset_domain is not None:
        subset = filter_subset(dataset, config.subset_domain, config.subset_effect)
        run.param("subset_domain", config.subset_domain.value)
        run.param("subset_effect", config.subset_effect.value)
    else:
        subset = dataset
    matrix = _transform(subset, run, config.scaler, (360, 840, 1320), 480)

    # stage 4: embeddings
    ns = argparse.Namespace
    cmd_pca(ns(outdir=config.outdir, input=run.path("features.csv"),
               labels=run.path("labels.csv"), dims=config.pca_dims))
    cmd_tsne(ns(outdir=config.outdir, input=run.path("features.csv"),
                labels=run.path("labels.csv"), perplexity=config.tsne_perplexity,
                iters=config.tsne_iters, seed=fork_seed(config.seed, "tsne")))

    # stage 5: feature selection
    cmd_mir(ns(outdir=config.outdir, input=run.path("features.csv"),
               target=config.target, k_neighbors=config.mir_k, seed=config.seed))
    cmd_gpr(ns(outdir=config.outdir, input=run.path("features.csv"),
               target=config.target, split=config.split_fraction,
               restarts=config.gpr_restarts, seed=config.seed))

    for name in ("pca_embedding.csv", "pca_spectrum.csv", "tsne_embedding.csv",
                 "tsne_kl_trace.csv", "mir_scores.csv", "gpr_lengthscales.csv",
                 "gpr_predictions.csv", "gpr_qq.csv", "gpr_summary.txt"):
        run.record_output(name)
    run.param("scaler", config.scaler.value)
    run.param("target", config.target)
    run.param("split_fraction", config.split_fraction)
    run.finish()
    return 0


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iropskit",
        description="Exploratory analysis pipeline for airline disruption data.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic flight-schedule CSV")
    p.add_argument("--n", type=int, default=None, help="number of records")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config", help="generator config (keyed text)")
    p.add_argument("--outdir", default="synth_out")
    p.set_defaults(func=cmd_synth, default_n=20_000)

    p = sub.add_parser("report", help="macroscopic disruption report")
    p.add_argument("--input", required=True, help="flight CSV")
    p.add_argument("--outdir", default="report_out")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("transform", help="engineer and scale features")
    p.add_argument("--input", required=True, help="flight CSV")
    p.add_argument("--scaler", choices=[m.value for m in ScalerMethod],
                   default="standard")
    p.add_argument("--domain", help="restrict to one functional domain")
    p.add_argument("--effect", help="restrict to one disruption effect")
    p.add_argument("--shift-starts", default="360,840,1320",
                   help="comma-separated shift start minutes")
    p.add_argument("--shift-length", type=int, default=480)
    p.add_argument("--seat-map", help="keyed text file with a [seats] section")
    p.add_argument("--outdir", default="transform_out")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("pca", help="principal component embedding")
    p.add_argument("--input", required=True, help="feature-matrix CSV")
    p.add_argument("--dims", type=int, default=2)
    p.add_argument("--labels", help="row_id,label CSV for plot colouring")
    p.add_argument("--outdir", default="pca_out")
    p.set_defaults(func=cmd_pca)

    p = sub.add_parser("tsne", help="t-SNE embedding")
    p.add_argument("--input", required=True, help="feature-matrix CSV")
    p.add_argument("--perplexity", type=float, default=30.0)
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--labels", help="row_id,label CSV for plot colouring")
    p.add_argument("--outdir", default="tsne_out")
    p.set_defaults(func=cmd_tsne)

    p = sub.add_parser("mir", help="mutual-information feature ranking")
    p.add_argument("--input", required=True, help="feature-matrix CSV")
    p.add_argument("--target", default="ACTL_TURN_MINS")
    p.add_argument("--k-neighbors", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--outdir", default="mir_out")
    p.set_defaults(func=cmd_mir)

    p = sub.add_parser("gpr", help="Gaussian-process turnaround regression")
    p.add_argument("--input", required=True, help="feature-matrix CSV")
    p.add_argument("--target", default="ACTL_TURN_MINS")
    p.add_argument("--split", type=float, default=0.7)
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--outdir", default="gpr_out")
    p.set_defaults(func=cmd_gpr)

    p = sub.add_parser("pipeline", help="run every stage from one config file")
    p.add_argument("--config", required=True, help="pipeline config (keyed text)")
    p.add_argument("--outdir", default=None, help="override the config outdir")
    p.add_argument("--seed", type=int, default=None, help="override the root seed")
    p.set_defaults(func=cmd_pipeline)

    return parser


def run_subcommand(argv: Optional[Sequence[str]] = None) -> int:
    """Dispatch one CLI invocation; returns the process exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage error (or --help)
        return int(exc.code or 0)
    if getattr(args, "command", None) == "synth" and args.n is None and not args.config:
        args.n = args.default_n
    try:
        return args.func(args)
    except IropsKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_subcommand())


if __name__ == "__main__":
    main()
