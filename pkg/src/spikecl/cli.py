"""Command-line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 numerical failure (non-finite state or gradient, failed identity check).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from .checks import format_table, run_suite
from .config import OUTPUT_DIR_ENV, ConfigError, RunConfig, load_config
from .curriculum import CurriculumMode
from .data import (
    DataError,
    generate_synthetic,
    inject_noise,
    load_multivariate_csv,
    load_ucr_tsv,
    normalize,
    save_multivariate_csv,
    save_ucr_tsv,
)
from .encoding import (
    EncoderConfig,
    EncodingMode,
    drive_mask,
    encode,
    encode_dataset,
    encoder_from_dict,
    fit_partition,
    reduce_variables,
)
from .harness import build_encoder, build_model, compare_orders, run_experiment
from .learning import evaluate, load_checkpoint
from .metrics import auc_roc

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _output_dir(flag: Optional[str], config: Optional[RunConfig] = None, default: str = "results") -> Path:
    if flag:
        return Path(flag)
    if config is not None:
        return config.output_dir
    return Path(os.environ.get(OUTPUT_DIR_ENV) or default)


def _load_data(path: str, fmt: str):
    if not Path(path).exists():
        raise DataError(f"dataset file not found: {path}")
    if fmt == "auto":
        fmt = "csv" if Path(path).is_dir() else "ucr"
    return load_multivariate_csv(path) if fmt == "csv" else load_ucr_tsv(path)


def cmd_train(args) -> int:
    config = load_config(args.config, args.set)
    out = _output_dir(args.output, config)
    report = run_experiment(config, output_dir=out, jobs=args.jobs)
    lo, hi = report.auc_ci
    print(f"mode={report.mode} auc={report.auc:.4f}+-{report.auc_std:.4f} ci=[{lo:.3f}, {hi:.3f}] "
          f"afp={report.firing.afp:.4f} sparsity={report.firing.sparsity_ratio:.3f} runs={len(report.runs)}")
    print(f"results written to {out}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    model, extra = load_checkpoint(args.checkpoint)
    if "encoder" not in extra:
        raise ConfigError(f"{args.checkpoint}: checkpoint carries no encoder description")
    ds = _load_data(args.data, args.format)
    ds_n, _ = normalize(ds, tuple(extra["bounds"]))
    data = encode_dataset(ds_n, encoder_from_dict(extra["encoder"]))
    report, firing = evaluate(model, data)
    result = {
        "n_samples": len(ds),
        "mean_loss": report.mean_loss,
        "accuracy": report.accuracy,
        "afp": firing.afp,
        "sparsity": firing.sparsity_ratio,
    }
    if len(np.unique(report.labels)) > 1:
        result["auc"] = auc_roc(report.probabilities, report.labels)
    print(json.dumps(result, indent=1))
    if args.output:
        Path(args.output).mkdir(parents=True, exist_ok=True)
        (Path(args.output) / "evaluation.json").write_text(json.dumps(result, indent=1) + "\n")
    return EXIT_OK


def cmd_encode(args) -> int:
    ds = _load_data(args.data, args.format)
    ds_n, _ = normalize(ds)
    mode = EncodingMode.parse(args.mode)
    partition = fit_partition(ds_n, args.intervals, args.cluster_size)
    if mode is EncodingMode.REGIONAL:
        enc = EncoderConfig.regional(partition, width_factor=args.width_factor, gain=args.gain)
    else:
        lo, hi = partition.boundaries[0], partition.boundaries[-1]
        enc = EncoderConfig.population(partition.n_input, lo, hi, width_factor=args.width_factor, gain=args.gain)
    out = _output_dir(args.output, default="encoded")
    out.mkdir(parents=True, exist_ok=True)
    (out / "partition.txt").write_text("\n".join(repr(float(b)) for b in partition.boundaries) + "\n")
    with (out / "index.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample", "label", "steps", "spikes_file", "drive_file"])
        for i, sample in enumerate(ds_n.samples):
            tensor = encode(sample, enc)
            mask = drive_mask(reduce_variables(sample.values), enc)
            spikes_file, drive_file = f"spikes_{i:05d}.npy", f"drive_{i:05d}.npy"
            np.save(out / spikes_file, tensor.spikes)
            np.save(out / drive_file, mask)
            np.save(out / f"timestamps_{i:05d}.npy", np.asarray(sample.timestamps, dtype=float))
            writer.writerow([i, sample.label, tensor.steps, spikes_file, drive_file])
    print(f"encoded {len(ds_n)} samples ({enc.mode.value}, {enc.n_input} neurons) into {out}")
    return EXIT_OK


def cmd_gen_data(args) -> int:
    kwargs = {} if args.noise is None else {"noise": args.noise}
    ds = generate_synthetic(args.kind, args.n, args.length, seed=args.seed, label_noise=args.label_noise, **kwargs)
    if args.format == "csv":
        save_multivariate_csv(ds, args.output)
    else:
        Path(args.output).parent.mkdir(parents=True, exist_ok=True)
        save_ucr_tsv(ds, args.output)
    print(f"wrote {len(ds)} samples, {ds.n_classes} classes to {args.output}")
    return EXIT_OK


def cmd_inject_noise(args) -> int:
    ds = _load_data(args.data, args.format)
    if args.activity:
        activity = np.loadtxt(args.activity, dtype=float, ndmin=1)
        if activity.size != len(ds):
            raise DataError(f"{args.activity}: {activity.size} activity values for {len(ds)} samples")
    else:
        config = load_config(args.config, args.set)
        ds_n, _ = normalize(ds)
        model = build_model(config, ds.n_classes, args.seed)
        report, _ = evaluate(model, encode_dataset(ds_n, build_encoder(config, ds_n)))
        activity = report.activity
    noisy = inject_noise(ds, args.fraction, args.snr_db, activity, seed=args.seed)
    if args.format == "csv" or (args.format == "auto" and Path(args.data).is_dir()):
        save_multivariate_csv(noisy, args.output)
    else:
        save_ucr_tsv(noisy, args.output)
    print(f"noise at {args.snr_db} dB added to {int(round(args.fraction * len(ds)))} of {len(ds)} samples -> {args.output}")
    return EXIT_OK


def cmd_check_theorems(args) -> int:
    outcomes = run_suite(args.seeds, args.seed)
    print(format_table(outcomes))
    failed = [o for o in outcomes if o.hard and not o.passed]
    return EXIT_NUMERIC if failed else EXIT_OK


def cmd_compare_orders(args) -> int:
    config = load_config(args.config, args.set)
    modes = [m.strip() for m in args.modes.split(",") if m.strip()]
    seeds = list(range(config.experiment.seed, config.experiment.seed + args.seeds)) if args.seeds else None
    baseline = [m.strip() for m in args.baseline.split(",") if m.strip()] if args.baseline else None
    out = _output_dir(args.output, config)
    cmp = compare_orders(config, modes, seeds, baseline, jobs=args.jobs, output_dir=out)
    for mode, rep in list(cmp.reports.items()) + [(f"dense:{m}", r) for m, r in cmp.baseline.items()]:
        print(f"{mode:<12} auc={rep.auc:.4f}+-{rep.auc_std:.4f} afp={rep.firing.afp:.4f} runs={len(rep.runs)}")
    first = CurriculumMode.parse(modes[0]).value
    for other in modes[1:]:
        other = CurriculumMode.parse(other).value
        print(f"sign test {first} > {other}: p={cmp.sign_test(first, other):.4f}")
    print(f"results written to {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spikecl", description="Spiking recurrent networks for time-series classification.")
    parser.add_argument("--jobs", type=int, default=None, help="parallel worker processes for folds and seeds")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def with_config(p, required=True):
        p.add_argument("--config", required=required, help="INI run configuration")
        p.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE", help="override a config key")

    def with_output(p, help_text):
        p.add_argument("--output", default=None, help=f"{help_text} (default: ${OUTPUT_DIR_ENV} or the config value)")

    def with_data(p):
        p.add_argument("--data", required=True, help="UCR TSV file or directory of multivariate CSV files")
        p.add_argument("--format", choices=("auto", "ucr", "csv"), default="auto", help="input format")

    p = sub.add_parser("train", help="run the configured experiment and write reports")
    with_config(p)
    with_output(p, "output directory")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score a saved checkpoint on a dataset")
    p.add_argument("--checkpoint", required=True, help="checkpoint written by train")
    with_data(p)
    with_output(p, "directory for evaluation.json")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("encode", help="encode a dataset into spike tensors")
    with_data(p)
    p.add_argument("--mode", default="Regional", help="Population or Regional")
    p.add_argument("--intervals", type=int, default=5, help="number of value intervals M")
    p.add_argument("--cluster-size", type=int, default=16, help="encoder neurons per interval")
    p.add_argument("--gain", type=float, default=1.0, help="peak input current of a tuning curve")
    p.add_argument("--width-factor", type=float, default=3.0, help="tuning width in units of centre spacing")
    with_output(p, "output directory")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("gen-data", help="write a synthetic dataset")
    p.add_argument("--kind", default="CbfLike", help="TwoClassFreq or CbfLike")
    p.add_argument("--n", type=int, default=30, help="samples per class")
    p.add_argument("--length", type=int, default=128, help="series length")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--noise", type=float, default=None, help="observation noise std")
    p.add_argument("--label-noise", type=float, default=0.0, help="fraction of flipped labels")
    p.add_argument("--format", choices=("ucr", "csv"), default="ucr", help="output format")
    p.add_argument("--output", required=True, help="output TSV file or CSV directory")
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("inject-noise", help="add Gaussian noise to the most active samples")
    with_data(p)
    p.add_argument("--fraction", type=float, default=0.2, help="fraction of most active samples to perturb")
    p.add_argument("--snr-db", type=float, default=20.0, help="signal-to-noise ratio in dB")
    p.add_argument("--seed", type=int, default=0, help="noise and network seed")
    p.add_argument("--activity", default=None, help="file with one activity value per sample")
    with_config(p, required=False)
    p.add_argument("--output", required=True, help="output TSV file or CSV directory")
    p.set_defaults(func=cmd_inject_noise)

    p = sub.add_parser("check-theorems", help="run the numerical verification suite")
    p.add_argument("--seeds", type=int, default=1000, help="Monte-Carlo instances per check")
    p.add_argument("--seed", type=int, default=0, help="root seed")
    p.set_defaults(func=cmd_check_theorems)

    p = sub.add_parser("compare-orders", help="train several training orders on paired seeds")
    with_config(p)
    p.add_argument("--modes", default="A2D,Random,D2A", help="comma-separated training orders")
    p.add_argument("--seeds", type=int, default=None, help="number of paired seeds (default from config)")
    p.add_argument("--baseline", default=None, help="orders for the dense baseline, e.g. E2H,H2E")
    with_output(p, "output directory")
    p.set_defaults(func=cmd_compare_orders)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", None) is not None and args.jobs < 1:
        parser.error("--jobs must be at least 1")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FloatingPointError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
