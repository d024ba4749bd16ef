#!/usr/bin/env python3
"""
Command-line interface for the lab.

Usage:
    sparsehead-lab --config runs/linear.yaml train
    sparsehead-lab spectrum out/checkpoint.sphd data/test.tds out/spectrum.csv
    sparsehead-lab eval out/checkpoint.sphd data/train.tds data/test.tds
    sparsehead-lab --config runs/linear.yaml align out/checkpoint.sphd
    sparsehead-lab --seed 0 concentration --dims 2,8,32,128 --n 100 --trials 20
    sparsehead-lab --seed 3 synth data/world.tds --world world.yaml --n 4096
    sparsehead-lab import-raw data/train.tds raw/data_batch_1.bin raw/data_batch_2.bin
    sparsehead-lab study sparsity-sweep --seeds 0,1,2 --steps 500

Exit codes: 0 success, 2 usage or configuration error, 3 numerical or I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from . import __version__
from .analysis import concentration_curve, gte_alignment, write_spectrum_csv
from .datagen import Dataset, ImageLayout, import_raw_images, load_tds, sample_dataset, sample_world, write_tds
from .errors import (
    AssumptionInfeasibleError,
    ConfigError,
    DegenerateInputError,
    DegenerateTaskError,
    DimensionError,
    DivergenceError,
    FormatError,
    InsufficientDataError,
    LabError,
    NonFiniteError,
    NumericError,
    ParameterError,
    SpecError,
    UnsupportedError,
)
from .evaluation import KnnMetric, eval_probe, knn_accuracy, train_probe
from .experiment import SyntheticSource, WorldModel, load_dataset, load_experiment, read_document
from .models import ModelState, load_checkpoint, save_checkpoint
from .studies import STUDIES, StudySetup, gte_setup, scaled
from .telemetry import ConsoleSink, JsonlFileSink, RecordSink
from .trainer import diagnostic_indices, embed, snapshot_diagnostics, train

try:
    from colorama import Fore, Style
    from colorama import init as colorama_init
    colorama_init()
    COLOR_ENABLED = True
except ImportError:
    COLOR_ENABLED = False

    class Fore:  # type: ignore[no-redef]
        CYAN = YELLOW = GREEN = RED = ""

    class Style:  # type: ignore[no-redef]
        RESET_ALL = BRIGHT = ""


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RUNTIME = 3

USAGE_ERRORS: tuple[type[BaseException], ...] = (
    ValidationError,
    ConfigError,
    DegenerateInputError,
    FormatError,
    SpecError,
    ParameterError,
    InsufficientDataError,
    DegenerateTaskError,
    AssumptionInfeasibleError,
    UnsupportedError,
    DimensionError,
    FileNotFoundError,
)
RUNTIME_ERRORS: tuple[type[BaseException], ...] = (DivergenceError, NumericError, NonFiniteError)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
DEFAULT_DIMS = (2, 4, 8, 16, 32, 64, 128, 256, 512, 1024)


def colorize(text: str, color: str) -> str:
    """Apply color if available."""
    if COLOR_ENABLED:
        return f"{color}{text}{Style.RESET_ALL}"
    return text


def print_json(data: Any, indent: int | None = 2) -> None:
    print(json.dumps(data, indent=indent))


def error(message: str) -> None:
    print(colorize(f"error: {message}", Fore.RED), file=sys.stderr)


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'") from e


def _require_config(args: argparse.Namespace) -> str:
    if not args.config:
        raise ConfigError(f"'{args.command}' needs --config PATH")
    return str(args.config)


def _check_input_dim(model: ModelState, dataset: Dataset, what: str) -> None:
    expected = model.encoder_spec.input_dim
    if dataset.dim != expected:
        raise ConfigError(f"{what} has dimension {dataset.dim}, checkpoint encoder expects {expected}")


def _labeled(dataset: Dataset, what: str) -> Dataset:
    if not dataset.labeled:
        raise ConfigError(f"{what} has no labels")
    return dataset


def _world_source(args: argparse.Namespace) -> SyntheticSource:
    """World spec from --world, else the experiment's synthetic source, else defaults."""
    if getattr(args, "world", None):
        source = SyntheticSource(world=WorldModel.model_validate(read_document(args.world)))
    elif args.config:
        exp = load_experiment(args.config, args.out)
        if not isinstance(exp.dataset, SyntheticSource):
            raise ConfigError(f"'{args.command}' needs a synthetic dataset source in {args.config}")
        source = exp.dataset
    else:
        source = SyntheticSource()

    updates: dict[str, Any] = {}
    if args.seed is not None:
        updates["world_seed"] = args.seed
    if getattr(args, "n", None) is not None:
        updates["n"] = args.n
    if getattr(args, "data_seed", None) is not None:
        updates["data_seed"] = args.data_seed
    return SyntheticSource.model_validate({**source.model_dump(), **updates})


def cmd_train(args: argparse.Namespace) -> int:
    """Train from an experiment document; writes checkpoint, metrics JSONL and spectrum CSV."""
    exp = load_experiment(_require_config(args), args.out)
    lab = exp.to_lab_config()
    if args.log_level is None:
        logging.getLogger().setLevel(lab.logging.level)

    out_dir = Path(args.out or exp.output_dir)
    dataset, world = load_dataset(exp.dataset)
    config = exp.to_train_config(input_dim=dataset.dim, seed=args.seed)

    out_dir.mkdir(parents=True, exist_ok=True)
    metrics_path = out_dir / lab.output.metrics_name
    sinks: list[RecordSink] = [JsonlFileSink(str(metrics_path))]
    if lab.telemetry.console_enabled:
        sinks.append(ConsoleSink(format=lab.telemetry.console_format))

    model, record = train(config, dataset, world=world, sinks=sinks)

    checkpoint_path = out_dir / lab.output.checkpoint_name
    save_checkpoint(model, checkpoint_path)
    diag_rows = dataset.features[diagnostic_indices(dataset.n, config.eval_size, config.seed)]
    diagnostics = snapshot_diagnostics(model, diag_rows)
    spectrum_path = out_dir / lab.output.spectrum_name
    write_spectrum_csv(diagnostics.spectrum, spectrum_path)

    final = record.final_event
    print_json({
        **exp.summary(),
        "config_hash": record.config_hash,
        "seed": config.seed,
        "steps": len(record.steps),
        "final": final.to_dict() if final else None,
        "checkpoint": str(checkpoint_path),
        "metrics": str(metrics_path),
        "spectrum": str(spectrum_path),
    })
    return EXIT_OK


def cmd_spectrum(args: argparse.Namespace) -> int:
    """Covariance spectra of a checkpoint's representations and embeddings on a dataset."""
    model = load_checkpoint(args.checkpoint)
    dataset = load_tds(args.dataset)
    _check_input_dim(model, dataset, args.dataset)

    diagnostics = snapshot_diagnostics(model, dataset)
    write_spectrum_csv(diagnostics.spectrum, args.output)
    print_json({**diagnostics.spectrum.summary(), "output": str(args.output)})
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    """Linear-probe and kNN accuracy on frozen representations."""
    model = load_checkpoint(args.checkpoint)
    train_set = _labeled(load_tds(args.train), args.train)
    test_set = _labeled(load_tds(args.test), args.test)
    _check_input_dim(model, train_set, args.train)
    _check_input_dim(model, test_set, args.test)

    r_train, _ = embed(model, train_set.features)
    r_test, _ = embed(model, test_set.features)
    assert train_set.labels is not None and test_set.labels is not None
    n_classes = max(train_set.n_classes, test_set.n_classes)

    probe = train_probe(
        r_train,
        train_set.labels,
        iters=args.probe_iters,
        lr=args.probe_lr,
        seed=args.seed or 0,
        n_classes=n_classes,
        standardize=args.standardize,
    )
    print_json({
        "linear_acc": eval_probe(probe, r_test, test_set.labels),
        "knn_acc": knn_accuracy(r_train, train_set.labels, r_test, test_set.labels, k=args.k, metric=args.metric),
    })
    return EXIT_OK


def cmd_align(args: argparse.Namespace) -> int:
    """
    MCC between a checkpoint's representations and a world's ground-truth latents.

    Sampled datasets keep their latents; the linear inverse is only a fallback.
    """
    model = load_checkpoint(args.checkpoint)
    source = _world_source(args)
    world = sample_world(source.world.to_world_config(), source.world_seed)
    dataset = sample_dataset(world, source.n, source.data_seed)
    _check_input_dim(model, dataset, "world observations")

    learned, _ = embed(model, dataset.features)
    truth = dataset.latents if dataset.latents is not None else world.gt_representation(dataset.features)
    report = gte_alignment(learned, truth)
    print_json({"world_seed": source.world_seed, "data_seed": source.data_seed, "n": source.n, **report.to_dict()})
    return EXIT_OK


def cmd_concentration(args: argparse.Namespace) -> int:
    """Mean min-max ratio of i.i.d. Gaussian points against dimension, as CSV."""
    curve = concentration_curve(args.dims, args.n, args.trials, args.seed or 0)

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["d", "mean_M"])
    for point in curve:
        writer.writerow([point.d, repr(point.mean_m)])
    text = buffer.getvalue()

    if args.out:
        path = Path(args.out) / "concentration.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.info(f"Wrote {path}")
    sys.stdout.write(text)
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    """Sample a synthetic world and write its observations and labels as TDS."""
    source = _world_source(args)
    world = sample_world(source.world.to_world_config(), source.world_seed)
    dataset = sample_dataset(world, source.n, source.data_seed)
    write_tds(dataset, args.output)
    print_json({
        "output": str(args.output),
        "n": dataset.n,
        "dim": dataset.dim,
        "n_classes": dataset.n_classes,
        "world_seed": source.world_seed,
        "data_seed": source.data_seed,
    })
    return EXIT_OK


def cmd_import_raw(args: argparse.Namespace) -> int:
    """Convert raw image-batch files into one TDS file."""
    dataset = import_raw_images(args.inputs, args.layout)
    write_tds(dataset, args.output)
    print_json({"output": str(args.output), "n": dataset.n, "dim": dataset.dim, "n_classes": dataset.n_classes})
    return EXIT_OK


def cmd_study(args: argparse.Namespace) -> int:
    """Run a multi-seed study and print its report."""
    study = STUDIES[args.name]
    kwargs: dict[str, Any] = {}
    if args.seeds:
        kwargs["seeds"] = args.seeds
    if args.steps is not None:
        base = gte_setup() if args.name == "gte-recovery" else StudySetup()
        kwargs["setup"] = scaled(base, steps=args.steps)

    report = study(**kwargs)
    data = report.to_dict()
    if args.out:
        path = Path(args.out) / f"{args.name}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
        logger.info(f"Wrote {path}")
    print_json(data)
    status = colorize("passed", Fore.GREEN) if report.passed else colorize("not passed", Fore.YELLOW)
    print(f"{args.name}: {status}", file=sys.stderr)
    return EXIT_OK


COMMANDS = {
    "train": cmd_train,
    "spectrum": cmd_spectrum,
    "eval": cmd_eval,
    "align": cmd_align,
    "concentration": cmd_concentration,
    "synth": cmd_synth,
    "import-raw": cmd_import_raw,
    "study": cmd_study,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparsehead-lab",
        description="Contrastive learning lab with L2,1-sparse projection heads",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", "-c", default=None, help="Experiment document (.json, .yaml, .yml)")
    parser.add_argument("--seed", type=int, default=None, help="Override the run or world seed")
    parser.add_argument("--out", default=None, help="Override the output directory")
    parser.add_argument(
        "--log-level",
        default=None,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level (default: from config, else INFO)",
    )

    subparsers = parser.add_subparsers(dest="command", help="Commands")

    subparsers.add_parser("train", help="Train from the --config experiment")

    spectrum_parser = subparsers.add_parser("spectrum", help="Write the covariance spectra of a checkpoint")
    spectrum_parser.add_argument("checkpoint", help="SPHD checkpoint")
    spectrum_parser.add_argument("dataset", help="TDS dataset")
    spectrum_parser.add_argument("output", help="CSV to write")

    eval_parser = subparsers.add_parser("eval", help="Linear-probe and kNN accuracy")
    eval_parser.add_argument("checkpoint", help="SPHD checkpoint")
    eval_parser.add_argument("train", help="Labeled TDS used to fit the probe and kNN index")
    eval_parser.add_argument("test", help="Labeled TDS to score")
    eval_parser.add_argument("--k", type=int, default=5, help="kNN neighbours (default: 5)")
    eval_parser.add_argument("--metric", type=KnnMetric, default=KnnMetric.COSINE, choices=list(KnnMetric))
    eval_parser.add_argument("--probe-iters", type=int, default=500)
    eval_parser.add_argument("--probe-lr", type=float, default=0.1)
    eval_parser.add_argument("--standardize", action="store_true", help="Standardize probe features")

    align_parser = subparsers.add_parser("align", help="MCC against a synthetic world's latents")
    align_parser.add_argument("checkpoint", help="SPHD checkpoint")
    align_parser.add_argument("--world", default=None, help="World spec document (default: --config source)")
    align_parser.add_argument("--n", type=int, default=None, help="Samples to align on")
    align_parser.add_argument("--data-seed", type=int, default=None)

    conc_parser = subparsers.add_parser("concentration", help="Min-max ratio against dimension")
    conc_parser.add_argument("--dims", type=_int_list, default=list(DEFAULT_DIMS), help="Comma-separated dimensions")
    conc_parser.add_argument("--n", type=int, default=100, help="Points per trial")
    conc_parser.add_argument("--trials", type=int, default=20)

    synth_parser = subparsers.add_parser("synth", help="Write a synthetic world's data as TDS")
    synth_parser.add_argument("output", help="TDS to write")
    synth_parser.add_argument("--world", default=None, help="World spec document (default: --config source)")
    synth_parser.add_argument("--n", type=int, default=None)
    synth_parser.add_argument("--data-seed", type=int, default=None)

    raw_parser = subparsers.add_parser("import-raw", help="Convert raw image batches to TDS")
    raw_parser.add_argument("output", help="TDS to write")
    raw_parser.add_argument("inputs", nargs="+", help="Raw image-batch files")
    raw_parser.add_argument("--layout", type=ImageLayout, default=ImageLayout.CIFAR10, choices=list(ImageLayout))

    study_parser = subparsers.add_parser("study", help="Run a multi-seed study")
    study_parser.add_argument("name", choices=sorted(STUDIES))
    study_parser.add_argument("--seeds", type=_int_list, default=None, help="Comma-separated seeds")
    study_parser.add_argument("--steps", type=int, default=None, help="Training steps per run")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(level=args.log_level or logging.INFO, format=LOG_FORMAT)

    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_USAGE

    try:
        return COMMANDS[args.command](args)
    except USAGE_ERRORS as e:
        error(str(e))
        return EXIT_USAGE
    except RUNTIME_ERRORS as e:
        error(str(e))
        return EXIT_RUNTIME
    except OSError as e:
        error(f"I/O failure: {e}")
        return EXIT_RUNTIME
    except LabError as e:
        error(f"{type(e).__name__}: {e}")
        return EXIT_RUNTIME


def run() -> None:
    """Console-script entry point."""
    sys.exit(main())


if __name__ == "__main__":
    run()
