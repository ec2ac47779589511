"""Command-line entry point.

Subcommands: synth (generate a synthetic CSV), augment (one-shot
augmentation of a series file), spectrum (amplitude-spectrum dump),
train (fit one model, save a checkpoint), run (config-driven protocol
dispatch). Every `run` writes a manifest.json with the fully resolved
configuration so the run is reproducible.
"""

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .augment import ALL_KINDS, AugmentSpec, apply_augment
from .dataset import (SPLIT_SCHEMES, WindowSample, load_csv, make_windows,
                      split_and_normalize)
from .forecaster import DLinearModel, TrainConfig, evaluate, train
from .experiments import run_coldstart, run_longterm, run_ttt
from .spectral import amplitude_spectrum, rfft
from .synth import SynthSpec, generate, write_csv


def _parse_tones(text):
    tones = []
    for part in text.split(","):
        period, _, amp = part.partition(":")
        tones.append((float(period), float(amp) if amp else 1.0))
    return tones


def cmd_synth(args):
    spec = SynthSpec(
        length=args.length, channels=args.channels,
        tones=_parse_tones(args.tones), noise_std=args.noise,
        trend_slope=args.trend, shift_at=args.shift_at,
        shift_delta=args.shift_delta, seed=args.seed,
    )
    write_csv(generate(spec), args.out)
    print(f"wrote {args.out}")
    return 0


def _series_as_window(ds):
    # Whole series as one window: first half look-back, rest horizon.
    b = ds.length // 2
    return WindowSample(
        lookback=ds.values[:, :b].copy(),
        horizon=ds.values[:, b:].copy(),
    ), b


def cmd_augment(args):
    ds = load_csv(args.infile, date_column=args.date_column)
    sample, b = _series_as_window(ds)
    spec = AugmentSpec(kind=args.kind, rate=args.rate, seed=args.seed)
    rng = np.random.default_rng(args.seed)
    partner = None
    if args.kind in ("freq_mix", "freq_mask_then_mix"):
        # Self-mix with a shifted copy: roll the series by a quarter.
        shift = ds.length // 4
        rolled = np.roll(ds.values, shift, axis=1)
        partner = WindowSample(lookback=rolled[:, :b].copy(),
                               horizon=rolled[:, b:].copy())
    out = apply_augment(sample, spec, rng, partner=partner)
    write_csv(out.concat(), args.out)
    print(f"wrote {args.out}")
    if args.dump_spectrum:
        _dump_spectrum(ds.values, out.concat(), ds.channel_names, args.dump_spectrum)
        print(f"wrote {args.dump_spectrum}")
    return 0


def _dump_spectrum(original, augmented, names, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["bin"]
        for name in names:
            header += [f"{name}_original", f"{name}_augmented"]
        writer.writerow(header)
        amps_orig = [amplitude_spectrum(rfft(original[c])) for c in range(len(names))]
        amps_aug = [amplitude_spectrum(rfft(augmented[c])) for c in range(len(names))]
        for k in range(len(amps_orig[0])):
            row = [k]
            for c in range(len(names)):
                row += [repr(amps_orig[c][k]), repr(amps_aug[c][k])]
            writer.writerow(row)


def cmd_spectrum(args):
    ds = load_csv(args.infile, date_column=args.date_column)
    _dump_spectrum(ds.values, ds.values, ds.channel_names, args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_train(args):
    ds = split_and_normalize(load_csv(args.dataset, date_column=args.date_column),
                             scheme=args.scheme)
    train_samples = make_windows(ds, "train", args.lookback, args.horizon)
    val_samples = make_windows(ds, "val", args.lookback, args.horizon)
    cfg = TrainConfig(seed=args.seed, max_epochs=args.epochs)
    model = DLinearModel.init_random(args.lookback, args.horizon, seed=args.seed)
    aug = None
    if args.kind != "none":
        aug = AugmentSpec(kind=args.kind, rate=args.rate, seed=args.seed)
    model, trace = train(model, train_samples, val_samples, cfg, aug=aug)
    test = evaluate(model, make_windows(ds, "test", args.lookback, args.horizon))
    model.save(args.out)
    print(f"test MSE {test.mse:.4f} MAE {test.mae:.4f}; checkpoint -> {args.out}")
    return 0


DEFAULT_CONFIG = {
    "protocol": "longterm",
    "dataset": None,
    "date_column": "date",
    "scheme": "generic",
    "lookback": 96,
    "horizons": [96],
    "kinds": ["freq_mask"],
    "rate": 0.2,
    "rate_grid": [0.1, 0.2, 0.3, 0.4, 0.5],
    "select_rates": False,
    "fraction": 0.01,
    "factors": [2, 50],
    "parts": 20,
    "seeds": [0],
    "epochs": 20,
    "out": "runs/run",
}


def cmd_run(args):
    config = dict(DEFAULT_CONFIG)
    if args.config:
        with open(args.config) as fh:
            loaded = json.load(fh)
        unknown = set(loaded) - set(DEFAULT_CONFIG)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        config.update(loaded)
    # Flag overrides win over file values.
    for key in ("protocol", "dataset", "scheme", "rate", "out"):
        value = getattr(args, key, None)
        if value is not None:
            config[key] = value
    if args.horizon is not None:
        config["horizons"] = [args.horizon]
    if args.kind is not None:
        config["kinds"] = [args.kind]
    if args.seed is not None:
        config["seeds"] = [args.seed]
    if args.fraction is not None:
        config["fraction"] = args.fraction
    if config["dataset"] is None:
        raise ValueError("no dataset configured (use --dataset or a config file)")

    ds = split_and_normalize(load_csv(config["dataset"],
                                      date_column=config["date_column"]),
                             scheme=config["scheme"])
    out_dir = Path(config["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {"config": config, "version": __version__}
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2))

    cfg = TrainConfig(max_epochs=config["epochs"])
    dataset_id = Path(config["dataset"]).stem
    protocol = config["protocol"]
    common = dict(b=config["lookback"], seeds=tuple(config["seeds"]),
                  cfg=cfg, dataset_id=dataset_id)
    if protocol == "longterm":
        report = run_longterm(ds, config["horizons"], config["kinds"],
                              rate_grid=tuple(config["rate_grid"]),
                              select_rates=config["select_rates"],
                              fixed_rate=config["rate"], **common)
    elif protocol == "coldstart":
        report = run_coldstart(ds, config["horizons"][0], config["kinds"],
                               fraction=config["fraction"],
                               factors=tuple(config["factors"]),
                               rate=config["rate"], **common)
    elif protocol == "ttt":
        report = run_ttt(ds, config["horizons"][0], config["kinds"],
                         parts=config["parts"], rate=config["rate"], **common)
    else:
        raise ValueError(f"unknown protocol {protocol!r}")

    (out_dir / "report.json").write_text(report.to_json())
    _write_traces(report, out_dir)
    for line in report.summary_lines():
        print(line)
    return 0


def _write_traces(report, out_dir):
    with open(out_dir / "trace.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kind", "h", "seed", "epoch", "train_loss", "val_loss"])
        for cell in report.cells:
            for epoch, (tr, va) in enumerate(zip(cell.extra.get("train_loss", []),
                                                 cell.extra.get("val_loss", []))):
                writer.writerow([cell.kind, cell.h, cell.seed, epoch, tr, va])
    if report.protocol == "ttt":
        with open(out_dir / "ttt_parts.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["kind", "h", "seed", "part", "test_mse"])
            for cell in report.cells:
                for part, loss in enumerate(cell.extra.get("part_losses", []), start=1):
                    writer.writerow([cell.kind, cell.h, cell.seed, part, loss])


def build_parser():
    parser = argparse.ArgumentParser(prog="fraug",
                                     description="Frequency-domain augmentation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic CSV")
    p.add_argument("--out", required=True)
    p.add_argument("--length", type=int, default=1000)
    p.add_argument("--channels", type=int, default=1)
    p.add_argument("--tones", default="24:1", help="period:amp[,period:amp...]")
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--trend", type=float, default=0.0)
    p.add_argument("--shift-at", type=int, default=None)
    p.add_argument("--shift-delta", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("augment", help="augment a series file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--kind", choices=ALL_KINDS, default="freq_mask")
    p.add_argument("--rate", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--dump-spectrum", default=None)
    p.add_argument("--date-column", default="date")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("spectrum", help="dump amplitude spectra of a series file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--date-column", default="date")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("train", help="train one model, save a checkpoint")
    p.add_argument("--dataset", required=True)
    p.add_argument("--scheme", choices=sorted(SPLIT_SCHEMES), default="generic")
    p.add_argument("--lookback", type=int, default=96)
    p.add_argument("--horizon", type=int, default=96)
    p.add_argument("--kind", choices=ALL_KINDS, default="none")
    p.add_argument("--rate", type=float, default=0.2)
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--date-column", default="date")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("run", help="config-driven experiment protocols")
    p.add_argument("--config", default=None)
    p.add_argument("--protocol", choices=["longterm", "coldstart", "ttt"], default=None)
    p.add_argument("--dataset", default=None)
    p.add_argument("--scheme", choices=sorted(SPLIT_SCHEMES), default=None)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--kind", choices=ALL_KINDS, default=None)
    p.add_argument("--rate", type=float, default=None)
    p.add_argument("--fraction", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_run)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
