"""Evaluation protocols: long-term, cold-start, and test-time training.

Every protocol trains a no-augmentation control under the same seeds and
schedule as each augmented run, so improvement ratios are always
well-defined. Results are collected into an ExperimentReport that can be
serialized to JSON and flat CSV traces.
"""

import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .augment import AugmentSpec, expand_dataset
from .dataset import TimeSeriesDataset, WindowSample, make_windows, take_last_fraction
from .forecaster import DLinearModel, Metrics, TrainConfig, evaluate, train

RATE_GRID = (0.1, 0.2, 0.3, 0.4, 0.5)


@dataclass
class CellResult:
    """One (kind, horizon, seed) evaluation cell."""

    kind: str
    h: int
    seed: int
    rate: float
    mse: float
    mae: float
    extra: dict = field(default_factory=dict)


@dataclass
class ExperimentReport:
    protocol: str
    dataset_id: str
    b: int
    horizons: list
    kinds: list
    seeds: list
    cells: list = field(default_factory=list)
    chosen_rates: dict = field(default_factory=dict)
    wall_clock_s: float = 0.0

    def median_mse(self, kind, h):
        vals = [c.mse for c in self.cells if c.kind == kind and c.h == h]
        if not vals:
            raise KeyError(f"no cells for kind={kind!r}, h={h}")
        return float(np.median(vals))

    def to_json(self):
        return json.dumps(asdict(self), indent=2, default=_jsonable)

    def summary_lines(self):
        lines = [f"protocol={self.protocol} dataset={self.dataset_id} b={self.b}"]
        for h in self.horizons:
            for kind in self.kinds:
                try:
                    med = self.median_mse(kind, h)
                except KeyError:
                    continue
                rate = self.chosen_rates.get(f"{kind}/{h}", "-")
                lines.append(f"  h={h:<4} {kind:<24} rate={rate!s:<5} median MSE={med:.4f}")
        return lines


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _spec_for(kind, rate, seed):
    return AugmentSpec(kind=kind, rate=rate, seed=seed)


def cross_validate_rate(ds, b, h, kind, grid=RATE_GRID, cfg=None, seed=0):
    """Pick the rate minimizing validation MSE; ties go to the smaller rate.

    One model is trained per rate with batch-wise augmentation; the test
    split is never touched.
    """
    grid = sorted(grid)
    if not grid:
        raise ValueError("empty rate grid")
    cfg = cfg or TrainConfig(seed=seed)
    train_samples = make_windows(ds, "train", b, h)
    val_samples = make_windows(ds, "val", b, h)
    per_rate = {}
    best_rate, best_val = None, np.inf
    for rate in grid:
        model = DLinearModel.init_random(b, h, seed=cfg.seed)
        model, trace = train(model, train_samples, val_samples, cfg,
                             aug=_spec_for(kind, rate, cfg.seed))
        val = evaluate(model, val_samples)
        per_rate[rate] = val
        if val.mse < best_val:
            best_val = val.mse
            best_rate = rate
    return best_rate, per_rate


def run_longterm(ds, horizons, kinds, b=96, cfg=None, seeds=(0,),
                 rate_grid=RATE_GRID, dataset_id="dataset",
                 select_rates=True, fixed_rate=0.2) -> ExperimentReport:
    """Batch-wise 2x augmentation during training; reports test MSE/MAE.

    The no-augmentation control is always included. With select_rates,
    the rate is grid-selected on the validation split (first seed);
    otherwise fixed_rate is used.
    """
    t0 = time.time()
    kinds = ["none"] + [k for k in kinds if k != "none"]
    report = ExperimentReport(
        protocol="longterm", dataset_id=dataset_id, b=b,
        horizons=list(horizons), kinds=kinds, seeds=list(seeds),
    )
    for h in horizons:
        train_samples = make_windows(ds, "train", b, h)
        val_samples = make_windows(ds, "val", b, h)
        test_samples = make_windows(ds, "test", b, h)
        for kind in kinds:
            if kind == "none":
                rate = 0.0
            elif select_rates:
                rate, _ = cross_validate_rate(
                    ds, b, h, kind, grid=rate_grid,
                    cfg=cfg or TrainConfig(seed=seeds[0]), seed=seeds[0])
            else:
                rate = fixed_rate
            report.chosen_rates[f"{kind}/{h}"] = rate
            for seed in seeds:
                run_cfg = cfg or TrainConfig()
                run_cfg = TrainConfig(**{**asdict(run_cfg), "seed": seed})
                model = DLinearModel.init_random(b, h, seed=seed)
                aug = None if kind == "none" else _spec_for(kind, rate, seed)
                model, trace = train(model, train_samples, val_samples, run_cfg, aug=aug)
                m = evaluate(model, test_samples)
                report.cells.append(CellResult(
                    kind=kind, h=h, seed=seed, rate=rate, mse=m.mse, mae=m.mae,
                    extra={"train_loss": trace.train_loss,
                           "val_loss": trace.val_loss,
                           "best_epoch": trace.best_epoch},
                ))
    report.wall_clock_s = time.time() - t0
    return report


def run_coldstart(ds, h, kinds, b=96, fraction=0.01, factors=(2, 50),
                  cfg=None, seeds=(0,), rate=0.2, dataset_id="dataset") -> ExperimentReport:
    """Train on the last `fraction` of window samples, pre-expanded.

    For each kind the best expansion factor is chosen by validation MSE;
    evaluation uses the full original test split.
    """
    t0 = time.time()
    kinds = ["none"] + [k for k in kinds if k != "none"]
    all_train = make_windows(ds, "train", b, h)
    train_small = take_last_fraction(all_train, fraction)
    val_samples = make_windows(ds, "val", b, h)
    test_samples = make_windows(ds, "test", b, h)
    report = ExperimentReport(
        protocol="coldstart", dataset_id=dataset_id, b=b,
        horizons=[h], kinds=kinds, seeds=list(seeds),
    )
    for kind in kinds:
        for seed in seeds:
            run_cfg = cfg or TrainConfig()
            run_cfg = TrainConfig(**{**asdict(run_cfg), "seed": seed})
            best = None
            for factor in (1,) if kind == "none" else factors:
                spec = _spec_for(kind, rate, seed)
                rng = np.random.default_rng(seed)
                expanded = expand_dataset(train_small, spec, factor, rng)
                model = DLinearModel.init_random(b, h, seed=seed)
                model, _ = train(model, expanded, val_samples, run_cfg, aug=None)
                val = evaluate(model, val_samples)
                test = evaluate(model, test_samples)
                if best is None or val.mse < best[0]:
                    best = (val.mse, factor, test)
            _, factor, test = best
            report.chosen_rates[f"{kind}/{h}"] = rate if kind != "none" else 0.0
            report.cells.append(CellResult(
                kind=kind, h=h, seed=seed,
                rate=rate if kind != "none" else 0.0,
                mse=test.mse, mae=test.mae,
                extra={"factor": factor, "n_train": len(train_small)},
            ))
    report.wall_clock_s = time.time() - t0
    return report


def ttt_copy_schedule(n_parts_seen):
    """Augmented-copy counts per part, oldest first: linear 1 -> 5 ramp.

    Rounding is half-up, so n=8 gives [1, 2, 2, 3, 3, 4, 4, 5].
    """
    if n_parts_seen < 1:
        raise ValueError("need at least one part")
    if n_parts_seen == 1:
        return [5]
    out = []
    for rank in range(n_parts_seen):
        value = 1.0 + 4.0 * rank / (n_parts_seen - 1)
        out.append(int(np.floor(value + 0.5)))
    return out


def _part_bounds(length, parts):
    # Equal contiguous spans; the remainder goes to the last part.
    size = length // parts
    if size == 0:
        raise ValueError(f"series of length {length} too short for {parts} parts")
    bounds = [(i * size, (i + 1) * size) for i in range(parts)]
    bounds[-1] = (bounds[-1][0], length)
    return bounds


def run_ttt(ds: TimeSeriesDataset, h, kinds, b=96, parts=20, cfg=None,
            seeds=(0,), rate=0.2, dataset_id="dataset") -> ExperimentReport:
    """Cumulative retraining over `parts` contiguous spans.

    Round i trains from scratch on parts [0, i) and tests on part i.
    With augmentation, each training sample gets extra copies per the
    1 -> 5 ramp: more copies for samples from newer parts.
    """
    t0 = time.time()
    kinds = ["none"] + [k for k in kinds if k != "none"]
    bounds = _part_bounds(ds.length, parts)
    report = ExperimentReport(
        protocol="ttt", dataset_id=dataset_id, b=b,
        horizons=[h], kinds=kinds, seeds=list(seeds),
    )
    for kind in kinds:
        for seed in seeds:
            run_cfg = cfg or TrainConfig()
            run_cfg = TrainConfig(**{**asdict(run_cfg), "seed": seed})
            part_losses = []
            for i in range(1, parts):
                train_lo = 0
                train_hi = bounds[i - 1][1]
                test_lo, test_hi = bounds[i]
                train_samples = _span_windows(ds, train_lo, train_hi, b, h)
                test_samples = _span_windows(ds, test_lo, test_hi, b, h)
                if not train_samples:
                    raise ValueError(f"part {i - 1}: span too short for windows")
                if not test_samples:
                    raise ValueError(f"part {i}: span too short for windows")
                if kind != "none":
                    schedule = ttt_copy_schedule(i)
                    # Seedless spec: expansion randomness comes from the
                    # per-round rng so each round gets fresh masks.
                    spec = AugmentSpec(kind=kind, rate=rate)
                    rng = np.random.default_rng((seed, i))
                    expanded = list(train_samples)
                    for rank, (lo, hi) in enumerate(bounds[:i]):
                        part_samples = [s for s in train_samples
                                        if lo <= s.start_index < hi]
                        copies = schedule[rank]
                        if copies > 0 and part_samples:
                            extra = expand_dataset(part_samples, spec, copies + 1, rng)
                            expanded.extend(extra[len(part_samples):])
                    train_set = expanded
                else:
                    train_set = train_samples
                # Validation for early stopping: newest tenth of training windows.
                n_val = max(1, len(train_samples) // 10)
                val_samples = train_samples[-n_val:]
                model = DLinearModel.init_random(b, h, seed=seed)
                model, _ = train(model, train_set, val_samples, run_cfg, aug=None)
                m = evaluate(model, test_samples)
                part_losses.append(m.mse)
            report.chosen_rates[f"{kind}/{h}"] = rate if kind != "none" else 0.0
            report.cells.append(CellResult(
                kind=kind, h=h, seed=seed,
                rate=rate if kind != "none" else 0.0,
                mse=float(np.mean(part_losses)),
                mae=float("nan"),
                extra={"part_losses": part_losses,
                       "copy_schedule": ttt_copy_schedule(parts - 1)},
            ))
    report.wall_clock_s = time.time() - t0
    return report


def _span_windows(ds, lo, hi, b, h):
    """Windows fully inside [lo, hi); count convention matches make_windows."""
    span = hi - lo
    out = []
    for start in range(0, span - b - h):
        s = lo + start
        out.append(WindowSample(
            lookback=ds.values[:, s: s + b].copy(),
            horizon=ds.values[:, s + b: s + b + h].copy(),
            start_index=s,
        ))
    return out
