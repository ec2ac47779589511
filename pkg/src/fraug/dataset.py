"""Benchmark CSV ingestion, normalization, splitting, and windowing."""

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np

# Split schemes: (train_len, val_len, test_len); None = ratio-based 70/10/20.
SPLIT_SCHEMES = {
    "ett-hourly": (8640, 2880, 2880),
    "ett-minute": (34560, 11520, 11520),
    "generic": None,
}


@dataclass(eq=False)
class TimeSeriesDataset:
    """Multichannel series with optional normalization state and split bounds.

    values is a (C, T) float64 array; channel_names has length C.
    norm_stats, when set, holds per-channel (mean, std) computed on the
    training split only.
    """

    values: np.ndarray
    channel_names: list = field(default_factory=list)
    timestamps: list | None = None
    norm_stats: tuple | None = None
    split_bounds: tuple | None = None

    @property
    def n_channels(self):
        return self.values.shape[0]

    @property
    def length(self):
        return self.values.shape[1]

    def split_range(self, split):
        if self.split_bounds is None:
            raise ValueError("dataset has no split bounds; call split_and_normalize first")
        train_end, val_end = self.split_bounds
        if split == "train":
            return 0, train_end
        if split == "val":
            return train_end, val_end
        if split == "test":
            return val_end, self.length
        raise ValueError(f"unknown split {split!r}")


@dataclass(eq=False)
class WindowSample:
    """One (look-back, horizon) pair: lookback (C, b), horizon (C, h)."""

    lookback: np.ndarray
    horizon: np.ndarray
    start_index: int = 0

    @property
    def shape(self):
        c, b = self.lookback.shape
        return c, b, self.horizon.shape[1]

    def concat(self):
        """(C, b+h) concatenation of look-back and horizon."""
        return np.concatenate([self.lookback, self.horizon], axis=1)


def load_csv(path, date_column="date") -> TimeSeriesDataset:
    """Parse a header-and-date-column CSV into a dataset.

    All non-date columns are parsed as float64, in header order.
    """
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise FileNotFoundError(f"cannot open dataset file {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file")
        if date_column not in header:
            raise ValueError(f"{path}: no column named {date_column!r} in header")
        date_idx = header.index(date_column)
        value_cols = [i for i in range(len(header)) if i != date_idx]
        if not value_cols:
            raise ValueError(f"{path}: no numeric columns besides {date_column!r}")
        names = [header[i] for i in value_cols]
        timestamps = []
        rows = []
        for rownum, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ValueError(
                    f"{path}: row {rownum} has {len(row)} cells, expected {len(header)}"
                )
            timestamps.append(row[date_idx])
            try:
                rows.append([float(row[i]) for i in value_cols])
            except ValueError:
                for i in value_cols:
                    try:
                        float(row[i])
                    except ValueError:
                        raise ValueError(
                            f"{path}: row {rownum}, column {header[i]!r}: "
                            f"cannot parse {row[i]!r} as a number"
                        ) from None
                raise
        if not rows:
            raise ValueError(f"{path}: no data rows")
    values = np.asarray(rows, dtype=np.float64).T
    return TimeSeriesDataset(values=values, channel_names=names, timestamps=timestamps)


def split_and_normalize(ds: TimeSeriesDataset, scheme="generic") -> TimeSeriesDataset:
    """Fix split boundaries and z-score every channel with train-split stats.

    Fixed-length schemes (ett-hourly, ett-minute) truncate the series to
    train+val+test; the generic scheme splits 70/10/20.
    """
    if scheme not in SPLIT_SCHEMES:
        raise ValueError(f"unknown split scheme {scheme!r}")
    lengths = SPLIT_SCHEMES[scheme]
    t_total = ds.length
    if lengths is None:
        train_end = int(t_total * 0.7)
        val_end = int(t_total * 0.8)
        values = ds.values
        timestamps = ds.timestamps
    else:
        train_len, val_len, test_len = lengths
        needed = train_len + val_len + test_len
        if t_total < needed:
            raise ValueError(
                f"series of length {t_total} too short for scheme {scheme!r} "
                f"(needs {needed})"
            )
        train_end = train_len
        val_end = train_len + val_len
        values = ds.values[:, :needed]
        timestamps = ds.timestamps[:needed] if ds.timestamps is not None else None
    if not 0 < train_end < val_end <= values.shape[1]:
        raise ValueError(f"invalid split bounds ({train_end}, {val_end})")

    train = values[:, :train_end]
    mean = train.mean(axis=1)
    std = train.std(axis=1)
    for c, s in enumerate(std):
        if s == 0.0:
            name = ds.channel_names[c] if ds.channel_names else str(c)
            raise ValueError(f"degenerate channel {name!r}: zero training std")
    normalized = (values - mean[:, None]) / std[:, None]
    return replace(
        ds,
        values=normalized,
        timestamps=timestamps,
        norm_stats=(mean, std),
        split_bounds=(train_end, val_end),
    )


def make_windows(ds: TimeSeriesDataset, split, b, h, stride=1):
    """Produce (look-back, horizon) samples from one split.

    With stride 1 the count is split_length - b - h (the final alignable
    window is dropped, matching the benchmark sample arithmetic).
    """
    if b < 1 or h < 1:
        raise ValueError("b and h must be >= 1")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    lo, hi = ds.split_range(split)
    split_len = hi - lo
    if b + h > split_len:
        raise ValueError(
            f"window exceeds split: b+h = {b + h} > {split_len} ({split})"
        )
    samples = []
    for start in range(0, split_len - b - h, stride):
        s = lo + start
        samples.append(
            WindowSample(
                lookback=ds.values[:, s: s + b].copy(),
                horizon=ds.values[:, s + b: s + b + h].copy(),
                start_index=s,
            )
        )
    return samples


def take_last_fraction(samples, fraction):
    """Final floor(fraction * n) samples (at least one), order preserved."""
    if not samples:
        raise ValueError("empty sample list")
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    count = max(1, math.floor(fraction * len(samples)))
    return list(samples[-count:])
