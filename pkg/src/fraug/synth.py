"""Deterministic synthetic series generation in the ETT column layout."""

import csv
from dataclasses import dataclass, field

import numpy as np


@dataclass
class SynthSpec:
    """Sinusoid mixture plus optional noise, trend, and mean shift."""

    length: int = 1000
    channels: int = 1
    tones: list = field(default_factory=lambda: [(24.0, 1.0)])  # (period, amplitude)
    noise_std: float = 0.0
    trend_slope: float = 0.0
    shift_at: int | None = None
    shift_delta: float = 0.0
    seed: int = 0


def generate(spec: SynthSpec):
    """(C, T) float64 array of synthetic channels.

    Channels differ by a deterministic phase offset so multichannel
    datasets are not degenerate copies.
    """
    if spec.length < 1:
        raise ValueError("length must be >= 1")
    rng = np.random.default_rng(spec.seed)
    t = np.arange(spec.length, dtype=np.float64)
    out = np.zeros((spec.channels, spec.length))
    for c in range(spec.channels):
        x = np.zeros(spec.length)
        for period, amp in spec.tones:
            phase = 2.0 * np.pi * c / max(1, spec.channels)
            x += amp * np.sin(2.0 * np.pi * t / period + phase)
        x += spec.trend_slope * t
        if spec.noise_std > 0:
            x += rng.normal(0.0, spec.noise_std, size=spec.length)
        if spec.shift_at is not None:
            x[spec.shift_at:] += spec.shift_delta
        out[c] = x
    return out


def write_csv(values, path):
    """Write a (C, T) array as an ETT-convention CSV (date + channels)."""
    c, t = values.shape
    names = [f"ch{i}" for i in range(c)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date"] + names)
        for i in range(t):
            writer.writerow([f"t{i:06d}"] + [repr(float(values[ch, i])) for ch in range(c)])
