"""Run small-scale versions of the three evaluation protocols.

Run with:  python3 demos/04_protocols.py

Everything here uses synthetic data so it finishes in under a minute;
point the same code at an ETT CSV (load_csv + scheme="ett-hourly") for
the benchmark-scale runs.
"""

import numpy as np

from fraug.dataset import TimeSeriesDataset, split_and_normalize
from fraug.experiments import run_coldstart, run_longterm, run_ttt
from fraug.forecaster import TrainConfig
from fraug.synth import SynthSpec, generate

cfg = TrainConfig(learning_rate=5e-3, batch_size=32, max_epochs=5, patience=3)

values = generate(SynthSpec(length=1500, channels=1, tones=[(24.0, 1.0)],
                            noise_std=0.6, seed=2))
ds = split_and_normalize(TimeSeriesDataset(values=values, channel_names=["x"]),
                         "generic")

print("== long-term protocol ==")
rep = run_longterm(ds, horizons=[24], kinds=["freq_mask", "freq_mix"], b=48,
                   cfg=cfg, seeds=(0, 1), select_rates=False,
                   dataset_id="synthetic")
for line in rep.summary_lines():
    print(line)

print("\n== cold-start protocol (last 5% of training windows) ==")
rep = run_coldstart(ds, h=24, kinds=["freq_mask"], b=48, fraction=0.05,
                    factors=(2, 10), cfg=cfg, seeds=(0,),
                    dataset_id="synthetic")
for line in rep.summary_lines():
    print(line)
for c in rep.cells:
    print(f"  kind={c.kind:10s} chosen factor={c.extra['factor']} "
          f"n_train={c.extra['n_train']}")

print("\n== test-time training (distribution shift at the midpoint) ==")
shifted = generate(SynthSpec(length=1000, channels=1, tones=[(24.0, 1.0)],
                             noise_std=1.2, shift_at=500, shift_delta=1.5,
                             seed=5))
ds2 = TimeSeriesDataset(values=shifted, channel_names=["x"])
rep = run_ttt(ds2, h=8, kinds=["freq_mask"], b=16, parts=10, cfg=cfg,
              seeds=(0,), dataset_id="synthetic-shift")
for c in rep.cells:
    losses = " ".join(f"{v:.2f}" for v in c.extra["part_losses"])
    print(f"  {c.kind:10s} per-part test MSE: {losses}")
print(f"  copy schedule for the final round: {rep.cells[-1].extra['copy_schedule']}")
