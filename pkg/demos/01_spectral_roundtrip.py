"""Walk through the spectral core: forward transform, inverse, Parseval.

Run with:  python3 demos/01_spectral_roundtrip.py
"""

import numpy as np

from fraug.spectral import amplitude_spectrum, irfft, rfft

rng = np.random.default_rng(0)

# Window lengths the toolkit cares about are b+h sums like 192 (96+96).
# None of them are powers of two, which is why the transform handles
# arbitrary N (mixed radix for smooth lengths, chirp-z otherwise).
for n in (192, 288, 251, 816):
    x = rng.normal(size=n)
    s = rfft(x)
    back = irfft(s)
    err = np.max(np.abs(back - x))
    print(f"N={n:4d}  bins={len(s.bins):4d}  round-trip err={err:.2e}")

# Parseval: time-domain energy equals spectral energy / N, counting the
# mirrored one-sided bins twice.
n = 192
x = rng.normal(size=n)
bins = rfft(x).bins
amps2 = np.abs(bins) ** 2
spectral = amps2[0] + 2 * amps2[1: (n + 1) // 2].sum()
if n % 2 == 0:
    spectral += amps2[-1]
print(f"\ntime energy     {np.sum(x * x):.6f}")
print(f"spectral energy {spectral / n:.6f}")

# A pure tone concentrates into a single bin.
t = np.arange(n)
tone = np.cos(2 * np.pi * 12 * t / n)
amps = amplitude_spectrum(rfft(tone))
print(f"\ntone at bin 12: amplitude peak at bin {int(np.argmax(amps))}, "
      f"peak/next ratio {np.sort(amps)[-1] / max(np.sort(amps)[-2], 1e-30):.1e}")
