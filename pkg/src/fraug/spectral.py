"""Real-input discrete Fourier transform for arbitrary lengths.

Forward transform is unscaled, the inverse carries the 1/N factor.
Lengths that factor into {2, 3, 5, 7} go through a mixed-radix
Cooley-Tukey recursion; anything else falls back to Bluestein's
chirp-z algorithm, so non-power-of-two window sizes (192, 288, 432,
816, ...) are handled exactly. The transform kernels are vectorized
over leading axes so a whole batch of channels is transformed at once.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

_SMALL_PRIMES = (2, 3, 5, 7)
_BASE_N = 8  # below this, use a direct DFT matrix


@dataclass(frozen=True)
class Spectrum:
    """One-sided complex spectrum of a real signal.

    bins has length floor(origin_len/2) + 1; origin_len disambiguates
    even/odd signal lengths for exact inversion.
    """

    bins: np.ndarray
    origin_len: int

    def __post_init__(self):
        bins = np.asarray(self.bins, dtype=np.complex128)
        object.__setattr__(self, "bins", bins)
        expected = self.origin_len // 2 + 1
        if bins.ndim != 1 or len(bins) != expected:
            raise ValueError(
                f"malformed spectrum: {len(bins)} bins for origin_len "
                f"{self.origin_len}, expected {expected}"
            )


@lru_cache(maxsize=None)
def _dft_matrix(n):
    jk = np.outer(np.arange(n), np.arange(n))
    return np.exp(-2j * np.pi * jk / n)


@lru_cache(maxsize=None)
def _radix_twiddles(n, p):
    # T[i, q*m + k] = exp(-2j*pi * i * (q*m + k) / n)
    idx = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(np.arange(p), idx) / n)


def _fft(x):
    """Complex FFT along the last axis of x."""
    n = x.shape[-1]
    if n <= _BASE_N:
        return x @ _dft_matrix(n).T
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return _fft_radix(x, p)
    return _fft_bluestein(x)


def _fft_radix(x, p):
    n = x.shape[-1]
    m = n // p
    subs = [_fft(x[..., i::p]) for i in range(p)]
    tw = _radix_twiddles(n, p)
    out = np.zeros(x.shape, dtype=np.complex128)
    for q in range(p):
        sl = slice(q * m, (q + 1) * m)
        for i in range(p):
            out[..., sl] += subs[i] * tw[i, sl]
    return out


def _fft_bluestein(x):
    n = x.shape[-1]
    # Chirp-z: reduce the length-n DFT to a circular convolution at a
    # power-of-two length, which the radix-2 path handles.
    size = 1
    while size < 2 * n - 1:
        size *= 2
    k = np.arange(n)
    chirp = np.exp(-1j * np.pi * k * k / n)
    a = np.zeros(x.shape[:-1] + (size,), dtype=np.complex128)
    a[..., :n] = x * chirp
    b = np.zeros(size, dtype=np.complex128)
    b[:n] = np.conj(chirp)
    b[size - n + 1:] = np.conj(chirp[1:][::-1])
    conv = _ifft(_fft(a) * _fft(b))
    return chirp * conv[..., :n]


def _ifft(x):
    return np.conj(_fft(np.conj(x))) / x.shape[-1]


def rfft_bins(x):
    """One-sided DFT bins along the last axis; no input validation."""
    n = x.shape[-1]
    full = _fft(np.asarray(x, dtype=np.complex128))
    return full[..., : n // 2 + 1]


def irfft_signal(bins, origin_len):
    """Real inverse of rfft_bins along the last axis; no validation."""
    n = origin_len
    k = bins.shape[-1]
    full = np.empty(bins.shape[:-1] + (n,), dtype=np.complex128)
    full[..., :k] = bins
    if n > 1:
        # Negative frequencies from Hermitian symmetry.
        tail = bins[..., 1: (n + 1) // 2]
        full[..., k:] = np.conj(tail[..., ::-1])
    return np.real(_ifft(full))


def rfft(signal) -> Spectrum:
    """Forward one-sided DFT of a real signal (no normalization)."""
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim != 1 or len(x) == 0:
        raise ValueError("empty input")
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite sample")
    return Spectrum(bins=rfft_bins(x), origin_len=len(x))


def irfft(spectrum: Spectrum):
    """Inverse of rfft, with the 1/N scaling; returns a real signal."""
    bins = spectrum.bins
    n = spectrum.origin_len
    if abs(bins[0].imag) > 1e-12:
        raise ValueError("malformed spectrum: DC bin has imaginary part")
    if n % 2 == 0 and abs(bins[-1].imag) > 1e-12:
        raise ValueError("malformed spectrum: Nyquist bin has imaginary part")
    return irfft_signal(bins, n)


def amplitude_spectrum(spectrum: Spectrum):
    """Per-bin modulus sqrt(re^2 + im^2)."""
    return np.abs(spectrum.bins)
