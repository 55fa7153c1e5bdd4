"""Deterministic test-input corpora.

A corpus is a reproducible list of real signals used to sample the range
of an operator: enveloped tones, band-limited noise and pulse trains.
Every generated signal has its DC and Nyquist bins zeroed exactly, so the
quadrature-transform identities in :mod:`phasekit.signals` hold to machine
precision on corpus members.

Generation is deterministic given the corpus seed and derives one
independent child seed per signal index, so parallel generation order
cannot change the output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .signals import RealSignal

__all__ = [
    "ToneFamily",
    "NoiseFamily",
    "PulseFamily",
    "CorpusSpec",
    "gen_corpus",
    "default_corpus_spec",
    "quick_corpus_spec",
]


@dataclass(frozen=True)
class ToneFamily:
    """Tones with Gaussian envelopes at log-spaced angular frequencies."""

    count: int = 72
    freq_lo: float = 0.05      # rad/s
    freq_hi: float = 50.0      # rad/s
    n_freqs: int = 24

    def frequencies(self) -> np.ndarray:
        return np.geomspace(self.freq_lo, self.freq_hi, self.n_freqs)


@dataclass(frozen=True)
class NoiseFamily:
    """Band-limited noise, synthesized directly on the DFT bins."""

    count: int = 100
    cutoff_lo: float = 0.5     # rad/s
    cutoff_hi: float = 100.0   # rad/s


@dataclass(frozen=True)
class PulseFamily:
    """Rectangular pulse trains (width and period as window fractions)."""

    count: int = 28
    width_lo: float = 0.02
    width_hi: float = 0.08
    gap_lo: float = 1.0        # gap between pulses, in widths
    gap_hi: float = 5.0


Family = ToneFamily | NoiseFamily | PulseFamily


@dataclass(frozen=True)
class CorpusSpec:
    """Recipe for a deterministic corpus of real signals."""

    seed: int
    length: int
    dt: float
    channels: int = 1
    families: tuple[Family, ...] = field(
        default_factory=lambda: (ToneFamily(), NoiseFamily(), PulseFamily())
    )

    def __post_init__(self):
        if self.length < 4 or self.length % 2 != 0:
            raise InputError("corpus signal length must be even and >= 4")
        if self.dt <= 0:
            raise InputError("corpus dt must be positive")
        if self.channels < 1:
            raise InputError("corpus needs at least one channel")
        if self.count < 1:
            raise InputError("corpus needs at least one signal")

    @property
    def count(self) -> int:
        return sum(f.count for f in self.families)


def default_corpus_spec(seed: int = 0, channels: int = 1) -> CorpusSpec:
    """Default corpus: 200 signals over a 40 s window at dt = 1 ms.

    72 enveloped tones at 24 log-spaced frequencies, 100 band-limited
    noises and 28 pulse trains, spanning roughly 0.05..100 rad/s.
    """
    return CorpusSpec(seed=seed, length=40_000, dt=1e-3, channels=channels)


def quick_corpus_spec(
    seed: int = 0, count: int = 100, length: int = 4096, dt: float = 1.0 / 512.0,
    channels: int = 1,
) -> CorpusSpec:
    """Small corpus for fast property sweeps (same family mix, scaled)."""
    n_tone = max(1, round(0.36 * count))
    n_noise = max(1, round(0.50 * count))
    n_pulse = max(1, count - n_tone - n_noise)
    duration = length * dt
    return CorpusSpec(
        seed=seed,
        length=length,
        dt=dt,
        channels=channels,
        families=(
            ToneFamily(count=n_tone, freq_lo=2 * np.pi / duration * 4,
                       freq_hi=np.pi / dt / 8, n_freqs=12),
            NoiseFamily(count=n_noise, cutoff_lo=2 * np.pi / duration * 8,
                        cutoff_hi=np.pi / dt / 4),
            PulseFamily(count=n_pulse),
        ),
    )


def _strip_dc_nyquist(x: np.ndarray) -> np.ndarray:
    # Zero the DC and Nyquist bins exactly (length is even by contract).
    spec = np.fft.rfft(x, axis=0)
    spec[0] = 0.0
    spec[-1] = 0.0
    return np.fft.irfft(spec, n=x.shape[0], axis=0)


def _tone(rng: np.random.Generator, fam: ToneFamily, t: np.ndarray) -> np.ndarray:
    freqs = fam.frequencies()
    w = freqs[rng.integers(len(freqs))]
    duration = t[-1] + (t[1] - t[0])
    center = rng.uniform(0.25, 0.45) * duration
    width = rng.uniform(0.04, 0.08) * duration
    phase = rng.uniform(0.0, 2.0 * np.pi)
    # Envelope decays to ~1e-10 at the window edges, which keeps the signal
    # supported inside the window (limits leakage for dynamic systems).
    return np.cos(w * t + phase) * np.exp(-0.5 * ((t - center) / width) ** 2)


def _noise(rng: np.random.Generator, fam: NoiseFamily, t: np.ndarray) -> np.ndarray:
    T = len(t)
    duration = t[-1] + (t[1] - t[0])
    cutoff = np.exp(rng.uniform(np.log(fam.cutoff_lo), np.log(fam.cutoff_hi)))
    # bin k corresponds to angular frequency 2*pi*k/duration
    kmax = min(int(cutoff * duration / (2.0 * np.pi)), T // 2 - 1)
    kmax = max(kmax, 1)
    spec = np.zeros(T // 2 + 1, dtype=np.complex128)
    spec[1 : kmax + 1] = rng.standard_normal(kmax) + 1j * rng.standard_normal(kmax)
    return np.fft.irfft(spec, n=T)


def _pulses(rng: np.random.Generator, fam: PulseFamily, t: np.ndarray) -> np.ndarray:
    duration = t[-1] + (t[1] - t[0])
    width = rng.uniform(fam.width_lo, fam.width_hi) * duration
    gap = rng.uniform(fam.gap_lo, fam.gap_hi) * width
    start = rng.uniform(0.05, 0.15) * duration
    x = np.zeros_like(t)
    edge = start
    # Leave the last 25% of the window pulse-free so responses can settle.
    while edge + width < 0.75 * duration:
        sign = 1.0 if rng.uniform() < 0.5 else -1.0
        x[(t >= edge) & (t < edge + width)] = sign
        edge += width + gap
    if not np.any(x):
        x[(t >= start) & (t < start + width)] = 1.0
    return x


def _generate_one(spec: CorpusSpec, fam: Family, child: np.random.SeedSequence) -> RealSignal:
    rng = np.random.default_rng(child)
    t = np.arange(spec.length) * spec.dt
    chans = []
    for _ in range(spec.channels):
        if isinstance(fam, ToneFamily):
            x = _tone(rng, fam, t)
        elif isinstance(fam, NoiseFamily):
            x = _noise(rng, fam, t)
        else:
            x = _pulses(rng, fam, t)
        chans.append(x)
    block = _strip_dc_nyquist(np.stack(chans, axis=1))
    rms = np.sqrt(np.mean(block**2))
    if rms > 0:
        block = block / rms
    return RealSignal(block, spec.dt)


def gen_corpus(spec: CorpusSpec) -> list[RealSignal]:
    """Generate the corpus described by ``spec``.

    Deterministic: the same spec yields bitwise-identical signals, and each
    signal depends only on its index's child seed.
    """
    children = np.random.SeedSequence(spec.seed).spawn(spec.count)
    fams: list[Family] = []
    for fam in spec.families:
        fams.extend([fam] * fam.count)
    return [
        _generate_one(spec, fam, child) for fam, child in zip(fams, children)
    ]
