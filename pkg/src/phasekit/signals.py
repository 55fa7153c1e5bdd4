"""Uniformly sampled finite-window signals and quadrature transforms.

Signals are stored as (T, n) arrays: row t holds the n channel values at
time t*dt.  A finite window stands in for a square-integrable signal whose
support lies inside the window; inner products are rectangle-rule Riemann
sums with weight dt, consistent with the DFT conventions used by the
frequency-domain transform below.

The quadrature filter (`hilbert`) is the FFT multiplier -j*sgn(omega)
applied per channel, with the DC and Nyquist bins mapped to zero.  On
signals with no DC or Nyquist content it is an exact isometry, exactly
anti-self-adjoint and an exact anti-involution, so the usual analytic
signal identities hold to machine precision rather than asymptotically.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import InputError

__all__ = [
    "RealSignal",
    "ComplexSignal",
    "hilbert",
    "analytic",
    "inner",
    "truncate",
    "write_signal_csv",
    "read_signal_csv",
]

# Relative threshold below which a residual imaginary part is considered
# roundoff and discarded.
_IMAG_DISCARD_REL = 1e-12


def _coerce_samples(samples, dtype) -> np.ndarray:
    arr = np.asarray(samples, dtype=dtype)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise InputError(f"samples must be a (T, n) array, got shape {arr.shape}")
    if arr.shape[0] < 2:
        raise InputError("signals need at least 2 samples")
    if arr.shape[1] < 1:
        raise InputError("signals need at least 1 channel")
    if not np.all(np.isfinite(arr)):
        raise InputError("signal samples must be finite")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


def _check_dt(dt: float) -> float:
    dt = float(dt)
    if not np.isfinite(dt) or dt <= 0.0:
        raise InputError(f"dt must be a positive number, got {dt}")
    return dt


@dataclass(frozen=True)
class RealSignal:
    """A real (T, n) sample block with uniform spacing ``dt`` seconds."""

    samples: np.ndarray
    dt: float

    def __post_init__(self):
        object.__setattr__(self, "samples", _coerce_samples(self.samples, np.float64))
        object.__setattr__(self, "dt", _check_dt(self.dt))

    @property
    def nsamples(self) -> int:
        return self.samples.shape[0]

    @property
    def nchannels(self) -> int:
        return self.samples.shape[1]

    @property
    def duration(self) -> float:
        """Window length T*dt in seconds."""
        return self.nsamples * self.dt

    def times(self) -> np.ndarray:
        return np.arange(self.nsamples) * self.dt

    def norm(self) -> float:
        """L2 norm sqrt(sum |u_t|^2 dt)."""
        return float(np.sqrt(np.sum(np.abs(self.samples) ** 2) * self.dt))

    def channel(self, k: int) -> "RealSignal":
        return RealSignal(self.samples[:, [k]], self.dt)


@dataclass(frozen=True)
class ComplexSignal:
    """Complex counterpart of :class:`RealSignal` (same shape laws)."""

    samples: np.ndarray
    dt: float

    def __post_init__(self):
        object.__setattr__(self, "samples", _coerce_samples(self.samples, np.complex128))
        object.__setattr__(self, "dt", _check_dt(self.dt))

    @property
    def nsamples(self) -> int:
        return self.samples.shape[0]

    @property
    def nchannels(self) -> int:
        return self.samples.shape[1]

    @property
    def duration(self) -> float:
        return self.nsamples * self.dt

    def times(self) -> np.ndarray:
        return np.arange(self.nsamples) * self.dt

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.samples) ** 2) * self.dt))


Signal = RealSignal | ComplexSignal


def _quadrature_multiplier(T: int) -> np.ndarray:
    # DFT bin multipliers for -j*sgn(omega): positive bins 1..T/2-1 get -j,
    # negative bins T/2+1..T-1 get +j, DC and Nyquist map to zero.
    mult = np.zeros(T, dtype=np.complex128)
    mult[1 : T // 2] = -1j
    mult[T // 2 + 1 :] = 1j
    return mult


def hilbert(u: Signal) -> Signal:
    """Apply the frequency-domain multiplier -j*sgn(omega) per channel.

    Odd-length inputs are zero-padded by one sample for the transform and
    cropped back afterwards.  Real input produces real output; the roundoff
    imaginary residue is checked against a 1e-12 relative threshold and
    discarded.

    Parameters
    ----------
    u : RealSignal or ComplexSignal
        Input signal.

    Returns
    -------
    RealSignal or ComplexSignal
        Transformed signal of the same flavour, shape and dt.
    """
    x = u.samples
    T = x.shape[0]
    padded = T % 2 == 1
    if padded:
        x = np.vstack([x, np.zeros((1, x.shape[1]), dtype=x.dtype)])
    spec = np.fft.fft(x, axis=0)
    y = np.fft.ifft(spec * _quadrature_multiplier(x.shape[0])[:, None], axis=0)
    if padded:
        y = y[:T]
    if isinstance(u, RealSignal):
        scale = float(np.max(np.abs(u.samples)))
        resid = float(np.max(np.abs(y.imag))) if y.size else 0.0
        if scale > 0.0 and resid > _IMAG_DISCARD_REL * scale:
            raise InputError(
                f"unexpected imaginary residue {resid:.3e} on real input (scale {scale:.3e})"
            )
        return RealSignal(y.real, u.dt)
    return ComplexSignal(y, u.dt)


def analytic(u: RealSignal) -> ComplexSignal:
    """Return the half-scaled analytic signal (u + j*Hu)/2.

    With this convention ``norm(analytic(u))**2 == norm(u)**2 / 2`` exactly
    for DC/Nyquist-free input.
    """
    if not isinstance(u, RealSignal):
        raise InputError("analytic() expects a RealSignal")
    hu = hilbert(u)
    return ComplexSignal(0.5 * (u.samples + 1j * hu.samples), u.dt)


def inner(u: Signal, v: Signal) -> complex:
    """Riemann-sum inner product sum_t conj(u_t) . v_t * dt.

    Conjugate-linear in the first argument.  Shapes and dt must match.
    """
    if u.samples.shape != v.samples.shape:
        raise InputError(
            f"shape mismatch: {u.samples.shape} vs {v.samples.shape}"
        )
    if abs(u.dt - v.dt) > 1e-15 * max(u.dt, v.dt):
        raise InputError(f"dt mismatch: {u.dt} vs {v.dt}")
    return complex(np.sum(np.conj(u.samples) * v.samples) * u.dt)


def truncate(u: RealSignal, t_cut: float) -> RealSignal:
    """Zero all samples at times strictly greater than ``t_cut`` seconds."""
    t_cut = float(t_cut)
    if t_cut < 0.0:
        raise InputError(f"truncation time must be nonnegative, got {t_cut}")
    out = np.array(u.samples)
    out[u.times() > t_cut] = 0.0
    return RealSignal(out, u.dt)


def write_signal_csv(path, u: Signal) -> None:
    """Write a signal as CSV with header ``t,ch0,ch1,...``.

    Values are written with 17 significant digits so float64 round-trips
    exactly.  Complex signals are not supported by the text format.
    """
    if isinstance(u, ComplexSignal):
        raise InputError("CSV serialization is defined for real signals only")
    header = ["t"] + [f"ch{k}" for k in range(u.nchannels)]
    t = u.times()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i in range(u.nsamples):
            w.writerow([f"{t[i]:.17g}"] + [f"{x:.17g}" for x in u.samples[i]])


def read_signal_csv(path) -> RealSignal:
    """Read a signal written by :func:`write_signal_csv`."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or not rows[0] or rows[0][0] != "t":
        raise InputError(f"{path}: not a signal CSV (missing 't' header)")
    data = np.array([[float(x) for x in row] for row in rows[1:]], dtype=np.float64)
    if data.shape[0] < 2:
        raise InputError(f"{path}: need at least 2 samples")
    t = data[:, 0]
    dt = float(t[1] - t[0])
    if not np.allclose(np.diff(t), dt, rtol=1e-9, atol=1e-12 * max(dt, 1.0)):
        raise InputError(f"{path}: non-uniform time column")
    return RealSignal(data[:, 1:], dt)
