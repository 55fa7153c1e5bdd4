"""Sampling-based phase and passivity estimates for black-box systems.

Each corpus input u produces one range sample z = <analytic(u), S(u)>;
the cloud of samples is an inner approximation of the operator's range,
so the reported angular interval is an inner estimate, never a
certificate.  Samples with |z| below 1e-12 * |u| * |y| carry no usable
angle and are excluded.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .nrange import PhaseInterval
from .signals import RealSignal, analytic, inner

__all__ = [
    "PhaseSample",
    "EmpiricalPhase",
    "EmpiricalPassivity",
    "empirical_nrange",
    "empirical_phase",
    "empirical_passivity",
    "write_samples_csv",
    "read_samples_csv",
]

_EXCLUDE_REL = 1e-12


@dataclass(frozen=True)
class PhaseSample:
    """One range sample z = <analytic(u), y> with its norms."""

    z: complex
    input_id: int
    norm_u: float
    norm_y: float
    excluded: bool

    @property
    def angle(self) -> float:
        return float(np.angle(self.z))


@dataclass(frozen=True)
class EmpiricalPhase:
    """Inner estimate of a phase sector from range samples.

    ``interval`` spans exactly the used samples' angles (branch chosen to
    minimize the spread); ``indefinite`` flags a spread exceeding pi.
    ``hull`` holds the convex-hull vertices of the sample cloud when the
    cloud is non-degenerate (diagnostic only).
    """

    interval: PhaseInterval | None
    n_used: int
    n_excluded: int
    indefinite: bool
    hull: np.ndarray | None


@dataclass(frozen=True)
class EmpiricalPassivity:
    """Per-sample margins of <u, y> >= delta |u|^2 + epsilon |y|^2."""

    margins: np.ndarray
    scales: np.ndarray

    @property
    def min_margin(self) -> float:
        return float(np.min(self.margins))

    @property
    def min_normalized(self) -> float:
        return float(np.min(self.margins / self.scales))


def _threads() -> int:
    raw = os.environ.get("PHASEKIT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _run_system(system, corpus: list[RealSignal]) -> list[RealSignal]:
    if hasattr(system, "batch"):
        return list(system.batch(corpus))
    n = _threads()
    serial = bool(getattr(system, "serial", False))
    if n > 1 and not serial:
        with ThreadPoolExecutor(max_workers=n) as pool:
            return list(pool.map(system, corpus))
    return [system(u) for u in corpus]


def empirical_nrange(system, corpus: list[RealSignal]) -> list[PhaseSample]:
    """Range samples <analytic(u), S(u)> over a corpus.

    ``system`` maps a RealSignal to a same-shape RealSignal.  Objects with
    a ``batch`` method are evaluated in one call; plain callables are
    mapped in index order (optionally across PHASEKIT_THREADS workers
    unless the callable sets ``serial = True``).  Output is deterministic
    for a seeded corpus regardless of worker count.
    """
    outputs = _run_system(system, corpus)
    samples = []
    for k, (u, y) in enumerate(zip(corpus, outputs)):
        if not isinstance(y, RealSignal):
            raise InputError(f"system returned {type(y).__name__}, not RealSignal")
        if y.samples.shape != u.samples.shape:
            raise InputError(
                f"system changed signal shape for corpus member {k}: "
                f"{u.samples.shape} -> {y.samples.shape}"
            )
        z = inner(analytic(u), y)
        if not np.isfinite(z):
            raise InputError(f"non-finite range sample for corpus member {k}")
        nu, ny = u.norm(), y.norm()
        samples.append(
            PhaseSample(
                z=z,
                input_id=k,
                norm_u=nu,
                norm_y=ny,
                excluded=abs(z) <= _EXCLUDE_REL * nu * ny,
            )
        )
    return samples


def _hull(points: np.ndarray) -> np.ndarray | None:
    if len(points) < 3:
        return None
    try:
        from scipy.spatial import ConvexHull, QhullError

        return points[ConvexHull(points).vertices]
    except (QhullError, ValueError):
        return None  # degenerate (collinear) cloud


def empirical_phase(samples: list[PhaseSample]) -> EmpiricalPhase:
    """Min/max sample angles with the branch that minimizes the spread.

    The interval is the complement of the largest angular gap between
    consecutive sample angles; a spread above pi sets the indefinite flag
    (the samples surround the origin).
    """
    used = [s for s in samples if not s.excluded]
    n_excluded = len(samples) - len(used)
    if not used:
        raise InputError("every sample was excluded; no angles available")
    z = np.array([s.z for s in used])
    angles = np.sort(np.angle(z))
    gaps = np.diff(np.concatenate([angles, [angles[0] + 2.0 * np.pi]]))
    k = int(np.argmax(gaps))
    spread = 2.0 * np.pi - gaps[k]
    lo = angles[(k + 1) % len(angles)]
    hull = _hull(np.column_stack([z.real, z.imag]))
    if spread > np.pi + 1e-12:
        return EmpiricalPhase(None, len(used), n_excluded, True, hull)
    interval = PhaseInterval(lo, lo + spread)
    return EmpiricalPhase(interval, len(used), n_excluded, False, hull)


def empirical_passivity(
    pairs: list[tuple[RealSignal, RealSignal]], delta: float, epsilon: float
) -> EmpiricalPassivity:
    """Check consistency with the passivity surplus (delta, epsilon).

    Returns the per-pair margins <u, y> - delta |u|^2 - epsilon |y|^2 and
    the scales |u|^2 + |y|^2; a nonnegative minimum is consistency on the
    corpus, not a proof.
    """
    if not pairs:
        raise InputError("need at least one (u, y) pair")
    margins, scales = [], []
    for u, y in pairs:
        nu2, ny2 = u.norm() ** 2, y.norm() ** 2
        margins.append(inner(u, y).real - delta * nu2 - epsilon * ny2)
        scales.append(max(nu2 + ny2, 1e-300))
    return EmpiricalPassivity(np.array(margins), np.array(scales))


def write_samples_csv(path, samples: list[PhaseSample]) -> None:
    """Dump samples as ``id,re_z,im_z,angle_rad,norm_u,norm_y,excluded``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "re_z", "im_z", "angle_rad", "norm_u", "norm_y", "excluded"])
        for s in samples:
            w.writerow([
                s.input_id,
                f"{s.z.real:.17g}",
                f"{s.z.imag:.17g}",
                f"{s.angle:.17g}",
                f"{s.norm_u:.17g}",
                f"{s.norm_y:.17g}",
                int(s.excluded),
            ])


def read_samples_csv(path) -> list[PhaseSample]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:2] != ["id", "re_z"]:
        raise InputError(f"{path}: not a sample dump CSV")
    out = []
    for row in rows[1:]:
        out.append(
            PhaseSample(
                z=complex(float(row[1]), float(row[2])),
                input_id=int(row[0]),
                norm_u=float(row[4]),
                norm_y=float(row[5]),
                excluded=bool(int(row[6])),
            )
        )
    return out
