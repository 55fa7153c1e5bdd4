"""Numerical ranges of complex matrices and their angular sectors.

The numerical range {x*Ax : |x| = 1} is convex (Toeplitz-Hausdorff), so
its cone over the origin is an angular sector whenever the range avoids a
neighbourhood of the origin's antipode in every direction.  The two
supporting rays of that cone are recovered from the rotation angles at
which the Hermitian part of e^{j*alpha} A loses positive semidefiniteness:
if the feasible arc of rotations is [a1, a2], the sector is exactly
[-pi/2 - a1, pi/2 - a2].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError

__all__ = [
    "PhaseInterval",
    "MatrixSectorCertificate",
    "nrange_boundary",
    "matrix_phase_interval",
    "matrix_sector_certify",
    "wrap_angle",
]

DEFAULT_TOL = 1e-9
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def wrap_angle(x):
    """Wrap angles into (-pi, pi]."""
    y = np.mod(np.asarray(x, dtype=np.float64) + np.pi, 2.0 * np.pi) - np.pi
    y = np.where(y <= -np.pi, y + 2.0 * np.pi, y)
    return float(y) if np.isscalar(x) or np.ndim(x) == 0 else y


@dataclass(frozen=True)
class PhaseInterval:
    """Angular sector [lo, hi] in radians; spread at most pi.

    The centre (lo + hi)/2 is normalized into (-pi, pi]; lo and hi stay
    within pi/2 of the centre.
    """

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise InputError("interval endpoints must be finite")
        if hi < lo:
            raise InputError(f"interval endpoints out of order: [{lo}, {hi}]")
        if hi - lo > np.pi + 1e-6:
            raise InputError(f"phase spread exceeds pi: {hi - lo}")
        if hi - lo > np.pi:
            # boundary spread widened by bisection roundoff: clamp to pi
            c = 0.5 * (lo + hi)
            lo, hi = c - np.pi / 2.0, c + np.pi / 2.0
        c = 0.5 * (lo + hi)
        shift = wrap_angle(c) - c
        object.__setattr__(self, "lo", lo + shift)
        object.__setattr__(self, "hi", hi + shift)

    @property
    def center(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def spread(self) -> float:
        return self.hi - self.lo

    @property
    def degrees(self) -> tuple[float, float]:
        return math.degrees(self.lo), math.degrees(self.hi)

    def contains(self, angle: float, tol: float = 0.0) -> bool:
        """Wrap-aware membership test with optional inflation ``tol``."""
        rel = wrap_angle(angle - self.center)
        half = 0.5 * self.spread
        return -half - tol <= rel <= half + tol

    def contains_interval(self, other: "PhaseInterval", tol: float = 0.0) -> bool:
        rel = wrap_angle(other.center - self.center)
        return (
            rel - 0.5 * other.spread >= self.lo - self.center - tol
            and rel + 0.5 * other.spread <= self.hi - self.center + tol
        )

    def shifted(self, delta: float) -> "PhaseInterval":
        return PhaseInterval(self.lo + delta, self.hi + delta)


@dataclass(frozen=True)
class MatrixSectorCertificate:
    """Outcome of the matrix-level sector test.

    kind is one of "sectorial", "semi-sectorial", "indefinite"; for the
    sectorial case ``epsilon`` is a verified quadratic output margin for
    the rotation ``alpha``.  ``min_eig_profile`` records the coarse scan of
    lambda_min(He(e^{j alpha} A)) used by the search (diagnostic).
    """

    kind: str
    alpha: float | None
    epsilon: float | None
    min_eig_profile: np.ndarray

    @property
    def is_sectorial(self) -> bool:
        return self.kind == "sectorial"

    @property
    def is_semi_sectorial(self) -> bool:
        return self.kind in ("sectorial", "semi-sectorial")


def _split(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # He(e^{j a} A) = cos(a) K1 + sin(a) K2 with K1 = He(A), K2 = He(jA).
    Ah = A.conj().swapaxes(-1, -2)
    K1 = 0.5 * (A + Ah)
    K2 = 0.5j * (A - Ah)
    return K1, K2


def _lambda_min(K1: np.ndarray, K2: np.ndarray, alpha) -> np.ndarray:
    """lambda_min(cos(a) K1 + sin(a) K2), broadcasting over alpha arrays."""
    a = np.asarray(alpha, dtype=np.float64)
    ca, sa = np.cos(a), np.sin(a)
    if K1.shape[-1] == 2:
        # closed form for Hermitian 2x2 stacks
        p = ca[..., None, None] * K1 + sa[..., None, None] * K2 \
            if a.ndim else ca * K1 + sa * K2
        tr = (p[..., 0, 0] + p[..., 1, 1]).real
        det = (p[..., 0, 0] * p[..., 1, 1] - p[..., 0, 1] * p[..., 1, 0]).real
        disc = np.maximum(tr * tr - 4.0 * det, 0.0)
        return 0.5 * (tr - np.sqrt(disc))
    if a.ndim:
        comb = ca[..., None, None] * K1 + sa[..., None, None] * K2
    else:
        comb = ca * K1 + sa * K2
    return np.linalg.eigvalsh(comb)[..., 0]


def _refine_max(f, a_lo: float, a_hi: float, iters: int = 60) -> tuple[float, float]:
    """Golden-section maximization of a scalar function on [a_lo, a_hi]."""
    a, b = a_lo, a_hi
    c, d = b - _GOLDEN * (b - a), a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _bisect_crossing(f, a_ok: float, a_bad: float, level: float,
                     iters: int = 60) -> float:
    """Bisection for f(a) = level between a feasible and an infeasible angle."""
    lo, hi = a_ok, a_bad
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(mid) >= level:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _scan_alpha(K1, K2, n_coarse: int = 720):
    alphas = np.linspace(-np.pi, np.pi, n_coarse, endpoint=False) + np.pi / n_coarse
    vals = _lambda_min(K1, K2, alphas)
    return alphas, vals


def _alpha_star(K1, K2):
    """Coarse scan plus golden-section refinement of max lambda_min."""
    alphas, vals = _scan_alpha(K1, K2)
    k = int(np.argmax(vals))
    step = alphas[1] - alphas[0]
    f = lambda a: float(_lambda_min(K1, K2, a))
    a_star, g_star = _refine_max(f, alphas[k] - step, alphas[k] + step)
    if vals[k] > g_star:
        a_star, g_star = float(alphas[k]), float(vals[k])
    return a_star, g_star, np.column_stack([alphas, vals])


def _arc_endpoints(f, a_star: float, level: float) -> tuple[float, float]:
    """Walk from the feasible angle both ways to the level crossings.

    The feasible arc has length at most pi, so each walk terminates.
    """
    offsets = np.linspace(0.0, np.pi, 361)

    def walk(direction: float) -> float:
        prev = a_star
        for off in offsets[1:]:
            a = a_star + direction * off
            if f(a) < level:
                return _bisect_crossing(f, prev, a, level)
            prev = a
        return a_star + direction * np.pi

    return walk(-1.0), walk(+1.0)


def _interval_from_arc(a1: float, a2: float) -> PhaseInterval:
    lo = -np.pi / 2.0 - a1
    hi = np.pi / 2.0 - a2
    if hi < lo:
        # numerically inverted by the bisection tolerance: collapse
        mid = 0.5 * (lo + hi)
        lo = hi = mid
    return PhaseInterval(lo, hi)


def _norm_scale(A: np.ndarray) -> float:
    scale = float(np.linalg.norm(A))
    if scale == 0.0:
        raise InputError("zero matrix has no phase sector")
    if not np.isfinite(scale):
        raise InputError("matrix entries must be finite")
    return scale


def matrix_phase_interval(A, tol: float = DEFAULT_TOL) -> PhaseInterval | None:
    """Angular sector of the cone over the numerical range of ``A``.

    Returns ``None`` when no rotation makes He(e^{j alpha} A) positive
    semidefinite within ``tol * ||A||_F`` (the range surrounds the origin,
    so angles are unbounded).  Near-zero range points never influence the
    result: the sector is computed from supporting rays, not from sampled
    angles.
    """
    A = np.asarray(A, dtype=np.complex128)
    scale = _norm_scale(A)
    K1, K2 = _split(A / scale)
    a_star, g_star, _ = _alpha_star(K1, K2)
    level = -float(tol)
    if g_star < level:
        return None
    f = lambda a: float(_lambda_min(K1, K2, a))
    a1, a2 = _arc_endpoints(f, a_star, level)
    return _interval_from_arc(a1, a2)


def matrix_sector_certify(A, tol: float = DEFAULT_TOL) -> MatrixSectorCertificate:
    """Classify a matrix as sectorial / semi-sectorial / indefinite.

    Searches the rotation by coarse scan plus golden-section maximization
    of lambda_min(He(e^{j alpha} A)); when the maximum is strictly
    positive, the largest quadratic margin epsilon with
    He(e^{j alpha} A) >= 2 epsilon A*A is located by bisection.
    """
    A = np.asarray(A, dtype=np.complex128)
    scale = _norm_scale(A)
    K1, K2 = _split(A / scale)
    a_star, g_star, profile = _alpha_star(K1, K2)
    if g_star < -tol:
        return MatrixSectorCertificate("indefinite", None, None, profile)
    if g_star <= tol:
        return MatrixSectorCertificate("semi-sectorial", a_star, None, profile)

    He_rot = np.cos(a_star) * K1 + np.sin(a_star) * K2
    AtA = (A.conj().T @ A) / scale**2

    def margin(eps: float) -> float:
        return float(np.linalg.eigvalsh(He_rot - 2.0 * eps * AtA)[0])

    smax2 = float(np.linalg.norm(A / scale, ord=2)) ** 2
    eps_ok = g_star / (2.0 * smax2)  # always feasible
    eps_bad = 2.0 * eps_ok
    for _ in range(200):
        if margin(eps_bad) < -tol:
            break
        eps_ok, eps_bad = eps_bad, 2.0 * eps_bad
    else:
        # margin never went negative (e.g. A*A-deficient directions)
        return MatrixSectorCertificate("sectorial", a_star, eps_bad / scale, profile)
    lo, hi = eps_ok, eps_bad
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if margin(mid) >= -tol:
            lo = mid
        else:
            hi = mid
    return MatrixSectorCertificate("sectorial", a_star, lo / scale, profile)


def nrange_boundary(A, K: int = 64) -> list[complex]:
    """Boundary points of the numerical range by supporting-direction sweep.

    For each direction theta_k = 2 pi k / K, the top eigenvector x of
    He(e^{-j theta_k} A) maximizes Re(e^{-j theta} x*Ax), so x*Ax lies on
    the boundary of the (convex) range.
    """
    A = np.asarray(A, dtype=np.complex128)
    _norm_scale(A)
    if K < 8:
        raise InputError("need at least 8 directions")
    pts = []
    for theta in 2.0 * np.pi * np.arange(K) / K:
        M = 0.5 * (np.exp(-1j * theta) * A + (np.exp(-1j * theta) * A).conj().T)
        vals, vecs = np.linalg.eigh(M)
        x = vecs[:, -1]
        pts.append(complex(x.conj() @ A @ x))
    return pts
