"""System-level phase sectors.

For a stable LTI system the closed cone over the collected per-frequency
numerical ranges (positive frequencies only, including omega = 0 and the
high-frequency limit) determines the system's phase sector.  A single
rotation alpha that makes He(e^{j alpha} P(jw)) positive semidefinite for
every grid frequency certifies the sector; the sector itself is the
envelope of the per-frequency angular intervals.

Closed-form sectors for static sector nonlinearities, logarithmic
quantizers and very strictly passive systems are provided alongside, as
are the frequency-wise analysis with its unit-modulus rotation multiplier
and the time-domain supply-rate and reactive-energy diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .lti import DEFAULT_GRID, FrequencyGrid, TransferMatrix, freq_response, require_stable
from .nrange import PhaseInterval, wrap_angle
from .signals import RealSignal, hilbert, inner

__all__ = [
    "SectorBound",
    "QuantizerParams",
    "PassivityIndices",
    "SectorPhase",
    "MultiplierSpec",
    "SystemPhaseReport",
    "FrequencywisePhase",
    "sector_phase",
    "quantizer_sector",
    "vsp_phase",
    "lti_phase",
    "lti_phase_frequencywise",
    "lti_passivity_index",
    "supply_rate_check",
    "reactive_ratio",
    "identity_multiplier",
]

DEFAULT_TOL = 1e-9
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


# -- closed-form nonlinear classes ------------------------------------------

@dataclass(frozen=True)
class SectorBound:
    """Static nonlinearity sector 0 < a < b: a <= h(x)/x <= b."""

    a: float
    b: float

    def __post_init__(self):
        if not (0.0 < self.a < self.b) or not np.isfinite(self.b):
            raise InputError(f"sector requires b > a > 0, got ({self.a}, {self.b})")

    @property
    def disk_center(self) -> float:
        return 0.5 * (self.b + self.a)

    @property
    def disk_radius(self) -> float:
        return 0.5 * (self.b - self.a)

    @property
    def half_angle(self) -> float:
        return math.asin((self.b - self.a) / (self.b + self.a))


@dataclass(frozen=True)
class QuantizerParams:
    """Logarithmic quantizer density rho in (0, 1); small rho = coarse."""

    rho: float

    def __post_init__(self):
        if not (0.0 < self.rho < 1.0):
            raise InputError(f"quantizer density must lie in (0, 1), got {self.rho}")


@dataclass(frozen=True)
class PassivityIndices:
    """Input/output passivity surplus (delta, epsilon), both positive."""

    delta: float
    epsilon: float

    def __post_init__(self):
        prod = self.delta * self.epsilon
        if self.delta <= 0.0 or self.epsilon <= 0.0 or prod > 0.25 + 1e-15:
            raise InputError(
                "passivity indices require delta, epsilon > 0 with "
                f"delta*epsilon <= 1/4, got ({self.delta}, {self.epsilon})"
            )


@dataclass(frozen=True)
class SectorPhase:
    """Phase sector of a sector-bounded static map, plus its value disk."""

    interval: PhaseInterval
    disk_center: float
    disk_radius: float


def sector_phase(bound: SectorBound) -> SectorPhase:
    """Symmetric sector +-arcsin((b-a)/(b+a)) with the disk of normalized
    range values (center (b+a)/2, radius (b-a)/2)."""
    phi = bound.half_angle
    return SectorPhase(PhaseInterval(-phi, phi), bound.disk_center, bound.disk_radius)


def quantizer_sector(q: QuantizerParams) -> SectorBound:
    """Sector of the logarithmic quantizer: (2 rho/(1+rho), 2/(1+rho))."""
    return SectorBound(2.0 * q.rho / (1.0 + q.rho), 2.0 / (1.0 + q.rho))


def vsp_phase(idx: PassivityIndices) -> PhaseInterval:
    """Phase sector +-arcsin(sqrt(1 - 4 delta epsilon)) of a very strictly
    passive system."""
    phi = math.asin(math.sqrt(max(0.0, 1.0 - 4.0 * idx.delta * idx.epsilon)))
    return PhaseInterval(-phi, phi)


# -- batched Hermitian-part pencil -------------------------------------------

class _Pencil:
    """Fast lambda_min(cos(a) K1(w) + sin(a) K2(w)) over matrix stacks.

    2x2 stacks use the closed-form smallest eigenvalue; larger sizes fall
    back to batched eigvalsh.
    """

    def __init__(self, mats: np.ndarray):
        mats = np.asarray(mats, dtype=np.complex128)
        Ah = mats.conj().swapaxes(-1, -2)
        self.K1 = 0.5 * (mats + Ah)
        self.K2 = 0.5j * (mats - Ah)
        self.n = mats.shape[-1]
        self.count = mats.shape[0]
        if self.n == 2:
            self._a = (self.K1[:, 0, 0].real, self.K2[:, 0, 0].real)
            self._d = (self.K1[:, 1, 1].real, self.K2[:, 1, 1].real)
            self._b = (self.K1[:, 0, 1], self.K2[:, 0, 1])

    def _closed_form(self, ca, sa):
        a = ca * self._a[0] + sa * self._a[1]
        d = ca * self._d[0] + sa * self._d[1]
        b = ca * self._b[0] + sa * self._b[1]
        tr = a + d
        det = a * d - (b.real**2 + b.imag**2)
        disc = np.maximum(tr * tr - 4.0 * det, 0.0)
        return 0.5 * (tr - np.sqrt(disc))

    def lam(self, alpha) -> np.ndarray:
        """lambda_min per node; scalar alpha or one alpha per node."""
        ca, sa = np.cos(alpha), np.sin(alpha)
        if self.n == 2:
            return self._closed_form(ca, sa)
        if np.ndim(alpha) == 0:
            comb = ca * self.K1 + sa * self.K2
        else:
            comb = ca[:, None, None] * self.K1 + sa[:, None, None] * self.K2
        return np.linalg.eigvalsh(comb)[..., 0]

    def lam_outer(self, alphas: np.ndarray) -> np.ndarray:
        """(A, W) table of lambda_min over an alpha grid."""
        if self.n == 2:
            ca, sa = np.cos(alphas)[:, None], np.sin(alphas)[:, None]
            return self._closed_form(ca, sa)
        out = np.empty((alphas.size, self.count))
        for i, a in enumerate(alphas):
            out[i] = self.lam(float(a))
        return out


def _golden_max(f, lo: float, hi: float, iters: int = 60) -> tuple[float, float]:
    a, b = lo, hi
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


_COARSE_ALPHAS = np.linspace(-np.pi, np.pi, 720, endpoint=False) + np.pi / 720.0
_WALK_OFFSETS = np.linspace(0.0, np.pi, 361)


def _batch_arc_endpoints(pencil: _Pencil, alpha_star: np.ndarray, level: float):
    """Per-node feasible-arc endpoints by vectorized walk + bisection."""

    def walk(direction: float) -> np.ndarray:
        if pencil.n == 2:
            angles = alpha_star[None, :] + direction * _WALK_OFFSETS[:, None]
            vals = pencil._closed_form(np.cos(angles), np.sin(angles))
        else:
            vals = np.empty((_WALK_OFFSETS.size, pencil.count))
            for i, off in enumerate(_WALK_OFFSETS):
                vals[i] = pencil.lam(alpha_star + direction * off)
        below = vals < level
        below[0] = False
        has = below.any(axis=0)
        first = np.argmax(below, axis=0)
        lo_off = np.where(has, _WALK_OFFSETS[np.maximum(first - 1, 0)], np.pi)
        hi_off = np.where(has, _WALK_OFFSETS[np.minimum(first, len(_WALK_OFFSETS) - 1)], np.pi)
        for _ in range(60):
            mid = 0.5 * (lo_off + hi_off)
            vals = pencil.lam(alpha_star + direction * mid)
            ok = vals >= level
            lo_off = np.where(ok, mid, lo_off)
            hi_off = np.where(ok, hi_off, mid)
        return alpha_star + direction * 0.5 * (lo_off + hi_off)

    return walk(-1.0), walk(+1.0)


# -- LTI phase ----------------------------------------------------------------

@dataclass(frozen=True)
class MultiplierSpec:
    """Unit-modulus scalar rotation sampled on the analysis grid.

    ``values[k]`` multiplies the response at ``omegas[k]``; the negative
    axis is covered by the conjugate-symmetric extension.  The final
    sample also serves the high-frequency limit node.
    """

    omegas: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.omegas, dtype=np.float64)
        v = np.asarray(self.values, dtype=np.complex128)
        if w.shape != v.shape or w.ndim != 1 or w.size == 0:
            raise InputError("multiplier needs matching 1-D omega/value arrays")
        if np.max(np.abs(np.abs(v) - 1.0)) > 1e-9:
            raise InputError("multiplier samples must have unit modulus")
        w.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "omegas", w)
        object.__setattr__(self, "values", v)

    def conjugated(self) -> "MultiplierSpec":
        return MultiplierSpec(self.omegas, np.conj(self.values))


def identity_multiplier(grid: FrequencyGrid = DEFAULT_GRID) -> MultiplierSpec:
    w = grid.with_zero()
    return MultiplierSpec(w, np.ones_like(w, dtype=np.complex128))


@dataclass(frozen=True)
class SystemPhaseReport:
    """Result of the LTI phase analysis.

    verdict is "sectorial", "semi-sectorial" or "indefinite".  The
    interval (None when indefinite) is the envelope of the per-frequency
    sectors under the global rotation certificate ``alpha``.  ``epsilon``
    is the quadratic output margin when one exists; ``uniform_margin`` is
    the smallest normalized Hermitian-part eigenvalue over all nodes
    including the high-frequency limit.
    """

    interval: PhaseInterval | None
    verdict: str
    alpha: float | None
    epsilon: float | None
    uniform_margin: float
    per_frequency: tuple
    multiplier: MultiplierSpec | None = None

    @property
    def is_semi_sectorial(self) -> bool:
        return self.verdict in ("sectorial", "semi-sectorial")

    @property
    def is_sectorial(self) -> bool:
        return self.verdict == "sectorial"


class _NodeSet:
    """Frequency nodes (omega = 0, the grid, optionally the limit matrix)."""

    def __init__(self, P, grid: FrequencyGrid):
        from .lti import limit_matrix

        omegas = grid.with_zero()
        mats = np.asarray(freq_response(P, omegas))
        limit = limit_matrix(P).astype(np.complex128)
        self.limit_nonzero = bool(np.linalg.norm(limit) > 0.0)
        if self.limit_nonzero:
            self.omegas = np.concatenate([omegas, [np.inf]])
            self.mats = np.concatenate([mats, limit[None]], axis=0)
        else:
            self.omegas = omegas
            self.mats = mats
        self.norms = np.linalg.norm(self.mats, axis=(1, 2))
        self.scale = float(np.max(self.norms))
        self.active = self.norms > 1e-300
        normed = np.zeros_like(self.mats)
        normed[self.active] = self.mats[self.active] / self.norms[self.active, None, None]
        self.pencil = _Pencil(normed[self.active])


def _analyze_nodes(nodes: _NodeSet, tol: float):
    """Global rotation search + per-node sectors for a node family.

    Returns (alpha_star, m_star, envelope, per_node_intervals) where the
    envelope is None if no single rotation covers every node.  Per-node
    intervals are re-branched into the certified half-plane so their
    envelope is well defined.
    """
    pencil = nodes.pencil
    if pencil.count == 0:
        raise InputError("response vanishes identically on the grid")
    table = pencil.lam_outer(_COARSE_ALPHAS)
    m_vals = table.min(axis=1)
    k = int(np.argmax(m_vals))
    step = _COARSE_ALPHAS[1] - _COARSE_ALPHAS[0]
    m_fun = lambda a: float(pencil.lam(a).min())
    a_star, m_star = _golden_max(m_fun, _COARSE_ALPHAS[k] - step, _COARSE_ALPHAS[k] + step)
    if m_vals[k] > m_star:
        a_star, m_star = float(_COARSE_ALPHAS[k]), float(m_vals[k])
    if m_star < -float(tol):
        return a_star, m_star, None, None

    raw, _ = per_node_sectors(nodes, tol, strict=False)
    mu = -a_star
    aligned: list[PhaseInterval | None] = []
    lo_env, hi_env = math.inf, -math.inf
    for iv in raw:
        if iv is None:
            aligned.append(None)
            continue
        c = mu + wrap_angle(iv.center - mu)
        lo, hi = c - 0.5 * iv.spread, c + 0.5 * iv.spread
        aligned.append(PhaseInterval(lo, hi))
        lo_env = min(lo_env, lo)
        hi_env = max(hi_env, hi)
    envelope = PhaseInterval(lo_env, hi_env)
    return a_star, m_star, envelope, tuple(aligned)


def _interval_at(mats_fn, w: float, mu: float, tol: float) -> PhaseInterval | None:
    from .nrange import matrix_phase_interval

    iv = matrix_phase_interval(mats_fn(w), tol)
    if iv is None:
        return None
    c = mu + wrap_angle(iv.center - mu)
    return PhaseInterval(c - 0.5 * iv.spread, c + 0.5 * iv.spread)


def _refine_envelope(P, envelope, per_freq, omegas, mu, tol):
    """Golden-section polish of the envelope extremes over frequency."""
    finite = [
        (w, iv) for w, iv in zip(omegas, per_freq)
        if iv is not None and np.isfinite(w) and w > 0.0
    ]
    if len(finite) < 3:
        return envelope
    ws = np.array([w for w, _ in finite])
    los = np.array([iv.lo for _, iv in finite])
    his = np.array([iv.hi for _, iv in finite])

    def polish(idx: int, pick, sign: float, current: float) -> float:
        # maximize sign * pick(sector(omega)) over the bracketing grid cell
        if idx <= 0 or idx >= len(ws) - 1:
            return current
        a, b = math.log(ws[idx - 1]), math.log(ws[idx + 1])

        def f(t: float) -> float:
            iv = _interval_at(lambda w: freq_response(P, w), math.exp(t), mu, tol)
            return sign * pick(iv) if iv is not None else -math.inf

        _, v_best = _golden_max(f, a, b, iters=40)
        return sign * max(v_best, sign * current)

    lo = polish(int(np.argmin(los)), lambda iv: iv.lo, -1.0, envelope.lo)
    hi = polish(int(np.argmax(his)), lambda iv: iv.hi, +1.0, envelope.hi)
    return PhaseInterval(min(lo, envelope.lo), max(hi, envelope.hi))


def _epsilon_certificate(mats, alpha: float, scale: float, tol: float) -> float | None:
    """Largest quadratic margin epsilon with He(e^{ja} M) >= 2 eps M*M."""
    rot = np.exp(1j * alpha) * mats
    He = 0.5 * (rot + rot.conj().swapaxes(-1, -2))
    G = mats.conj().swapaxes(-1, -2) @ mats
    level = -tol * scale
    m_abs = float(np.linalg.eigvalsh(He)[..., 0].min())
    if m_abs <= tol * scale:
        return None

    def margin(eps: float) -> float:
        return float(np.linalg.eigvalsh(He - 2.0 * eps * G)[..., 0].min())

    smax2 = float(np.max(np.linalg.norm(mats, ord=2, axis=(1, 2)))) ** 2
    eps_ok = m_abs / (2.0 * smax2)
    eps_bad = 2.0 * eps_ok
    for _ in range(200):
        if margin(eps_bad) < level:
            break
        eps_ok, eps_bad = eps_bad, 2.0 * eps_bad
    else:
        return eps_bad
    for _ in range(60):
        mid = 0.5 * (eps_ok + eps_bad)
        if margin(mid) >= level:
            eps_ok = mid
        else:
            eps_bad = mid
    return eps_ok


def lti_phase(
    P: TransferMatrix,
    grid: FrequencyGrid = DEFAULT_GRID,
    tol: float = DEFAULT_TOL,
    refine: bool = True,
) -> SystemPhaseReport:
    """Phase sector of a stable LTI system over the positive frequency axis.

    Evaluates the per-frequency numerical-range sectors on the grid
    (omega = 0 and the high-frequency limit included), searches a single
    rotation alpha that certifies a common half-plane, and reports the
    sector envelope.  The verdict is "sectorial" only when a quadratic
    output margin exists and the Hermitian part keeps a strictly positive
    uniform margin through the high-frequency closure; it is
    "semi-sectorial" when only the half-plane certificate holds, and
    "indefinite" when no rotation works.

    Raises
    ------
    UnstableSystemError
        If any pole lies outside the open left half-plane.
    """
    require_stable(P)
    nodes = _NodeSet(P, grid)
    a_star, m_star, envelope, per_node = _analyze_nodes(nodes, tol)
    omegas = nodes.omegas
    if envelope is None:
        return SystemPhaseReport(
            interval=None,
            verdict="indefinite",
            alpha=None,
            epsilon=None,
            uniform_margin=m_star,
            per_frequency=tuple(zip(omegas.tolist(), [None] * omegas.size)),
        )
    if refine:
        envelope = _refine_envelope(P, envelope, per_node, omegas, -a_star, tol)

    eps = _epsilon_certificate(nodes.mats, a_star, nodes.scale, tol)
    rot = np.exp(1j * a_star) * nodes.mats
    He = 0.5 * (rot + rot.conj().swapaxes(-1, -2))
    uniform = float(np.linalg.eigvalsh(He)[..., 0].min()) / nodes.scale
    if not nodes.limit_nonzero:
        uniform = min(uniform, 0.0)
    verdict = "sectorial" if (eps is not None and uniform > tol) else "semi-sectorial"
    return SystemPhaseReport(
        interval=envelope,
        verdict=verdict,
        alpha=a_star,
        epsilon=eps,
        uniform_margin=uniform,
        per_frequency=tuple(zip(omegas.tolist(), per_node)),
    )


@dataclass(frozen=True)
class FrequencywisePhase:
    """Per-frequency sectors with the centring rotation multiplier."""

    omegas: np.ndarray
    intervals: tuple
    multiplier: MultiplierSpec
    delta: float


def per_node_sectors(nodes: _NodeSet, tol: float, strict: bool):
    """Per-node rotation maxima and sectors, independent of any global
    certificate.

    Returns (intervals, g_w) indexed like ``nodes.omegas``: an interval is
    None when the node is inactive (zero matrix, no angle) or fails the
    per-node feasibility bar (``g > tol`` when strict, ``g >= -tol``
    otherwise).  ``g_w`` is nan on inactive nodes.
    """
    pencil = nodes.pencil
    table = pencil.lam_outer(_COARSE_ALPHAS)
    step = _COARSE_ALPHAS[1] - _COARSE_ALPHAS[0]
    k_w = np.argmax(table, axis=0)
    alpha_w = _COARSE_ALPHAS[k_w].copy()
    g_w = table[k_w, np.arange(pencil.count)].copy()
    bar = tol if strict else -float(tol)
    for i in np.nonzero(g_w <= bar)[0]:
        f = lambda a: float(pencil.lam(np.full(pencil.count, a))[i])
        a_ref, g_ref = _golden_max(f, alpha_w[i] - step, alpha_w[i] + step)
        if g_ref > g_w[i]:
            alpha_w[i], g_w[i] = a_ref, g_ref
    feasible = g_w > bar if strict else g_w >= bar

    a1_w, a2_w = _batch_arc_endpoints(pencil, alpha_w, -float(tol))
    lo_w = -np.pi / 2.0 - a1_w
    hi_w = np.pi / 2.0 - a2_w
    mid = 0.5 * (lo_w + hi_w)
    lo_w = np.minimum(lo_w, mid)
    hi_w = np.maximum(hi_w, mid)

    intervals: list[PhaseInterval | None] = []
    gs: list[float] = []
    j = 0
    for idx in range(nodes.omegas.size):
        if not nodes.active[idx]:
            intervals.append(None)
            gs.append(float("nan"))
            continue
        if feasible[j]:
            intervals.append(PhaseInterval(lo_w[j], hi_w[j]))
        else:
            intervals.append(None)
        gs.append(float(g_w[j]))
        j += 1
    return tuple(intervals), np.array(gs)


def lti_phase_frequencywise(
    P: TransferMatrix,
    grid: FrequencyGrid = DEFAULT_GRID,
    tol: float = DEFAULT_TOL,
) -> FrequencywisePhase:
    """Frequency-wise sectors and the rotation that centres each of them.

    Every grid response matrix must be strictly sectorial (its range must
    avoid the origin).  The returned multiplier samples
    e^{-j phi_c(omega)} rotate each frequency's sector onto the positive
    real axis; delta is the verified uniform lower bound on the Hermitian
    part of the rotated response.

    Raises
    ------
    IndefiniteError
        If some frequency's range surrounds the origin (no sector).
    """
    from .errors import IndefiniteError

    require_stable(P)
    nodes = _NodeSet(P, grid)
    intervals, _ = per_node_sectors(nodes, tol, strict=True)
    bad = [i for i, iv in enumerate(intervals) if iv is None]
    if bad:
        raise IndefiniteError(
            f"response is not frequency-wise sectorial "
            f"(first bad node omega = {nodes.omegas[bad[0]]:.6g})"
        )
    center = np.array([iv.center for iv in intervals])
    values = np.exp(-1j * center)
    rotated = values[:, None, None] * nodes.mats
    He = 0.5 * (rotated + rotated.conj().swapaxes(-1, -2))
    delta = float(np.linalg.eigvalsh(He)[..., 0].min())
    return FrequencywisePhase(
        omegas=nodes.omegas,
        intervals=intervals,
        multiplier=MultiplierSpec(nodes.omegas, values),
        delta=delta,
    )


def lti_passivity_index(
    P: TransferMatrix, grid: FrequencyGrid = DEFAULT_GRID
) -> float:
    """Largest nu with He(P(jw)) >= nu (I + P(jw)*P(jw)) over the grid.

    This is the symmetric (input = output = nu) passivity index, found by
    bisection; negative values quantify a passivity deficit.
    """
    require_stable(P)
    nodes = _NodeSet(P, grid)
    mats = nodes.mats
    He = 0.5 * (mats + mats.conj().swapaxes(-1, -2))
    G = np.eye(mats.shape[-1])[None] + mats.conj().swapaxes(-1, -2) @ mats

    def margin(nu: float) -> float:
        return float(np.linalg.eigvalsh(He - nu * G)[..., 0].min())

    lam_he = float(np.linalg.eigvalsh(He)[..., 0].min())
    lo = min(lam_he, 0.0) - 1.0
    hi = float(np.max(np.linalg.eigvalsh(He)[..., -1])) + 1.0
    if margin(lo) < 0.0:
        raise InputError("passivity-index bracket failed")
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if margin(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    return lo


# -- time-domain diagnostics --------------------------------------------------

def supply_rate_check(u: RealSignal, y: RealSignal, alpha: float) -> float:
    """Accumulated rotated supply <u, cos(a) y - sin(a) Hy>.

    Nonnegative over all inputs exactly when the operator's phase sector
    fits inside [-pi/2 - a, pi/2 - a].  The imaginary residue of the inner
    products (roundoff) is discarded.
    """
    iy = inner(u, y)
    ihy = inner(u, hilbert(y))
    scale = max(abs(iy), abs(ihy), 1e-300)
    if max(abs(iy.imag), abs(ihy.imag)) > 1e-9 * scale:
        raise InputError("unexpected imaginary residue in real supply rate")
    return math.cos(alpha) * iy.real - math.sin(alpha) * ihy.real


def reactive_ratio(u: RealSignal, y: RealSignal) -> float:
    """Ratio of reactive to real energy <u, Hy> / <u, y>.

    Raises when the real energy vanishes (|<u, y>| below 1e-12 relative),
    in which case the sample carries no usable angle.
    """
    r = inner(u, y).real
    if abs(r) <= 1e-12 * u.norm() * y.norm():
        raise InputError("vanishing real energy; sample excluded")
    return inner(u, hilbert(y)).real / r
