"""Feedback stability criterion checkers.

Every checker returns a :class:`StabilityVerdict` with one of three
statuses: "pass", "fail" or "hypothesis-unmet".  The criteria are
sufficient conditions, so a failed hypothesis is reported distinctly from
a failed margin (it is not instability evidence).  Margins follow the
strictness of the underlying statements: gain and loop-phase sums compare
strictly, the closed-loop bound preconditions do not.  Verdicts built
from empirically estimated sectors are demoted to indicative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .lti import DEFAULT_GRID, FrequencyGrid, Rational, TransferMatrix, freq_response, nyquist_curve, require_stable
from .nrange import PhaseInterval
from .phase import MultiplierSpec, SectorBound, _NodeSet, _analyze_nodes, _epsilon_certificate, lti_phase

__all__ = [
    "StabilityVerdict",
    "ForbiddenRegion",
    "forbidden_region",
    "small_gain_check",
    "small_phase_check",
    "generalized_small_phase_check",
    "freqwise_small_phase_check",
    "circle_criterion_check",
    "phase_cone_check",
    "parallel_phase",
    "closed_loop_phase_bound",
    "index_passivity_check",
    "cone_contains_disk",
]

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class StabilityVerdict:
    """Outcome of one named criterion.

    ``status`` is "pass", "fail" or "hypothesis-unmet"; ``margins`` are
    the signed quantities whose strict positivity constitutes a pass;
    ``inputs`` echoes the data the verdict was computed from.  Verdicts
    whose provenance includes "empirical" are indicative only.
    """

    criterion: str
    status: str
    margins: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)
    provenance: tuple = ()

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    @property
    def indicative(self) -> bool:
        return any("empirical" in p for p in self.provenance)

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "pass": True if self.status == "pass"
            else False if self.status == "fail" else None,
            "status": self.status,
            "indicative": self.indicative,
            "provenance": list(self.provenance),
            "margins": {k: float(v) for k, v in self.margins.items()},
            "inputs": _jsonable(self.inputs),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, PhaseInterval):
        return {"lo_rad": obj.lo, "hi_rad": obj.hi,
                "lo_deg": math.degrees(obj.lo), "hi_deg": math.degrees(obj.hi)}
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


@dataclass(frozen=True)
class ForbiddenRegion:
    """Disk the response must avoid, and the cone the disk spans.

    The disk sits on the negative real axis (center ``disk_center`` < 0);
    the cone opens to the left with half-angle ``half_angle`` about the
    negative real axis, so the allowed response angles are the open band
    (half_angle - pi, pi - half_angle).
    """

    disk_center: float
    disk_radius: float
    half_angle: float

    @property
    def allowed_lo(self) -> float:
        return self.half_angle - math.pi

    @property
    def allowed_hi(self) -> float:
        return math.pi - self.half_angle


def forbidden_region(bound: SectorBound) -> ForbiddenRegion:
    a, b = bound.a, bound.b
    return ForbiddenRegion(
        disk_center=-(a + b) / (2.0 * a * b),
        disk_radius=(b - a) / (2.0 * a * b),
        half_angle=bound.half_angle,
    )


def cone_contains_disk(bound: SectorBound, n_check: int = 256) -> bool:
    """Geometric sanity check: the forbidden cone contains the disk.

    The cone spanned by the disk is tangent to it, so containment holds
    with equality on the tangent rays; verified on sampled boundary
    points with a roundoff allowance.
    """
    reg = forbidden_region(bound)
    theta = np.linspace(0.0, 2.0 * np.pi, n_check, endpoint=False)
    zs = reg.disk_center + reg.disk_radius * np.exp(1j * theta)
    ang = np.abs(np.angle(zs))
    return bool(np.all(ang >= math.pi - reg.half_angle - 1e-9))


def small_gain_check(g_p: float, g_c: float,
                     provenance: tuple = ()) -> StabilityVerdict:
    """Loop-gain product test: pass iff g_p * g_c < 1 strictly."""
    if g_p < 0.0 or g_c < 0.0:
        raise InputError("gains must be nonnegative")
    margin = 1.0 - g_p * g_c
    return StabilityVerdict(
        criterion="small-gain",
        status="pass" if margin > 0.0 else "fail",
        margins={"gain_margin": margin},
        inputs={"gain_p": g_p, "gain_c": g_c},
        provenance=provenance,
    )


def small_phase_check(
    phi_p: PhaseInterval,
    phi_c: PhaseInterval,
    p_sectorial: bool,
    c_sectorial: bool,
    provenance: tuple = (),
) -> StabilityVerdict:
    """Loop-phase test: both sector sums must stay strictly inside +-pi.

    Providing a phase interval asserts the corresponding system is at
    least semi-sectorial; at least one side must additionally be
    sectorial, else the hypothesis is unmet.
    """
    upper = math.pi - (phi_p.hi + phi_c.hi)
    lower = (phi_p.lo + phi_c.lo) + math.pi
    margins = {"upper_deg": math.degrees(upper), "lower_deg": math.degrees(lower)}
    inputs = {"phi_p": phi_p, "phi_c": phi_c,
              "p_sectorial": p_sectorial, "c_sectorial": c_sectorial}
    if not (p_sectorial or c_sectorial):
        status = "hypothesis-unmet"
    elif upper > 0.0 and lower > 0.0:
        status = "pass"
    else:
        status = "fail"
    return StabilityVerdict("small-phase", status, margins, inputs, provenance)


def index_passivity_check(
    delta_p: float, eps_p: float, delta_c: float, eps_c: float,
    provenance: tuple = (),
) -> StabilityVerdict:
    """Passivity-index version: both cross sums must be strictly positive."""
    m1 = delta_p + eps_c
    m2 = delta_c + eps_p
    return StabilityVerdict(
        criterion="index-passivity",
        status="pass" if (m1 > 0.0 and m2 > 0.0) else "fail",
        margins={"delta_p_plus_eps_c": m1, "delta_c_plus_eps_p": m2},
        inputs={"delta_p": delta_p, "eps_p": eps_p,
                "delta_c": delta_c, "eps_c": eps_c},
        provenance=provenance,
    )


class _RotatedNodes:
    """Adapter exposing multiplier-rotated response nodes to the phase core."""

    def __init__(self, P: TransferMatrix, mult: MultiplierSpec, conjugate: bool):
        from .lti import limit_matrix
        from .phase import _Pencil

        omegas = mult.omegas
        finite = np.isfinite(omegas)
        mats = np.asarray(freq_response(P, omegas[finite]))
        values = mult.values[finite]
        limit = limit_matrix(P).astype(np.complex128)
        self.limit_nonzero = bool(np.linalg.norm(limit) > 0.0)
        if conjugate:
            values = np.conj(values)
        rotated = values[:, None, None] * mats
        if self.limit_nonzero:
            # the final multiplier sample serves the high-frequency node
            v_inf = np.conj(mult.values[-1]) if conjugate else mult.values[-1]
            rotated = np.concatenate([rotated, (v_inf * limit)[None]], axis=0)
            self.omegas = np.concatenate([omegas[finite], [np.inf]])
        else:
            self.omegas = omegas[finite]
        self.mats = rotated
        self.norms = np.linalg.norm(self.mats, axis=(1, 2))
        self.scale = float(np.max(self.norms))
        self.active = self.norms > 1e-300
        normed = np.zeros_like(self.mats)
        normed[self.active] = self.mats[self.active] / self.norms[self.active, None, None]
        self.pencil = _Pencil(normed[self.active])


def generalized_small_phase_check(
    P: TransferMatrix,
    C: TransferMatrix,
    multiplier: MultiplierSpec,
    tol: float = DEFAULT_TOL,
    provenance: tuple = (),
) -> StabilityVerdict:
    """Loop-phase test under a unit-modulus rotation multiplier.

    The plant's sector is taken from the rotated responses m(w) P(jw) and
    must carry a quadratic-margin certificate; the controller uses the
    adjoint rotation conj(m(w)) C(jw) and needs only the half-plane
    certificate.  With the identity multiplier this reduces exactly to
    :func:`small_phase_check` on the plain sectors.
    """
    require_stable(P)
    require_stable(C)
    nodes_p = _RotatedNodes(P, multiplier, conjugate=False)
    nodes_c = _RotatedNodes(C, multiplier, conjugate=True)
    a_p, m_p, env_p, _ = _analyze_nodes(nodes_p, tol)
    a_c, m_c, env_c, _ = _analyze_nodes(nodes_c, tol)
    inputs = {"multiplier_nodes": int(multiplier.omegas.size)}
    if env_p is None or env_c is None:
        return StabilityVerdict(
            "generalized-small-phase", "hypothesis-unmet",
            {"rotated_margin_p": m_p, "rotated_margin_c": m_c},
            inputs, provenance,
        )
    eps_p = _epsilon_certificate(nodes_p.mats, a_p, nodes_p.scale, tol)
    if eps_p is None:
        return StabilityVerdict(
            "generalized-small-phase", "hypothesis-unmet",
            {"rotated_margin_p": m_p, "rotated_margin_c": m_c},
            {**inputs, "reason": "no quadratic margin for rotated plant"},
            provenance,
        )
    upper = math.pi - (env_p.hi + env_c.hi)
    lower = (env_p.lo + env_c.lo) + math.pi
    inputs.update({"phi_p_rotated": env_p, "phi_c_rotated": env_c,
                   "epsilon_p": eps_p})
    return StabilityVerdict(
        "generalized-small-phase",
        "pass" if (upper > 0.0 and lower > 0.0) else "fail",
        {"upper_deg": math.degrees(upper), "lower_deg": math.degrees(lower)},
        inputs, provenance,
    )


def freqwise_small_phase_check(
    P: TransferMatrix,
    C: TransferMatrix,
    grid: FrequencyGrid = DEFAULT_GRID,
    tol: float = DEFAULT_TOL,
    provenance: tuple = (),
) -> StabilityVerdict:
    """Frequency-wise loop-phase test on matching grids.

    At every node the plant's response matrix must be strictly sectorial
    and the controller's at least semi-sectorial; the per-frequency sector
    sums must then stay strictly inside +-pi.  Reports the worst-frequency
    margins.
    """
    from .errors import IndefiniteError
    from .phase import lti_phase_frequencywise, per_node_sectors

    require_stable(P)
    require_stable(C)
    try:
        fw_p = lti_phase_frequencywise(P, grid, tol)
    except IndefiniteError:
        return StabilityVerdict(
            "freqwise-small-phase", "hypothesis-unmet", {},
            {"reason": "plant is not frequency-wise sectorial"}, provenance,
        )
    # the controller needs only per-frequency half-plane certificates; no
    # common rotation across frequencies is required here
    nodes_c = _NodeSet(C, grid)
    per_c, _ = per_node_sectors(nodes_c, tol, strict=False)
    for idx, iv in enumerate(per_c):
        if iv is None and nodes_c.active[idx]:
            return StabilityVerdict(
                "freqwise-small-phase", "hypothesis-unmet", {},
                {"reason": "controller is not frequency-wise semi-sectorial",
                 "omega": float(nodes_c.omegas[idx])},
                provenance,
            )
    # align the two node lists: both are grid.with_zero() (+ limit when fed
    # through); a zero-response node on either side carries no angle
    iv_p = {w: iv for w, iv in zip(fw_p.omegas, fw_p.intervals)}
    iv_c = {w: iv for w, iv in zip(nodes_c.omegas, per_c)}
    upper = math.inf
    lower = math.inf
    w_upper = w_lower = 0.0
    for w, ip in iv_p.items():
        ic = iv_c.get(w)
        if ic is None:
            continue
        u = math.pi - (ip.hi + ic.hi)
        l = (ip.lo + ic.lo) + math.pi
        if u < upper:
            upper, w_upper = u, w
        if l < lower:
            lower, w_lower = l, w
    margins = {"upper_deg": math.degrees(upper), "lower_deg": math.degrees(lower),
               "worst_upper_omega": w_upper, "worst_lower_omega": w_lower}
    return StabilityVerdict(
        "freqwise-small-phase",
        "pass" if (upper > 0.0 and lower > 0.0) else "fail",
        margins,
        {"plant_delta": fw_p.delta},
        provenance,
    )


def circle_criterion_check(
    P: Rational | TransferMatrix,
    bound: SectorBound,
    grid: FrequencyGrid = DEFAULT_GRID,
    tol_margin: float = 1e-6,
    provenance: tuple = (),
) -> StabilityVerdict:
    """Forbidden-disk test for a scalar loop with a sector nonlinearity.

    The response curve over the signed grid (with its zero- and
    high-frequency limit points) must stay strictly away from the disk
    D(-1/a, -1/b); pass requires clearance above ``tol_margin``.
    """
    reg = forbidden_region(bound)
    pts = np.array([z for _, z in nyquist_curve(P, grid)])
    dist = np.abs(pts - reg.disk_center) - reg.disk_radius
    margin = float(np.min(dist))
    return StabilityVerdict(
        criterion="circle",
        status="pass" if margin > tol_margin else "fail",
        margins={"disk_clearance": margin},
        inputs={"sector": (bound.a, bound.b),
                "disk_center": reg.disk_center, "disk_radius": reg.disk_radius},
        provenance=provenance,
    )


def phase_cone_check(
    P: Rational | TransferMatrix,
    bound: SectorBound,
    grid: FrequencyGrid = DEFAULT_GRID,
    tol: float = DEFAULT_TOL,
    provenance: tuple = (),
) -> StabilityVerdict:
    """Forbidden-cone test: response angles must avoid the sector's cone.

    Gain-free counterpart of the circle criterion (the cone is spanned by
    the disk, so a cone pass implies a circle pass); requires the scalar
    plant to be semi-sectorial.  Points with magnitude below 1e-12 of the
    curve scale carry no angle and are skipped.
    """
    if isinstance(P, Rational):
        P_tm = TransferMatrix(((P,),))
    else:
        P_tm = P
    report = lti_phase(P_tm, grid, tol, refine=False)
    reg = forbidden_region(bound)
    inputs = {
        "sector": (bound.a, bound.b),
        "allowed_lo_deg": math.degrees(reg.allowed_lo),
        "allowed_hi_deg": math.degrees(reg.allowed_hi),
        "disk_center": reg.disk_center,
        "disk_radius": reg.disk_radius,
        "cone_contains_disk": cone_contains_disk(bound),
    }
    if not report.is_semi_sectorial:
        return StabilityVerdict("phase-cone", "hypothesis-unmet", {},
                                {**inputs, "reason": "plant not semi-sectorial"},
                                provenance)
    pts = np.array([z for _, z in nyquist_curve(P, grid)])
    scale = float(np.max(np.abs(pts)))
    pts = pts[np.abs(pts) > 1e-12 * scale]
    ang = np.angle(pts)
    margin = float(np.min((math.pi - reg.half_angle) - np.abs(ang)))
    return StabilityVerdict(
        criterion="phase-cone",
        status="pass" if margin > 0.0 else "fail",
        margins={"cone_clearance_deg": math.degrees(margin)},
        inputs=inputs,
        provenance=provenance,
    )


def parallel_phase(
    phi_1: PhaseInterval,
    phi_2: PhaseInterval,
    target: PhaseInterval,
    provenance: tuple = (),
) -> StabilityVerdict:
    """Membership of a parallel sum in a phase-bounded convex cone.

    Sector-bounded systems with sectors inside ``target`` (spread < pi)
    form a convex cone under addition and positive scaling, so the sum
    stays in ``target``; the check validates the preconditions and
    reports containment margins.
    """
    if not (0.0 < target.spread < math.pi):
        raise InputError("target sector spread must lie in (0, pi)")
    for name, phi in (("phi_1", phi_1), ("phi_2", phi_2)):
        if not target.contains_interval(phi):
            raise InputError(f"{name} is not contained in the target sector")
    m1 = min(phi_1.lo - target.lo, target.hi - phi_1.hi)
    m2 = min(phi_2.lo - target.lo, target.hi - phi_2.hi)
    return StabilityVerdict(
        criterion="parallel-cone",
        status="pass",
        margins={"margin_1_deg": math.degrees(m1), "margin_2_deg": math.degrees(m2)},
        inputs={"phi_1": phi_1, "phi_2": phi_2, "target": target},
        provenance=provenance,
    )


def closed_loop_phase_bound(
    phi_p: PhaseInterval, phi_c: PhaseInterval
) -> tuple[PhaseInterval, PhaseInterval]:
    """Sector bounds for both closed-loop maps of a stable feedback pair.

    Requires the non-strict loop-sum conditions; the first bound covers
    the map e1 -> y1, the second e2 -> y2 (roles swapped).
    """
    if phi_p.hi + phi_c.hi > math.pi or phi_p.lo + phi_c.lo < -math.pi:
        raise InputError("loop phase sums violate the closed-loop hypothesis")
    g1 = PhaseInterval(min(phi_p.lo, -phi_c.hi), max(phi_p.hi, -phi_c.lo))
    g2 = PhaseInterval(min(phi_c.lo, -phi_p.hi), max(phi_c.hi, -phi_p.lo))
    return g1, g2
