"""Command-line front end.

Subcommands: ``analyze-lti``, ``analyze-nl``, ``check-feedback``,
``simulate`` and ``hilbert-demo``.  Reports are JSON (angles in both
radians and degrees, full effective config embedded); traces and sample
dumps are CSV.  Output files are written atomically (temp + rename).

Exit codes: 0 success, 1 input error, 2 indefinite verdict, 3 unstable
input, 4 simulation failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import corpus as corpus_mod
from . import estimate, phase, sim, stability
from .errors import IndefiniteError, InputError, SimulationError, UnstableSystemError
from .lti import (
    DEFAULT_GRID,
    FrequencyGrid,
    StateSpace,
    TransferMatrix,
    hinf_norm,
    read_system,
    system_from_dict,
)
from .nrange import PhaseInterval
from .signals import RealSignal, analytic, hilbert, inner, write_signal_csv

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INDEFINITE = 2
EXIT_UNSTABLE = 3
EXIT_RUNTIME = 4

REPORT_SCHEMA = "phasekit/lti-report-v1"
NL_SCHEMA = "phasekit/nl-report-v1"
VERDICT_SCHEMA = "phasekit/verdict-v1"
SIM_SCHEMA = "phasekit/sim-summary-v1"


def _atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".phasekit-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path: str, doc: dict) -> None:
    _atomic_write(path, json.dumps(doc, indent=2) + "\n")


def _grid_from_args(args) -> FrequencyGrid:
    return FrequencyGrid(args.wmin, args.wmax, args.points)


def _grid_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--wmin", type=float, default=DEFAULT_GRID.wmin,
                   help="grid lower angular frequency (rad/s)")
    p.add_argument("--wmax", type=float, default=DEFAULT_GRID.wmax,
                   help="grid upper angular frequency (rad/s)")
    p.add_argument("--points", type=int, default=DEFAULT_GRID.points,
                   help="number of logarithmic grid points")


def _corpus_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="corpus seed")
    p.add_argument("--corpus-size", type=int, default=50,
                   help="number of corpus signals")
    p.add_argument("--corpus-length", type=int, default=8192,
                   help="samples per corpus signal")
    p.add_argument("--corpus-dt", type=float, default=2e-3,
                   help="corpus sample step (s)")


def _small_corpus(args, channels: int) -> list[RealSignal]:
    spec = corpus_mod.quick_corpus_spec(
        seed=args.seed, count=args.corpus_size, length=args.corpus_length,
        dt=args.corpus_dt, channels=channels,
    )
    return corpus_mod.gen_corpus(spec)


def _interval_fields(iv: PhaseInterval | None) -> dict:
    if iv is None:
        return {"phase_lo_rad": None, "phase_hi_rad": None,
                "phase_lo_deg": None, "phase_hi_deg": None}
    return {
        "phase_lo_rad": iv.lo,
        "phase_hi_rad": iv.hi,
        "phase_lo_deg": math.degrees(iv.lo),
        "phase_hi_deg": math.degrees(iv.hi),
    }


def cmd_analyze_lti(args) -> int:
    P = read_system(args.system)
    if not isinstance(P, (TransferMatrix, StateSpace)):
        raise InputError("analyze-lti expects a tf or ss system file")
    grid = _grid_from_args(args)
    report = phase.lti_phase(P, grid)
    doc = {
        "schema": REPORT_SCHEMA,
        **_interval_fields(report.interval),
        "verdict": report.verdict,
        "alpha_rad": report.alpha,
        "epsilon": report.epsilon,
        "uniform_margin": report.uniform_margin,
        "per_frequency": [
            {"w": w, "lo": iv.lo, "hi": iv.hi}
            for w, iv in report.per_frequency
            if iv is not None and math.isfinite(w)
        ],
        "config": {"system": args.system, "wmin": grid.wmin,
                   "wmax": grid.wmax, "points": grid.points},
    }
    if isinstance(P, TransferMatrix):
        hinf, wpk = hinf_norm(P, grid)
        doc["hinf"] = hinf
        doc["hinf_peak_omega"] = wpk if math.isfinite(wpk) else "inf"
        doc["nu_index"] = phase.lti_passivity_index(P, grid)
    else:
        doc["hinf"] = None
        doc["nu_index"] = None
    out = args.out or "lti_report.json"
    _write_json(out, doc)
    if args.csv:
        lines = ["w,lo_rad,hi_rad"]
        for row in doc["per_frequency"]:
            lines.append(f"{row['w']:.17g},{row['lo']:.17g},{row['hi']:.17g}")
        _atomic_write(args.csv, "\n".join(lines) + "\n")
    print(f"wrote {out} (verdict: {report.verdict})")
    return EXIT_INDEFINITE if report.verdict == "indefinite" else EXIT_OK


def _nl_closed_form(doc: dict):
    """(interval, sector, indices, system-for-sampling) for an nl spec."""
    kind = doc.get("kind")
    if kind == "sector":
        bound = phase.SectorBound(float(doc["a"]), float(doc["b"]))
        sp = phase.sector_phase(bound)
        a, b = bound.a, bound.b
        rep = sim.sector_static(
            lambda x: a * x + (b - a) * np.clip(x, -1.0, 1.0), name="sector-rep"
        )
        return sp.interval, bound, (a * b / (a + b), 1.0 / (a + b)), rep
    if kind == "quantizer":
        q = phase.QuantizerParams(float(doc["rho"]))
        bound = phase.quantizer_sector(q)
        sp = phase.sector_phase(bound)
        rep = sim.sector_static(sim.quantizer_map(q.rho), name="quantizer")
        a, b = bound.a, bound.b
        return sp.interval, bound, (a * b / (a + b), 1.0 / (a + b)), rep
    if kind == "vsp":
        idx = phase.PassivityIndices(float(doc["delta"]), float(doc["epsilon"]))
        return phase.vsp_phase(idx), None, (idx.delta, idx.epsilon), None
    if kind in ("builtin", "nl"):
        system = system_from_dict({"kind": "nl", "name": doc.get("name", "cubic2")})
        interval = None
        indices = None
        if system.name == "cubic2":
            indices = (2.0 / 3.0, 1.0 / 3.0)
            interval = phase.vsp_phase(phase.PassivityIndices(*indices))
        return interval, None, indices, system
    raise InputError(f"unknown nonlinear spec kind {kind!r}")


def cmd_analyze_nl(args) -> int:
    with open(args.spec) as fh:
        doc = json.load(fh)
    interval, bound, indices, system = _nl_closed_form(doc)
    report = {
        "schema": NL_SCHEMA,
        "kind": doc.get("kind"),
        "provenance": [],
        "config": {"spec": args.spec, "seed": args.seed,
                   "corpus_size": args.corpus_size},
    }
    if interval is not None:
        report["provenance"].append("closed-form")
        report.update({
            "bound_lo_rad": interval.lo, "bound_hi_rad": interval.hi,
            "bound_lo_deg": math.degrees(interval.lo),
            "bound_hi_deg": math.degrees(interval.hi),
        })
    if bound is not None:
        report["sector"] = [bound.a, bound.b]
        report["disk_center"] = bound.disk_center
        report["disk_radius"] = bound.disk_radius
    if indices is not None:
        report["passivity_indices"] = list(indices)
    if system is not None:
        channels = getattr(system, "channels", 1)
        sigs = _small_corpus(args, channels)
        op = sim.SystemOperator(system)
        samples = estimate.empirical_nrange(op, sigs)
        emp = estimate.empirical_phase(samples)
        report["provenance"].append("empirical")
        report["empirical"] = {
            "lo_rad": emp.interval.lo if emp.interval else None,
            "hi_rad": emp.interval.hi if emp.interval else None,
            "lo_deg": math.degrees(emp.interval.lo) if emp.interval else None,
            "hi_deg": math.degrees(emp.interval.hi) if emp.interval else None,
            "n_used": emp.n_used,
            "n_excluded": emp.n_excluded,
            "indefinite": emp.indefinite,
        }
        if args.samples_csv:
            estimate.write_samples_csv(args.samples_csv, samples)
    else:
        report["empirical"] = None
    out = args.out or "nl_report.json"
    _write_json(out, report)
    print(f"wrote {out}")
    return EXIT_OK


def _nl_spec_kind(path: str) -> dict | None:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: unreadable JSON ({exc})") from exc
    return doc


def cmd_check_feedback(args) -> int:
    Pdoc = _nl_spec_kind(args.plant)
    Cdoc = _nl_spec_kind(args.controller)
    if Pdoc.get("kind") not in ("tf", "ss"):
        raise InputError("check-feedback expects an LTI plant (tf or ss)")
    P = system_from_dict(Pdoc)
    grid = _grid_from_args(args)
    verdicts: list[stability.StabilityVerdict] = []

    rep_p = phase.lti_phase(P, grid)
    if rep_p.interval is None:
        raise IndefiniteError("plant has no phase sector on the grid")
    hinf_p = hinf_norm(P, grid)[0] if isinstance(P, TransferMatrix) else None
    nu_p = phase.lti_passivity_index(P, grid) if isinstance(P, TransferMatrix) else None

    ckind = Cdoc.get("kind")
    if ckind in ("tf", "ss"):
        C = system_from_dict(Cdoc)
        rep_c = phase.lti_phase(C, grid)
        if rep_c.interval is None:
            raise IndefiniteError("controller has no phase sector on the grid")
        hinf_c = hinf_norm(C, grid)[0]
        verdicts.append(stability.small_gain_check(
            hinf_p, hinf_c, provenance=("lti-certified", "lti-certified")))
        verdicts.append(stability.small_phase_check(
            rep_p.interval, rep_c.interval,
            rep_p.is_sectorial, rep_c.is_sectorial,
            provenance=("lti-certified", "lti-certified")))
        verdicts.append(stability.freqwise_small_phase_check(P, C, grid))
        nu_c = phase.lti_passivity_index(C, grid)
        verdicts.append(stability.index_passivity_check(
            nu_p, nu_p, nu_c, nu_c,
            provenance=("lti-certified", "lti-certified")))
    else:
        interval_c, bound_c, indices_c, system_c = _nl_closed_form(Cdoc)
        prov_c = "vsp-closed-form" if interval_c is not None else "empirical"
        if interval_c is None and system_c is not None:
            sigs = _small_corpus(args, getattr(system_c, "channels", 1))
            emp = estimate.empirical_phase(
                estimate.empirical_nrange(sim.SystemOperator(system_c), sigs))
            interval_c = emp.interval
        if interval_c is None:
            raise IndefiniteError("controller phase sector unavailable")
        verdicts.append(stability.small_phase_check(
            rep_p.interval, interval_c, rep_p.is_sectorial, True,
            provenance=("lti-certified", prov_c)))
        # gain side: closed-form upper bound for sector classes, else an
        # empirical lower bound (which can only refute the criterion)
        if bound_c is not None:
            verdicts.append(stability.small_gain_check(
                hinf_p, bound_c.b, provenance=("lti-certified", "sector-bound")))
        elif system_c is not None:
            sigs = _small_corpus(args, getattr(system_c, "channels", 1))
            op = sim.SystemOperator(system_c)
            ys = op.batch(sigs)
            gain_lb = max(y.norm() / u.norm() for u, y in zip(sigs, ys))
            v = stability.small_gain_check(
                hinf_p, gain_lb, provenance=("lti-certified", "empirical"))
            if v.passed:
                v = stability.StabilityVerdict(
                    "small-gain", "hypothesis-unmet", v.margins,
                    {**v.inputs, "reason": "only an empirical lower gain bound"},
                    v.provenance)
            verdicts.append(v)
        if indices_c is not None and nu_p is not None:
            verdicts.append(stability.index_passivity_check(
                nu_p, nu_p, indices_c[0], indices_c[1],
                provenance=("lti-certified", prov_c)))
        if bound_c is not None and P.shape == 1 and isinstance(P, TransferMatrix):
            verdicts.append(stability.circle_criterion_check(P, bound_c, grid))
            verdicts.append(stability.phase_cone_check(P, bound_c, grid))

    if args.nyquist_csv:
        from .lti import nyquist_curve

        if not (isinstance(P, TransferMatrix) and P.shape == 1):
            raise InputError("--nyquist-csv requires a scalar tf plant")
        lines = ["w,re,im"]
        for w, z in nyquist_curve(P, grid):
            if math.isfinite(w):
                lines.append(f"{w:.17g},{z.real:.17g},{z.imag:.17g}")
        _atomic_write(args.nyquist_csv, "\n".join(lines) + "\n")

    doc = {
        "schema": VERDICT_SCHEMA,
        "criteria": [v.to_dict() for v in verdicts],
        "plant": {
            **_interval_fields(rep_p.interval),
            "verdict": rep_p.verdict,
            "hinf": hinf_p,
            "nu_index": nu_p,
        },
        "config": {"plant": args.plant, "controller": args.controller,
                   "wmin": grid.wmin, "wmax": grid.wmax, "points": grid.points,
                   "seed": args.seed, "corpus_size": args.corpus_size},
    }
    out = args.out or "verdict.json"
    _write_json(out, doc)
    for v in verdicts:
        print(f"{v.criterion}: {v.status}")
    return EXIT_OK


def _signal_from_doc(doc, T: int, dt: float, channels: int) -> RealSignal:
    if isinstance(doc, str):
        from .signals import read_signal_csv

        return read_signal_csv(doc)
    if isinstance(doc, dict) and "pulses" in doc:
        pulses = [
            (int(p["channel"]), float(p["start"]), float(p["stop"]),
             float(p.get("amplitude", 1.0)))
            for p in doc["pulses"]
        ]
        return sim.rect_pulse(T, dt, channels, pulses)
    raise InputError("signal spec must be a CSV path or a pulse spec")


def cmd_simulate(args) -> int:
    with open(args.config) as fh:
        cfg = json.load(fh)
    dt = float(args.dt or cfg.get("dt", 1e-3))
    duration = float(args.duration or cfg.get("duration", 60.0))
    T = int(round(duration / dt))

    def load_side(key):
        doc = cfg[key]
        if isinstance(doc, str):
            return read_system(doc)
        return system_from_dict(doc)

    P = load_side("P")
    C = load_side("C")
    channels = P.shape if hasattr(P, "shape") else getattr(P, "channels")
    e1 = _signal_from_doc(cfg["e1"], T, dt, channels)
    e2 = _signal_from_doc(cfg["e2"], T, dt, channels)
    spec = sim.FeedbackSpec(P=P, C=C, e1=e1, e2=e2)
    result = sim.simulate_feedback(spec)

    outdir = args.out_dir or "sim_out"
    os.makedirs(outdir, exist_ok=True)
    for name, sig in (("e1", e1), ("e2", e2), ("u1", result.u1),
                      ("u2", result.u2), ("y1", result.y1), ("y2", result.y2)):
        write_signal_csv(os.path.join(outdir, f"{name}.csv"), sig)
    u_all = RealSignal(
        np.hstack([result.u1.samples, result.u2.samples]), result.u1.dt
    )
    t_tail = min(40.0, 2.0 * u_all.duration / 3.0)
    summary = {
        "schema": SIM_SCHEMA,
        "loop_residual": result.loop_residual,
        "decay_ratio_u": sim.convergence_metric(u_all, t_tail),
        "decay_measured_after_s": t_tail,
        "config": {"dt": dt, "duration": duration, "source": args.config},
    }
    _write_json(os.path.join(outdir, "summary.json"), summary)
    print(f"wrote {outdir}/ (decay ratio {summary['decay_ratio_u']:.3e})")
    return EXIT_OK


def cmd_hilbert_demo(args) -> int:
    dt = 1.0 / 512.0
    t = np.arange(4096) * dt
    u = RealSignal(np.cos(2.0 * np.pi * 5.0 * t), dt)
    hu = hilbert(u)
    ua = analytic(u)
    iso = abs(hu.norm() - u.norm()) / u.norm()
    orth = abs(inner(u, hu)) / u.norm() ** 2
    half = abs(ua.norm() ** 2 - 0.5 * u.norm() ** 2) / u.norm() ** 2
    print(f"isometry residual        {iso:.3e}")
    print(f"orthogonality residual   {orth:.3e}")
    print(f"half-energy residual     {half:.3e}")
    if args.out:
        block = np.column_stack([u.samples[:, 0], hu.samples[:, 0],
                                 np.abs(ua.samples[:, 0]) * 2.0])
        write_signal_csv(args.out, RealSignal(block, dt))
        print(f"wrote {args.out} (cos tone, quadrature, envelope)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="phasekit",
        description="Phase sectors and feedback stability criteria for "
                    "LTI and nonlinear systems.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze-lti", help="phase/gain/passivity report for an LTI system")
    a.add_argument("system", help="system JSON file (tf or ss)")
    a.add_argument("--out", help="report JSON path")
    a.add_argument("--csv", help="per-frequency CSV path")
    _grid_args(a)
    a.set_defaults(func=cmd_analyze_lti)

    n = sub.add_parser("analyze-nl", help="closed-form and empirical phase bounds")
    n.add_argument("spec", help="nonlinear spec JSON (sector/quantizer/vsp/builtin)")
    n.add_argument("--out", help="report JSON path")
    n.add_argument("--samples-csv", help="range-sample dump CSV path")
    _corpus_args(n)
    n.set_defaults(func=cmd_analyze_nl)

    c = sub.add_parser("check-feedback", help="run all applicable stability criteria")
    c.add_argument("plant", help="LTI system JSON")
    c.add_argument("controller", help="LTI system JSON or nonlinear spec JSON")
    c.add_argument("--out", help="verdict JSON path")
    c.add_argument("--nyquist-csv", help="also dump the scalar plant's response curve")
    _grid_args(c)
    _corpus_args(c)
    c.set_defaults(func=cmd_check_feedback)

    s = sub.add_parser("simulate", help="simulate the feedback interconnection")
    s.add_argument("config", help="experiment config JSON")
    s.add_argument("--out-dir", help="output directory for traces and summary")
    s.add_argument("--dt", type=float, help="integration step override (s)")
    s.add_argument("--duration", type=float, help="duration override (s)")
    s.set_defaults(func=cmd_simulate)

    h = sub.add_parser("hilbert-demo", help="tone-shift demonstration and identities")
    h.add_argument("--out", help="CSV output path")
    h.set_defaults(func=cmd_hilbert_demo)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UnstableSystemError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except IndefiniteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INDEFINITE
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (InputError, FileNotFoundError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
