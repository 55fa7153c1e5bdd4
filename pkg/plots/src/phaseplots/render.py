"""The four figure kinds rendered from phasekit outputs."""

from __future__ import annotations

import math
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import (
    PlotInputError,
    load_curve_csv,
    load_nl_report,
    load_per_frequency_csv,
    load_samples_csv,
    load_signal_csv,
    load_verdict,
    require_keys,
)

__all__ = [
    "plot_nyquist_regions",
    "plot_nrange",
    "plot_phase_envelope",
    "plot_traces",
]


def _save(fig, out: str) -> None:
    fig.tight_layout()
    fig.savefig(out, dpi=130)
    plt.close(fig)


def plot_nyquist_regions(verdict_path: str, curve_path: str, out: str) -> None:
    """Response curve with the forbidden disk and the cone rays it spans."""
    doc = load_verdict(verdict_path)
    by_name = {c["criterion"]: c for c in doc["criteria"]}
    if "circle" not in by_name or "phase-cone" not in by_name:
        missing = [k for k in ("circle", "phase-cone") if k not in by_name]
        raise PlotInputError(
            f"{verdict_path}: missing keys: {', '.join(missing)} "
            "(scalar Lur'e criteria not present)"
        )
    circle = by_name["circle"]
    cone = by_name["phase-cone"]
    require_keys(circle["inputs"], ["disk_center", "disk_radius"], verdict_path)
    require_keys(cone["inputs"], ["allowed_lo_deg", "allowed_hi_deg"], verdict_path)
    curve = load_curve_csv(curve_path)

    center = float(circle["inputs"]["disk_center"])
    radius = float(circle["inputs"]["disk_radius"])
    half = math.pi - math.radians(float(cone["inputs"]["allowed_hi_deg"]))

    fig, ax = plt.subplots(figsize=(6.4, 5.6))
    ax.plot(curve[:, 1], curve[:, 2], "-", color="tab:green", lw=1.2,
            label="response curve")
    theta = np.linspace(0.0, 2.0 * np.pi, 256)
    ax.fill(center + radius * np.cos(theta), radius * np.sin(theta),
            color="tab:blue", alpha=0.35,
            label=f"forbidden disk (clearance {circle['margins'].get('disk_clearance', float('nan')):.3g})")
    reach = max(np.max(np.abs(curve[:, 1:])), abs(center) + radius) * 1.3
    for sgn in (+1.0, -1.0):
        ang = math.pi + sgn * half
        ax.plot([0.0, reach * math.cos(ang)], [0.0, reach * math.sin(ang)],
                "--", color="tab:red", lw=1.0)
    ax.plot([], [], "--", color="tab:red",
            label=f"cone rays ({cone['criterion']}: {cone['status']})")
    ax.axhline(0.0, color="0.8", lw=0.6)
    ax.axvline(0.0, color="0.8", lw=0.6)
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.set_title("Response curve with forbidden regions")
    ax.legend(loc="best", fontsize=8)
    ax.set_aspect("equal", adjustable="datalim")
    _save(fig, out)


def plot_nrange(samples_path: str, report_path: str | None, out: str) -> None:
    """Scatter of range samples with the supporting rays."""
    data = load_samples_csv(samples_path)
    used = data[data[:, 3] == 0.0]
    if used.size == 0:
        raise PlotInputError(f"{samples_path}: every sample is excluded")
    if report_path is not None:
        rep = load_nl_report(report_path)
        require_keys(rep, ["bound_lo_rad", "bound_hi_rad"], report_path)
        lo, hi = float(rep["bound_lo_rad"]), float(rep["bound_hi_rad"])
        ray_label = "closed-form sector"
    else:
        lo, hi = float(np.min(used[:, 2])), float(np.max(used[:, 2]))
        ray_label = "sampled extremes"

    fig, ax = plt.subplots(figsize=(6.0, 5.4))
    ax.scatter(used[:, 0], used[:, 1], s=12, color="0.45", alpha=0.7,
               label=f"range samples (n={len(used)})")
    reach = float(np.max(np.hypot(used[:, 0], used[:, 1]))) * 1.15
    for ang in (lo, hi):
        ax.plot([0.0, reach * math.cos(ang)], [0.0, reach * math.sin(ang)],
                "--", color="tab:red", lw=1.2)
    ax.plot([], [], "--", color="tab:red", label=ray_label)
    ax.axhline(0.0, color="0.85", lw=0.6)
    ax.axvline(0.0, color="0.85", lw=0.6)
    ax.set_xlabel("Re <analytic(u), y>")
    ax.set_ylabel("Im <analytic(u), y>")
    ax.set_title("Sampled range cloud with supporting rays")
    ax.legend(loc="best", fontsize=8)
    ax.set_aspect("equal", adjustable="datalim")
    _save(fig, out)


def plot_phase_envelope(per_freq_path: str, out: str) -> None:
    """Per-frequency sector bounds against frequency."""
    data = load_per_frequency_csv(per_freq_path)
    data = data[data[:, 0] > 0.0]
    w = data[:, 0]
    lo = np.degrees(data[:, 1])
    hi = np.degrees(data[:, 2])
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    ax.semilogx(w, lo, color="tab:blue", lw=1.2, label="sector lower edge")
    ax.semilogx(w, hi, color="tab:orange", lw=1.2, label="sector upper edge")
    ax.fill_between(w, lo, hi, color="tab:blue", alpha=0.15)
    ax.axhline(np.min(lo), color="tab:blue", ls=":", lw=0.8)
    ax.axhline(np.max(hi), color="tab:orange", ls=":", lw=0.8)
    ax.set_xlabel("angular frequency (rad/s)")
    ax.set_ylabel("phase (deg)")
    ax.set_title("Per-frequency phase sectors and their envelope")
    ax.legend(loc="best", fontsize=8)
    _save(fig, out)


def plot_traces(sim_dir: str, out: str) -> None:
    """Two-panel time series: external signals on top, internal below."""
    required = ["e1", "e2", "u1", "u2"]
    missing = [n for n in required
               if not os.path.exists(os.path.join(sim_dir, f"{n}.csv"))]
    if missing:
        raise PlotInputError(
            f"{sim_dir}: missing keys: {', '.join(n + '.csv' for n in missing)}"
        )
    fig, (top, bot) = plt.subplots(2, 1, figsize=(7.2, 5.6), sharex=True)
    for name, color in (("e1", "tab:blue"), ("e2", "tab:orange")):
        t, x = load_signal_csv(os.path.join(sim_dir, f"{name}.csv"))
        for ch in range(x.shape[1]):
            top.plot(t, x[:, ch], lw=0.9, color=color,
                     alpha=1.0 - 0.45 * ch, label=f"{name}[{ch}]")
    for name, color in (("u1", "tab:green"), ("u2", "tab:red")):
        t, x = load_signal_csv(os.path.join(sim_dir, f"{name}.csv"))
        for ch in range(x.shape[1]):
            bot.plot(t, x[:, ch], lw=0.9, color=color,
                     alpha=1.0 - 0.45 * ch, label=f"{name}[{ch}]")
    top.set_ylabel("external signals")
    top.legend(loc="upper right", fontsize=7, ncol=2)
    bot.set_ylabel("internal signals")
    bot.set_xlabel("time (s)")
    bot.legend(loc="upper right", fontsize=7, ncol=2)
    top.set_title("Feedback experiment traces")
    _save(fig, out)
