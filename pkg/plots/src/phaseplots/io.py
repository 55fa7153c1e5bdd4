"""Schema-checked loaders for the phasekit CLI's serialized outputs.

The plot scripts are read-only consumers of the documented JSON/CSV
schemas; any missing field fails loudly with the offending key names so a
version mismatch is obvious.
"""

from __future__ import annotations

import csv
import json
import os

import numpy as np

__all__ = [
    "PlotInputError",
    "require_keys",
    "load_json",
    "load_verdict",
    "load_nl_report",
    "load_curve_csv",
    "load_per_frequency_csv",
    "load_samples_csv",
    "load_signal_csv",
]

KNOWN_SCHEMAS = {
    "phasekit/lti-report-v1",
    "phasekit/nl-report-v1",
    "phasekit/verdict-v1",
    "phasekit/sim-summary-v1",
}


class PlotInputError(ValueError):
    """Input file does not match the expected schema."""


def require_keys(doc: dict, keys: list[str], source: str) -> None:
    missing = [k for k in keys if k not in doc]
    if missing:
        raise PlotInputError(f"{source}: missing keys: {', '.join(missing)}")


def load_json(path: str, expect_schema: str) -> dict:
    if not os.path.exists(path):
        raise PlotInputError(f"{path}: file not found")
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise PlotInputError(f"{path}: invalid JSON ({exc})") from exc
    require_keys(doc, ["schema"], path)
    if doc["schema"] != expect_schema:
        raise PlotInputError(
            f"{path}: schema {doc['schema']!r}, expected {expect_schema!r}"
        )
    return doc


def load_verdict(path: str) -> dict:
    doc = load_json(path, "phasekit/verdict-v1")
    require_keys(doc, ["criteria"], path)
    for c in doc["criteria"]:
        require_keys(c, ["criterion", "status", "margins", "inputs"], path)
    return doc


def load_nl_report(path: str) -> dict:
    return load_json(path, "phasekit/nl-report-v1")


def _load_csv(path: str, expected_header: list[str]) -> np.ndarray:
    if not os.path.exists(path):
        raise PlotInputError(f"{path}: file not found")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise PlotInputError(f"{path}: empty file")
    header = rows[0]
    missing = [k for k in expected_header if k not in header]
    if missing:
        raise PlotInputError(f"{path}: missing keys: {', '.join(missing)}")
    idx = [header.index(k) for k in expected_header]
    try:
        data = np.array([[float(r[i]) for i in idx] for r in rows[1:]])
    except (ValueError, IndexError) as exc:
        raise PlotInputError(f"{path}: malformed rows ({exc})") from exc
    if data.size == 0:
        raise PlotInputError(f"{path}: no data rows")
    return data


def load_curve_csv(path: str) -> np.ndarray:
    """Nyquist curve rows (w, re, im)."""
    return _load_csv(path, ["w", "re", "im"])


def load_per_frequency_csv(path: str) -> np.ndarray:
    """Per-frequency sector rows (w, lo_rad, hi_rad)."""
    return _load_csv(path, ["w", "lo_rad", "hi_rad"])


def load_samples_csv(path: str) -> np.ndarray:
    """Range-sample rows (re_z, im_z, angle_rad, excluded)."""
    return _load_csv(path, ["re_z", "im_z", "angle_rad", "excluded"])


def load_signal_csv(path: str) -> tuple[np.ndarray, np.ndarray]:
    """Signal CSV -> (t, channels) arrays."""
    if not os.path.exists(path):
        raise PlotInputError(f"{path}: file not found")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or not rows[0] or rows[0][0] != "t":
        raise PlotInputError(f"{path}: missing keys: t")
    data = np.array([[float(x) for x in r] for r in rows[1:]])
    if data.size == 0:
        raise PlotInputError(f"{path}: no data rows")
    return data[:, 0], data[:, 1:]
