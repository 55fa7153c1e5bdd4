"""Figure rendering for phasekit CLI outputs.

Consumes only the serialized report/trace files (no in-process coupling
to the analysis package) and renders four figure kinds: Nyquist curves
with forbidden regions, range-sample clouds with supporting rays,
phase-vs-frequency envelopes, and simulation traces.
"""

from .io import PlotInputError
from .render import (
    plot_nrange,
    plot_nyquist_regions,
    plot_phase_envelope,
    plot_traces,
)

__version__ = "0.1.0"
