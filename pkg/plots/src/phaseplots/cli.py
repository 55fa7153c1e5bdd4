"""Figure rendering CLI: ``plot <figure-kind> <inputs...> --out fig.png``.

Inputs are the JSON/CSV files emitted by the phasekit CLI; schema
mismatches fail with the missing key names and exit code 1.
"""

from __future__ import annotations

import argparse
import sys

from .io import PlotInputError
from .render import plot_nrange, plot_nyquist_regions, plot_phase_envelope, plot_traces


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="plot",
        description="Render figures from phasekit report/trace files.",
    )
    sub = p.add_subparsers(dest="kind", required=True)

    ny = sub.add_parser("nyquist-regions",
                        help="response curve with forbidden disk and cone rays")
    ny.add_argument("verdict", help="verdict JSON from check-feedback")
    ny.add_argument("curve", help="curve CSV from check-feedback --nyquist-csv")
    ny.add_argument("--out", required=True, help="output image path")

    nr = sub.add_parser("nrange", help="range-sample cloud with supporting rays")
    nr.add_argument("samples", help="sample dump CSV from analyze-nl")
    nr.add_argument("report", nargs="?", default=None,
                    help="optional nl report JSON (rays from its bound)")
    nr.add_argument("--out", required=True, help="output image path")

    pe = sub.add_parser("phase-envelope", help="per-frequency sectors vs frequency")
    pe.add_argument("per_freq", help="per-frequency CSV from analyze-lti --csv")
    pe.add_argument("--out", required=True, help="output image path")

    tr = sub.add_parser("traces", help="two-panel external/internal time series")
    tr.add_argument("sim_dir", help="simulate output directory")
    tr.add_argument("--out", required=True, help="output image path")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.kind == "nyquist-regions":
            plot_nyquist_regions(args.verdict, args.curve, args.out)
        elif args.kind == "nrange":
            plot_nrange(args.samples, args.report, args.out)
        elif args.kind == "phase-envelope":
            plot_phase_envelope(args.per_freq, args.out)
        else:
            plot_traces(args.sim_dir, args.out)
    except PlotInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
