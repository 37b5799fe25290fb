"""Command line front end: rmtlab-figs <kind> --in <dir> --out <file>."""

import argparse
import sys
from pathlib import Path

from . import __version__
from .figs import KINDS, FigureSpec, SchemaError, plot_convergence, plot_radial_density

RENDERERS = {
    "radial-density": plot_radial_density,
    "convergence": plot_convergence,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rmtlab-figs",
        description="Render overlay figures from rmtlab experiment artifacts.",
    )
    parser.add_argument(
        "--version", action="version", version=f"rmtlab-figs-v{__version__}"
    )
    sub = parser.add_subparsers(dest="kind", metavar="<kind>")
    for kind in KINDS:
        p = sub.add_parser(kind, help=f"render a {kind} figure")
        p.add_argument(
            "--in", dest="in_dir", required=True, metavar="DIR",
            help="experiment directory holding replicas.csv and summary.json",
        )
        p.add_argument(
            "--out", dest="out_path", required=True, metavar="FILE",
            help="output image path (.png or .svg)",
        )
        p.add_argument("--bins", type=int, default=60, help="histogram bins")
        p.add_argument("--dpi", type=int, default=150, help="png resolution")
        p.add_argument(
            "--caption", action="store_true",
            help="append a render-time caption line",
        )
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.kind is None:
        parser.print_help()
        return 2
    in_dir = Path(args.in_dir)
    csv_path = in_dir / "replicas.csv"
    try:
        spec = FigureSpec(
            summary_path=str(in_dir / "summary.json"),
            out_path=args.out_path,
            kind=args.kind,
            csv_path=str(csv_path) if csv_path.is_file() else None,
            bins=args.bins,
            dpi=args.dpi,
            caption=args.caption,
        )
        info = RENDERERS[args.kind](spec)
    except SchemaError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {info['out_path']}")
    for label, fit in info.get("series", {}).items():
        print(f"  {label}: slope={fit['slope']:.6g} over {fit['n_points']} sizes")
    if info.get("n_points") is not None:
        print(f"  {info['n_points']} radii, law={info['law']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
