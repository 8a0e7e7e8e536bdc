"""The ``render`` executable."""

import argparse
import sys

from .figures import KINDS, FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render",
        description="Render kickchain CSV outputs to figures.")
    parser.add_argument("--kind", required=True, choices=list(KINDS))
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        metavar="CSV", help="input CSV files")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--labels",
                        help="comma-separated legend labels, one per input "
                             "(timeseries only; default: derived from paths)")
    parser.add_argument("--shared-scale", action="store_true",
                        help="normalize all Husimi tiles to one color scale "
                             "instead of per tile")
    parser.add_argument("--dpi", type=int, default=110)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    labels = tuple(s.strip() for s in args.labels.split(",")) \
        if args.labels else ()
    try:
        spec = FigureSpec(inputs=tuple(args.inputs), kind=args.kind,
                          out=args.out, labels=labels,
                          shared_scale=args.shared_scale, dpi=args.dpi)
        out = render(spec)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
