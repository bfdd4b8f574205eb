"""Command line entry point: `gaahfig render --spec figure.json`."""

import argparse
import sys

from .io import SchemaError
from .render import render
from .spec import load_spec


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gaahfig",
        description="Render figures from gaahsim CSV/JSON result files.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure from a spec file")
    p.add_argument("--spec", required=True,
                   help="JSON figure specification")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        spec = load_spec(args.spec)
        out = render(spec)
    except (SchemaError, FileNotFoundError, ValueError) as exc:
        print(f"gaahfig: {exc}", file=sys.stderr)
        return 2
    print(f"[gaahfig] wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
