"""plots CLI: render figures from sweep CSVs.

Usage: plots render --spec figure.json
"""
from __future__ import annotations

import argparse
import json
import sys

from .render import FigureSpec, RenderError, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plots", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p_render = sub.add_parser("render", help="render one figure from a JSON spec")
    p_render.add_argument("--spec", required=True, help="JSON FigureSpec path")
    args = parser.parse_args(argv)

    try:
        with open(args.spec) as fh:
            spec = FigureSpec.from_dict(json.load(fh))
        out = render(spec)
    except (RenderError, OSError, json.JSONDecodeError) as exc:
        print(f"render error: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
