"""``render_figures <fig-id> --data <dir> --out <path.png>``"""

from __future__ import annotations

import argparse
import sys

from .recipes import RECIPES, render
from .schema import SchemaError


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render_figures",
        description="Render a static figure from qst CSV outputs.")
    parser.add_argument("fig_id", choices=sorted(RECIPES),
                        help="which figure to render")
    parser.add_argument("--data", required=True,
                        help="directory containing the input CSV files")
    parser.add_argument("--out", required=True,
                        help="output PNG path")
    args = parser.parse_args(argv)
    try:
        render(args.fig_id, args.data, args.out)
    except SchemaError as exc:
        print(f"render_figures: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"render_figures: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
