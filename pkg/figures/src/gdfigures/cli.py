"""figures: render gdlab trajectory CSV into a multi-panel image.

Exit codes: 0 success, 1 usage error, 2 malformed input.
"""

from __future__ import annotations

import argparse
import re
import sys

from .render import CsvFormatError, FigureSpec, render


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _grid(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"(\d+)x(\d+)", text)
    if not m:
        raise argparse.ArgumentTypeError("expected RxC, e.g. 2x5")
    return int(m.group(1)), int(m.group(2))


def build_parser() -> _Parser:
    p = _Parser(prog="figures", description=__doc__.splitlines()[0])
    p.add_argument("--input", required=True, help="trajectory CSV path")
    p.add_argument("--out", required=True, help="image output path")
    p.add_argument("--grid", type=_grid, default=None, help="panel grid RxC")
    p.add_argument("--title", default=None)
    p.add_argument("--dpi", type=int, default=150)
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        ns = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(f"figures: error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        return int(exc.code or 0)
    spec = FigureSpec(
        input_csv=ns.input,
        out_path=ns.out,
        grid=ns.grid,
        title=ns.title,
        dpi=ns.dpi,
    )
    try:
        result = render(spec)
    except FileNotFoundError as exc:
        print(f"figures: error: {exc}", file=sys.stderr)
        return 2
    except (CsvFormatError, ValueError) as exc:
        print(f"figures: error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {result.out_path}: {len(result.panels)} panel(s), "
          f"{result.rows}x{result.cols} grid")
    return 0


def app() -> None:
    sys.exit(main(sys.argv[1:]))
