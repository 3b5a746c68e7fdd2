"""Render trajectory CSV into a grid of phase-plane panels, one per algorithm.

Input is the gdlab trajectory format ``step,x,y,l1,l2,xi_norm``, optionally
with a leading ``algo`` column when several trajectories are concatenated.
Each panel draws the (x, y) path with the start marked by a triangle and the
origin by a cross.  Axes are symmetric about the origin with a 10% margin
around the data bounds, so bounded orbits always sit inside the frame.
Non-finite rows (overflowed runs) are skipped when plotting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


class CsvFormatError(ValueError):
    """Raised for malformed input, carrying the 1-based offending row."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


@dataclass(frozen=True)
class FigureSpec:
    input_csv: str
    out_path: str
    grid: tuple[int, int] | None = None
    title: str | None = None
    dpi: int = 150
    panel_size: float = 2.6


@dataclass(frozen=True)
class Panel:
    label: str
    xs: tuple[float, ...]
    ys: tuple[float, ...]
    bound: float  # half-width of the symmetric axes


@dataclass(frozen=True)
class RenderResult:
    panels: tuple[Panel, ...]
    rows: int
    cols: int
    out_path: str


def read_trajectories(path: str) -> list[tuple[str, list[float], list[float]]]:
    """Parse the CSV into (label, xs, ys) series in first-appearance order."""
    with open(path, "r", encoding="utf-8") as fp:
        lines = fp.read().splitlines()
    if not lines or not lines[0].strip():
        raise CsvFormatError(1, "empty input")
    header = lines[0].split(",")
    if header == ["algo", "step", "x", "y", "l1", "l2", "xi_norm"]:
        labeled = True
    elif header == ["step", "x", "y", "l1", "l2", "xi_norm"]:
        labeled = False
    else:
        raise CsvFormatError(1, f"unrecognised header {lines[0]!r}")
    order: list[str] = []
    series: dict[str, tuple[list[float], list[float]]] = {}
    for i, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != len(header):
            raise CsvFormatError(i, f"expected {len(header)} fields, got {len(parts)}")
        label = parts[0] if labeled else "trajectory"
        try:
            x = float(parts[2 if labeled else 1])
            y = float(parts[3 if labeled else 2])
        except ValueError as exc:
            raise CsvFormatError(i, str(exc)) from None
        if label not in series:
            order.append(label)
            series[label] = ([], [])
        if math.isfinite(x) and math.isfinite(y):
            series[label][0].append(x)
            series[label][1].append(y)
    if not order:
        raise CsvFormatError(2, "no data rows")
    return [(label, *series[label]) for label in order]


def _layout(n: int, grid: tuple[int, int] | None) -> tuple[int, int]:
    if grid is not None:
        rows, cols = grid
        if rows * cols < n:
            raise ValueError(f"grid {rows}x{cols} too small for {n} panels")
        return rows, cols
    rows = max(1, int(math.floor(math.sqrt(n))))
    cols = (n + rows - 1) // rows
    return rows, cols


def render(spec: FigureSpec) -> RenderResult:
    series = read_trajectories(spec.input_csv)
    rows, cols = _layout(len(series), spec.grid)
    fig, axes = plt.subplots(
        rows,
        cols,
        figsize=(cols * spec.panel_size, rows * spec.panel_size),
        squeeze=False,
    )
    panels = []
    for idx, (label, xs, ys) in enumerate(series):
        ax = axes[idx // cols][idx % cols]
        extent = max((max(map(abs, xs), default=0.0), max(map(abs, ys), default=0.0)))
        bound = 1.1 * extent if extent > 0 else 1.0
        ax.plot(xs, ys, lw=0.6, color="tab:blue")
        ax.plot([0.0], [0.0], marker="+", color="black", ms=8)
        if xs:
            ax.plot([xs[0]], [ys[0]], marker="^", color="tab:red", ms=5)
        ax.set_xlim(-bound, bound)
        ax.set_ylim(-bound, bound)
        ax.set_title(label, fontsize=9)
        ax.set_aspect("equal")
        ax.tick_params(labelsize=6)
        panels.append(Panel(label, tuple(xs), tuple(ys), bound))
    for idx in range(len(series), rows * cols):
        axes[idx // cols][idx % cols].axis("off")
    if spec.title:
        fig.suptitle(spec.title)
    fig.tight_layout()
    # fixed metadata keeps repeated renders byte-identical
    fig.savefig(
        spec.out_path, dpi=spec.dpi, metadata={"Software": "gdlab-figures"}
    )
    plt.close(fig)
    return RenderResult(tuple(panels), rows, cols, spec.out_path)
