"""Trajectory simulation, outcome classification and batch sweeps.

A run iterates an update map from a sampled start; the classifier sorts the
trajectory into diverged / converged-critical / converged-noncritical / cycle
using three configurable thresholds:

* diverged: any iterate leaves the ball of radius ``bound_radius``, or a
  non-finite value appears (iteration stops there and the run is truncated);
* converged: every step over the last ``tail_window`` iterations moves less
  than ``step_tol``, split by whether ``||xi||`` at the final point is below
  ``crit_tol``;
* cycle: everything else, i.e. bounded iterates that keep moving.

Cycle steps in the built-in games move on the scale of alpha * O(1), many
orders above the default ``step_tol`` of 1e-9, so the classifier has a wide
indifference band.  All threshold comparisons are made on squared norms, in
both the scalar and the batched path, so the two agree exactly.

Sweeps evaluate many runs as numpy lanes stepped together; per-run streams
are seeded independently (see rng module), so results are bit-identical for
any worker count.  ``GDL_THREADS`` caps the number of worker threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import IO

import numpy as np

from .algorithms import Algo, AlgoState, HyperParams, g_xy, sga_lambda, step
from .games import GameId, Params, grad_xy, losses_xy
from .rng import stream_for_run

_MASK64 = (1 << 64) - 1

INIT_STD_NORMAL = "std_normal"
INIT_UNIFORM_BOX = "uniform_box"
INIT_FIXED = "fixed"


@dataclass(frozen=True)
class InitSpec:
    kind: str
    lo: float = 0.0
    hi: float = 0.0
    point: Params | None = None

    def __post_init__(self):
        if self.kind not in (INIT_STD_NORMAL, INIT_UNIFORM_BOX, INIT_FIXED):
            raise ValueError(f"unknown init kind {self.kind!r}")
        if self.kind == INIT_UNIFORM_BOX and not self.lo < self.hi:
            raise ValueError("uniform box needs lo < hi")
        if self.kind == INIT_FIXED and self.point is None:
            raise ValueError("fixed init needs a point")


STD_NORMAL = InitSpec(INIT_STD_NORMAL)


def uniform_box(lo: float, hi: float) -> InitSpec:
    return InitSpec(INIT_UNIFORM_BOX, lo=lo, hi=hi)


def fixed(p: Params) -> InitSpec:
    return InitSpec(INIT_FIXED, point=p)


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    iters: int = 3000
    hp: HyperParams = field(default_factory=HyperParams)
    init: InitSpec = STD_NORMAL
    bound_radius: float = 1e3
    step_tol: float = 1e-9
    crit_tol: float = 1e-6
    tail_window: int = 200

    def __post_init__(self):
        if not self.iters >= self.tail_window >= 1:
            raise ValueError("need iters >= tail_window >= 1")
        if self.bound_radius <= 0.0 or self.step_tol <= 0.0 or self.crit_tol <= 0.0:
            raise ValueError("radius and tolerances must be positive")


class OutcomeKind(str, Enum):
    DIVERGED = "diverged"
    CONVERGED_CRITICAL = "converged_critical"
    CONVERGED_NONCRITICAL = "converged_noncritical"
    CYCLE = "cycle"


@dataclass(frozen=True)
class Outcome:
    kind: OutcomeKind
    max_norm: float
    final: Params


@dataclass(frozen=True)
class Trajectory:
    points: tuple[Params, ...]
    losses: tuple[tuple[float, float], ...]
    xi_norms: tuple[float, ...]
    # alignment sign per point, recorded for SGA runs only
    sga_lambdas: tuple[float, ...] | None = None


@dataclass(frozen=True)
class RunRecord:
    run_id: int
    seed: int
    outcome: Outcome
    iters_used: int


@dataclass(frozen=True)
class SweepResult:
    counts: dict[OutcomeKind, int]
    per_run: tuple[RunRecord, ...]


def run_seed(seed: int, run_index: int) -> int:
    """The derived 64-bit stream seed of one run within a sweep."""
    return (seed ^ run_index) & _MASK64


def sample_init(cfg: RunConfig, run_index: int) -> Params:
    """Initial point of run ``run_index``; deterministic in (seed, run_index)."""
    spec = cfg.init
    if spec.kind == INIT_FIXED:
        return spec.point
    rng = stream_for_run(cfg.seed, run_index)
    if spec.kind == INIT_STD_NORMAL:
        x, y = rng.normal_pair()
        return Params(x, y)
    return Params(rng.uniform(spec.lo, spec.hi), rng.uniform(spec.lo, spec.hi))


def run(game: GameId, algo: Algo, cfg: RunConfig, run_index: int = 0) -> Trajectory:
    """Iterate ``cfg.iters`` steps, stopping early if a value goes non-finite."""
    hp = cfg.hp
    p = sample_init(cfg, run_index)
    state = AlgoState()
    points = [p]
    losses = [losses_xy(game, p.x, p.y)]
    xi_norms = [_xi_norm(game, p.x, p.y)]
    lams = [sga_lambda(game, p)] if algo is Algo.SGA else None
    if p.is_finite():
        for _ in range(cfg.iters):
            p, state = step(game, algo, p, state, hp)
            points.append(p)
            losses.append(losses_xy(game, p.x, p.y))
            xi_norms.append(_xi_norm(game, p.x, p.y))
            if lams is not None:
                lams.append(sga_lambda(game, p))
            if not p.is_finite():
                break
    return Trajectory(
        tuple(points),
        tuple(losses),
        tuple(xi_norms),
        tuple(lams) if lams is not None else None,
    )


def _xi_norm(game: GameId, x: float, y: float) -> float:
    g1, g2 = grad_xy(game, x, y)
    return math.sqrt(g1 * g1 + g2 * g2)


def classify_outcome(traj: Trajectory, game: GameId, cfg: RunConfig) -> Outcome:
    """Map a trajectory to exactly one outcome (total on any trajectory)."""
    pts = traj.points
    final = pts[-1]
    for q in pts:
        if not q.is_finite():
            return Outcome(OutcomeKind.DIVERGED, float("inf"), final)
    max_n2 = 0.0
    for q in pts:
        n2 = q.x * q.x + q.y * q.y
        if n2 > max_n2:
            max_n2 = n2
    max_norm = math.sqrt(max_n2)
    if max_n2 > cfg.bound_radius * cfg.bound_radius:
        return Outcome(OutcomeKind.DIVERGED, max_norm, final)
    tail2 = 0.0
    start = max(0, len(pts) - 1 - cfg.tail_window)
    for k in range(start, len(pts) - 1):
        dx = pts[k + 1].x - pts[k].x
        dy = pts[k + 1].y - pts[k].y
        d2 = dx * dx + dy * dy
        if d2 > tail2:
            tail2 = d2
    if tail2 < cfg.step_tol * cfg.step_tol:
        g1, g2 = grad_xy(game, final.x, final.y)
        if g1 * g1 + g2 * g2 < cfg.crit_tol * cfg.crit_tol:
            return Outcome(OutcomeKind.CONVERGED_CRITICAL, max_norm, final)
        return Outcome(OutcomeKind.CONVERGED_NONCRITICAL, max_norm, final)
    return Outcome(OutcomeKind.CYCLE, max_norm, final)


def _sweep_chunk(
    game: GameId, algo: Algo, cfg: RunConfig, run_ids: range
) -> list[RunRecord]:
    """Step one batch of runs as parallel numpy lanes.

    A lane freezes at its first non-finite iterate (the scalar path truncates
    there), recording that point as final.  Accumulators only see lanes that
    are still alive, so values match the scalar classifier bit for bit.
    """
    n = len(run_ids)
    hp = cfg.hp
    a = hp.alpha
    xs = np.empty(n, dtype=np.float64)
    ys = np.empty(n, dtype=np.float64)
    for j, i in enumerate(run_ids):
        q = sample_init(cfg, i)
        xs[j] = q.x
        ys[j] = q.y
    alive = np.isfinite(xs) & np.isfinite(ys)
    iters_used = np.where(alive, cfg.iters, 0).astype(np.int64)
    max_n2 = xs * xs + ys * ys
    tail2 = np.zeros(n, dtype=np.float64)
    px = xs.copy()
    py = ys.copy()
    tail_from = cfg.iters - cfg.tail_window
    neg_inf = -np.inf
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for k in range(cfg.iters):
            gx, gy = g_xy(game, algo, xs, ys, px, py, hp)
            nx = xs - a * gx
            ny = ys - a * gy
            starting = alive
            alive = starting & np.isfinite(nx) & np.isfinite(ny)
            died = starting & ~alive
            if died.any():
                iters_used[died] = k + 1
            if k >= tail_from:
                dx = nx - xs
                dy = ny - ys
                d2 = dx * dx + dy * dy
                tail2 = np.maximum(tail2, np.where(alive, d2, 0.0))
            n2 = nx * nx + ny * ny
            max_n2 = np.maximum(max_n2, np.where(alive, n2, neg_inf))
            px = np.where(starting, xs, px)
            py = np.where(starting, ys, py)
            xs = np.where(starting, nx, xs)
            ys = np.where(starting, ny, ys)
        g1, g2 = grad_xy(game, xs, ys)
        xin2 = g1 * g1 + g2 * g2
    br2 = cfg.bound_radius * cfg.bound_radius
    st2 = cfg.step_tol * cfg.step_tol
    ct2 = cfg.crit_tol * cfg.crit_tol
    records = []
    for j, i in enumerate(run_ids):
        final = Params(float(xs[j]), float(ys[j]))
        if not alive[j]:
            out = Outcome(OutcomeKind.DIVERGED, float("inf"), final)
        else:
            max_norm = math.sqrt(float(max_n2[j]))
            if max_n2[j] > br2:
                out = Outcome(OutcomeKind.DIVERGED, max_norm, final)
            elif tail2[j] < st2:
                kind = (
                    OutcomeKind.CONVERGED_CRITICAL
                    if xin2[j] < ct2
                    else OutcomeKind.CONVERGED_NONCRITICAL
                )
                out = Outcome(kind, max_norm, final)
            else:
                out = Outcome(OutcomeKind.CYCLE, max_norm, final)
        records.append(RunRecord(i, run_seed(cfg.seed, i), out, int(iters_used[j])))
    return records


def _resolve_workers(workers: int | None, n_runs: int) -> int:
    if workers is None:
        env = os.environ.get("GDL_THREADS", "")
        workers = int(env) if env else 1
    return max(1, min(workers, n_runs))


def sweep(
    game: GameId,
    algo: Algo,
    cfg: RunConfig,
    n_runs: int,
    workers: int | None = None,
) -> SweepResult:
    """Classify ``n_runs`` independent runs; deterministic for any worker count."""
    if n_runs < 1:
        raise ValueError("n_runs must be at least 1")
    w = _resolve_workers(workers, n_runs)
    chunk = (n_runs + w - 1) // w
    parts = [range(lo, min(lo + chunk, n_runs)) for lo in range(0, n_runs, chunk)]
    if len(parts) == 1:
        records = _sweep_chunk(game, algo, cfg, parts[0])
    else:
        with ThreadPoolExecutor(max_workers=len(parts)) as pool:
            chunks = pool.map(lambda ids: _sweep_chunk(game, algo, cfg, ids), parts)
        records = [rec for part in chunks for rec in part]
    records.sort(key=lambda r: r.run_id)
    counts = {kind: 0 for kind in OutcomeKind}
    for rec in records:
        counts[rec.outcome.kind] += 1
    return SweepResult(counts, tuple(records))


# ---------------------------------------------------------------------------
# fixed file formats (UTF-8, LF, 17 significant digits)


def _fmt(v: float) -> str:
    return format(v, ".17g")

TRAJECTORY_HEADER = "step,x,y,l1,l2,xi_norm"
SWEEP_HEADER = "algo,run,seed,outcome,iters_used,max_norm,final_x,final_y"


def write_trajectory_csv(
    fp: IO[str], traj: Trajectory, algo: Algo | None = None, header: bool = True
) -> None:
    """One row per iterate; an identifying algo column is prepended when given."""
    prefix = f"{algo.value}," if algo is not None else ""
    if header:
        head = "algo," + TRAJECTORY_HEADER if algo is not None else TRAJECTORY_HEADER
        fp.write(head + "\n")
    for k, (p, (l1, l2), xn) in enumerate(zip(traj.points, traj.losses, traj.xi_norms)):
        fp.write(
            f"{prefix}{k},{_fmt(p.x)},{_fmt(p.y)},{_fmt(l1)},{_fmt(l2)},{_fmt(xn)}\n"
        )


def write_sweep_csv(
    fp: IO[str], algo: Algo, result: SweepResult, header: bool = True
) -> None:
    if header:
        fp.write(SWEEP_HEADER + "\n")
    for rec in result.per_run:
        out = rec.outcome
        fp.write(
            f"{algo.value},{rec.run_id},{rec.seed},{out.kind.value},"
            f"{rec.iters_used},{_fmt(out.max_norm)},{_fmt(out.final.x)},{_fmt(out.final.y)}\n"
        )
