import io
import math

import pytest

from gdlab.algorithms import ALGO_ORDER, Algo, AlgoState, HyperParams, step
from gdlab.dynamics import (
    STD_NORMAL,
    OutcomeKind,
    RunConfig,
    SWEEP_HEADER,
    TRAJECTORY_HEADER,
    classify_outcome,
    fixed,
    run,
    run_seed,
    sample_init,
    sweep,
    uniform_box,
    write_sweep_csv,
    write_trajectory_csv,
)
from gdlab.games import CONVEX_QUAD, MARKET, ZERO_SUM, Params, market_sigma


class TestSampleInit:
    def test_fixed(self):
        cfg = RunConfig(init=fixed(Params(1.0, 2.0)))
        assert sample_init(cfg, 0) == Params(1.0, 2.0)
        assert sample_init(cfg, 99) == Params(1.0, 2.0)

    def test_deterministic(self):
        cfg = RunConfig(seed=42)
        assert sample_init(cfg, 0) == sample_init(cfg, 0)

    def test_runs_are_independent(self):
        cfg = RunConfig(seed=42)
        assert sample_init(cfg, 0) != sample_init(cfg, 1)

    def test_std_normal_moments_over_10000_runs(self):
        cfg = RunConfig(seed=42)
        pts = [sample_init(cfg, i) for i in range(10000)]
        for coords in ([p.x for p in pts], [p.y for p in pts]):
            mean = sum(coords) / len(coords)
            var = sum((v - mean) ** 2 for v in coords) / (len(coords) - 1)
            assert abs(mean) < 0.05
            assert abs(var - 1.0) < 0.1

    def test_uniform_box(self):
        cfg = RunConfig(seed=1, init=uniform_box(-2.0, 2.0))
        for i in range(200):
            p = sample_init(cfg, i)
            assert -2.0 <= p.x < 2.0 and -2.0 <= p.y < 2.0

    def test_run_seed_derivation(self):
        assert run_seed(42, 0) == 42
        assert run_seed(42, 7) == 42 ^ 7
        assert run_seed(2**63, 2**63) == 0


class TestRunConfig:
    def test_defaults_match_experiment_protocol(self):
        cfg = RunConfig()
        assert cfg.iters == 3000
        assert cfg.hp.alpha == cfg.hp.gamma == 0.01
        assert cfg.init is STD_NORMAL
        assert cfg.bound_radius == 1e3
        assert cfg.step_tol == 1e-9
        assert cfg.crit_tol == 1e-6
        assert cfg.tail_window == 200

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"iters": 10},  # below the default tail window
            {"iters": 100, "tail_window": 0},
            {"bound_radius": 0.0},
            {"step_tol": -1.0},
            {"crit_tol": 0.0},
        ],
    )
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            RunConfig(**kwargs)


class TestRun:
    def test_fixed_point_trajectory(self):
        cfg = RunConfig(iters=10, tail_window=5, init=fixed(Params(0.0, 0.0)))
        traj = run(ZERO_SUM, Algo.GD, cfg)
        assert len(traj.points) == 11
        assert all(p == Params(0.0, 0.0) for p in traj.points)
        assert all(x == 0.0 for x in traj.xi_norms)

    def test_points_follow_the_step_chain(self):
        cfg = RunConfig(iters=50, tail_window=10, init=fixed(Params(0.8, -0.3)))
        traj = run(ZERO_SUM, Algo.OMD, cfg)
        p, state = traj.points[0], AlgoState()
        for k in range(50):
            p, state = step(ZERO_SUM, Algo.OMD, p, state, cfg.hp)
            assert traj.points[k + 1] == p

    def test_convex_descent_reaches_origin(self):
        cfg = RunConfig(init=fixed(Params(1.0, 1.0)))
        traj = run(CONVEX_QUAD, Algo.GD, cfg)
        final = traj.points[-1]
        assert math.hypot(final.x, final.y) < 1e-4

    def test_overshoot_truncates_with_non_finite_tail(self):
        cfg = RunConfig(
            init=fixed(Params(3.0, 3.0)), hp=HyperParams(alpha=0.5)
        )
        traj = run(MARKET, Algo.GD, cfg)
        assert len(traj.points) < 3001
        assert not traj.points[-1].is_finite()
        assert all(p.is_finite() for p in traj.points[:-1])

    def test_sga_lambdas_recorded(self):
        cfg = RunConfig(iters=20, tail_window=5, init=fixed(Params(1.0, 0.5)))
        traj = run(ZERO_SUM, Algo.SGA, cfg)
        assert traj.sga_lambdas is not None
        assert len(traj.sga_lambdas) == len(traj.points)
        assert set(traj.sga_lambdas) <= {-1.0, 0.0, 1.0}
        assert run(ZERO_SUM, Algo.GD, cfg).sga_lambdas is None

    def test_losses_and_norm_lengths_consistent(self):
        cfg = RunConfig(iters=30, tail_window=10)
        traj = run(MARKET, Algo.EG, cfg)
        assert len(traj.points) == len(traj.losses) == len(traj.xi_norms) == 31


class TestClassify:
    def test_zero_sum_descent_cycles(self):
        cfg = RunConfig(seed=7)
        traj = run(ZERO_SUM, Algo.GD, cfg)
        out = classify_outcome(traj, ZERO_SUM, cfg)
        assert out.kind is OutcomeKind.CYCLE

    def test_convex_descent_converges_critically(self):
        cfg = RunConfig(init=fixed(Params(1.0, 1.0)))
        traj = run(CONVEX_QUAD, Algo.GD, cfg)
        out = classify_outcome(traj, CONVEX_QUAD, cfg)
        assert out.kind is OutcomeKind.CONVERGED_CRITICAL
        assert out.max_norm == math.sqrt(2.0)

    def test_overshoot_diverges(self):
        cfg = RunConfig(init=fixed(Params(3.0, 3.0)), hp=HyperParams(alpha=0.5))
        traj = run(MARKET, Algo.GD, cfg)
        out = classify_outcome(traj, MARKET, cfg)
        assert out.kind is OutcomeKind.DIVERGED
        assert out.max_norm == float("inf")

    def test_cycle_tail_keeps_moving(self):
        # a cycling tail holds points further apart than 10x the step tolerance
        cfg = RunConfig(seed=7)
        traj = run(ZERO_SUM, Algo.GD, cfg)
        assert classify_outcome(traj, ZERO_SUM, cfg).kind is OutcomeKind.CYCLE
        tail = traj.points[-cfg.tail_window :]
        spread = max(
            math.hypot(q.x - tail[0].x, q.y - tail[0].y) for q in tail
        )
        assert spread > 10 * cfg.step_tol

    def test_every_trajectory_gets_exactly_one_outcome(self):
        cfg = RunConfig(iters=300, tail_window=50, seed=3)
        for algo in ALGO_ORDER:
            traj = run(MARKET, algo, cfg)
            out = classify_outcome(traj, MARKET, cfg)
            assert out.kind in OutcomeKind


class TestSweep:
    def test_fixed_critical_start_converges(self):
        cfg = RunConfig(iters=300, tail_window=50, init=fixed(Params(0.0, 0.0)))
        res = sweep(ZERO_SUM, Algo.GD, cfg, 5)
        assert res.counts[OutcomeKind.CONVERGED_CRITICAL] == 5

    def test_counts_sum_to_runs(self):
        cfg = RunConfig(seed=11, iters=400, tail_window=100)
        res = sweep(MARKET, Algo.OMD, cfg, 64)
        assert sum(res.counts.values()) == 64
        assert len(res.per_run) == 64
        assert [r.run_id for r in res.per_run] == list(range(64))

    def test_rejects_empty_sweeps(self):
        with pytest.raises(ValueError):
            sweep(MARKET, Algo.GD, RunConfig(), 0)

    @pytest.mark.parametrize("algo", ALGO_ORDER, ids=lambda a: a.value)
    def test_matches_scalar_runs_bit_for_bit(self, algo):
        cfg = RunConfig(seed=3, iters=300, tail_window=60)
        res = sweep(ZERO_SUM, algo, cfg, 4)
        for i in range(4):
            traj = run(ZERO_SUM, algo, cfg, run_index=i)
            out = classify_outcome(traj, ZERO_SUM, cfg)
            rec = res.per_run[i]
            assert rec.outcome.kind is out.kind
            assert rec.outcome.final == out.final
            assert rec.outcome.max_norm == out.max_norm
            assert rec.iters_used == len(traj.points) - 1

    def test_scalar_parity_through_divergence(self):
        cfg = RunConfig(
            iters=300,
            tail_window=60,
            init=fixed(Params(3.0, 3.0)),
            hp=HyperParams(alpha=0.5),
        )
        res = sweep(MARKET, Algo.GD, cfg, 2)
        traj = run(MARKET, Algo.GD, cfg, run_index=0)
        rec = res.per_run[0]
        assert rec.outcome.kind is OutcomeKind.DIVERGED
        assert rec.iters_used == len(traj.points) - 1
        assert rec.outcome.final == traj.points[-1] or (
            math.isnan(rec.outcome.final.x) and math.isnan(traj.points[-1].x)
        )

    def test_worker_count_does_not_change_results(self, monkeypatch):
        cfg = RunConfig(seed=5, iters=400, tail_window=100)
        base = sweep(ZERO_SUM, Algo.SGA, cfg, 30, workers=1)
        split = sweep(ZERO_SUM, Algo.SGA, cfg, 30, workers=3)
        assert base == split
        monkeypatch.setenv("GDL_THREADS", "4")
        env = sweep(ZERO_SUM, Algo.SGA, cfg, 30)
        assert env == base

    def test_repeat_invocations_identical(self):
        # compare serialized form: nan finals break naive record equality
        cfg = RunConfig(seed=9, iters=300, tail_window=50)

        def dump(res):
            buf = io.StringIO()
            write_sweep_csv(buf, Algo.CO, res)
            return buf.getvalue()

        assert dump(sweep(MARKET, Algo.CO, cfg, 16)) == dump(
            sweep(MARKET, Algo.CO, cfg, 16)
        )


class TestCsvFormats:
    def test_trajectory_csv_shape(self):
        cfg = RunConfig(iters=20, tail_window=5, init=fixed(Params(1.0, 0.0)))
        traj = run(ZERO_SUM, Algo.GD, cfg)
        buf = io.StringIO()
        write_trajectory_csv(buf, traj)
        lines = buf.getvalue().split("\n")
        assert lines[0] == TRAJECTORY_HEADER
        assert lines[1] == "0,1,0,-0.25,0.25,1"
        assert len(lines) == 23  # header + 21 points + trailing newline
        assert lines[-1] == ""
        assert "\r" not in buf.getvalue()

    def test_trajectory_csv_with_algo_column(self):
        cfg = RunConfig(iters=5, tail_window=2, init=fixed(Params(1.0, 0.0)))
        traj = run(ZERO_SUM, Algo.EG, cfg)
        buf = io.StringIO()
        write_trajectory_csv(buf, traj, algo=Algo.EG)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "algo," + TRAJECTORY_HEADER
        assert lines[1].startswith("eg,0,1,0,")

    def test_sweep_csv_shape(self):
        cfg = RunConfig(seed=3, iters=300, tail_window=60)
        res = sweep(ZERO_SUM, Algo.GD, cfg, 4)
        buf = io.StringIO()
        write_sweep_csv(buf, Algo.GD, res)
        lines = buf.getvalue().splitlines()
        assert lines[0] == SWEEP_HEADER
        assert len(lines) == 5
        first = lines[1].split(",")
        assert first[0] == "gd" and first[1] == "0" and first[2] == "3"
        assert first[3] == "cycle"

    def test_float_formatting_is_17_significant_digits(self):
        cfg = RunConfig(iters=5, tail_window=2, init=fixed(Params(1 / 3, 0.0)))
        traj = run(ZERO_SUM, Algo.GD, cfg)
        buf = io.StringIO()
        write_trajectory_csv(buf, traj)
        row = buf.getvalue().splitlines()[1].split(",")
        assert row[1] == "0.33333333333333331"
        assert float(row[1]) == 1 / 3

    def test_msigma_sweep_runs(self):
        cfg = RunConfig(seed=2, iters=300, tail_window=60)
        res = sweep(market_sigma(0.05), Algo.LA, cfg, 8)
        assert sum(res.counts.values()) == 8
