"""Command line entry point.

Subcommands: ``run`` (single trajectories to CSV), ``sweep`` (batch outcome
tallies to CSV plus a summary JSON), ``certify`` (exact uniqueness
certificate as JSON), ``classify`` (critical-point report for one point) and
``selftest`` (quick internal consistency battery).

Exit codes: 0 success, 1 usage error, 2 computation error.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys
from typing import IO, Iterator

from .algorithms import ALGO_ORDER, Algo, HyperParams, SingularMatrixError
from .certify import UnsupportedGameError, certify_unique_critical
from .dynamics import (
    STD_NORMAL,
    InitSpec,
    OutcomeKind,
    RunConfig,
    classify_outcome,
    fixed,
    run,
    sample_init,
    sweep,
    write_sweep_csv,
    write_trajectory_csv,
)
from .games import (
    CONVEX_QUAD,
    MARKET,
    ZERO_SUM,
    GameId,
    Params,
    classify_critical_point,
    classify_definiteness,
    decompose_sym_antisym,
    definiteness_implications_ok,
    evaluate,
    fd_grad,
    fd_hessian,
    market_sigma,
)

_GAME_TOKENS = ("m", "msigma", "n", "convex")
_ALGO_TOKENS = tuple(a.value for a in ALGO_ORDER) + ("all",)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage problems, not argparse's 2
        raise _UsageError(message)


def _init_spec(text: str) -> InitSpec:
    if text == "normal":
        return STD_NORMAL
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected 'normal' or 'x,y'")
    return fixed(Params(float(parts[0]), float(parts[1])))


def build_parser() -> _Parser:
    parser = _Parser(prog="gdlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: _Parser, runs_default: int | None = None):
        p.add_argument("--game", choices=_GAME_TOKENS, default="m")
        p.add_argument("--sigma", type=float, default=0.01,
                       help="deformation radius for --game msigma")
        p.add_argument("--algo", choices=_ALGO_TOKENS, default="gd")
        p.add_argument("--alpha", type=float, default=0.01)
        p.add_argument("--gamma", type=float, default=0.01)
        p.add_argument("--iters", type=int, default=3000)
        if runs_default is not None:
            p.add_argument("--runs", type=int, default=runs_default)
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--init", type=_init_spec, default=STD_NORMAL,
                       help="'normal' or a fixed point 'x,y'")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p_run = sub.add_parser("run", help="simulate trajectories and emit CSV")
    add_common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="classify many runs and tally outcomes")
    add_common(p_sweep, runs_default=1000)
    p_sweep.set_defaults(func=cmd_sweep)

    p_cert = sub.add_parser("certify", help="exact critical-point uniqueness certificate")
    p_cert.add_argument("--game", choices=_GAME_TOKENS, default="m")
    p_cert.add_argument("--sigma", type=float, default=0.01)
    p_cert.add_argument("--out", default=None)
    p_cert.set_defaults(func=cmd_certify)

    p_cls = sub.add_parser("classify", help="critical-point report at one point")
    add_common(p_cls)
    p_cls.set_defaults(func=cmd_classify)

    p_self = sub.add_parser("selftest", help="quick internal consistency battery")
    p_self.set_defaults(func=cmd_selftest)
    return parser


def _game_from(ns) -> GameId:
    if ns.game == "m":
        return MARKET
    if ns.game == "n":
        return ZERO_SUM
    if ns.game == "convex":
        return CONVEX_QUAD
    return market_sigma(ns.sigma)


def _algos_from(ns) -> list[Algo]:
    if ns.algo == "all":
        return list(ALGO_ORDER)
    return [Algo(ns.algo)]


def _config_from(ns) -> RunConfig:
    hp = HyperParams(alpha=ns.alpha, gamma=ns.gamma)
    return RunConfig(
        seed=ns.seed,
        iters=ns.iters,
        hp=hp,
        init=ns.init,
        tail_window=min(200, ns.iters),
    )


@contextlib.contextmanager
def _open_out(path: str | None) -> Iterator[IO[str]]:
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fp:
            yield fp


def _dump_json(path: str | None, payload) -> None:
    with _open_out(path) as fp:
        json.dump(payload, fp, indent=2, sort_keys=True)
        fp.write("\n")


def cmd_run(ns) -> int:
    game = _game_from(ns)
    cfg = _config_from(ns)
    trajs = [(algo, run(game, algo, cfg)) for algo in _algos_from(ns)]
    if ns.format == "json":
        payload = []
        for algo, traj in trajs:
            out = classify_outcome(traj, game, cfg)
            payload.append(
                {
                    "algo": algo.value,
                    "outcome": out.kind.value,
                    "max_norm": out.max_norm,
                    "final": [out.final.x, out.final.y],
                    "iters_used": len(traj.points) - 1,
                }
            )
        _dump_json(ns.out, payload)
        return 0
    multi = len(trajs) > 1
    with _open_out(ns.out) as fp:
        first = True
        for algo, traj in trajs:
            write_trajectory_csv(fp, traj, algo=algo if multi else None, header=first)
            first = False
    return 0


def _sweep_summary(ns, results) -> dict:
    summary = {
        "game": ns.game,
        "runs": ns.runs,
        "iters": ns.iters,
        "alpha": ns.alpha,
        "gamma": ns.gamma,
        "seed": ns.seed,
        "outcomes": {
            algo.value: {k.value: res.counts[k] for k in OutcomeKind}
            for algo, res in results
        },
    }
    if ns.game == "msigma":
        summary["sigma"] = ns.sigma
    return summary


def cmd_sweep(ns) -> int:
    game = _game_from(ns)
    cfg = _config_from(ns)
    results = [(algo, sweep(game, algo, cfg, ns.runs)) for algo in _algos_from(ns)]
    summary = _sweep_summary(ns, results)
    if ns.format == "json":
        _dump_json(ns.out, summary)
        return 0
    with _open_out(ns.out) as fp:
        first = True
        for algo, res in results:
            write_sweep_csv(fp, algo, res, header=first)
            first = False
    if ns.out is not None:
        # headline histogram stays machine-checkable without opening the CSV
        json.dump(summary, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    return 0


def cmd_certify(ns) -> int:
    report = certify_unique_critical(_game_from(ns))
    _dump_json(ns.out, report.to_json_dict())
    return 0


def cmd_classify(ns) -> int:
    game = _game_from(ns)
    cfg = _config_from(ns)
    point = sample_init(cfg, 0)
    ev = evaluate(game, point)
    rep = classify_definiteness(ev.hess)
    xin = (ev.xi[0] ** 2 + ev.xi[1] ** 2) ** 0.5
    payload = {
        "game": ns.game,
        "point": [point.x, point.y],
        "losses": [ev.l1, ev.l2],
        "xi": [ev.xi[0], ev.xi[1]],
        "xi_norm": xin,
        "critical_class": classify_critical_point(game, point, cfg.crit_tol).value,
        "hessian": [[ev.hess.a11, ev.hess.a12], [ev.hess.a21, ev.hess.a22]],
        "definiteness": {
            "neg_definite": rep.neg_definite,
            "max_re_spec_h_neg": rep.max_re_spec_h_neg,
            "min_re_spec_h_neg": rep.min_re_spec_h_neg,
            "max_re_spec_hd_neg": rep.max_re_spec_hd_neg,
            "min_re_spec_hd_neg": rep.min_re_spec_hd_neg,
            "min_spec_s_neg": rep.min_spec_s_neg,
        },
    }
    _dump_json(ns.out, payload)
    return 0


def cmd_selftest(ns) -> int:
    from .games import Matrix2, eval_grad, eval_hessian
    from .rng import Xoshiro256StarStar

    failures = 0

    def check(name: str, ok: bool):
        nonlocal failures
        print(f"selftest: {name}: {'ok' if ok else 'FAIL'}")
        if not ok:
            failures += 1

    rng = Xoshiro256StarStar(2024)
    games = [MARKET, market_sigma(0.05), ZERO_SUM, CONVEX_QUAD]
    ok = True
    for game in games:
        for _ in range(50):
            p = Params(rng.uniform(-2, 2), rng.uniform(-2, 2))
            if game.kind == "market_sigma":
                r = (p.x * p.x + p.y * p.y) ** 0.5
                if abs(r - game.sigma) < 1e-3:
                    continue
            g = eval_grad(game, p)
            fg = fd_grad(game, p, 1e-5)
            h = eval_hessian(game, p)
            fh = fd_hessian(game, p, 1e-5)
            for a, b in zip(g, fg):
                ok &= abs(a - b) <= 1e-6 * (1.0 + abs(a))
            for a, b in zip(
                (h.a11, h.a12, h.a21, h.a22), (fh.a11, fh.a12, fh.a21, fh.a22)
            ):
                ok &= abs(a - b) <= 1e-6 * (1.0 + abs(a))
    check("gradient and Hessian oracles", ok)

    def dyadic() -> float:
        # 13-bit lattice in [-4, 4): half-sums and differences stay exact
        return ((rng.next_u64() >> 51) - 4096) / 1024.0

    ok = True
    for _ in range(200):
        m = Matrix2(dyadic(), dyadic(), dyadic(), dyadic())
        s, a = decompose_sym_antisym(m)
        ok &= (s.a11 + a.a11, s.a12 + a.a12, s.a21 + a.a21, s.a22 + a.a22) == (
            m.a11,
            m.a12,
            m.a21,
            m.a22,
        )
        mc = Matrix2(rng.uniform(-5, 5), rng.uniform(-5, 5),
                     rng.uniform(-5, 5), rng.uniform(-5, 5))
        ok &= definiteness_implications_ok(classify_definiteness(mc))
    check("decomposition and definiteness implications", ok)

    report = certify_unique_critical(ZERO_SUM)
    check("zero-sum uniqueness certificate", report.real_root_count == 1)

    cfg = RunConfig(seed=7, iters=600, tail_window=100)
    res = sweep(MARKET, Algo.GD, cfg, 50)
    check("market descent cycles", res.counts[OutcomeKind.CYCLE] == 50)

    return 0 if failures == 0 else 2


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"gdlab: error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help and friends
        return int(exc.code or 0)
    try:
        return ns.func(ns)
    except (SingularMatrixError, UnsupportedGameError) as exc:
        print(f"gdlab: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"gdlab: error: {exc}", file=sys.stderr)
        return 1


def app() -> None:
    sys.exit(main(sys.argv[1:]))
