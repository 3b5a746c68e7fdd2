"""Ten gradient-based update maps of the form F(p) = p - alpha * G(p).

With xi the simultaneous gradient, H the game Hessian, A its antisymmetric
part, H_o its off-diagonal block part and gradL the 2x2 matrix with entry
(i, j) = d L^j / d theta^i, the update vectors are

    GD    G = xi
    AGD   G = (xi_1(x, y), xi_2(x - alpha*xi_1, y))      alternating update
    EG    G = xi(p - alpha*xi(p))                        extrapolated point
    OMD   G = 2*xi(p_k) - xi(p_{k-1})                    optimistic step
    SGA   G = (I + lambda*A^T) xi                        alignment sign lambda
    CO    G = (I + gamma*H^T) xi                         consensus term
    CGD   G = (I + alpha*H_o)^{-1} xi                    competitive solve
    LA    G = (I - alpha*H_o) xi                         lookahead
    LOLA  G = (I - alpha*H_o) xi - alpha*diag(H_o^T gradL)
    SOS   G = (I - alpha*H_o) xi - p*alpha*diag(H_o^T gradL)

OMD carries the previous iterate in AlgoState; every other map is stateless.
All formulas are written over plain +, -, *, / so they evaluate identically
on floats and on numpy arrays (see games module docstring).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .games import GameId, Matrix2, Params, cross_grad_xy, grad_xy, hessian_xy

_SINGULAR_TOL = 1e-14


class Algo(str, Enum):
    GD = "gd"
    AGD = "agd"
    EG = "eg"
    OMD = "omd"
    SGA = "sga"
    CO = "co"
    CGD = "cgd"
    LA = "la"
    LOLA = "lola"
    SOS = "sos"


ALGO_ORDER: tuple[Algo, ...] = (
    Algo.GD,
    Algo.AGD,
    Algo.EG,
    Algo.OMD,
    Algo.SGA,
    Algo.CO,
    Algo.CGD,
    Algo.LA,
    Algo.LOLA,
    Algo.SOS,
)


@dataclass(frozen=True)
class HyperParams:
    """Shared learning rate alpha, consensus coefficient gamma, SOS criterion knobs."""

    alpha: float = 0.01
    gamma: float = 0.01
    sos_a: float = 0.5
    sos_b: float = 0.1

    def __post_init__(self):
        if self.alpha <= 0.0 or self.gamma <= 0.0:
            raise ValueError("alpha and gamma must be positive")
        if not 0.0 < self.sos_a < 1.0:
            raise ValueError("sos_a must lie in (0, 1)")
        if self.sos_b <= 0.0:
            raise ValueError("sos_b must be positive")


@dataclass(frozen=True)
class AlgoState:
    """Carried state: previous iterate for OMD, unused by the other maps."""

    prev: Params | None = None


class SingularMatrixError(RuntimeError):
    """CGD's linear solve hit a numerically singular matrix."""


def _sign(v):
    if isinstance(v, np.ndarray):
        return np.sign(v)
    if v > 0.0:
        return 1.0
    if v < 0.0:
        return -1.0
    return 0.0


def solve_2x2(a11, a12, a21, a22, b1, b2):
    """Solve a 2x2 system by the determinant formula, guarding degeneracy."""
    det = a11 * a22 - a12 * a21
    if isinstance(det, np.ndarray):
        bad = bool(np.any(np.abs(det) < _SINGULAR_TOL))
    else:
        bad = abs(det) < _SINGULAR_TOL
    if bad:
        raise SingularMatrixError("2x2 solve with |det| below 1e-14")
    return (a22 * b1 - a12 * b2) / det, (a11 * b2 - a21 * b1) / det


def _sga_lambda_terms(g1, g2, h11, h12, h21, h22):
    # lambda = sign(<xi, H^T xi> * <A^T xi, H^T xi>), sign(0) = 0
    ht1 = h11 * g1 + h21 * g2
    ht2 = h12 * g1 + h22 * g2
    off = (h12 - h21) / 2.0
    at1 = -off * g2
    at2 = off * g1
    return _sign((g1 * ht1 + g2 * ht2) * (at1 * ht1 + at2 * ht2))


def _sos_p_terms(g1, g2, la1, la2, chi1, chi2, hp: HyperParams):
    # Two-part criterion: p1 backs the shaping term off when it opposes the
    # lookahead direction, p2 = ||xi||^2 near critical points (squared-norm
    # comparison against sos_b^2) forces p -> 0 there.
    dot = la1 * chi1 + la2 * chi2
    n0 = la1 * la1 + la2 * la2
    xin2 = g1 * g1 + g2 * g2
    b2 = hp.sos_b * hp.sos_b
    if isinstance(dot, np.ndarray):
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = hp.sos_a * n0 / np.abs(dot)
            p1 = np.where(dot >= 0.0, 1.0, np.minimum(1.0, ratio))
        p2 = np.where(xin2 < b2, xin2, 1.0)
        return np.minimum(p1, p2)
    if dot >= 0.0:
        p1 = 1.0
    else:
        p1 = min(1.0, hp.sos_a * n0 / abs(dot))
    p2 = xin2 if xin2 < b2 else 1.0
    return min(p1, p2)


def g_xy(game: GameId, algo: Algo, x, y, px, py, hp: HyperParams):
    """Update vector G at (x, y); (px, py) is the previous iterate for OMD.

    Polymorphic over floats and numpy arrays.
    """
    a = hp.alpha
    if algo is Algo.GD:
        return grad_xy(game, x, y)
    if algo is Algo.AGD:
        g1, _ = grad_xy(game, x, y)
        _, g2 = grad_xy(game, x - a * g1, y)
        return g1, g2
    if algo is Algo.EG:
        g1, g2 = grad_xy(game, x, y)
        return grad_xy(game, x - a * g1, y - a * g2)
    if algo is Algo.OMD:
        g1, g2 = grad_xy(game, x, y)
        q1, q2 = grad_xy(game, px, py)
        return 2.0 * g1 - q1, 2.0 * g2 - q2

    g1, g2 = grad_xy(game, x, y)
    h11, h12, h21, h22 = hessian_xy(game, x, y)
    if algo is Algo.SGA:
        lam = _sga_lambda_terms(g1, g2, h11, h12, h21, h22)
        off = (h12 - h21) / 2.0
        return g1 - lam * off * g2, g2 + lam * off * g1
    if algo is Algo.CO:
        c = hp.gamma
        return g1 + c * (h11 * g1 + h21 * g2), g2 + c * (h12 * g1 + h22 * g2)
    if algo is Algo.CGD:
        return solve_2x2(1.0, a * h12, a * h21, 1.0, g1, g2)

    la1 = g1 - a * h12 * g2
    la2 = g2 - a * h21 * g1
    if algo is Algo.LA:
        return la1, la2
    dl2dx, dl1dy = cross_grad_xy(game, x, y)
    chi1 = -(h21 * dl1dy)
    chi2 = -(h12 * dl2dx)
    if algo is Algo.LOLA:
        return la1 + a * chi1, la2 + a * chi2
    if algo is Algo.SOS:
        p = _sos_p_terms(g1, g2, la1, la2, chi1, chi2, hp)
        return la1 + p * a * chi1, la2 + p * a * chi2
    raise ValueError(f"unknown algorithm {algo!r}")


def g_vector(
    game: GameId, algo: Algo, p: Params, state: AlgoState, hp: HyperParams
) -> tuple[float, float]:
    """G(p) for the scalar path; OMD bootstraps a missing prev to p itself."""
    if state.prev is not None:
        px, py = state.prev.x, state.prev.y
    else:
        px, py = p.x, p.y
    return g_xy(game, algo, p.x, p.y, px, py, hp)


def step(
    game: GameId, algo: Algo, p: Params, state: AlgoState, hp: HyperParams
) -> tuple[Params, AlgoState]:
    """One update p -> p - alpha * G(p); OMD's state advances to carry p."""
    g1, g2 = g_vector(game, algo, p, state, hp)
    new = Params(p.x - hp.alpha * g1, p.y - hp.alpha * g2)
    if algo is Algo.OMD:
        return new, AlgoState(prev=p)
    return new, state


def sga_lambda(game: GameId, p: Params) -> float:
    """Alignment sign for SGA in {-1, 0, +1}; zero at alignment-degenerate points."""
    g1, g2 = grad_xy(game, p.x, p.y)
    h11, h12, h21, h22 = hessian_xy(game, p.x, p.y)
    return _sga_lambda_terms(g1, g2, h11, h12, h21, h22)


def sos_p(game: GameId, p: Params, hp: HyperParams) -> float:
    """Shaping weight in [0, 1]; exactly 0 at critical points."""
    a = hp.alpha
    g1, g2 = grad_xy(game, p.x, p.y)
    h11, h12, h21, h22 = hessian_xy(game, p.x, p.y)
    la1 = g1 - a * h12 * g2
    la2 = g2 - a * h21 * g1
    dl2dx, dl1dy = cross_grad_xy(game, p.x, p.y)
    chi1 = -(h21 * dl1dy)
    chi2 = -(h12 * dl2dx)
    return _sos_p_terms(g1, g2, la1, la2, chi1, chi2, hp)


def update_jacobian_fd(
    game: GameId, algo: Algo, p: Params, hp: HyperParams, h: float
) -> Matrix2:
    """Central-difference Jacobian of G at p.

    OMD is probed with prev equal to each evaluation point, which reduces its
    G to xi there; the optimistic correction has no stateless Jacobian.
    """
    if h <= 0.0:
        raise ValueError("h must be positive")

    def g_at(x: float, y: float) -> tuple[float, float]:
        return g_xy(game, algo, x, y, x, y, hp)

    gxp = g_at(p.x + h, p.y)
    gxm = g_at(p.x - h, p.y)
    gyp = g_at(p.x, p.y + h)
    gym = g_at(p.x, p.y - h)
    inv = 1.0 / (2.0 * h)
    return Matrix2(
        (gxp[0] - gxm[0]) * inv,
        (gyp[0] - gym[0]) * inv,
        (gxp[1] - gxm[1]) * inv,
        (gyp[1] - gym[1]) * inv,
    )
