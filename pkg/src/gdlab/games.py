"""Two-player games with closed-form losses, simultaneous gradients and Hessians.

Player 1 owns ``x`` and minimises ``L1``; player 2 owns ``y`` and minimises
``L2``.  The simultaneous gradient is ``xi = (dL1/dx, dL2/dy)`` and the game
Hessian is the Jacobian of ``xi``, which is not symmetric in general.  Four
games are built in:

* ``market``: a coercive market whose only critical point (the origin) is a
  strict maximum, so simultaneous descent has nowhere good to go.
* ``market_sigma``: the same market with the region inside radius ``sigma``
  deformed so the origin becomes a strict minimum; losses are non-smooth on
  the circle of radius ``sigma`` only.
* ``zero_sum``: a zero-sum game (``L1 = -L2``) with the same pathology.
* ``convex_quad``: a strictly convex quadratic used as a sanity control.

Helpers suffixed ``_xy`` are polymorphic: they accept Python floats or numpy
arrays and apply one identical sequence of elementary operations to either,
so the scalar trajectory path and the vectorised sweep path agree bit for
bit.  Powers are spelled out as products because float exponentiation raises
on overflow while multiplication quietly yields inf, which the outcome
classifier expects to see.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

KIND_MARKET = "market"
KIND_MARKET_SIGMA = "market_sigma"
KIND_ZERO_SUM = "zero_sum"
KIND_CONVEX_QUAD = "convex_quad"
_KINDS = (KIND_MARKET, KIND_MARKET_SIGMA, KIND_ZERO_SUM, KIND_CONVEX_QUAD)


@dataclass(frozen=True)
class Params:
    """A joint parameter point, one real coordinate per player."""

    x: float
    y: float

    def is_finite(self) -> bool:
        return math.isfinite(self.x) and math.isfinite(self.y)


@dataclass(frozen=True)
class GameId:
    kind: str
    sigma: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown game kind {self.kind!r}")
        if self.kind == KIND_MARKET_SIGMA:
            if self.sigma is None or not 0.0 < self.sigma < 0.1:
                raise ValueError("sigma must lie strictly inside (0, 0.1)")
        elif self.sigma is not None:
            raise ValueError(f"game {self.kind!r} takes no sigma")

    def label(self) -> str:
        if self.kind == KIND_MARKET_SIGMA:
            return f"{self.kind}({self.sigma:g})"
        return self.kind


MARKET = GameId(KIND_MARKET)
ZERO_SUM = GameId(KIND_ZERO_SUM)
CONVEX_QUAD = GameId(KIND_CONVEX_QUAD)


def market_sigma(sigma: float) -> GameId:
    """Market variant whose maximum is deformed into a minimum inside radius sigma."""
    return GameId(KIND_MARKET_SIGMA, sigma)


@dataclass(frozen=True)
class Matrix2:
    a11: float
    a12: float
    a21: float
    a22: float

    def trace(self) -> float:
        return self.a11 + self.a22

    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a21

    def as_rows(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return (self.a11, self.a12), (self.a21, self.a22)


@dataclass(frozen=True)
class GameEval:
    """Losses, simultaneous gradient and game Hessian at one point."""

    l1: float
    l2: float
    xi: tuple[float, float]
    hess: Matrix2


class CriticalClass(str, Enum):
    NOT_CRITICAL = "not_critical"
    STRICT_MIN = "strict_min"
    STRICT_MAX = "strict_max"
    OTHER = "other"


@dataclass(frozen=True)
class DefinitenessReport:
    """Sign predicates on a 2x2 matrix M with symmetric part S and diagonal part M_d.

    ``*_re_spec_*`` fields refer to real parts of eigenvalues.  The predicates
    form a strict implication hierarchy: negative definiteness is the
    strongest, ``min lambda(S) < 0`` the weakest.
    """

    neg_definite: bool
    max_re_spec_h_neg: bool
    min_re_spec_h_neg: bool
    max_re_spec_hd_neg: bool
    min_re_spec_hd_neg: bool
    min_spec_s_neg: bool


def _select(mask, a, b):
    """Branch dispatch that is np.where on arrays and if/else on scalars."""
    if isinstance(mask, np.ndarray):
        return np.where(mask, a, b)
    return a if mask else b


# ---------------------------------------------------------------------------
# market: L1 = x^6/6 - x^2/2 + x*y + (y^4/(1+x^2) - x^4/(1+y^2))/4
#         L2 = y^6/6 - y^2/2 - x*y - (y^4/(1+x^2) - x^4/(1+y^2))/4
# The cross terms are pairwise zero-sum, so L1 + L2 keeps only the self terms.


def _market_losses(x, y):
    x2 = x * x
    y2 = y * y
    x4 = x2 * x2
    y4 = y2 * y2
    x6 = x4 * x2
    y6 = y4 * y2
    ax = 1.0 + x2
    ay = 1.0 + y2
    q = 0.25 * (y4 / ax - x4 / ay)
    l1 = x6 / 6.0 - x2 / 2.0 + x * y + q
    l2 = y6 / 6.0 - y2 / 2.0 - x * y - q
    return l1, l2


def _market_grad(x, y):
    x2 = x * x
    y2 = y * y
    x3 = x2 * x
    y3 = y2 * y
    x4 = x2 * x2
    y4 = y2 * y2
    ax = 1.0 + x2
    ay = 1.0 + y2
    g1 = x4 * x - x + y - y4 * x / (2.0 * ax * ax) - x3 / ay
    g2 = y4 * y - y - x - x4 * y / (2.0 * ay * ay) - y3 / ax
    return g1, g2


def _market_hessian(x, y):
    # Derived by differentiating the gradient; the finite-difference oracle in
    # the tests is the ground truth for these entries.
    x2 = x * x
    y2 = y * y
    x3 = x2 * x
    y3 = y2 * y
    x4 = x2 * x2
    y4 = y2 * y2
    ax = 1.0 + x2
    ay = 1.0 + y2
    ax2 = ax * ax
    ay2 = ay * ay
    h11 = 5.0 * x4 - 1.0 - y4 * (1.0 - 3.0 * x2) / (2.0 * ax2 * ax) - 3.0 * x2 / ay
    h12 = 1.0 - 2.0 * x * y3 / ax2 + 2.0 * x3 * y / ay2
    h21 = -1.0 + 2.0 * x * y3 / ax2 - 2.0 * x3 * y / ay2
    h22 = 5.0 * y4 - 1.0 - x4 * (1.0 - 3.0 * y2) / (2.0 * ay2 * ay) - 3.0 * y2 / ax
    return h11, h12, h21, h22


def _market_cross_grad(x, y):
    # (dL2/dx, dL1/dy): each player's gradient of the opponent's loss.
    x2 = x * x
    y2 = y * y
    x3 = x2 * x
    y3 = y2 * y
    x4 = x2 * x2
    y4 = y2 * y2
    ax = 1.0 + x2
    ay = 1.0 + y2
    dl2dx = -y + x * y4 / (2.0 * ax * ax) + x3 / ay
    dl1dy = x + y3 / ax + x4 * y / (2.0 * ay * ay)
    return dl2dx, dl1dy


# ---------------------------------------------------------------------------
# market_sigma: L1 = x^6/6 - x^2 + f + x*y + q, L2 = y^6/6 - f - x*y - q with
# f = (x^2+y^2-s^2)/2 outside radius s and (y^2-3x^2)(x^2+y^2-s^2)/(2s^2)
# inside.  The circle itself uses the outer branch; membership is decided on
# squared radii so both evaluation paths agree exactly.


def _msigma_f(x, y, s2):
    x2 = x * x
    y2 = y * y
    r2 = x2 + y2
    outer = (r2 - s2) / 2.0
    inner = (y2 - 3.0 * x2) * (r2 - s2) / (2.0 * s2)
    return _select(r2 >= s2, outer, inner)


def _msigma_losses(x, y, sigma):
    s2 = sigma * sigma
    x2 = x * x
    y2 = y * y
    x4 = x2 * x2
    y4 = y2 * y2
    x6 = x4 * x2
    y6 = y4 * y2
    ax = 1.0 + x2
    ay = 1.0 + y2
    q = 0.25 * (y4 / ax - x4 / ay)
    f = _msigma_f(x, y, s2)
    l1 = x6 / 6.0 - x2 + f + x * y + q
    l2 = y6 / 6.0 - f - x * y - q
    return l1, l2


def _msigma_grad(x, y, sigma):
    s2 = sigma * sigma
    x2 = x * x
    y2 = y * y
    x3 = x2 * x
    y3 = y2 * y
    x4 = x2 * x2
    y4 = y2 * y2
    ax = 1.0 + x2
    ay = 1.0 + y2
    mask = x2 + y2 >= s2
    i1 = -y4 * x / (2.0 * ax * ax) - x3 / ay
    i2 = -x4 * y / (2.0 * ay * ay) - y3 / ax
    g1_out = x4 * x - x + y + i1
    g2_out = y4 * y - y - x + i2
    g1_in = x4 * x + x + y - 2.0 * x * (3.0 * x2 + y2) / s2 + i1
    g2_in = y4 * y + y - x - 2.0 * y * (y2 - x2) / s2 + i2
    return _select(mask, g1_out, g1_in), _select(mask, g2_out, g2_in)


def _msigma_hessian(x, y, sigma):
    s2 = sigma * sigma
    x2 = x * x
    y2 = y * y
    x3 = x2 * x
    y3 = y2 * y
    x4 = x2 * x2
    y4 = y2 * y2
    ax = 1.0 + x2
    ay = 1.0 + y2
    ax2 = ax * ax
    ay2 = ay * ay
    mask = x2 + y2 >= s2
    # shared interaction second derivatives
    j11 = -y4 * (1.0 - 3.0 * x2) / (2.0 * ax2 * ax)
    j22 = -x4 * (1.0 - 3.0 * y2) / (2.0 * ay2 * ay)
    joff = -2.0 * x * y3 / ax2 + 2.0 * x3 * y / ay2
    h11_out = 5.0 * x4 - 1.0 + j11 - 3.0 * x2 / ay
    h22_out = 5.0 * y4 - 1.0 + j22 - 3.0 * y2 / ax
    h12_out = 1.0 + joff
    h11_in = 5.0 * x4 + 1.0 - (18.0 * x2 + 2.0 * y2) / s2 + j11 - 3.0 * x2 / ay
    h22_in = 5.0 * y4 + 1.0 - (6.0 * y2 - 2.0 * x2) / s2 + j22 - 3.0 * y2 / ax
    h12_in = 1.0 - 4.0 * x * y / s2 + joff
    h11 = _select(mask, h11_out, h11_in)
    h12 = _select(mask, h12_out, h12_in)
    h22 = _select(mask, h22_out, h22_in)
    # the zero-sum interaction makes the off-diagonal block antisymmetric
    return h11, h12, -h12, h22


def _msigma_cross_grad(x, y, sigma):
    s2 = sigma * sigma
    x2 = x * x
    y2 = y * y
    x3 = x2 * x
    y3 = y2 * y
    x4 = x2 * x2
    y4 = y2 * y2
    ax = 1.0 + x2
    ay = 1.0 + y2
    mask = x2 + y2 >= s2
    dfdx = _select(mask, x, 3.0 * x - 2.0 * x * (3.0 * x2 + y2) / s2)
    dfdy = _select(mask, y, -y + 2.0 * y * (y2 - x2) / s2)
    dl2dx = -dfdx - y + x * y4 / (2.0 * ax * ax) + x3 / ay
    dl1dy = dfdy + x + y3 / ax + x4 * y / (2.0 * ay * ay)
    return dl2dx, dl1dy


# ---------------------------------------------------------------------------
# zero_sum: L1 = x*y - x^2/2 + y^2/2 + x^4/4 - y^4/4 and L2 = -L1.


def _zero_sum_losses(x, y):
    x2 = x * x
    y2 = y * y
    l1 = x * y - x2 / 2.0 + y2 / 2.0 + x2 * x2 / 4.0 - y2 * y2 / 4.0
    return l1, -l1


def _zero_sum_grad(x, y):
    g1 = y - x + x * x * x
    g2 = -x - y + y * y * y
    return g1, g2


def _zero_sum_hessian(x, y):
    one = x * 0.0 + 1.0  # broadcasts over arrays, nan-propagating
    h11 = 3.0 * x * x - 1.0
    h22 = 3.0 * y * y - 1.0
    return h11, one, -one, h22


def _zero_sum_cross_grad(x, y):
    dl2dx = x - y - x * x * x
    dl1dy = x + y - y * y * y
    return dl2dx, dl1dy


# ---------------------------------------------------------------------------
# convex_quad: L1 = x^2/2 + x*y, L2 = y^2/2 - x*y.  Constant Hessian with
# identity symmetric part, so the gradient norm contracts under descent.


def _convex_losses(x, y):
    return x * x / 2.0 + x * y, y * y / 2.0 - x * y


def _convex_grad(x, y):
    return x + y, y - x


def _convex_hessian(x, y):
    one = x * 0.0 + 1.0
    return one, one, -one, one


def _convex_cross_grad(x, y):
    return -y + x * 0.0, x + y * 0.0


# ---------------------------------------------------------------------------
# polymorphic dispatch


def losses_xy(game: GameId, x, y):
    """Loss pair (L1, L2); floats in, floats out, arrays in, arrays out."""
    k = game.kind
    if k == KIND_MARKET:
        return _market_losses(x, y)
    if k == KIND_MARKET_SIGMA:
        return _msigma_losses(x, y, game.sigma)
    if k == KIND_ZERO_SUM:
        return _zero_sum_losses(x, y)
    return _convex_losses(x, y)


def grad_xy(game: GameId, x, y):
    """Simultaneous gradient xi = (dL1/dx, dL2/dy) in closed form."""
    k = game.kind
    if k == KIND_MARKET:
        return _market_grad(x, y)
    if k == KIND_MARKET_SIGMA:
        return _msigma_grad(x, y, game.sigma)
    if k == KIND_ZERO_SUM:
        return _zero_sum_grad(x, y)
    return _convex_grad(x, y)


def hessian_xy(game: GameId, x, y):
    """Game Hessian entries (h11, h12, h21, h22) of the Jacobian of xi."""
    k = game.kind
    if k == KIND_MARKET:
        return _market_hessian(x, y)
    if k == KIND_MARKET_SIGMA:
        return _msigma_hessian(x, y, game.sigma)
    if k == KIND_ZERO_SUM:
        return _zero_sum_hessian(x, y)
    return _convex_hessian(x, y)


def cross_grad_xy(game: GameId, x, y):
    """Opponent-loss gradients (dL2/dx, dL1/dy), used by the shaping updates."""
    k = game.kind
    if k == KIND_MARKET:
        return _market_cross_grad(x, y)
    if k == KIND_MARKET_SIGMA:
        return _msigma_cross_grad(x, y, game.sigma)
    if k == KIND_ZERO_SUM:
        return _zero_sum_cross_grad(x, y)
    return _convex_cross_grad(x, y)


def _require_finite(p: Params):
    if not p.is_finite():
        raise ValueError(f"non-finite point {p}")


def eval_losses(game: GameId, p: Params) -> tuple[float, float]:
    _require_finite(p)
    return losses_xy(game, p.x, p.y)


def eval_grad(game: GameId, p: Params) -> tuple[float, float]:
    _require_finite(p)
    return grad_xy(game, p.x, p.y)


def eval_hessian(game: GameId, p: Params) -> Matrix2:
    _require_finite(p)
    return Matrix2(*hessian_xy(game, p.x, p.y))


def evaluate(game: GameId, p: Params) -> GameEval:
    l1, l2 = eval_losses(game, p)
    return GameEval(l1, l2, eval_grad(game, p), eval_hessian(game, p))


def fd_grad(game: GameId, p: Params, h: float) -> tuple[float, float]:
    """Central-difference oracle for eval_grad.

    Component i differentiates player i's own loss in its own coordinate.
    For market_sigma the point must sit further than h from the sigma circle
    so both probes fall on the same branch.
    """
    _require_finite(p)
    if h <= 0.0:
        raise ValueError("h must be positive")
    l1p, _ = losses_xy(game, p.x + h, p.y)
    l1m, _ = losses_xy(game, p.x - h, p.y)
    _, l2p = losses_xy(game, p.x, p.y + h)
    _, l2m = losses_xy(game, p.x, p.y - h)
    return (l1p - l1m) / (2.0 * h), (l2p - l2m) / (2.0 * h)


def fd_hessian(game: GameId, p: Params, h: float) -> Matrix2:
    """Central-difference oracle for eval_hessian, built on eval_grad."""
    _require_finite(p)
    if h <= 0.0:
        raise ValueError("h must be positive")
    gxp = grad_xy(game, p.x + h, p.y)
    gxm = grad_xy(game, p.x - h, p.y)
    gyp = grad_xy(game, p.x, p.y + h)
    gym = grad_xy(game, p.x, p.y - h)
    inv = 1.0 / (2.0 * h)
    return Matrix2(
        (gxp[0] - gxm[0]) * inv,
        (gyp[0] - gym[0]) * inv,
        (gxp[1] - gxm[1]) * inv,
        (gyp[1] - gym[1]) * inv,
    )


# ---------------------------------------------------------------------------
# decompositions and classification


def decompose_sym_antisym(m: Matrix2) -> tuple[Matrix2, Matrix2]:
    """Split M = S + A into symmetric and antisymmetric halves.

    S = (M + M^T)/2 and A = (M - M^T)/2, so S is exactly symmetric and A
    exactly antisymmetric.  Reassembly S + A == M is exact whenever the
    half-sum and half-difference of the off-diagonal entries incur no
    rounding (any dyadic entries, in particular all integer matrices); for
    arbitrary doubles with mismatched exponents no float pair can reassemble
    exactly, and these halves are off by at most an ulp.
    """
    s12 = (m.a12 + m.a21) / 2.0
    a12 = (m.a12 - m.a21) / 2.0
    return Matrix2(m.a11, s12, s12, m.a22), Matrix2(0.0, a12, -a12, 0.0)


def decompose_blocks(m: Matrix2) -> tuple[Matrix2, Matrix2]:
    """Split M = M_d + M_o into diagonal and off-diagonal player blocks."""
    return Matrix2(m.a11, 0.0, 0.0, m.a22), Matrix2(0.0, m.a12, m.a21, 0.0)


def eig_real_parts(m: Matrix2) -> tuple[float, float]:
    """(min, max) real part of the eigenvalues, closed form for 2x2."""
    tr = m.trace()
    disc = tr * tr - 4.0 * m.det()
    if disc < 0.0:
        re = tr / 2.0
        return re, re
    r = math.sqrt(disc)
    return (tr - r) / 2.0, (tr + r) / 2.0


def classify_definiteness(m: Matrix2) -> DefinitenessReport:
    """Sign predicates decided exactly from trace/determinant, no epsilon.

    For real eigenvalues, both negative iff trace < 0 and det > 0; at least
    one negative iff trace < 0 or det < 0.  A complex pair shares the real
    part trace/2.  Definiteness of M is definiteness of its symmetric part.
    """
    tr = m.trace()
    det = m.det()
    disc = tr * tr - 4.0 * det
    if disc < 0.0:
        max_h_neg = min_h_neg = tr < 0.0
    else:
        max_h_neg = tr < 0.0 and det > 0.0
        min_h_neg = tr < 0.0 or det < 0.0
    s12 = (m.a12 + m.a21) / 2.0
    det_s = m.a11 * m.a22 - s12 * s12
    return DefinitenessReport(
        neg_definite=tr < 0.0 and det_s > 0.0,
        max_re_spec_h_neg=max_h_neg,
        min_re_spec_h_neg=min_h_neg,
        max_re_spec_hd_neg=max(m.a11, m.a22) < 0.0,
        min_re_spec_hd_neg=min(m.a11, m.a22) < 0.0,
        min_spec_s_neg=tr < 0.0 or det_s < 0.0,
    )


def definiteness_implications_ok(r: DefinitenessReport) -> bool:
    """True iff the report respects the predicate hierarchy.

    Negative definiteness implies both max-eigenvalue predicates; each max
    predicate implies both min predicates; each min predicate implies
    ``min lambda(S) < 0``.
    """
    if r.neg_definite and not (r.max_re_spec_h_neg and r.max_re_spec_hd_neg):
        return False
    if r.max_re_spec_h_neg and not (r.min_re_spec_h_neg and r.min_re_spec_hd_neg):
        return False
    if r.max_re_spec_hd_neg and not (r.min_re_spec_hd_neg and r.min_re_spec_h_neg):
        return False
    if r.min_re_spec_h_neg and not r.min_spec_s_neg:
        return False
    if r.min_re_spec_hd_neg and not r.min_spec_s_neg:
        return False
    return True


def classify_critical_point(game: GameId, p: Params, tol: float) -> CriticalClass:
    """Strict-minimum / strict-maximum test at p.

    Not critical when ||xi|| >= tol; otherwise definiteness of the Hessian's
    symmetric part decides, with exact sign tests (the built-in games are far
    from singular at their candidate points).
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    g1, g2 = eval_grad(game, p)
    if g1 * g1 + g2 * g2 >= tol * tol:
        return CriticalClass.NOT_CRITICAL
    h = eval_hessian(game, p)
    tr = h.trace()
    s12 = (h.a12 + h.a21) / 2.0
    det_s = h.a11 * h.a22 - s12 * s12
    if det_s > 0.0:
        if tr > 0.0:
            return CriticalClass.STRICT_MIN
        if tr < 0.0:
            return CriticalClass.STRICT_MAX
    return CriticalClass.OTHER
