"""Exact certification that the market and zero-sum games have one critical point.

The gradient equations are cleared to integer polynomial systems, the
variable y is eliminated by a Sylvester resultant (fraction-free Bareiss over
polynomials in x), and the number of distinct real roots of the resulting
univariate polynomial is counted exactly with Sturm sequences.  A count of
one, together with the known root at the origin, certifies uniqueness.

Everything on the certification path is exact: public polynomials carry
``fractions.Fraction`` coefficients, while the heavy kernels run on primitive
integer coefficient lists (scaling a Sturm chain member by a positive
constant does not change sign variations).  No floating point is used here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .games import KIND_MARKET, KIND_ZERO_SUM, GameId


class DivisionByZeroPolyError(ZeroDivisionError):
    """Polynomial division by the zero polynomial."""


class UnsupportedGameError(ValueError):
    """certify_unique_critical only handles the market and zero-sum games."""


# ---------------------------------------------------------------------------
# integer kernels: polynomials as ascending coefficient lists over int


def _ztrim(p: list[int]) -> list[int]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _zadd(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * max(len(a), len(b))
    for i, c in enumerate(a):
        out[i] += c
    for i, c in enumerate(b):
        out[i] += c
    return _ztrim(out)


def _zneg(a: Sequence[int]) -> list[int]:
    return [-c for c in a]


def _zmul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
    return _ztrim(out)


def _zscale(a: Sequence[int], k: int) -> list[int]:
    if k == 0:
        return []
    return [c * k for c in a]


def _zderiv(a: Sequence[int]) -> list[int]:
    return _ztrim([i * c for i, c in enumerate(a)][1:])


def _zcontent(a: Sequence[int]) -> int:
    g = 0
    for c in a:
        g = math.gcd(g, c)
    return g or 1


def _zprimitive(a: Sequence[int]) -> list[int]:
    g = _zcontent(a)
    return [c // g for c in a]


def _zdivexact(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Quotient of an exact division in Z[x]; raises if it does not divide."""
    if not b:
        raise DivisionByZeroPolyError("division by zero polynomial")
    rem = list(a)
    if not rem:
        return []
    if len(rem) < len(b):
        raise ArithmeticError("inexact polynomial division")
    q = [0] * (len(rem) - len(b) + 1)
    lb = b[-1]
    for i in range(len(rem) - len(b), -1, -1):
        c = rem[i + len(b) - 1]
        if c == 0:
            continue
        if c % lb:
            raise ArithmeticError("inexact polynomial division")
        qc = c // lb
        q[i] = qc
        for j, cb in enumerate(b):
            rem[i + j] -= qc * cb
    if any(rem):
        raise ArithmeticError("inexact polynomial division")
    return _ztrim(q)


def _zrem_scaled(f: Sequence[int], g: Sequence[int]) -> list[int]:
    """rem(f, g) times a positive constant, via pseudo-division over Z."""
    r = list(f)
    dg = len(g) - 1
    lg = g[-1]
    while r and len(r) - 1 >= dg:
        dr = len(r) - 1
        lr = r[-1]
        r = [c * lg for c in r]
        for j, cg in enumerate(g):
            r[dr - dg + j] -= lr * cg
        _ztrim(r)
        if lg < 0:
            # keep the accumulated scaling positive
            r = [-c for c in r]
    return r


def _zgcd(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Primitive gcd in Z[x] (primitive pseudo-remainder sequence)."""
    a, b = _zprimitive(a), _zprimitive(b)
    while b:
        r = _zrem_scaled(a, b)
        a, b = b, _zprimitive(r) if r else []
    return a


def _zsign_at(p: Sequence[int], num: int, den: int) -> int:
    """Sign of p at the rational num/den (den > 0), exactly."""
    acc = 0
    dpow = 1
    for c in reversed(p):
        acc = acc * num + c * dpow
        dpow *= den
    return (acc > 0) - (acc < 0)


def _zsign_at_inf(p: Sequence[int], positive: bool) -> int:
    lc = p[-1]
    s = (lc > 0) - (lc < 0)
    if not positive and (len(p) - 1) % 2 == 1:
        s = -s
    return s


# ---------------------------------------------------------------------------
# public rational polynomial type


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    raise TypeError(f"coefficients must be exact rationals, got {type(v).__name__}")


@dataclass(frozen=True)
class RationalPoly:
    """Univariate polynomial with exact rational coefficients, ascending order."""

    coeffs: tuple[Fraction, ...]

    @staticmethod
    def from_coeffs(coeffs: Iterable[Fraction | int]) -> "RationalPoly":
        cs = [_as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        return RationalPoly(tuple(cs))

    @staticmethod
    def zero() -> "RationalPoly":
        return RationalPoly(())

    @staticmethod
    def one() -> "RationalPoly":
        return RationalPoly.from_coeffs([1])

    @staticmethod
    def x() -> "RationalPoly":
        return RationalPoly.from_coeffs([0, 1])

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        """Degree, with the zero polynomial at -1."""
        return len(self.coeffs) - 1

    def leading(self) -> Fraction:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __add__(self, other: "RationalPoly") -> "RationalPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        out = [Fraction(0)] * n
        for i, c in enumerate(self.coeffs):
            out[i] += c
        for i, c in enumerate(other.coeffs):
            out[i] += c
        return RationalPoly.from_coeffs(out)

    def __neg__(self) -> "RationalPoly":
        return RationalPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "RationalPoly") -> "RationalPoly":
        return self + (-other)

    def __mul__(self, other: "RationalPoly") -> "RationalPoly":
        if self.is_zero or other.is_zero:
            return RationalPoly.zero()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return RationalPoly.from_coeffs(out)

    def scale(self, k: Fraction | int) -> "RationalPoly":
        k = _as_fraction(k)
        if k == 0:
            return RationalPoly.zero()
        return RationalPoly(tuple(c * k for c in self.coeffs))

    def derivative(self) -> "RationalPoly":
        return RationalPoly.from_coeffs(
            i * c for i, c in enumerate(self.coeffs) if i
        )

    def monic(self) -> "RationalPoly":
        if self.is_zero:
            return self
        return self.scale(1 / self.leading())

    def eval(self, v: Fraction | int) -> Fraction:
        v = _as_fraction(v)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * v + c
        return acc

    def _int_parts(self) -> tuple[list[int], Fraction]:
        """Primitive integer version and the positive factor relating them.

        Returns (q, s) with self = s * q, s > 0 (sign stays with q).
        """
        if self.is_zero:
            return [], Fraction(1)
        den = math.lcm(*(c.denominator for c in self.coeffs))
        ints = [int(c * den) for c in self.coeffs]
        g = _zcontent(ints)
        return [c // g for c in ints], Fraction(g, den)

    @staticmethod
    def _from_ints(p: Sequence[int]) -> "RationalPoly":
        return RationalPoly.from_coeffs(p)


# ---------------------------------------------------------------------------
# operations


def poly_divrem(p: RationalPoly, q: RationalPoly) -> tuple[RationalPoly, RationalPoly]:
    """Euclidean division p = q*quot + rem with deg rem < deg q, exact."""
    if q.is_zero:
        raise DivisionByZeroPolyError("division by zero polynomial")
    rem = list(p.coeffs)
    dq = q.degree
    lq = q.leading()
    quot = [Fraction(0)] * max(0, len(rem) - dq)
    while len(rem) - 1 >= dq and rem:
        c = rem[-1] / lq
        k = len(rem) - 1 - dq
        quot[k] = c
        for j, cq in enumerate(q.coeffs):
            rem[k + j] -= c * cq
        while rem and rem[-1] == 0:
            rem.pop()
    return RationalPoly.from_coeffs(quot), RationalPoly.from_coeffs(rem)


def squarefree(p: RationalPoly) -> RationalPoly:
    """Square-free part p / gcd(p, p'), normalised monic."""
    if p.is_zero:
        raise ValueError("zero polynomial has no square-free part")
    if p.degree == 0:
        return RationalPoly.one()
    ip, _ = p._int_parts()
    g = _zgcd(ip, _zderiv(ip))
    if len(g) <= 1:
        return RationalPoly._from_ints(ip).monic()
    return RationalPoly._from_ints(_zdivexact(ip, g)).monic()


def _int_sturm_chain(ip: list[int]) -> list[list[int]]:
    """Signed-remainder chain over Z; members are positive multiples of the
    rational chain, which leaves sign variations unchanged."""
    chain = [ip]
    d = _zderiv(ip)
    if d:
        chain.append(d)
        while True:
            r = _zrem_scaled(chain[-2], chain[-1])
            if not r:
                break
            chain.append(_zprimitive(_zneg(r)))
    return chain


def sturm_sequence(p: RationalPoly) -> list[RationalPoly]:
    """Sturm chain p0 = p, p1 = p', p_{k+1} = -rem(p_{k-1}, p_k) until zero.

    Members beyond the first two are normalised to primitive integer
    coefficients, a positive rescaling that preserves all sign variations.
    """
    if p.is_zero:
        raise ValueError("Sturm sequence of the zero polynomial")
    out = [p]
    d = p.derivative()
    if d.is_zero:
        return out
    out.append(d)
    ip, _ = p._int_parts()
    chain = _int_sturm_chain(ip)
    out.extend(RationalPoly._from_ints(q) for q in chain[2:])
    return out


def _variations(signs: Iterable[int]) -> int:
    v = 0
    prev = 0
    for s in signs:
        if s == 0:
            continue
        if prev and s != prev:
            v += 1
        prev = s
    return v


def _variations_at(chain: list[list[int]], v: Fraction) -> int:
    num, den = v.numerator, v.denominator
    return _variations(_zsign_at(q, num, den) for q in chain)


def _variations_at_inf(chain: list[list[int]], positive: bool) -> int:
    return _variations(_zsign_at_inf(q, positive) for q in chain)


_ENDPOINT_NUDGE = Fraction(1, 2**40)


def count_real_roots(
    p: RationalPoly,
    interval: tuple[Fraction | int, Fraction | int] | None = None,
) -> int:
    """Number of distinct real roots of p, over R or inside an open interval.

    Endpoints that happen to be roots are nudged into the interval by 2**-40
    until they are not, realising open-interval semantics exactly; roots
    closer than the nudge to an endpoint would be missed, which the built-in
    certificates never approach.
    """
    if p.is_zero:
        raise ValueError("root counting needs a nonzero polynomial")
    if p.degree == 0:
        return 0
    ip, _ = p._int_parts()
    chain = _int_sturm_chain(ip)
    if interval is None:
        return _variations_at_inf(chain, False) - _variations_at_inf(chain, True)
    lo = _as_fraction(interval[0])
    hi = _as_fraction(interval[1])
    if not lo < hi:
        raise ValueError("interval needs lo < hi")
    while _zsign_at(ip, lo.numerator, lo.denominator) == 0:
        lo += _ENDPOINT_NUDGE
    while _zsign_at(ip, hi.numerator, hi.denominator) == 0:
        hi -= _ENDPOINT_NUDGE
    if not lo < hi:
        return 0
    return _variations_at(chain, lo) - _variations_at(chain, hi)


# ---------------------------------------------------------------------------
# bivariate polynomials and the Sylvester resultant


@dataclass(frozen=True)
class BiPoly:
    """Polynomial in x and y, stored as y-coefficients that are polys in x."""

    y_coeffs: tuple[RationalPoly, ...]

    @staticmethod
    def from_y_coeffs(cs: Iterable[RationalPoly]) -> "BiPoly":
        out = list(cs)
        while out and out[-1].is_zero:
            out.pop()
        return BiPoly(tuple(out))

    @staticmethod
    def const(c: int) -> "BiPoly":
        return BiPoly.from_y_coeffs([RationalPoly.from_coeffs([c])])

    @staticmethod
    def var_x() -> "BiPoly":
        return BiPoly.from_y_coeffs([RationalPoly.x()])

    @staticmethod
    def var_y() -> "BiPoly":
        return BiPoly.from_y_coeffs([RationalPoly.zero(), RationalPoly.one()])

    @property
    def is_zero(self) -> bool:
        return not self.y_coeffs

    @property
    def deg_y(self) -> int:
        return len(self.y_coeffs) - 1

    def __add__(self, other: "BiPoly") -> "BiPoly":
        n = max(len(self.y_coeffs), len(other.y_coeffs))
        out = [RationalPoly.zero()] * n
        for i, c in enumerate(self.y_coeffs):
            out[i] = out[i] + c
        for i, c in enumerate(other.y_coeffs):
            out[i] = out[i] + c
        return BiPoly.from_y_coeffs(out)

    def __sub__(self, other: "BiPoly") -> "BiPoly":
        return self + other.scale(-1)

    def __mul__(self, other: "BiPoly") -> "BiPoly":
        if self.is_zero or other.is_zero:
            return BiPoly(())
        out = [RationalPoly.zero()] * (len(self.y_coeffs) + len(other.y_coeffs) - 1)
        for i, a in enumerate(self.y_coeffs):
            if not a.is_zero:
                for j, b in enumerate(other.y_coeffs):
                    out[i + j] = out[i + j] + a * b
        return BiPoly.from_y_coeffs(out)

    def scale(self, k: Fraction | int) -> "BiPoly":
        return BiPoly.from_y_coeffs(c.scale(k) for c in self.y_coeffs)


def _bipoly_int_parts(p: BiPoly) -> tuple[list[list[int]], Fraction]:
    """Integer y-coefficient lists plus the rational factor taken out."""
    den = 1
    for c in p.y_coeffs:
        for f in c.coeffs:
            den = math.lcm(den, f.denominator)
    rows = [[int(f * den) for f in c.coeffs] for c in p.y_coeffs]
    return rows, Fraction(1, den)


def _zbareiss_det(m: list[list[list[int]]]) -> list[int]:
    """Determinant of a matrix of integer polynomials by fraction-free
    Bareiss elimination; every division is exact in Z[x]."""
    n = len(m)
    m = [row[:] for row in m]
    sign = 1
    prev: list[int] = [1]
    for k in range(n - 1):
        if not m[k][k]:
            for r in range(k + 1, n):
                if m[r][k]:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return []
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = _zadd(_zmul(m[i][j], m[k][k]), _zneg(_zmul(m[i][k], m[k][j])))
                m[i][j] = _zdivexact(num, prev) if num else []
            m[i][k] = []
        prev = m[k][k]
    return _zscale(m[n - 1][n - 1], sign)


def sylvester_resultant_y(p: BiPoly, q: BiPoly) -> RationalPoly:
    """Resultant of p and q with respect to y, a polynomial in x.

    The Sylvester matrix stacks deg_y(q) shifted rows of p's y-coefficients
    (leading first) over deg_y(p) rows of q's; its determinant vanishes at
    exactly the x where p and q share a root in y (or both leading
    coefficients vanish).
    """
    m = p.deg_y
    n = q.deg_y
    if m < 1 or n < 1:
        raise ValueError("both polynomials need positive degree in y")
    ip, sp = _bipoly_int_parts(p)
    iq, sq = _bipoly_int_parts(q)
    size = m + n
    mat: list[list[list[int]]] = [[[] for _ in range(size)] for _ in range(size)]
    for r in range(n):
        for i, c in enumerate(reversed(ip)):
            mat[r][r + i] = list(c)
    for r in range(m):
        for i, c in enumerate(reversed(iq)):
            mat[n + r][r + i] = list(c)
    det = _zbareiss_det(mat)
    # p was scaled by 1/sp, contributing sp**n rows; likewise q
    return RationalPoly._from_ints(det).scale(sp**n * sq**m)


# ---------------------------------------------------------------------------
# root isolation


def _cauchy_bound(ip: list[int]) -> Fraction:
    lc = abs(ip[-1])
    top = max(abs(c) for c in ip[:-1]) if len(ip) > 1 else 0
    b = 1 + Fraction(top, lc)
    return Fraction(math.ceil(b))


def isolate_roots(p: RationalPoly) -> list[tuple[Fraction, Fraction]]:
    """Disjoint open rational intervals, one distinct real root in each.

    Bisects from the Cauchy bound, counting by Sturm sign variations; a
    midpoint that is itself a root gets a shrunken symmetric interval.
    Intended for square-free input (then intervals isolate every real root);
    endpoints are never roots.
    """
    if p.is_zero:
        raise ValueError("cannot isolate roots of the zero polynomial")
    if p.degree == 0:
        return []
    ip, _ = p._int_parts()
    chain = _int_sturm_chain(ip)

    def sign_at(v: Fraction) -> int:
        return _zsign_at(ip, v.numerator, v.denominator)

    def var_at(v: Fraction) -> int:
        return _variations_at(chain, v)

    bound = _cauchy_bound(ip)
    out: list[tuple[Fraction, Fraction]] = []
    stack = [(-bound, bound, var_at(-bound), var_at(bound))]
    while stack:
        lo, hi, vlo, vhi = stack.pop()
        roots = vlo - vhi
        if roots <= 0:
            continue
        if roots == 1:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        if sign_at(mid) == 0:
            eps = min((hi - lo) / 4, Fraction(1))
            while True:
                a, b = mid - eps, mid + eps
                if sign_at(a) != 0 and sign_at(b) != 0:
                    va, vb = var_at(a), var_at(b)
                    if va - vb == 1:
                        break
                eps /= 2
            out.append((a, b))
            stack.append((lo, a, vlo, va))
            stack.append((b, hi, vb, vhi))
        else:
            vm = var_at(mid)
            stack.append((lo, mid, vlo, vm))
            stack.append((mid, hi, vm, vhi))
    out.sort(key=lambda iv: iv[0])
    return out


def refine_interval(
    p: RationalPoly, lo: Fraction, hi: Fraction, steps: int
) -> tuple[Fraction, Fraction]:
    """Shrink an isolating interval of a simple root by repeated bisection."""
    ip, _ = p._int_parts()

    def sign_at(v: Fraction) -> int:
        return _zsign_at(ip, v.numerator, v.denominator)

    s_lo = sign_at(lo)
    if s_lo == 0 or s_lo == sign_at(hi):
        raise ValueError("interval endpoints must straddle a sign change")
    for _ in range(steps):
        mid = (lo + hi) / 2
        sm = sign_at(mid)
        if sm == 0:
            return mid, mid
        if sm == s_lo:
            lo = mid
        else:
            hi = mid
    return lo, hi


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class CertReport:
    game: GameId
    resultant_degree: int
    real_root_count: int
    isolating_intervals: tuple[tuple[Fraction, Fraction], ...]
    conclusion: bool

    def to_json_dict(self) -> dict:
        return {
            "game": self.game.kind,
            "resultant_degree": self.resultant_degree,
            "real_root_count": self.real_root_count,
            "intervals": [
                {
                    "lo": [str(lo.numerator), str(lo.denominator)],
                    "hi": [str(hi.numerator), str(hi.denominator)],
                }
                for lo, hi in self.isolating_intervals
            ],
            "conclusion": self.conclusion,
        }


def _market_system() -> tuple[BiPoly, BiPoly]:
    """The market gradient equations cleared by their common denominators:

        2 (1+x^2)^2 (1+y^2) (x^5 - x + y) - y^4 x (1+y^2) - 2 x^3 (1+x^2)^2 = 0
        2 (1+y^2)^2 (1+x^2) (y^5 - y - x) - x^4 y (1+x^2) - 2 y^3 (1+y^2)^2 = 0
    """
    x = BiPoly.var_x()
    y = BiPoly.var_y()
    one = BiPoly.const(1)
    x2 = x * x
    y2 = y * y
    ax = one + x2
    ay = one + y2
    ax_2 = ax * ax
    ay_2 = ay * ay
    x3 = x2 * x
    y3 = y2 * y
    x4 = x2 * x2
    y4 = y2 * y2
    x5 = x4 * x
    y5 = y4 * y
    p1 = (ax_2 * ay * (x5 - x + y)).scale(2) - y4 * x * ay - (x3 * ax_2).scale(2)
    p2 = (ay_2 * ax * (y5 - y - x)).scale(2) - x4 * y * ax - (y3 * ay_2).scale(2)
    return p1, p2


def _zero_sum_system() -> tuple[BiPoly, BiPoly]:
    """The zero-sum gradient equations, already polynomial:

        y - x + x^3 = 0
        -x - y + y^3 = 0
    """
    x = BiPoly.var_x()
    y = BiPoly.var_y()
    x3 = x * x * x
    y3 = y * y * y
    return y - x + x3, y3 - y - x


def critical_point_system(game: GameId) -> tuple[BiPoly, BiPoly]:
    """Polynomial system whose real solutions are the game's critical points."""
    if game.kind == KIND_MARKET:
        return _market_system()
    if game.kind == KIND_ZERO_SUM:
        return _zero_sum_system()
    raise UnsupportedGameError(
        f"no polynomial certificate for game {game.label()!r}"
    )


def certify_unique_critical(game: GameId) -> CertReport:
    """Exact uniqueness certificate for the game's critical point.

    Eliminates y by resultant, reduces to the square-free part, counts real
    roots by Sturm's rule and isolates each by bisection; a count of one is
    the certificate (the origin is a known solution).
    """
    p1, p2 = critical_point_system(game)
    res = sylvester_resultant_y(p1, p2)
    sf = squarefree(res)
    count = count_real_roots(sf)
    intervals = isolate_roots(sf)
    if len(intervals) != count:
        raise AssertionError("Sturm count and isolation disagree")
    return CertReport(
        game=game,
        resultant_degree=res.degree,
        real_root_count=count,
        isolating_intervals=tuple(intervals),
        conclusion=count == 1,
    )
