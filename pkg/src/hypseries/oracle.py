"""Truncated series expansion used as the ground-truth oracle.

Expands closed-form expressions into truncated Puiseux series with exact
coefficients.  Coefficients live in the Q-vector space spanned by 1, pi and
log(p) for primes p; anything outside that span (e.g. exp(1), sqrt(2) as a
constant, sin(1)) raises :class:`UnsupportedExpansion` instead of
approximating.  Series may carry powers of log(z) as extra lanes, so
expansions around logarithmic singularities (log(z)*..., z^q*log(z)^m) stay
exact.

Everything here is straight O(N^2) series arithmetic on dictionaries.  It is
deliberately independent of the recurrence machinery so the two can be tested
against each other.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .expressions import Add, App, Const, Expr, Mul, Pow, Rat, Var, parse, to_text
from .expressions import app as _app
from .expressions import radd, rmul, rpow

__all__ = [
    "SymCoef", "TruncSeries", "UnsupportedExpansion",
    "expand_truncated", "maclaurin", "series_equal", "coef_to_expr",
    "log_rational", "cadd", "cneg", "cmul", "cdiv", "ciszero", "crational",
]

LOG_CAP = 8


class UnsupportedExpansion(ValueError):
    """The expansion leaves the supported coefficient domain."""


# ---------------------------------------------------------------------------
# coefficients
#
# A coefficient is either a plain Fraction (the fast common case) or a
# SymCoef: a Q-linear combination over basis keys () = 1, ("pi",) = pi and
# ("log", p) = log(p) for prime p.

_PI = ("pi",)


class SymCoef:
    __slots__ = ("parts",)

    def __init__(self, parts: dict):
        object.__setattr__(self, "parts", {k: v for k, v in parts.items() if v != 0})

    def __setattr__(self, k, v):
        raise AttributeError("immutable")

    @classmethod
    def pi(cls, mult=1) -> "SymCoef":
        return cls({_PI: Fraction(mult)})

    def is_zero(self) -> bool:
        return not self.parts

    def rational(self) -> Fraction | None:
        """The value as a Fraction, or None when pi/log parts remain."""
        if not self.parts:
            return Fraction(0)
        if len(self.parts) == 1 and () in self.parts:
            return self.parts[()]
        return None

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.rational() == other
        if isinstance(other, SymCoef):
            return self.parts == other.parts
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.parts.items()))

    def __repr__(self):
        return to_text(coef_to_expr(self))


def _prime_factorization(n: int) -> dict:
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def log_rational(r: Fraction):
    """log(r) for positive rational r, as a coefficient."""
    r = Fraction(r)
    if r <= 0:
        raise UnsupportedExpansion(f"log of non-positive constant {r}")
    parts = {}
    for p, e in _prime_factorization(r.numerator).items():
        parts[("log", p)] = parts.get(("log", p), Fraction(0)) + e
    for p, e in _prime_factorization(r.denominator).items():
        parts[("log", p)] = parts.get(("log", p), Fraction(0)) - e
    c = SymCoef(parts)
    return c.rational() if c.rational() is not None else c


def cadd(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a + b
    pa = {(): a}.copy() if isinstance(a, Fraction) else dict(a.parts)
    pb = {(): b} if isinstance(b, Fraction) else b.parts
    for k, v in pb.items():
        pa[k] = pa.get(k, Fraction(0)) + v
    c = SymCoef(pa)
    r = c.rational()
    return r if r is not None else c


def cneg(a):
    if isinstance(a, Fraction):
        return -a
    return SymCoef({k: -v for k, v in a.parts.items()})


def cmul(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a * b
    if isinstance(a, Fraction):
        if a == 0:
            return Fraction(0)
        return SymCoef({k: a * v for k, v in b.parts.items()})
    if isinstance(b, Fraction):
        if b == 0:
            return Fraction(0)
        return SymCoef({k: b * v for k, v in a.parts.items()})
    ra, rb = a.rational(), b.rational()
    if ra is not None:
        return cmul(ra, b)
    if rb is not None:
        return cmul(a, rb)
    raise UnsupportedExpansion(f"product of transcendental constants {a!r} * {b!r}")


def cdiv(a, b):
    rb = b if isinstance(b, Fraction) else b.rational()
    if rb is None:
        raise UnsupportedExpansion(f"division by transcendental constant {b!r}")
    if rb == 0:
        raise ZeroDivisionError("coefficient division by zero")
    return cmul(a, Fraction(1) / rb)


def ciszero(a) -> bool:
    return not a if isinstance(a, Fraction) else a.is_zero()


def crational(a) -> Fraction | None:
    return a if isinstance(a, Fraction) else a.rational()


_LOG_FLOATS = {}


def _cfloat(a) -> float:
    if isinstance(a, Fraction):
        return float(a)
    out = 0.0
    for k, v in a.parts.items():
        if k == ():
            out += float(v)
        elif k == _PI:
            out += float(v) * math.pi
        else:
            p = k[1]
            if p not in _LOG_FLOATS:
                _LOG_FLOATS[p] = math.log(p)
            out += float(v) * _LOG_FLOATS[p]
    return out


def _csign(a) -> int:
    """Sign of a nonzero coefficient; exact for rationals, guarded otherwise."""
    r = crational(a)
    if r is not None:
        return -1 if r < 0 else (1 if r > 0 else 0)
    x = _cfloat(a)
    if abs(x) < 1e-9:
        raise UnsupportedExpansion(f"cannot determine the sign of {a!r}")
    return -1 if x < 0 else 1


def coef_to_expr(a) -> Expr:
    """Render a coefficient as an expression (rationals, %pi, log of primes)."""
    if isinstance(a, Fraction):
        return Rat(a)
    terms = []
    for k, v in sorted(a.parts.items(), key=str):
        if k == ():
            terms.append(Rat(v))
        elif k == _PI:
            terms.append(rmul([Rat(v), Const("pi")]))
        else:
            terms.append(rmul([Rat(v), _app("log", Rat(k[1]))]))
    return radd(terms) if terms else Rat(0)


# ---------------------------------------------------------------------------
# truncated Puiseux series with log lanes


def _omin(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class TruncSeries:
    """Sum of c * z^(n/k) * log(z)^m, known for all n < order.

    ``order`` is in grid units (exponent bound is order/k); ``order is None``
    means the series is exact (a Puiseux polynomial known everywhere).
    Coefficients are Fractions or SymCoef; zero entries are never stored.
    """

    __slots__ = ("var", "k", "order", "coeffs")

    def __init__(self, var: str, k: int, order, coeffs: dict):
        self.var = var
        self.k = k
        self.order = order
        self.coeffs = {nm: c for nm, c in coeffs.items() if not ciszero(c)}
        if order is not None:
            self.coeffs = {nm: c for nm, c in self.coeffs.items() if nm[0] < order}

    @classmethod
    def zero(cls, var: str) -> "TruncSeries":
        return cls(var, 1, None, {})

    @classmethod
    def const(cls, var: str, c) -> "TruncSeries":
        return cls(var, 1, None, {(0, 0): c if isinstance(c, SymCoef) else Fraction(c)})

    @classmethod
    def x(cls, var: str) -> "TruncSeries":
        return cls(var, 1, None, {(1, 0): Fraction(1)})

    # -- basic queries ----------------------------------------------------

    def is_zero_series(self) -> bool:
        return not self.coeffs

    def valuation_grid(self):
        """Min n with a nonzero entry (grid units), or None for zero series."""
        if not self.coeffs:
            return None
        return min(n for n, _ in self.coeffs)

    def valuation(self) -> Fraction | None:
        v = self.valuation_grid()
        return None if v is None else Fraction(v, self.k)

    def bound(self) -> Fraction | None:
        """Exponent bound: coefficients are known below it (None = exact)."""
        return None if self.order is None else Fraction(self.order, self.k)

    def coeff(self, e, m: int = 0):
        """Coefficient of z^e * log(z)^m."""
        e = Fraction(e)
        n = e * self.k
        if n.denominator != 1:
            return Fraction(0)
        if self.order is not None and n >= self.order:
            raise ValueError(f"coefficient of {self.var}^{e} beyond truncation order")
        return self.coeffs.get((int(n), m), Fraction(0))

    def terms(self):
        """Sorted [(exponent, logpower, coefficient)]."""
        return [
            (Fraction(n, self.k), m, c)
            for (n, m), c in sorted(self.coeffs.items())
        ]

    def has_logs(self) -> bool:
        return any(m for _, m in self.coeffs)

    def max_logpow(self) -> int:
        return max((m for _, m in self.coeffs), default=0)

    # -- structural adjustments -------------------------------------------

    def lift(self, k2: int) -> "TruncSeries":
        if k2 == self.k:
            return self
        if k2 % self.k:
            raise ValueError("can only lift to a multiple of the current grid")
        f = k2 // self.k
        return TruncSeries(
            self.var, k2, None if self.order is None else self.order * f,
            {(n * f, m): c for (n, m), c in self.coeffs.items()},
        )

    def truncate(self, order) -> "TruncSeries":
        return TruncSeries(self.var, self.k, _omin(self.order, order), self.coeffs)

    def reduce_grid(self) -> "TruncSeries":
        """Shrink k when all exponents share a common factor with it."""
        if self.k == 1:
            return self
        g = self.k
        for n, _ in self.coeffs:
            g = math.gcd(g, n)
            if g == 1:
                return self
        # flooring keeps the claimed bound on the coarser grid (safe side)
        new_order = None if self.order is None else self.order // g
        return TruncSeries(
            self.var, self.k // g, new_order,
            {(n // g, m): c for (n, m), c in self.coeffs.items()},
        )

    def shift(self, j: int) -> "TruncSeries":
        """Multiply by z^(j/k) (grid units of the current k)."""
        return TruncSeries(
            self.var, self.k, None if self.order is None else self.order + j,
            {(n + j, m): c for (n, m), c in self.coeffs.items()},
        )

    # -- arithmetic --------------------------------------------------------

    def _aligned(self, other: "TruncSeries"):
        k = (self.k * other.k) // math.gcd(self.k, other.k)
        return self.lift(k), other.lift(k)

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        a, b = self._aligned(other)
        out = dict(a.coeffs)
        for nm, c in b.coeffs.items():
            out[nm] = cadd(out.get(nm, Fraction(0)), c)
        return TruncSeries(a.var, a.k, _omin(a.order, b.order), out)

    def __neg__(self) -> "TruncSeries":
        return TruncSeries(
            self.var, self.k, self.order,
            {nm: cneg(c) for nm, c in self.coeffs.items()},
        )

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        return self + (-other)

    def scale(self, c) -> "TruncSeries":
        c = Fraction(c) if isinstance(c, int) else c
        if ciszero(c):
            return TruncSeries(self.var, self.k, self.order, {})
        return TruncSeries(
            self.var, self.k, self.order,
            {nm: cmul(v, c) for nm, v in self.coeffs.items()},
        )

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        a, b = self._aligned(other)
        if not a.coeffs or not b.coeffs:
            if (not a.coeffs and a.order is None) or (not b.coeffs and b.order is None):
                return TruncSeries(a.var, a.k, None, {})  # exact zero factor
            # truncated zero times something: zero, known to order + valuation
            cands = []
            for x, y in ((a, b), (b, a)):
                if not x.coeffs:
                    vy = y.valuation_grid()
                    vy = vy if vy is not None else y.order
                    cands.append(x.order + vy)
            return TruncSeries(a.var, a.k, min(cands), {})
        va, vb = a.valuation_grid(), b.valuation_grid()
        order = None
        if a.order is not None:
            order = _omin(order, a.order + vb)
        if b.order is not None:
            order = _omin(order, b.order + va)
        out: dict = {}
        bitems = list(b.coeffs.items())
        for (n1, m1), c1 in a.coeffs.items():
            for (n2, m2), c2 in bitems:
                n = n1 + n2
                if order is not None and n >= order:
                    continue
                m = m1 + m2
                if m > LOG_CAP:
                    raise UnsupportedExpansion(
                        f"log({a.var}) power exceeds the supported bound {LOG_CAP}"
                    )
                key = (n, m)
                prod = cmul(c1, c2)
                if key in out:
                    out[key] = cadd(out[key], prod)
                else:
                    out[key] = prod
        return TruncSeries(a.var, a.k, order, out)

    def inverse(self) -> "TruncSeries":
        if not self.coeffs:
            raise ZeroDivisionError("inverse of a (truncated) zero series")
        v = self.valuation_grid()
        lead = self.coeffs.get((v, 0))
        if lead is None:
            raise UnsupportedExpansion(
                "inverse of a series whose lowest term carries log powers"
            )
        u = self.shift(-v)  # unit part, constant term lead
        if u.order is None and len(u.coeffs) > 1:
            raise UnsupportedExpansion(
                "inverse of an exact series needs a truncation order; "
                "truncate the input first"
            )
        if len(u.coeffs) == 1:
            return TruncSeries(
                self.var, self.k, u.order, {(0, 0): cdiv(Fraction(1), lead)}
            ).shift(-v)
        # w * u = 1 solved lane by lane, induction lexicographic on (n, m)
        out = {(0, 0): cdiv(Fraction(1), lead)}
        uitems = [(nm, c) for nm, c in u.coeffs.items() if nm != (0, 0)]
        for n in range(0, u.order):
            for m in range(0, LOG_CAP + 1):
                if n == 0 and m == 0:
                    continue
                acc = Fraction(0)
                for (bn, bm), bc in uitems:
                    wn, wm = n - bn, m - bm
                    if wn < 0 or wm < 0:
                        continue
                    wc = out.get((wn, wm))
                    if wc is None:
                        continue
                    acc = cadd(acc, cmul(bc, wc))
                if not ciszero(acc):
                    out[(n, m)] = cdiv(cneg(acc), lead)
        return TruncSeries(self.var, self.k, u.order, out).shift(-v)

    def __truediv__(self, other: "TruncSeries") -> "TruncSeries":
        return self * other.inverse()

    def powq(self, r) -> "TruncSeries":
        """Power with rational exponent (principal branch on (0, eps))."""
        r = Fraction(r)
        if r == 0:
            return TruncSeries.const(self.var, 1)
        if r.denominator == 1 and r > 0:
            n = int(r)
            acc = self
            for _ in range(n - 1):
                acc = acc * self
            return acc
        if r.denominator == 1:
            return self.inverse().powq(-r)
        v = self.valuation_grid()
        if v is None:
            raise ZeroDivisionError("fractional power of a zero series")
        lead = self.coeffs.get((v, 0))
        if lead is None:
            raise UnsupportedExpansion(
                "fractional power of a series whose lowest term carries logs"
            )
        c0 = crational(lead)
        if c0 is None:
            raise UnsupportedExpansion(
                f"fractional power with transcendental leading coefficient {lead!r}"
            )
        from .expressions import _rat_pow
        c0r = _rat_pow(c0, r) if c0 > 0 else None
        if c0r is None:
            raise UnsupportedExpansion(
                f"{c0}^({r}) is not rational; constant is outside the "
                "supported coefficient field"
            )
        # exponent of the leading factor and the refined grid
        e0 = r * Fraction(v, self.k)
        k2 = (self.k * e0.denominator) // math.gcd(self.k, e0.denominator)
        s = self.shift(-v).scale(Fraction(1) / c0)
        s = s - TruncSeries.const(self.var, 1)
        # binomial series in s
        acc = TruncSeries.const(self.var, 1)
        term = TruncSeries.const(self.var, 1)
        bound = s.order
        if not s.is_zero_series():
            if bound is None:
                raise UnsupportedExpansion(
                    "fractional power of an exact series needs a truncation "
                    "order; truncate the input first"
                )
            jmax = bound // s.valuation_grid() + 1
            coef = Fraction(1)
            for j in range(1, jmax + 1):
                coef = coef * (r - j + 1) / j
                term = term * s
                acc = acc + term.scale(coef)
        if bound is not None:
            acc = acc.truncate(bound)
        acc = acc.scale(c0r)
        acc = acc.lift(k2)
        e0n = e0 * k2
        assert e0n.denominator == 1
        return acc.shift(int(e0n))

    def derivative(self) -> "TruncSeries":
        out: dict = {}
        for (n, m), c in self.coeffs.items():
            e = Fraction(n, self.k)
            if e != 0:
                key = (n - self.k, m)
                prev = out.get(key, Fraction(0))
                out[key] = cadd(prev, cmul(c, e))
            if m > 0:
                key = (n - self.k, m - 1)
                prev = out.get(key, Fraction(0))
                out[key] = cadd(prev, cmul(c, Fraction(m)))
        return TruncSeries(
            self.var, self.k,
            None if self.order is None else self.order - self.k, out,
        )

    # -- rendering ---------------------------------------------------------

    def to_expr(self) -> Expr:
        z = Var(self.var)
        terms = []
        for e, m, c in self.terms():
            t = [coef_to_expr(c)]
            if e != 0:
                t.append(rpow(z, e))
            if m:
                t.append(rpow(_app("log", z), Fraction(m)))
            terms.append(rmul(t))
        return radd(terms) if terms else Rat(0)

    def __repr__(self):
        body = to_text(self.to_expr())
        if self.order is None:
            return body
        b = self.bound()
        bs = str(b) if b.denominator == 1 else f"{b.numerator}/{b.denominator}"
        return f"{body} + O({self.var}^{bs})"


# ---------------------------------------------------------------------------
# Maclaurin generators (coefficient of z^n)


def _gen_exp(n):
    return Fraction(1, math.factorial(n))


def _gen_sin(n):
    if n % 2 == 0:
        return Fraction(0)
    m = (n - 1) // 2
    return Fraction((-1) ** m, math.factorial(n))


def _gen_cos(n):
    if n % 2:
        return Fraction(0)
    return Fraction((-1) ** (n // 2), math.factorial(n))


def _gen_sinh(n):
    return Fraction(0) if n % 2 == 0 else Fraction(1, math.factorial(n))


def _gen_cosh(n):
    return Fraction(1, math.factorial(n)) if n % 2 == 0 else Fraction(0)


def _gen_asin(n):
    if n % 2 == 0:
        return Fraction(0)
    m = (n - 1) // 2
    return Fraction(math.comb(2 * m, m), 4 ** m * (2 * m + 1))


def _gen_asinh(n):
    if n % 2 == 0:
        return Fraction(0)
    m = (n - 1) // 2
    return Fraction((-1) ** m * math.comb(2 * m, m), 4 ** m * (2 * m + 1))


def _gen_atan(n):
    if n % 2 == 0:
        return Fraction(0)
    return Fraction((-1) ** ((n - 1) // 2), n)


def _gen_atanh(n):
    return Fraction(0) if n % 2 == 0 else Fraction(1, n)


_GENERATORS = {
    "exp": _gen_exp, "sin": _gen_sin, "cos": _gen_cos,
    "sinh": _gen_sinh, "cosh": _gen_cosh,
    "asin": _gen_asin, "asinh": _gen_asinh,
    "atan": _gen_atan, "atanh": _gen_atanh,
}


def _compose_gen(gen, u: TruncSeries, prec: Fraction) -> TruncSeries:
    """gen-series composed with u; u must have positive valuation."""
    v = u.valuation()
    if u.is_zero_series():
        return TruncSeries.const(u.var, gen(0)).truncate(
            None if u.order is None else u.order
        )
    if v is None or v <= 0:
        raise ValueError("composition argument must vanish at the origin")
    # single-term argument: place generator coefficients directly
    if len(u.coeffs) == 1 and u.order is None:
        (n0, m0), c0 = next(iter(u.coeffs.items()))
        if m0 == 0:
            nmax = int(prec / v) + 1
            out = {}
            power = Fraction(1)
            for j in range(0, nmax + 1):
                g = gen(j)
                if g != 0:
                    out[(j * n0, 0)] = cmul(g, power)
                power = cmul(power, c0)
            return TruncSeries(u.var, u.k, (nmax + 1) * n0, out)
    nmax = int(prec / v) + 1
    pk = prec * u.k
    target = int(pk) if pk == int(pk) else int(pk) + 1  # grid bound on u's grid
    acc = TruncSeries.const(u.var, gen(nmax))
    for j in range(nmax - 1, -1, -1):
        acc = acc * u
        if acc.order is None or acc.order > target:
            acc = acc.truncate(target)
        g = gen(j)
        if g != 0:
            acc = acc + TruncSeries.const(u.var, g)
    # the Horner loop used nmax+1 generator terms; cap the claim accordingly
    return acc.truncate((nmax + 1) * u.valuation_grid())


def _log_of(g: TruncSeries, prec: Fraction) -> TruncSeries:
    """log of a series: prime-log constant + (v/k) log lane + log(1+s)."""
    v = g.valuation_grid()
    if v is None:
        raise UnsupportedExpansion("log of the zero series")
    lead = g.coeffs.get((v, 0))
    if lead is None:
        raise UnsupportedExpansion("log of a series whose lowest term carries logs")
    c0 = crational(lead)
    if c0 is None or c0 <= 0:
        raise UnsupportedExpansion(
            f"log needs a positive rational leading coefficient, got {lead!r}"
        )
    e = Fraction(v, g.k)
    out = TruncSeries(g.var, 1, None, {(0, 1): Fraction(e)}) if e != 0 else TruncSeries.zero(g.var)
    lc = log_rational(c0)
    if not ciszero(lc):
        out = out + TruncSeries(g.var, 1, None, {(0, 0): lc})
    s = g.shift(-v).scale(Fraction(1) / c0) - TruncSeries.const(g.var, 1)
    if not s.is_zero_series():
        if s.order is None:
            raise UnsupportedExpansion(
                "log of an exact series needs a truncation order"
            )
        vs = s.valuation()
        jmax = int(prec / vs) + 1
        acc = TruncSeries.const(s.var, Fraction((-1) ** (jmax + 1), jmax))
        for j in range(jmax - 1, 0, -1):
            acc = acc * s
            acc = acc + TruncSeries.const(s.var, Fraction((-1) ** (j + 1), j))
        acc = acc * s
        acc = acc.truncate((jmax + 1) * s.valuation_grid())
        out = out + acc
    if s.order is not None:
        b = Fraction(s.order, s.k)
        k2 = (out.k * b.denominator) // math.gcd(out.k, b.denominator)
        out = out.lift(k2).truncate(int(b * k2))
    return out


def _split_const(s: TruncSeries):
    """(constant term as coefficient, series minus that constant)."""
    a0 = s.coeffs.get((0, 0), Fraction(0))
    if ciszero(a0):
        return Fraction(0), s
    rest = dict(s.coeffs)
    del rest[(0, 0)]
    return a0, TruncSeries(s.var, s.k, s.order, rest)


def _check_analytic_arg(name: str, u: TruncSeries):
    v = u.valuation_grid()
    if v is not None and v < 0:
        raise UnsupportedExpansion(
            f"{name} of a series with a pole at the origin is not supported"
        )
    if any(n <= 0 and m > 0 for (n, m) in u.coeffs):
        raise UnsupportedExpansion(
            f"{name} of a series with log terms at nonpositive exponents"
        )


def _pi_multiple(a0):
    """Decompose a constant as q + b*pi, or None when log parts appear."""
    if isinstance(a0, Fraction):
        return a0, Fraction(0)
    q = Fraction(0)
    b = Fraction(0)
    for k, v in a0.parts.items():
        if k == ():
            q = v
        elif k == _PI:
            b = v
        else:
            return None
    return q, b


def _expand_sin_cos(which: str, arg: TruncSeries, prec: Fraction) -> TruncSeries:
    _check_analytic_arg(which, arg)
    a0, u = _split_const(arg)
    if not ciszero(a0):
        qb = _pi_multiple(a0)
        if qb is None:
            raise UnsupportedExpansion(f"{which} of a log-bearing constant")
        q, b = qb
        if q != 0:
            raise UnsupportedExpansion(
                f"{which}({q} + ...) has an irrational constant term"
            )
        t = b % 2  # period 2*pi
        if t.denominator not in (1, 2):
            raise UnsupportedExpansion(
                f"{which} at a non half-integer multiple of pi"
            )
        # sin(u + t*pi), cos(u + t*pi) for t in {0, 1/2, 1, 3/2}
        table = {
            ("sin", Fraction(0)): ("sin", 1), ("sin", Fraction(1, 2)): ("cos", 1),
            ("sin", Fraction(1)): ("sin", -1), ("sin", Fraction(3, 2)): ("cos", -1),
            ("cos", Fraction(0)): ("cos", 1), ("cos", Fraction(1, 2)): ("sin", -1),
            ("cos", Fraction(1)): ("cos", -1), ("cos", Fraction(3, 2)): ("sin", 1),
        }
        fn, sign = table[(which, t)]
        res = _expand_sin_cos(fn, u, prec)
        return res.scale(Fraction(sign))
    return _compose_gen(_GENERATORS[which], u, prec)


def _expand_exp(arg: TruncSeries, prec: Fraction) -> TruncSeries:
    _check_analytic_arg("exp", arg)
    a0, u = _split_const(arg)
    factor = Fraction(1)
    if not ciszero(a0):
        # exp of a log-combination is rational when the exponents work out
        parts = a0.parts if isinstance(a0, SymCoef) else {(): a0}
        from .expressions import _rat_pow
        for k, v in parts.items():
            if k == () and v != 0:
                raise UnsupportedExpansion(
                    f"exp({v} + ...) has an irrational constant factor"
                )
            if k == _PI:
                raise UnsupportedExpansion("exp of a pi multiple is irrational")
            if k and k[0] == "log":
                f = _rat_pow(Fraction(k[1]), v)
                if f is None:
                    raise UnsupportedExpansion(
                        f"exp({v}*log({k[1]})) is not rational"
                    )
                factor *= f
    res = _compose_gen(_gen_exp, u, prec)
    return res.scale(factor) if factor != 1 else res


def _ensure_order(s: TruncSeries, prec: Fraction) -> TruncSeries:
    """Give an exact multi-term series a horizon before inverse/sqrt/log."""
    if s.order is None and len(s.coeffs) > 1:
        vmax = max(n for n, _ in s.coeffs)
        pk = prec * s.k
        return s.truncate(int(pk) + (0 if pk == int(pk) else 1) + vmax + s.k)
    return s


def _expand_app(name: str, arg: TruncSeries, prec: Fraction) -> TruncSeries:
    var = arg.var
    if name == "exp":
        return _expand_exp(arg, prec)
    if name in ("sin", "cos"):
        return _expand_sin_cos(name, arg, prec)
    if name == "tan":
        return _expand_sin_cos("sin", arg, prec) / _expand_sin_cos("cos", arg, prec)
    if name == "sec":
        return _expand_sin_cos("cos", arg, prec).inverse()
    if name == "csc":
        return _expand_sin_cos("sin", arg, prec).inverse()
    if name == "sinh":
        em = _expand_exp(arg, prec)
        ep = _expand_exp(-arg, prec)
        return (em - ep).scale(Fraction(1, 2))
    if name == "cosh":
        em = _expand_exp(arg, prec)
        ep = _expand_exp(-arg, prec)
        return (em + ep).scale(Fraction(1, 2))
    if name == "tanh":
        em = _expand_exp(arg, prec)
        ep = _expand_exp(-arg, prec)
        return (em - ep) / (em + ep)
    if name == "log":
        return _log_of(arg, prec)
    if name == "atan":
        v = arg.valuation_grid()
        if v is not None and v < 0:
            lead = arg.coeffs.get((v, 0))
            if lead is None:
                raise UnsupportedExpansion("atan of a log-leading pole")
            sign = _csign(lead)
            half_pi = TruncSeries(var, 1, None, {(0, 0): SymCoef.pi(Fraction(sign, 2))})
            return half_pi - _expand_app("atan", _ensure_order(arg, prec).inverse(), prec)
        _check_analytic_arg("atan", arg)
        a0, u = _split_const(arg)
        if ciszero(a0):
            return _compose_gen(_gen_atan, u, prec)
        q = crational(a0)
        if q == 1:
            # atan(1 + u) = pi/4 + integral; use atan(x) - atan(1) identity:
            # atan(1+u) = pi/4 + atan(u / (2 + u))
            inner = u / (TruncSeries.const(var, 2) + u)
            return TruncSeries(
                var, 1, None, {(0, 0): SymCoef.pi(Fraction(1, 4))}
            ) + _compose_gen(_gen_atan, inner, prec)
        if q == -1:
            inner = u / (TruncSeries.const(var, 2) - u)
            return TruncSeries(
                var, 1, None, {(0, 0): SymCoef.pi(Fraction(-1, 4))}
            ) + _compose_gen(_gen_atan, inner, prec)
        raise UnsupportedExpansion(
            f"atan at constant {a0!r} is outside the coefficient field"
        )
    if name == "atanh":
        _check_analytic_arg("atanh", arg)
        a0, u = _split_const(arg)
        if ciszero(a0):
            return _compose_gen(_gen_atanh, u, prec)
        # atanh(x) = log((1+x)/(1-x)) / 2
        one = TruncSeries.const(var, 1)
        return _log_of((one + arg) / _ensure_order(one - arg, prec), prec).scale(Fraction(1, 2))
    if name == "asinh":
        _check_analytic_arg("asinh", arg)
        a0, u = _split_const(arg)
        if ciszero(a0):
            return _compose_gen(_gen_asinh, u, prec)
        one = TruncSeries.const(var, 1)
        inner = arg + _ensure_order(one + arg * arg, prec).powq(Fraction(1, 2))
        return _log_of(inner, prec)
    if name == "asin":
        _check_analytic_arg("asin", arg)
        a0, u = _split_const(arg)
        if ciszero(a0):
            return _compose_gen(_gen_asin, u, prec)
        q = crational(a0)
        if q in (1, -1):
            sign = 1 if q == 1 else -1
            half_pi = TruncSeries(var, 1, None, {(0, 0): SymCoef.pi(Fraction(sign, 2))})
            return half_pi - _expand_app("acos", arg.scale(Fraction(sign)), prec).scale(
                Fraction(sign)
            )
        raise UnsupportedExpansion(
            f"asin at constant {a0!r} is outside the coefficient field"
        )
    if name == "acos":
        # acos(x) = pi/2 - asin(x), except at x near 1 expand directly:
        # acos(1 - w) = atan(sqrt(1-x^2)/x) for x > 0
        a0, u = _split_const(arg)
        q = crational(a0)
        if q == 1:
            one = TruncSeries.const(var, 1)
            sq = _ensure_order(one - arg * arg, prec).powq(Fraction(1, 2))
            return _expand_app("atan", sq / arg, prec)
        half_pi = TruncSeries(var, 1, None, {(0, 0): SymCoef.pi(Fraction(1, 2))})
        return half_pi - _expand_app("asin", arg, prec)
    if name == "acosh":
        # acosh(x) = log(x + sqrt(x^2 - 1))
        one = TruncSeries.const(var, 1)
        inner = arg + _ensure_order(arg * arg - one, prec).powq(Fraction(1, 2))
        return _log_of(inner, prec)
    if name == "asech":
        # asech(x) = log(1 + sqrt(1 - x^2)) - log(x)
        one = TruncSeries.const(var, 1)
        sq = _ensure_order(one - arg * arg, prec).powq(Fraction(1, 2))
        return _log_of(one + sq, prec) - _log_of(arg, prec)
    raise UnsupportedExpansion(f"no expansion rule for {name}")


# ---------------------------------------------------------------------------
# recursive expansion


def _expand(e: Expr, var: str, prec: Fraction) -> TruncSeries:
    if isinstance(e, Rat):
        return TruncSeries.const(var, e.value)
    if isinstance(e, Const):
        return TruncSeries(var, 1, None, {(0, 0): SymCoef.pi(1)})
    if isinstance(e, Var):
        if e.name != var:
            raise UnsupportedExpansion(
                f"free variable {e.name!r} in a series in {var!r}"
            )
        return TruncSeries.x(var)
    if isinstance(e, Add):
        acc = TruncSeries.zero(var)
        for t in e.terms:
            acc = acc + _expand(t, var, prec)
        return acc
    if isinstance(e, Mul):
        parts = [_expand(f, var, prec) for f in e.factors]
        vals = []
        for p in parts:
            v = p.valuation()
            if v is None and p.order is None:
                return TruncSeries.zero(var)  # exact zero factor
            vals.append(v if v is not None else p.bound())
        total = sum(vals)
        for i, p in enumerate(parts):
            need = prec - (total - vals[i])
            if p.order is not None and p.bound() < need:
                parts[i] = _expand(e.factors[i], var, need)
        acc = parts[0]
        for p in parts[1:]:
            acc = acc * p
        return acc
    if isinstance(e, Pow):
        r = e.exponent
        base = _expand(e.base, var, prec)
        v = base.valuation()
        if v is None and base.order is None:
            if r > 0:
                return TruncSeries.zero(var)
            raise ZeroDivisionError("power of the zero series")
        if v is None:
            v = base.bound()
        # need base to prec_b with prec_b + (r-1)*v >= prec
        need = prec - (r - 1) * v
        if base.order is not None and base.bound() < need:
            base = _expand(e.base, var, need)
        if base.order is None and (r.denominator != 1 or r < 0) and len(base.coeffs) > 1:
            bound = max(prec - r * v + v, v + 1, Fraction(1))
            bk = bound * base.k
            base = base.truncate(int(bk) + (0 if bk == int(bk) else 1))
        return base.powq(r)
    if isinstance(e, App):
        u = _expand(e.arg, var, prec)
        if u.order is None and len(u.coeffs) > 1:
            # give exact polynomial arguments a truncation horizon so the
            # inner formulas (inverse, sqrt, log) have something to work with
            vmax = max(n for n, _ in u.coeffs)
            pk = prec * u.k
            horizon = int(pk) + (0 if pk == int(pk) else 1) + vmax + u.k
            u = u.truncate(horizon)
        return _expand_app(e.func, u, prec)
    raise TypeError(f"cannot expand {type(e).__name__}")


def expand_truncated(e: Expr, var: str, nterms) -> TruncSeries:
    """Expand e at the origin to exponent bound nterms (exclusive).

    The result's ``bound()`` is at least nterms unless the series is exact.
    Raises UnsupportedExpansion when coefficients leave the supported field.
    """
    if isinstance(e, str):
        e = parse(e)
    target = Fraction(nterms)
    prec = target
    for _ in range(6):
        s = _expand(e, var, prec)
        b = s.bound()
        if b is None or b >= target:
            if b is not None:
                tk = target * s.k
                s = s.truncate(int(tk) + (0 if tk == int(tk) else 1))
            return s.reduce_grid()
        prec = prec + (target - b) + 2
    raise UnsupportedExpansion(
        f"could not reach truncation order {target} for {to_text(e)}"
    )


def maclaurin(e: Expr, var: str, n: int) -> list:
    """First n Taylor coefficients at 0; error on poles, logs, or fractions.

    Coefficients are Fractions unless pi or prime logs enter, in which case
    the corresponding entries are SymCoef.
    """
    if isinstance(e, str):
        e = parse(e)
    s = expand_truncated(e, var, n)
    if s.has_logs():
        raise UnsupportedExpansion(f"{to_text(e)} has logarithmic terms at 0")
    v = s.valuation()
    if v is not None and v < 0:
        raise UnsupportedExpansion(f"{to_text(e)} has a pole at the origin")
    out = [Fraction(0)] * n
    for ex, _, c in s.terms():
        if ex >= n:
            continue
        if ex.denominator != 1:
            raise UnsupportedExpansion(f"{to_text(e)} has fractional exponents at 0")
        out[int(ex)] = c
    return out


def series_equal(e1: Expr, e2: Expr, var: str, nterms) -> bool:
    """True when the two expansions agree below the exponent bound nterms."""
    d = expand_truncated(radd([e1, rmul([Rat(-1), e2])]), var, nterms)
    return d.is_zero_series()
