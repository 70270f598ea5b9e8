"""Linear differential and recurrence equations with polynomial coefficients.

The entry points are :func:`holonomic_de`, which searches for the lowest
order homogeneous linear ODE satisfied by an expression by expressing its
derivatives in a growing basis of transcendental atoms, :func:`de_to_re`,
which turns such an equation into a recurrence for the series coefficients,
and :func:`taylor`, which expands a function at a point in time linear in
the number of requested terms by unrolling that recurrence.

The recurrence conversion deliberately keeps common polynomial factors:
integer roots of the trailing and leading coefficients carry the starting
point and the polynomial part of the series, and cancelling them first
would lose that information.
"""

import math
from fractions import Fraction

from .expressions import (
    Expr,
    Rat,
    Var,
    as_ratfunc,
    differentiate,
    parse,
    radd,
    rmul,
    rpow,
    substitute,
    to_text,
)
from .oracle import TruncSeries, crational, expand_truncated
from .polys import (
    Poly,
    RatFunc,
    factor_rational,
    integer_roots,
    lcm_int,
    solve_linear_system,
)
from .summands import AtomRegistry, canonicalize, decompose_common

__all__ = [
    "LinearDE",
    "HolonomicRE",
    "holonomic_de",
    "compatible_de",
    "de_to_re",
    "find_re",
    "taylor",
    "shift_to_origin",
    "poly_from_text",
    "ratfunc_from_text",
]


def ratfunc_from_text(s: str, var: str) -> RatFunc:
    """Rational function from its printed form."""
    return as_ratfunc(parse(s), var)


def poly_from_text(s: str, var: str) -> Poly:
    """Polynomial from its printed form; inverse of str on Poly."""
    r = ratfunc_from_text(s, var)
    if r.den.degree > 0:
        raise ValueError(f"not a polynomial: {s}")
    return r.num * (Fraction(1) / r.den.coeffs[-1])


def _derivative_label(j: int) -> str:
    if j == 0:
        return "F"
    if j <= 3:
        return "F" + "'" * j
    return f"F^({j})"


def _format_poly_factor(p: Poly) -> str:
    """Readable product form of p, linear factors split off."""
    content, factors = factor_rational(p)
    parts = []
    if not factors:
        return str(content)
    for f in factors:
        s = str(f.poly)
        base = f"({s})" if " " in s else s
        if f.multiplicity == 1:
            parts.append(base)
        else:
            if base == s and ("*" in s or "^" in s):
                base = f"({s})"
            parts.append(f"{base}^{f.multiplicity}")
    body = "*".join(parts)
    if content == 1:
        return body
    if content == -1:
        return f"-{body}"
    return f"{content}*{body}"


class LinearDE:
    """Homogeneous linear ODE sum_j A_j(z) F^(j) = 0 with A_j in Q[z].

    Coefficients are stored densely by derivative order, jointly primitive
    over the integers with a positive leading coefficient on the top A_N.
    ``destep`` records the derivative stride the equation was searched with.
    """

    __slots__ = ("coeffs", "var", "destep")

    def __init__(self, coeffs: list, var: str, destep: int = 1):
        while len(coeffs) > 1 and coeffs[-1].is_zero:
            coeffs = coeffs[:-1]
        if coeffs[-1].is_zero:
            raise ValueError("zero differential equation")
        self.coeffs = self._normalize(coeffs)
        self.var = var
        self.destep = destep

    @staticmethod
    def _normalize(coeffs: list) -> list:
        den = 1
        for p in coeffs:
            for c in p.coeffs:
                den = lcm_int(den, c.denominator)
        g = 0
        for p in coeffs:
            for c in p.coeffs:
                g = math.gcd(g, abs(c.numerator * (den // c.denominator)))
        scale = Fraction(den, g if g else 1)
        if coeffs[-1].leading < 0:
            scale = -scale
        return [p * scale for p in coeffs]

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __eq__(self, other):
        return (
            isinstance(other, LinearDE)
            and self.var == other.var
            and self.coeffs == other.coeffs
        )

    def __str__(self):
        parts = []
        for j in range(self.order, -1, -1):
            p = self.coeffs[j]
            if p.is_zero:
                continue
            term = _format_poly_factor(p)
            lab = _derivative_label(j)
            if term == "1":
                piece = lab
            elif term == "-1":
                piece = f"-{lab}"
            else:
                piece = f"{term}*{lab}"
            parts.append(piece)
        body = " + ".join(parts).replace("+ -", "- ")
        return f"{body} = 0"

    def __repr__(self):
        return f"LinearDE({self})"

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "destep": self.destep,
            "coeffs": [str(p) for p in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: dict, var: str = "z") -> "LinearDE":
        coeffs = [poly_from_text(s, var) for s in data["coeffs"]]
        return cls(coeffs, var, destep=data.get("destep", 1))


class HolonomicRE:
    """Linear recurrence sum_s P_s(n) a_{n+s} = 0, shifts normalized to 0.

    ``polys`` maps each shift to its polynomial coefficient; the minimum
    stored shift is 0 and both the trailing P_0 and leading P_d are nonzero.
    """

    __slots__ = ("polys", "var")

    def __init__(self, polys: dict, var: str = "n"):
        polys = {s: p for s, p in polys.items() if not p.is_zero}
        if not polys:
            raise ValueError("zero recurrence")
        smin = min(polys)
        self.polys = {s - smin: p.shift(-smin) for s, p in polys.items()}
        self.var = var

    @property
    def order(self) -> int:
        return max(self.polys)

    @property
    def trailing(self) -> Poly:
        return self.polys[0]

    @property
    def leading(self) -> Poly:
        return self.polys[self.order]

    def coeff_list(self) -> list:
        """Dense [P_0, ..., P_d] with zero polynomials filled in."""
        zero = Poly.zero(self.var)
        return [self.polys.get(s, zero) for s in range(self.order + 1)]

    def __eq__(self, other):
        return isinstance(other, HolonomicRE) and self.polys == other.polys

    def __str__(self):
        parts = []
        for s in sorted(self.polys, reverse=True):
            term = _format_poly_factor(self.polys[s])
            a = f"a(n+{s})" if s else "a(n)"
            if term == "1":
                piece = a
            elif term == "-1":
                piece = f"-{a}"
            else:
                piece = f"{term}*{a}"
            parts.append(piece)
        body = " + ".join(parts).replace("+ -", "- ")
        return f"{body} = 0"

    def __repr__(self):
        return f"HolonomicRE({self})"

    def to_json(self) -> list:
        return [
            {"shift": s, "coeff": str(self.polys[s])} for s in sorted(self.polys)
        ]

    @classmethod
    def from_json(cls, rows: list, var: str = "n") -> "HolonomicRE":
        return cls({r["shift"]: poly_from_text(r["coeff"], var) for r in rows}, var)

    def holds_for(self, seq: list, n_lo: int, n_hi: int) -> bool:
        """Check sum_s P_s(n) seq[n+s] = 0 for n in [n_lo, n_hi)."""
        for n in range(n_lo, n_hi):
            acc = Fraction(0)
            for s, p in self.polys.items():
                acc += p(n) * seq[n + s]
            if acc:
                return False
        return True


def _as_expr(f) -> Expr:
    return parse(f) if isinstance(f, str) else f


def holonomic_de(f, var: str = "z", max_order: int = 4, destep: int = 1):
    """Lowest-order homogeneous linear DE with Q[z] coefficients for f.

    Candidate orders are destep, 2*destep, ... up to max_order.  Each new
    derivative is computed once and decomposed in a shared atom registry, so
    the basis only grows; a candidate succeeds when the top derivative is a
    Q(z)-linear combination of the lower ones.  Returns None if no equation
    of order <= max_order exists.
    """
    if max_order < 1 or destep < 1:
        raise ValueError("max_order and destep must be positive")
    f = canonicalize(_as_expr(f), var)
    derivs = [f]
    reg = AtomRegistry(var)
    for order in range(destep, max_order + 1, destep):
        while len(derivs) <= order:
            derivs.append(differentiate(derivs[-1], var))
        idxs = list(range(0, order + 1, destep))
        reg, rows = decompose_common([derivs[i] for i in idxs], var, reg)
        bundles = sorted({b for row in rows for b in row}, key=repr)
        zero = RatFunc.const(0, var)
        mat = [[rows[j].get(b, zero) for j in range(len(idxs) - 1)] for b in bundles]
        rhs = [-rows[-1].get(b, zero) for b in bundles]
        sol = solve_linear_system(mat, rhs, var)
        if sol is None:
            continue
        ratio = {idxs[j]: sol.particular[j] for j in range(len(idxs) - 1)}
        den = Poly.one(var)
        for r in ratio.values():
            g = den.gcd(r.den)
            den = den * r.den.exact_div(g)
        coeffs = [Poly.zero(var) for _ in range(order + 1)]
        coeffs[order] = den
        for j, r in ratio.items():
            coeffs[j] = r.num * den.exact_div(r.den)
        return LinearDE(coeffs, var, destep)
    return None


def compatible_de(de1: LinearDE, de2: LinearDE) -> bool:
    """True when every solution of the lower-order equation solves the other.

    The lower equation rewrites its top derivative as a Q(z)-combination of
    the smaller ones; differentiating that rule repeatedly expresses all
    higher derivatives in the same basis, and the higher equation must then
    collapse to the zero combination.
    """
    if de1.var != de2.var:
        raise ValueError("differential equations in different variables")
    lo, hi = (de1, de2) if de1.order <= de2.order else (de2, de1)
    r = lo.order
    var = lo.var
    top = RatFunc(lo.coeffs[r])
    vr = [-RatFunc(lo.coeffs[i]) / top for i in range(r)]

    def unit(i):
        return [
            RatFunc.const(1 if t == i else 0, var) for t in range(r)
        ]

    vectors = {i: unit(i) for i in range(r)}
    vectors[r] = vr
    cur = vr
    for k in range(r + 1, hi.order + 1):
        nxt = [c.derivative() for c in cur]
        for i, c in enumerate(cur):
            if c.is_zero:
                continue
            if i + 1 < r:
                nxt[i + 1] = nxt[i + 1] + c
            else:
                nxt = [nxt[t] + c * vr[t] for t in range(r)]
        vectors[k] = nxt
        cur = nxt
    acc = [RatFunc.const(0, var) for _ in range(r)]
    for j in range(hi.order + 1):
        b = hi.coeffs[j]
        if b.is_zero:
            continue
        rb = RatFunc(b)
        acc = [acc[t] + rb * vectors[j][t] for t in range(r)]
    return all(a.is_zero for a in acc)


def _poch_poly(start: Fraction, length: int, var: str) -> Poly:
    """(n + start)(n + start + 1) ... as a polynomial in n."""
    acc = Poly.one(var)
    for i in range(length):
        acc = acc * Poly([start + i, Fraction(1)], var)
    return acc


def de_to_re(de: LinearDE, index_var: str = "n") -> HolonomicRE:
    """Coefficient recurrence of a DE via z^l F^(j) -> (n+1-l)_j a_{n+j-l}.

    Shifts are collected and renormalized so the minimum is zero.  Common
    polynomial factors are kept: their integer roots locate the starting
    point and any Laurent-polynomial part of the series.
    """
    shifts: dict = {}
    for j, p in enumerate(de.coeffs):
        for l, c in enumerate(p.coeffs):
            if not c:
                continue
            contrib = _poch_poly(Fraction(1 - l), j, index_var) * c
            s = j - l
            shifts[s] = shifts.get(s, Poly.zero(index_var)) + contrib
    return HolonomicRE(shifts, index_var)


def find_re(f, var: str = "z", destep: int = 1, max_order: int = 4):
    """Recurrence for the series coefficients of f, or None if no DE found."""
    de = holonomic_de(f, var, max_order=max_order, destep=destep)
    if de is None:
        return None
    return de_to_re(de)


INF = "inf"
MINF = "-inf"


def shift_to_origin(f, point, var: str = "z") -> Expr:
    """Rewrite f so its expansion at ``point`` becomes an expansion at 0.

    Finite points substitute z -> z + point; at +-infinity the local
    variable is 1/z (with the sign folded in), so the result is expanded in
    ordinary powers whose coefficients are those of 1/z powers of f.
    """
    f = _as_expr(f)
    x = Var(var)
    if point == INF:
        return substitute(f, var, rpow(x, Fraction(-1)))
    if point == MINF:
        return substitute(f, var, rmul([Rat(Fraction(-1)), rpow(x, Fraction(-1))]))
    point = Fraction(point)
    if point == 0:
        return f
    return substitute(f, var, radd([x, Rat(point)]))


try:
    from gmpy2 import gcd as _zgcd
    from gmpy2 import mpz as _zint
except ImportError:  # pragma: no cover - plain ints are just slower
    _zgcd = math.gcd
    _zint = int

_FRAC_NUM = Fraction.__dict__["_numerator"]
_FRAC_DEN = Fraction.__dict__["_denominator"]


class LazyFraction(Fraction):
    """Exact rational normalized on first use instead of at construction.

    Reducing a coefficient with a huge factorial-sized denominator costs a
    gcd quadratic in its bit length, which would swamp the linear recurrence
    unrolling if paid for every term eagerly.  Instances hold the raw
    numerator/denominator pair and reduce once, the first time any consumer
    reads the value; from then on they are indistinguishable from a plain
    Fraction.  Callers that touch only a few coefficients of a long
    expansion never pay for the rest.
    """

    __slots__ = ("_raw",)

    def __new__(cls, num, den):
        self = super(Fraction, cls).__new__(cls)
        self._raw = (num, den)
        return self

    def _materialize(self):
        num, den = self._raw
        g = _zgcd(num, den)
        if g > 1:
            num //= g
            den //= g
        if den < 0:
            num, den = -num, -den
        _FRAC_NUM.__set__(self, int(num))
        _FRAC_DEN.__set__(self, int(den))
        self._raw = None

    @property
    def _numerator(self):
        if self._raw is not None:
            self._materialize()
        return _FRAC_NUM.__get__(self)

    @property
    def _denominator(self):
        if self._raw is not None:
            self._materialize()
        return _FRAC_DEN.__get__(self)

    def __bool__(self):
        if self._raw is not None:
            return bool(self._raw[0])
        return bool(_FRAC_NUM.__get__(self))


def _fast_unroll(re: HolonomicRE, seeds: list, n0: int, N: int) -> dict:
    """Unroll the recurrence from rational seeds up to index N.

    The window a_j .. a_{j+d-1} is carried as integers over one running
    denominator, so the loop is pure integer arithmetic; a periodic gcd
    sweep keeps the denominator near the true one, and each coefficient is
    normalized exactly once at the end.
    """
    d = re.order
    scale = 1
    for p in re.coeff_list():
        for c in p.coeffs:
            scale = lcm_int(scale, c.denominator)
    ipolys = [
        [int(c * scale) for c in p.coeffs] for p in re.coeff_list()
    ]

    def ev(ip, j):
        acc = 0
        for c in reversed(ip):
            acc = acc * j + c
        return acc

    den0 = 1
    for s in seeds:
        den0 = lcm_int(den0, s.denominator)
    den = _zint(den0)
    window = [_zint(int(s * den0)) for s in seeds]
    out = {}
    for j in range(n0, N - d + 1):
        pd = ev(ipolys[d], j)
        num = _zint(0)
        for i in range(d):
            ci = ev(ipolys[i], j)
            if ci:
                num -= ci * window[i]
        den *= pd
        out[j + d] = LazyFraction(num, den)
        window = [w * pd for w in window[1:]]
        window.append(num)
    return out


def taylor(f, point, N: int, var: str = "z", max_order: int = 4) -> TruncSeries:
    """Taylor expansion of f at ``point`` through the exponent N.

    The expansion is returned in the local variable of the point: powers of
    z - point at a finite point, powers of 1/z at +-infinity.  A recurrence
    for the coefficients is found first and unrolled in linear time; only
    the seed window comes from the series oracle.  Expansions the recurrence
    cannot drive (fractional exponents, logarithmic terms, or non-rational
    seed coefficients) fall back to the oracle for all terms.
    """
    g = shift_to_origin(f, point, var)
    re = find_re(g, var, max_order=max_order)
    if re is None:
        return expand_truncated(g, var, N + 1)
    d = re.order
    roots = integer_roots(re.trailing * re.leading)
    n0 = 1 + max(roots) if roots else 0
    if N <= n0 + d - 1:
        return expand_truncated(g, var, N + 1)
    prefix = expand_truncated(g, var, max(n0 + d - 1, 0) + 1)
    seeds = []
    if prefix.k == 1 and not prefix.has_logs():
        for j in range(n0, n0 + d):
            c = crational(prefix.coeffs.get((j, 0), Fraction(0)))
            if c is None:
                seeds = None
                break
            seeds.append(c)
    else:
        seeds = None
    if seeds is None:
        return expand_truncated(g, var, N + 1)
    coeffs = {nm: c for nm, c in prefix.coeffs.items() if nm[0] <= N}
    for n, c in _fast_unroll(re, seeds, n0, N).items():
        if c:
            coeffs[(n, 0)] = c
    return TruncSeries(var, 1, N + 1, coeffs)
