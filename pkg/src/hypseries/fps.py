"""Power series representations of hypergeometric type functions.

The assembly pipeline: a holonomic recurrence for the Taylor coefficients,
its Puiseux number, a Laurent-log polynomial head with the starting point
of the series remainder, and the span of m-fold hypergeometric term
solutions glued together by solving one linear system against exact Taylor
data.  Two-term recurrences take a direct route that keeps single-family
outputs in their familiar shape; everything else goes through the general
linear-combination solver.  Every representation is re-expanded and checked
against the series oracle before it is returned.
"""

import math
from fractions import Fraction

from .expressions import (
    Add,
    App,
    Expr,
    Mul,
    Pow,
    Var,
    parse,
    rpow,
    substitute,
    to_text,
)
from .holonomic import INF, MINF, HolonomicRE, find_re, shift_to_origin
from .mfold import HyperTerm, mfold_hyper
from .oracle import (
    TruncSeries,
    UnsupportedExpansion,
    cadd,
    ciszero,
    cneg,
    coef_to_expr,
    crational,
    expand_truncated,
)
from .polys import RatFunc, integer_roots, rational_roots, solve_linear_system

__all__ = [
    "FallbackMarker",
    "LaurentPart",
    "NoSeriesCombination",
    "SeriesComponent",
    "SeriesRep",
    "fps",
    "laurent_part",
    "puiseux_number",
    "two_term_fps",
]


class NoSeriesCombination(ValueError):
    """The coefficients do not form the linear combination searched for."""


class FallbackMarker:
    """Returned when no hypergeometric type representation was found.

    Carries the reasons each attempted route gave up, so the caller can
    report them or hand the expression to the quadratic pipeline.
    """

    __slots__ = ("reason",)

    def __init__(self, reason: str):
        self.reason = reason

    def __repr__(self):
        return f"<no hypergeometric type series: {self.reason}>"


def _as_expr(f) -> Expr:
    return parse(f) if isinstance(f, str) else f


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _frac(x) -> Fraction:
    """Constant entry of a linear-solver result as a Fraction."""
    if isinstance(x, RatFunc):
        return x.num.coeff(0) / x.den.coeff(0)
    return Fraction(x)


# ---------------------------------------------------------------------------
# Puiseux number


def puiseux_number(re: HolonomicRE) -> int:
    """lcm of the denominators of rational roots of trailing and leading.

    The ratios of m-fold hypergeometric solutions are built from factors of
    these two coefficients, so any fractional exponent lattice z^(n/k) shows
    up as root denominators; 1 means plain integer exponents suffice.
    """
    k = 1
    for p in (re.trailing, re.leading):
        for r in rational_roots(p):
            k = math.lcm(k, r.denominator)
    return k


def _mentions(e: Expr, var: str) -> bool:
    if isinstance(e, Var):
        return e.name == var
    if isinstance(e, Add):
        return any(_mentions(t, var) for t in e.terms)
    if isinstance(e, Mul):
        return any(_mentions(f, var) for f in e.factors)
    if isinstance(e, Pow):
        return _mentions(e.base, var)
    if isinstance(e, App):
        return _mentions(e.arg, var)
    return False


def _exponent_lattice(e: Expr, var: str) -> int:
    """lcm of fractional-exponent denominators applied to the variable."""
    if isinstance(e, Pow):
        k = _exponent_lattice(e.base, var)
        if e.exponent.denominator > 1 and _mentions(e.base, var):
            k = math.lcm(k, e.exponent.denominator)
        return k
    if isinstance(e, Add):
        k = 1
        for t in e.terms:
            k = math.lcm(k, _exponent_lattice(t, var))
        return k
    if isinstance(e, Mul):
        k = 1
        for f in e.factors:
            k = math.lcm(k, _exponent_lattice(f, var))
        return k
    if isinstance(e, App):
        return _exponent_lattice(e.arg, var)
    return 1


# ---------------------------------------------------------------------------
# Laurent-log polynomial part


class LaurentPart:
    """Polynomial head T and the starting point N0 of the series remainder.

    T collects every term of exponent below N0, including log(z) powers and
    symbolic constants; the hypergeometric type series carries the rest.
    """

    __slots__ = ("part", "n0")

    def __init__(self, part: TruncSeries, n0: int):
        self.part = part
        self.n0 = n0

    def __iter__(self):
        return iter((self.part, self.n0))

    def __str__(self):
        return f"[{_series_text(self.part, self.part.var)}, {self.n0}]"

    def __repr__(self):
        return f"LaurentPart({self})"

    def to_json(self) -> dict:
        return {"part": _series_text(self.part, self.part.var), "n0": self.n0}


def laurent_part(f, re: HolonomicRE, var: str = "z") -> LaurentPart:
    """Split f into a finite head and a starting point, from the recurrence.

    The coefficients of a Laurent polynomial of degree N satisfy the
    recurrence only if N is a root of the trailing coefficient, so the
    largest integer root bounds the head; everything past it belongs to the
    series part.  Without such a root the head is empty and the minimum
    integer root of P_d(n-d) gives the first possibly nonzero index.
    """
    f = _as_expr(f)
    troots = integer_roots(re.trailing)
    if troots:
        n = max(troots)
        s = expand_truncated(f, var, n + 1)
        kept = {(g, m): c for (g, m), c in s.coeffs.items() if g <= n * s.k}
        return LaurentPart(TruncSeries(var, s.k, None, kept), n + 1)
    lroots = integer_roots(re.leading)
    if not lroots:
        raise ValueError("recurrence gives no starting point")
    return LaurentPart(TruncSeries.zero(var), min(lroots) + re.order)


# ---------------------------------------------------------------------------
# series representation


class SeriesComponent:
    """One summand sum(c(n) * z^((m*(n+start)+j)/k), n, 0, inf).

    ``term`` is a start-0 hypergeometric term for the shifted index, and
    ``scale`` multiplies the closed form exactly as printed, so the text
    denotes the true coefficients: c(n) = scale * rendered(n), where
    rendered(n) = term.rendered_scale() * term.formula_value(n).
    """

    __slots__ = ("m", "j", "k", "start", "term", "scale", "_c")

    def __init__(self, m: int, j: int, k: int, start: int, term: HyperTerm,
                 scale: Fraction):
        self.m = m
        self.j = j
        self.k = k
        self.start = start
        self.term = term
        self.scale = scale
        self._c = scale * term.rendered_scale() * term.formula_value(0)

    def coeff(self, n: int) -> Fraction:
        """Exact coefficient of the n-th displayed term (n >= 0)."""
        return self._c * self.term.value(n)

    def exponent(self, n: int) -> Fraction:
        return Fraction(self.m * (n + self.start) + self.j, self.k)

    def sort_key(self):
        return (self.k, self.m, self.j, self.start, str(self.term.ratio))

    def _zpow(self, zname: str) -> str:
        m, off, k = self.m, self.m * self.start + self.j, self.k
        g = math.gcd(math.gcd(m, abs(off)), k)
        m, off, k = m // g, off // g, k // g
        body = "n" if m == 1 else f"{m}*n"
        if off > 0:
            body += f"+{off}"
        elif off < 0:
            body += str(off)
        if k > 1:
            return f"{zname}^(({body})/{k})"
        if body == "n":
            return f"{zname}^n"
        return f"{zname}^({body})"

    def text(self, zname: str = "z") -> str:
        num, den = self.term._sides()
        a = abs(self.scale)
        if a.numerator != 1:
            num.insert(0, str(a.numerator))
        if a.denominator != 1:
            den.insert(0, str(a.denominator))
        num.append(self._zpow(zname))
        top = "*".join(num)
        if den:
            bottom = "*".join(den)
            if len(den) > 1:
                bottom = f"({bottom})"
            top = f"{top}/{bottom}"
        sign = "-" if self.scale < 0 else ""
        return f"{sign}sum({top}, n, 0, inf)"

    def __repr__(self):
        return self.text("z")

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "j": self.j,
            "k": self.k,
            "start": self.start,
            "scale": str(self.scale),
            "term": self.term.to_json(),
        }


def _series_text(ts: TruncSeries, zname: str) -> str:
    """Finite Laurent-log polynomial as a plain product-of-powers string."""
    if ts.is_zero_series():
        return "0"
    parts = []
    for e, mlog, c in ts.terms():
        factors = []
        ctext = to_text(coef_to_expr(c))
        lead = ""
        if ctext.startswith("-") and ("+" not in ctext and "-" not in ctext[1:]):
            lead = "-"
            ctext = ctext[1:]
        if "+" in ctext or "-" in ctext[1:]:
            ctext = f"({ctext})"
        den = ""
        if (e != 0 or mlog) and "/" in ctext and ctext.replace("/", "").isdigit():
            ctext, den = ctext.split("/")
        if ctext != "1" or (e == 0 and not mlog):
            factors.append(ctext)
        if e != 0:
            if e == 1:
                factors.append(zname)
            elif e.denominator == 1 and e > 0:
                factors.append(f"{zname}^{e}")
            else:
                factors.append(f"{zname}^({e})")
        if mlog:
            factors.append(f"log({zname})" if mlog == 1 else f"log({zname})^{mlog}")
        body = "*".join(factors)
        parts.append(lead + (f"{body}/{den}" if den else body))
    return " + ".join(parts).replace("+ -", "- ")


def _zname(var: str, point) -> str:
    if point == INF:
        return f"(1/{var})"
    if point == MINF:
        return f"(-1/{var})"
    p = Fraction(point)
    if p == 0:
        return var
    return f"({var}-{p})" if p > 0 else f"({var}+{-p})"


class SeriesRep:
    """Hypergeometric type series: polynomial head plus closed-form sums.

    ``part`` is the finite Laurent-log head, ``components`` the infinite
    sums; exponents live on the 1/k Puiseux grid and count powers of the
    local variable at ``point``.
    """

    __slots__ = ("var", "point", "k", "part", "components", "route")

    def __init__(self, var: str, point, k: int, part: TruncSeries,
                 components: list, route: str = "combination"):
        self.var = var
        self.point = point
        self.k = k
        self.part = part
        self.components = sorted(components, key=SeriesComponent.sort_key)
        self.route = route

    def truncated(self, nterms) -> TruncSeries:
        """Exact expansion of the representation below exponent nterms."""
        kk = math.lcm(self.k, self.part.k)
        order = int(Fraction(nterms) * kk)
        coeffs = {}
        for key, c in self.part.lift(kk).coeffs.items():
            coeffs[key] = c
        f = kk // self.k
        for comp in self.components:
            n = 0
            while True:
                g = (comp.m * (n + comp.start) + comp.j) * f
                if g >= order:
                    break
                key = (g, 0)
                coeffs[key] = cadd(coeffs.get(key, Fraction(0)), comp.coeff(n))
                n += 1
        return TruncSeries(self.var, kk, order, coeffs)

    def text(self) -> str:
        zn = _zname(self.var, self.point)
        parts = [c.text(zn) for c in self.components]
        if not self.part.is_zero_series():
            parts.append(_series_text(self.part, zn))
        if not parts:
            return "0"
        return " + ".join(parts).replace("+ -", "- ")

    def __str__(self):
        return self.text()

    def __repr__(self):
        return f"SeriesRep({self.text()})"

    def to_json(self) -> dict:
        return {
            "var": self.var,
            "point": str(self.point),
            "puiseux": self.k,
            "polyPart": _series_text(self.part, _zname(self.var, self.point)),
            "components": [c.to_json() for c in self.components],
            "route": self.route,
        }


# ---------------------------------------------------------------------------
# building components


def _display_component(m: int, j: int, k: int, start: int, ratio: RatFunc,
                       value0: Fraction) -> SeriesComponent:
    """Component with coefficient value0 at n = 0 continued by the ratio.

    The ratio must already be indexed like the displayed sum (its argument
    is the n that runs from 0), so it may not have poles or zeros there.
    """
    term = HyperTerm(ratio)
    if term.start > 0:
        raise NoSeriesCombination(
            f"display ratio has nonnegative integer poles ({ratio})"
        )
    scale = value0 / (term.rendered_scale() * term.formula_value(0))
    return SeriesComponent(m, j, k, start, term, scale)


# ---------------------------------------------------------------------------
# two-term recurrences (Algorithm with symmetric ratios)


def two_term_fps(f, re: HolonomicRE, var: str = "z") -> SeriesRep:
    """Representation from a two-term recurrence Q(n) a_{n+m} - P(n) a_n = 0.

    The gap m is the symmetry number; each residue class j carries the
    product closed form of r(m n + j) with r(n) = P(n+N0)/Q(n+N0), and the
    m unknown prefactors are read off from one Taylor strip of width m.
    """
    f = _as_expr(f)
    shifts = sorted(re.polys)
    if len(shifts) != 2:
        raise ValueError("recurrence is not two-term")
    m = shifts[1]
    part, n0 = laurent_part(f, re, var)
    p = -re.polys[0]
    q = re.polys[m]
    s = expand_truncated(f, var, n0 + m)
    comps = []
    for j in range(m):
        alpha = crational(s.coeff(n0 + j))
        if alpha is None:
            raise NoSeriesCombination(
                f"coefficient of {var}^{n0 + j} is not rational"
            )
        if alpha == 0:
            continue
        # ratio of successive coefficients within the class, indexed from 0
        ratio = RatFunc(p.compose_affine(m, j + n0), q.compose_affine(m, j + n0))
        jr = (j + n0) % m
        comps.append(_display_component(m, jr, 1, (j + n0 - jr) // m, ratio, alpha))
    rep = SeriesRep(var, 0, 1, part, comps, route="two-term")
    horizon = max(30, n0 + m + 10)
    if not (rep.truncated(horizon) - expand_truncated(f, var, horizon)).is_zero_series():
        raise NoSeriesCombination("two-term ansatz does not reproduce f")
    return rep


# ---------------------------------------------------------------------------
# general linear combinations


def _combination(f: Expr, re: HolonomicRE, var: str):
    """Algorithm: fit alpha weights for all m-fold families against Taylor data.

    Returns a SeriesRep, or a string reason when the recurrence's solution
    span cannot reproduce f.
    """
    part, n0 = laurent_part(f, re, var)
    basis = mfold_hyper(re)
    n1 = max(0, n0)
    if not basis.entries:
        # a bare Laurent polynomial is exact once the head covers it
        s = expand_truncated(f, var, n1 + 5)
        if s.k == 1 and all(g < n1 for g, _ in s.coeffs):
            rep = SeriesRep(var, 0, 1, part, [])
            if (rep.truncated(n1 + 5) - s).is_zero_series():
                return rep
        return "no m-fold hypergeometric solutions"

    # families: (m, j, term, first ansatz index)
    families = []
    for m, terms in basis.entries:
        for j in range(m):
            tj = terms if j == 0 else mfold_hyper(re, m=m, j=j).terms_for(m)
            for t in tj:
                i0 = max(_ceil_div(n1 - j, m), t.start)
                families.append((m, j, t, i0))
    families.sort(key=lambda fam: (fam[0], fam[1]))

    count = sum(len(terms) for _, terms in basis.entries)
    folds = [m for m, _ in basis.entries]
    span = n1 + (count - 1) * math.lcm(*folds) + max(folds) - 1
    span += max((m * i0 + j - n1 for m, j, _, i0 in families), default=0)
    horizon = max(span + 1, 31)

    s = expand_truncated(f, var, horizon)
    if s.k != 1:
        return "fractional exponents remain after substitution"
    rhs = []
    rows = []
    for e in range(n1, span + 1):
        c = crational(s.coeffs.get((e, 0), Fraction(0)))
        if c is None:
            return f"coefficient of {var}^{e} is not rational"
        row = []
        for m, j, t, i0 in families:
            n = (e - j) // m
            if e % m == j and n >= i0:
                row.append(t.value(n))
            else:
                row.append(Fraction(0))
        rows.append(row)
        rhs.append(c)
    if any(mlog and g >= n1 for g, mlog in s.coeffs):
        return "logarithmic terms beyond the polynomial part"
    sol = solve_linear_system(rows, rhs)
    if sol is None:
        return "no linear combination of the solution span matches"
    alphas = [_frac(x) for x in sol.particular]

    head = {key: c for key, c in part.coeffs.items()}
    if n0 < n1:
        # the head was clamped at 0; the strip below it lives in s
        for (g, mlog), c in s.coeffs.items():
            if g < n1 and (g, mlog) not in head:
                head[(g, mlog)] = c
    comps = []
    for alpha, (m, j, t, i0) in zip(alphas, families):
        if alpha == 0:
            continue
        floor = max(t.start, _ceil_div(min(n0, 0) - j, m))
        for n in range(floor, i0):
            # fold the early values back out of the head
            key = (m * n + j, 0)
            head[key] = cadd(head.get(key, Fraction(0)), cneg(alpha * t.value(n)))
        comps.append(
            _display_component(m, j, 1, floor, t.ratio.shift(floor),
                               alpha * t.value(floor))
        )
    rep = SeriesRep(var, 0, 1, TruncSeries(var, 1, None, head), comps)
    if not (rep.truncated(horizon) - s).is_zero_series():
        return "solved combination fails re-expansion"
    return rep


# ---------------------------------------------------------------------------
# the full pipeline


def _assemble(g: Expr, var: str, max_order: int):
    """Try destep 1 then 2; two-term route first, then the general solver."""
    reasons = []
    for destep in (1, 2):
        re = find_re(g, var, destep=destep, max_order=max_order)
        if re is None:
            reasons.append(f"destep {destep}: no recurrence found")
            continue
        try:
            if len(re.polys) == 2:
                try:
                    return two_term_fps(g, re, var)
                except NoSeriesCombination as err:
                    reasons.append(f"destep {destep}: {err}")
            out = _combination(g, re, var)
        except UnsupportedExpansion:
            reasons.append(f"destep {destep}: no series expansion at the point")
            continue
        if isinstance(out, SeriesRep):
            return out
        reasons.append(f"destep {destep}: {out}")
    return FallbackMarker("; ".join(reasons))


def fps(f, var: str = "z", point=0, max_order: int = 4):
    """Power series representation of f at the expansion point.

    Returns a SeriesRep, or a FallbackMarker when the coefficients are not
    spanned by m-fold hypergeometric terms (the quadratic pipeline is the
    place to go next).  A fractional exponent lattice z^(n/k) is detected
    first and handled by expanding f(z^k) and dividing the exponents back.
    """
    e = _as_expr(f)
    g = shift_to_origin(e, point, var)
    k = _exponent_lattice(g, var)
    if k == 1:
        re = find_re(g, var, max_order=max_order)
        if re is not None:
            k = puiseux_number(re)
    if k > 1:
        g = substitute(g, var, rpow(Var(var), Fraction(k)))
    rep = _assemble(g, var, max_order)
    if isinstance(rep, FallbackMarker):
        return rep
    rep.point = point
    if k > 1:
        rep.k = rep.k * k
        lifted = rep.part
        rep.part = TruncSeries(var, lifted.k * k, None, dict(lifted.coeffs))
        for comp in rep.components:
            comp.k = comp.k * k
    return rep
