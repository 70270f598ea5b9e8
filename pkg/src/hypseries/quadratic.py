"""Quadratic differential equations for non-holonomic power series.

Functions such as tan or 1/(1+sin z) satisfy no linear differential
equation with polynomial coefficients, but many of them do satisfy an
equation that is quadratic in the unknown function and its derivatives.
This module searches for such an equation by ranking the candidate
monomials f, f^2, f', f*f', ... along diagonals and solving for a
vanishing combination with rational function coefficients, then turns
the equation into a coefficient recurrence via the Cauchy product rule.
Peeling the two endpoints off every convolution leaves a recursion for
the highest-index coefficient; together with enough leading
coefficients this is a closed recursive description of the series, and
it evaluates truncations in quadratic time.

Two conventions keep the printed recursions literally true for every n
at or above the stated threshold: a coefficient with negative index is
zero, and a sum whose upper bound b lies two or more below its lower
bound a reflects, sum(t(k), k, a, b) = -sum(t(k), k, b+1, a-1).  Both
are exactly what the endpoint peel produces for small n.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction

from .expressions import (
    Expr,
    as_ratfunc,
    differentiate,
    is_rational_in,
    parse,
    rmul,
    to_text,
)
from .holonomic import (
    _derivative_label,
    _format_poly_factor,
    _poch_poly,
    poly_from_text,
    shift_to_origin,
)
from .oracle import TruncSeries, UnsupportedExpansion, crational, expand_truncated
from .polys import Poly, RatFunc, integer_roots, solve_linear_system
from .summands import AtomRegistry, canonicalize, decompose_common, structural_zero

__all__ = [
    "nu",
    "QuadDE",
    "qde",
    "QRecurrence",
    "find_qre",
    "NormalFormSeries",
    "normal_form",
    "qtaylor",
    "ZeroResult",
    "is_zero",
]


def nu(k: int) -> tuple[int, int]:
    """Position (i, j), i >= j >= 1, of index k in the diagonal ranking.

    The ranking walks the lower triangle row by row: (1,1), (2,1),
    (2,2), (3,1), ... so that row i ends at index i*(i+1)/2.  Row and
    column translate to derivative orders i-2 and j-2, with order -1
    read as the constant 1 and order 0 as the function itself; index 1
    is the constant, 2 the function, 3 its square, 4 the derivative.
    """
    if k < 1:
        raise ValueError("index must be positive")
    l = (math.isqrt(8 * k + 1) - 1) // 2
    n = l * (l + 1) // 2
    if n == k:
        return (l, l)
    return (l + 1, k - n)


def _k_of(lo: int, hi: int) -> int:
    row = hi + 2
    return row * (row - 1) // 2 + lo + 2


def _orders(k: int) -> tuple[int, int]:
    i, j = nu(k)
    return (j - 2, i - 2)


def _peval(p: Poly, n) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p.coeffs):
        acc = acc * n + c
    return acc


def _pscale(p: Poly, s) -> Poly:
    return Poly([c * s for c in p.coeffs], p.var)


def _acc(d: dict, key, p: Poly) -> None:
    q = d.get(key)
    d[key] = p if q is None else q + p


def _rising(x: int, m: int) -> int:
    acc = 1
    for t in range(m):
        acc *= x + t
    return acc


def _off(c: int) -> str:
    if c == 0:
        return ""
    return f"+{c}" if c > 0 else str(c)


def _grouped(s: str) -> str:
    if " " not in s and "*" not in s and not s.startswith("-"):
        return s
    if s.startswith("(") and s.endswith(")"):
        depth = 0
        for i, ch in enumerate(s):
            depth += (ch == "(") - (ch == ")")
            if depth == 0 and i < len(s) - 1:
                break
        else:
            return s
    return f"({s})"


def _series_coeffs(f, var: str, nterms: int) -> list:
    """Plain rational Taylor coefficients a_0..a_{nterms-1} of f at 0."""
    s = expand_truncated(f, var, nterms)
    if s.k != 1:
        raise ValueError("fractional exponents leave no coefficient sequence")
    out = [Fraction(0)] * nterms
    for (g, logpow), v in s.coeffs.items():
        if logpow:
            raise ValueError("logarithmic terms leave no coefficient sequence")
        if g < 0:
            raise ValueError("pole at the expansion point")
        c = crational(v)
        if c is None:
            raise ValueError("coefficients are not rational")
        if g < nterms:
            out[g] = c
    return out


class QuadDE:
    """Equation sum c_{ij}(z) f^(i) f^(j) = 0, at most quadratic in f.

    ``pairs`` maps ascending derivative-order pairs (i, j) with
    -1 <= i <= j to polynomial coefficients, order -1 standing for the
    constant factor 1; the pair (-1, -1) alone marks an inhomogeneous
    term.  Coefficients are jointly primitive over the integers and the
    highest-ranked pair has a positive leading coefficient.
    """

    __slots__ = ("pairs", "var")

    def __init__(self, pairs: dict, var: str):
        kept = {ij: p for ij, p in pairs.items() if not p.is_zero}
        if not kept:
            raise ValueError("empty equation")
        self.pairs = kept
        self.var = var
        self._normalize()

    def _normalize(self) -> None:
        mult = 1
        for p in self.pairs.values():
            for c in p.coeffs:
                if c:
                    mult = mult * c.denominator // math.gcd(mult, c.denominator)
        g = 0
        for p in self.pairs.values():
            for c in p.coeffs:
                if c:
                    g = math.gcd(g, abs(c.numerator * mult // c.denominator))
        scale = Fraction(mult, g or 1)
        if self.pairs[self.top_pair].leading * scale < 0:
            scale = -scale
        if scale != 1:
            self.pairs = {ij: _pscale(p, scale) for ij, p in self.pairs.items()}

    @property
    def top_pair(self) -> tuple[int, int]:
        return max(self.pairs, key=lambda ij: _k_of(*ij))

    @property
    def order(self) -> int:
        return max(hi for _, hi in self.pairs)

    @property
    def homogeneous(self) -> bool:
        return (-1, -1) not in self.pairs

    @staticmethod
    def _label(lo: int, hi: int) -> str:
        if lo == -1:
            return _derivative_label(hi)
        a, b = _derivative_label(lo), _derivative_label(hi)
        if lo == hi:
            return f"{a}^2" if lo == 0 else f"({a})^2"
        return f"{a}*{b}"

    def __str__(self) -> str:
        parts = []
        for (lo, hi) in sorted(self.pairs, key=lambda ij: -_k_of(*ij)):
            poly = self.pairs[(lo, hi)]
            body = _format_poly_factor(poly)
            if lo == -1 and hi == -1:
                parts.append(body)
                continue
            lab = self._label(lo, hi)
            if body == "1":
                parts.append(lab)
            elif body == "-1":
                parts.append(f"-{lab}")
            else:
                parts.append(f"{body}*{lab}")
        return " + ".join(parts).replace("+ -", "- ") + " = 0"

    def __repr__(self) -> str:
        return f"QuadDE({self})"

    def to_json(self) -> dict:
        monos = []
        for (lo, hi) in sorted(self.pairs, key=lambda ij: (_k_of(*ij))):
            for p, c in enumerate(self.pairs[(lo, hi)].coeffs):
                if c:
                    monos.append(
                        {"power": p, "dlow": lo, "dhigh": hi, "coeff": str(c)}
                    )
        return {"variable": self.var, "monomials": monos}

    @classmethod
    def from_json(cls, data: dict) -> "QuadDE":
        var = data["variable"]
        grouped: dict = {}
        for mono in data["monomials"]:
            cur = grouped.setdefault((mono["dlow"], mono["dhigh"]), {})
            cur[mono["power"]] = Fraction(mono["coeff"])
        pairs = {
            ij: Poly([cs.get(i, Fraction(0)) for i in range(max(cs) + 1)], var)
            for ij, cs in grouped.items()
        }
        return cls(pairs, var)

    def holds_for(self, f, order: int = 30) -> bool:
        """Residual of f in the equation vanishes below z^order."""
        pmax = max(p.degree for p in self.pairs.values())
        m = order + self.order + pmax + 2
        a = _series_coeffs(f, self.var, m)
        dmax = max(self.order, 0)
        d = []
        for j in range(dmax + 1):
            d.append([a[i + j] * _rising(i + 1, j) for i in range(m - j)])
        for e in range(order):
            total = Fraction(0)
            for (lo, hi), poly in self.pairs.items():
                for p, c in enumerate(poly.coeffs):
                    if not c or e < p:
                        continue
                    t = e - p
                    if lo == -1 and hi == -1:
                        v = Fraction(int(t == 0))
                    elif lo == -1:
                        v = d[hi][t]
                    else:
                        v = sum(
                            (d[lo][u] * d[hi][t - u] for u in range(t + 1)),
                            Fraction(0),
                        )
                    total += c * v
            if total:
                return False
        return True


def qde(f, var: str = "z", inhomogeneous: bool = False, max_order: int = 19):
    """Smallest quadratic differential equation satisfied by f, or None.

    Candidate monomials are taken in the diagonal ranking; with N of
    them the highest is made monic and the rest get rational function
    coefficients solved for by comparing hypergeometric summand
    bundles.  ``inhomogeneous`` admits a constant term as well.  A
    rational f short-circuits to den*F^2 - num*F = 0 and the zero
    function to F = 0.
    """
    if isinstance(f, str):
        f = parse(f)
    g = canonicalize(f, var)
    if structural_zero(g, var):
        return QuadDE({(-1, 0): Poly.one(var)}, var)
    if is_rational_in(g, var):
        r = as_ratfunc(g, var)
        return QuadDE({(0, 0): r.den, (-1, 0): _pscale(r.num, -1)}, var)
    derivs = {0: g}
    terms: dict[int, Expr] = {}

    def delta2(k: int) -> Expr:
        t = terms.get(k)
        if t is None:
            lo, hi = _orders(k)
            while hi > max(derivs):
                j = max(derivs)
                derivs[j + 1] = differentiate(derivs[j], var)
            if lo == -1 and hi == -1:
                t = parse("1")
            elif lo == -1:
                t = derivs[hi]
            else:
                t = rmul([derivs[lo], derivs[hi]])
            terms[k] = t
        return t

    reg = AtomRegistry(var)
    for n in range(2, max_order + 1):
        ks = [n + 2] + list(range(n + 1, 1, -1))
        if inhomogeneous:
            ks.append(1)
        reg, decomps = decompose_common([delta2(k) for k in ks], var, reg)
        bundles = sorted({b for d in decomps for b in d})
        zero = RatFunc.const(Fraction(0), var)
        rows = [[d.get(b, zero) for d in decomps[1:]] for b in bundles]
        rhs = [zero - decomps[0].get(b, zero) for b in bundles]
        sol = solve_linear_system(rows, rhs, var)
        if sol is None:
            continue
        coeffs = {ks[0]: RatFunc.const(Fraction(1), var)}
        for k, r in zip(ks[1:], sol.particular):
            coeffs[k] = r
        den = Poly.one(var)
        for r in coeffs.values():
            den = den * r.den.exact_div(den.gcd(r.den))
        pairs = {}
        for k, r in coeffs.items():
            poly = r.num * den.exact_div(r.den)
            if not poly.is_zero:
                pairs[_orders(k)] = poly
        return QuadDE(pairs, var)
    return None


class QRecurrence:
    """Coefficient recurrence with convolution terms, valid for n >= 0.

    ``linear`` maps index shifts to polynomials, shift s standing for
    P(n)*a(n+s); negative shifts are kept as written and a(m) with
    m < 0 reads as zero.  Each convolution (c, p, hi, lo) stands for
    c * sum((k+1)_hi a(k+hi) (n-p-k+1)_lo a(n-p-k+lo), k, 0, n-p)
    in rising-factorial notation, the higher derivative on the k side.
    """

    __slots__ = ("linear", "conv", "var")

    def __init__(self, linear: dict, conv: list, var: str):
        self.linear = {s: p for s, p in linear.items() if not p.is_zero}
        self.conv = list(conv)
        self.var = var

    @staticmethod
    def _conv_text(c, p: int, hi: int, lo: int, name: str = "a") -> str:
        bits = []
        for t in range(1, hi + 1):
            bits.append(f"(k{_off(t)})")
        bits.append(f"{name}(k{_off(hi)})")
        for t in range(1, lo + 1):
            bits.append(f"(n-k{_off(t - p)})")
        bits.append(f"{name}(n-k{_off(lo - p)})")
        upper = "n" if p == 0 else f"n-{p}"
        body = f"sum({'*'.join(bits)}, k, 0, {upper})"
        if c == 1:
            return body
        if c == -1:
            return f"-{body}"
        return f"{c}*{body}"

    def __str__(self) -> str:
        lin = []
        for s in sorted(self.linear, reverse=True):
            body = _format_poly_factor(self.linear[s])
            term = f"a(n{_off(s)})"
            if body == "1":
                lin.append(term)
            elif body == "-1":
                lin.append(f"-{term}")
            else:
                lin.append(f"{body}*{term}")
        conv = [self._conv_text(c, p, hi, lo) for (c, p, hi, lo) in self.conv]
        if self.conv and self.conv[0][0] < 0 and lin:
            parts = lin + conv
        else:
            parts = conv + lin
        return " + ".join(parts).replace("+ -", "- ") + " = 0"

    def __repr__(self) -> str:
        return f"QRecurrence({self})"

    def to_json(self) -> dict:
        return {
            "variable": "n",
            "linear": [
                {"shift": s, "poly": str(self.linear[s])}
                for s in sorted(self.linear, reverse=True)
            ],
            "convolutions": [
                {"coeff": str(c), "power": p, "dhigh": hi, "dlow": lo}
                for (c, p, hi, lo) in self.conv
            ],
        }

    @classmethod
    def from_json(cls, data: dict, var: str = "z") -> "QRecurrence":
        n = data["variable"]
        linear = {r["shift"]: poly_from_text(r["poly"], n) for r in data["linear"]}
        conv = [
            (Fraction(r["coeff"]), r["power"], r["dhigh"], r["dlow"])
            for r in data["convolutions"]
        ]
        return cls(linear, conv, var)

    def holds_for(self, seq: list, n_lo: int, n_hi: int) -> bool:
        """Check against explicit coefficients a_0.. for n in [n_lo, n_hi]."""

        def a(i):
            return seq[i] if 0 <= i < len(seq) else Fraction(0)

        for n in range(n_lo, n_hi + 1):
            total = Fraction(0)
            for s, p in self.linear.items():
                total += _peval(p, n) * a(n + s)
            for (c, p, hi, lo) in self.conv:
                acc = Fraction(0)
                for k in range(n - p + 1):
                    acc += (
                        _rising(k + 1, hi)
                        * a(k + hi)
                        * _rising(n - p - k + 1, lo)
                        * a(n - p - k + lo)
                    )
                total += c * acc
            if total:
                return False
        return True


def _to_recurrence(q: QuadDE) -> QRecurrence:
    if not q.homogeneous:
        raise ValueError("inhomogeneous terms have no convolution image")
    lin: dict[int, Poly] = {}
    conv = []
    for (lo, hi), poly in q.pairs.items():
        for p, c in enumerate(poly.coeffs):
            if not c:
                continue
            if lo == -1:
                _acc(lin, hi - p, _pscale(_poch_poly(Fraction(1 - p), hi, "n"), c))
            else:
                conv.append((c, p, hi, lo))
    conv.sort(key=lambda t: (-_k_of(t[3], t[2]), t[1]))
    return QRecurrence(lin, conv, q.var)


def find_qre(f, var: str = "z", max_order: int = 19):
    """Quadratic coefficient recurrence of f at 0, or None.

    Converts the homogeneous quadratic differential equation term by
    term: z^p f^(j) maps to (n+1-p)_j a(n+j-p) and a product
    z^p f^(i) f^(j) to the Cauchy convolution of the two derivative
    sequences, lagged by p.
    """
    q = qde(f, var, inhomogeneous=False, max_order=max_order)
    if q is None:
        return None
    return _to_recurrence(q)


class NormalFormSeries:
    """Power series described by a top-coefficient recursion.

    A(n+top) equals a numerator of earlier linear terms and peeled
    convolutions divided by den(n), valid for n >= threshold, seeded by
    the initial values A(0)..A(threshold+top-1).  Negative indices read
    as zero and reversed sums reflect, which is what makes the
    recursion hold from the threshold on without case splits.
    """

    __slots__ = ("var", "top", "den", "linear", "convs", "threshold", "inits", "_cache")

    def __init__(self, var, top, den, linear, convs, threshold, inits):
        self.var = var
        self.top = top
        self.den = den
        self.linear = linear
        self.convs = convs
        self.threshold = threshold
        self.inits = list(inits)
        self._cache = list(inits)

    def _a(self, i: int) -> Fraction:
        return self._cache[i] if i >= 0 else Fraction(0)

    def _mid(self, n: int, hi: int, lo: int, q: int) -> Fraction:
        b = n + q

        def term(k):
            return (
                _rising(k + 1, hi)
                * self._a(k + hi)
                * _rising(b - k + 1, lo)
                * self._a(b - k + lo)
            )

        if b - 1 >= 1:
            return sum((term(k) for k in range(1, b)), Fraction(0))
        if b - 1 == 0:
            return Fraction(0)
        return -sum((term(k) for k in range(b, 1)), Fraction(0))

    def unroll(self, N: int) -> list:
        """Coefficients A(0)..A(N), extending a shared cache."""
        while len(self._cache) <= N:
            n = len(self._cache) - self.top
            total = Fraction(0)
            for s, p in self.linear:
                total += _peval(p, n) * self._a(n + s)
            for (c, hi, lo, q) in self.convs:
                total += c * self._mid(n, hi, lo, q)
            self._cache.append(total / _peval(self.den, n))
        return list(self._cache[: N + 1])

    def coeff(self, n: int) -> Fraction:
        return self.unroll(n)[n]

    def __str__(self) -> str:
        parts = []
        for s, p in self.linear:
            body = _format_poly_factor(p)
            term = f"A(n{_off(s)})"
            if body == "1":
                parts.append(term)
            elif body == "-1":
                parts.append(f"-{term}")
            else:
                parts.append(f"{body}*{term}")
        for (c, hi, lo, q) in self.convs:
            bits = []
            for t in range(1, hi + 1):
                bits.append(f"(k{_off(t)})")
            bits.append(f"A(k{_off(hi)})")
            for t in range(1, lo + 1):
                bits.append(f"(n-k{_off(q + t)})")
            bits.append(f"A(n-k{_off(q + lo)})")
            body = f"sum({'*'.join(bits)}, k, 1, n{_off(q - 1)})"
            if c == 1:
                parts.append(body)
            elif c == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{c}*{body}")
        numer = " + ".join(parts).replace("+ -", "- ")
        inits = ", ".join(f"A({i}) = {v}" for i, v in enumerate(self.inits))
        return (
            f"[sum(A(n)*{self.var}^n, n, 0, inf), "
            f"A(n{_off(self.top)}) = ({numer})/{_grouped(_format_poly_factor(self.den))}, "
            f"n >= {self.threshold}, [{inits}]]"
        )

    def __repr__(self) -> str:
        return f"NormalFormSeries({self})"

    def to_json(self) -> dict:
        return {
            "variable": self.var,
            "top": self.top,
            "denominator": str(self.den),
            "linear": [{"shift": s, "poly": str(p)} for s, p in self.linear],
            "convolutions": [
                {"coeff": str(c), "dhigh": hi, "dlow": lo, "lag": q}
                for (c, hi, lo, q) in self.convs
            ],
            "threshold": self.threshold,
            "initial": [str(v) for v in self.inits],
        }

    @classmethod
    def from_json(cls, data: dict) -> "NormalFormSeries":
        return cls(
            data["variable"],
            data["top"],
            poly_from_text(data["denominator"], "n"),
            [(r["shift"], poly_from_text(r["poly"], "n")) for r in data["linear"]],
            [
                (Fraction(r["coeff"]), r["dhigh"], r["dlow"], r["lag"])
                for r in data["convolutions"]
            ],
            data["threshold"],
            [Fraction(s) for s in data["initial"]],
        )


def _peel(qre: QRecurrence, prefix: list, var: str) -> NormalFormSeries:
    """Extract the top-coefficient recursion from a quadratic recurrence.

    Both endpoints of every convolution are split off; they are linear
    in the unknown sequence because the other factor is a known leading
    coefficient.  Shifting by one when some convolution mixes distinct
    derivative orders lines the top of the peel up with the top linear
    term.
    """
    s = 1 if any(hi != lo for (_, _, hi, lo) in qre.conv) else 0
    lin: dict[int, Poly] = {}
    for shift, p in qre.linear.items():
        _acc(lin, shift + s, p.shift(s))
    eps = []
    for (c, p, hi, lo) in qre.conv:
        q0 = s - p
        a_lo, a_hi = prefix[lo], prefix[hi]
        ends = [(a_lo, math.factorial(lo), hi)]
        if hi != lo:
            ends.append((a_hi, math.factorial(hi), lo))
        else:
            ends[0] = (2 * a_lo, math.factorial(lo), hi)
        for val, fact, length in ends:
            if val:
                _acc(
                    lin,
                    q0 + length,
                    _pscale(_poch_poly(Fraction(q0 + 1), length, "n"), c * fact * val),
                )
        eps += [lo, hi]
    lin = {k: p for k, p in lin.items() if not p.is_zero}
    if not lin:
        raise ValueError("no linear part to solve for")
    top = max(lin)
    for (_, p, hi, _) in qre.conv:
        if s - p + hi > top:
            raise ValueError("a convolution outruns every linear shift")
    den = lin.pop(top)
    linear = sorted(((sh, _pscale(p, -1)) for sh, p in lin.items()))
    convs = [(-c, hi, lo, s - p) for (c, p, hi, lo) in qre.conv]
    n0 = max(
        [0]
        + [1 + r for r in integer_roots(den)]
        + [p - s - 1 for (_, p, _, _) in qre.conv]
        + [1 + e - top for e in eps]
    )
    return NormalFormSeries(var, top, den, linear, convs, n0, prefix[: n0 + top])


def normal_form(f, var: str = "z", max_order: int = 19):
    """Recursive closed description of the series of f at 0, or None.

    None means no quadratic differential equation was found; a series
    with poles, fractional exponents or logarithms raises ValueError.
    """
    if isinstance(f, str):
        f = parse(f)
    qre = find_qre(f, var, max_order=max_order)
    if qre is None:
        return None
    need = 8
    for s, _ in sorted(qre.linear.items()):
        need = max(need, abs(s) + 4)
    prefix = _series_coeffs(f, var, max(need, 12))
    nf = _peel(qre, prefix, var)
    if nf.threshold + nf.top > len(prefix):
        prefix = _series_coeffs(f, var, nf.threshold + nf.top)
        nf = _peel(qre, prefix, var)
    return nf


_memo_lock = threading.Lock()
_memo: dict = {}


def qtaylor(f, point, N: int, var: str = "z", max_order: int = 19) -> TruncSeries:
    """Truncated expansion of f at a rational point via its normal form.

    The recursion is derived once per function and point and kept for
    the session, so later calls only extend the cached unroll.  Inputs
    without a quadratic equation fall back to the direct expansion.
    """
    if isinstance(f, str):
        f = parse(f)
    g = shift_to_origin(f, point, var)
    key = (to_text(canonicalize(g, var)), var)
    with _memo_lock:
        nf = _memo.get(key, False)
    if nf is False:
        try:
            nf = normal_form(g, var, max_order=max_order)
        except ValueError:
            nf = None
        with _memo_lock:
            nf = _memo.setdefault(key, nf)
    if nf is None:
        return expand_truncated(g, var, N + 1)
    with _memo_lock:
        vals = nf.unroll(N)
    coeffs = {(n, 0): c for n, c in enumerate(vals) if c}
    return TruncSeries(var, 1, N + 1, coeffs)


class ZeroResult:
    """Outcome of a zero test: verdict plus the certifying route.

    ``verdict`` is True, False, or None for inconclusive.  Truth tests
    raise on an inconclusive result rather than guessing a side.
    """

    __slots__ = ("verdict", "path", "detail", "certificate")

    def __init__(self, verdict, path: str, detail: str = "", certificate=None):
        self.verdict = verdict
        self.path = path
        self.detail = detail
        self.certificate = certificate

    def __bool__(self) -> bool:
        if self.verdict is None:
            raise ValueError(f"zero test inconclusive: {self.detail}")
        return self.verdict

    def __str__(self) -> str:
        word = {True: "zero", False: "nonzero", None: "inconclusive"}[self.verdict]
        return f"{word} ({self.path})" + (f": {self.detail}" if self.detail else "")

    def __repr__(self) -> str:
        return f"ZeroResult({self})"


def is_zero(f, var: str = "z", max_order: int = 19, probe: int = 40) -> ZeroResult:
    """Decide whether f vanishes identically near 0, with a certificate.

    A nonzero probed coefficient is a witness; zero verdicts come from
    structural cancellation, a differential equation F = 0 or F' = 0
    with zero value, a recurrence whose initial values all vanish, or a
    verified empty series representation.  Everything short of that is
    reported as inconclusive, never as a verdict.
    """
    if isinstance(f, str):
        f = parse(f)
    tried = []
    probed_zero = False
    try:
        s = expand_truncated(f, var, probe)
        for (g, logpow), v in sorted(s.coeffs.items()):
            c = crational(v)
            if c is None or c == 0:
                continue
            e = Fraction(g, s.k)
            where = f"{var}^{e}" + (f"*log^{logpow}" if logpow else "")
            return ZeroResult(False, "series-witness", f"coefficient {c} at {where}")
        probed_zero = True
        tried.append(f"first {probe} series terms vanish")
    except (UnsupportedExpansion, ValueError, ZeroDivisionError) as exc:
        tried.append(f"series probe failed ({exc})")
    g = canonicalize(f, var)
    if structural_zero(g, var):
        return ZeroResult(True, "canonical-cancellation")
    if probed_zero:
        # differentiating strips additive log-like wrappers whose arguments
        # resist normalization; zero derivative plus zero value is enough
        if structural_zero(differentiate(f, var), var):
            return ZeroResult(
                True, "derivative-cancellation", "F' = 0 and F(0) = 0"
            )
    q = qde(f, var, max_order=max_order)
    if q is not None:
        if set(q.pairs) == {(-1, 0)}:
            return ZeroResult(True, "differential-certificate", "F = 0", q)
        if set(q.pairs) == {(-1, 1)}:
            try:
                if _series_coeffs(f, var, 1)[0] == 0:
                    return ZeroResult(
                        True, "differential-certificate", "F' = 0 and F(0) = 0", q
                    )
            except ValueError:
                pass
        try:
            nf = normal_form(f, var, max_order=max_order)
        except ValueError:
            nf = None
        if nf is not None and all(v == 0 for v in nf.inits):
            return ZeroResult(
                True, "recurrence-induction", "all initial values vanish", nf
            )
        tried.append("quadratic equation found but initial values are nonzero")
    else:
        tried.append("no quadratic differential equation")
    from .fps import SeriesRep, fps

    rep = fps(f, var)
    if isinstance(rep, SeriesRep) and not rep.components:
        if rep.part.is_zero_series():
            return ZeroResult(True, "series-normal-form", "empty representation", rep)
        tried.append("series representation is a nonzero polynomial")
    return ZeroResult(None, "inconclusive", "; ".join(tried))
