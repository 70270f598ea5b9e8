"""Exact arithmetic over Q: dense polynomials, rational functions, linear algebra.

Everything downstream (recurrence manipulation, hypergeometric solving, series
coefficients) runs on these types.  Coefficients are ``fractions.Fraction``
throughout; there is no floating point anywhere in the package.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd as _intgcd


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


class Poly:
    """Dense univariate polynomial over Q with a named indeterminate.

    ``coeffs[i]`` is the coefficient of ``var**i``; the zero polynomial has an
    empty coefficient tuple and degree -1 (sentinel).  Instances are immutable
    and hashable.

    >>> p = Poly([21, -10, 1], "n")      # n^2 - 10n + 21
    >>> p.degree
    2
    >>> p(Fraction(3))
    Fraction(0, 1)
    """

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs, var: str):
        cs = [_frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "var", var)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    @classmethod
    def zero(cls, var: str) -> "Poly":
        return cls((), var)

    @classmethod
    def one(cls, var: str) -> "Poly":
        return cls((1,), var)

    @classmethod
    def const(cls, c, var: str) -> "Poly":
        return cls((_frac(c),), var)

    @classmethod
    def x(cls, var: str) -> "Poly":
        return cls((0, 1), var)

    @property
    def degree(self) -> int:
        """Degree, with -1 as the sentinel for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, i: int) -> Fraction:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def _require_same_var(self, other: "Poly"):
        if self.var != other.var:
            raise ValueError(f"mixed indeterminates {self.var!r} and {other.var!r}")

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.var == other.var and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self == Poly.const(other, self.var)
        return NotImplemented

    def __hash__(self):
        return hash((self.coeffs, self.var))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other, self.var)
        if not isinstance(other, Poly):
            return NotImplemented
        self._require_same_var(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(
            [self.coeff(i) + other.coeff(i) for i in range(n)], self.var
        )

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs], self.var)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Poly) else Poly.const(-_frac(other), self.var))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Poly([c * other for c in self.coeffs], self.var)
        if not isinstance(other, Poly):
            return NotImplemented
        self._require_same_var(other)
        if self.is_zero or other.is_zero:
            return Poly.zero(self.var)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(out, self.var)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power of Poly")
        r = Poly.one(self.var)
        b = self
        while e:
            if e & 1:
                r = r * b
            b = b * b
            e >>= 1
        return r

    def __divmod__(self, other: "Poly"):
        self._require_same_var(other)
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        q = [Fraction(0)] * max(len(self.coeffs) - len(other.coeffs) + 1, 0)
        r = list(self.coeffs)
        dv, lv = other.degree, other.leading
        while len(r) - 1 >= dv and any(r):
            while r and r[-1] == 0:
                r.pop()
            if len(r) - 1 < dv:
                break
            c = r[-1] / lv
            k = len(r) - 1 - dv
            q[k] = c
            for i, b in enumerate(other.coeffs):
                r[k + i] -= c * b
            r.pop()
        return Poly(q, self.var), Poly(r, self.var)

    def __floordiv__(self, other: "Poly"):
        return divmod(self, other)[0]

    def __mod__(self, other: "Poly"):
        return divmod(self, other)[1]

    def exact_div(self, other: "Poly") -> "Poly":
        q, r = divmod(self, other)
        if not r.is_zero:
            raise ValueError(f"inexact polynomial division: {self} / {other}")
        return q

    def __call__(self, x):
        x = _frac(x) if isinstance(x, int) else x
        acc = Fraction(0) if isinstance(x, Fraction) else x * 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "Poly":
        return Poly([i * c for i, c in enumerate(self.coeffs)][1:], self.var)

    def shift(self, a) -> "Poly":
        """P(x) -> P(x + a) for rational a."""
        return self.compose_affine(1, a)

    def compose_affine(self, m, b) -> "Poly":
        """P(x) -> P(m*x + b) for rational m, b (Horner on the affine image)."""
        m, b = _frac(m), _frac(b)
        lin = Poly([b, m], self.var)
        acc = Poly.zero(self.var)
        for c in reversed(self.coeffs):
            acc = acc * lin + c
        return acc

    def compose(self, inner: "Poly") -> "Poly":
        acc = Poly.zero(inner.var)
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def rename(self, var: str) -> "Poly":
        return Poly(self.coeffs, var)

    def content(self) -> Fraction:
        """Positive rational c with self = c * (primitive integer polynomial)."""
        if self.is_zero:
            return Fraction(1)
        num = 0
        den = 1
        for c in self.coeffs:
            num = _intgcd(num, c.numerator)
            den = den * c.denominator // _intgcd(den, c.denominator)
        return Fraction(num, den)

    def primitive(self) -> tuple[Fraction, "Poly"]:
        """(content with the leading sign, primitive part with positive leading)."""
        if self.is_zero:
            return Fraction(1), self
        c = self.content()
        if self.leading < 0:
            c = -c
        return c, self * (1 / c)

    def monic(self) -> "Poly":
        if self.is_zero:
            return self
        return self * (1 / self.leading)

    def gcd(self, other: "Poly") -> "Poly":
        """Monic gcd over Q."""
        self._require_same_var(other)
        a, b = self, other
        while not b.is_zero:
            a, b = b, a % b
        return a.monic() if not a.is_zero else a

    def squarefree_decomposition(self) -> list[tuple["Poly", int]]:
        """Yun's algorithm: [(factor_i, multiplicity_i)] with factors monic."""
        if self.degree < 1:
            return []
        p = self.monic()
        d = p.derivative()
        a = p.gcd(d)
        b = p.exact_div(a)
        c = d.exact_div(a)
        out = []
        i = 1
        while b.degree >= 1:
            t = c - b.derivative()
            g = b.gcd(t) if not t.is_zero else b.monic()
            if g.degree >= 1:
                out.append((g, i))
            b2 = b.exact_div(g) if not g.is_zero else b
            c = t.exact_div(g) if not g.is_zero else t
            b = b2
            i += 1
        return out

    def resultant(self, other: "Poly") -> Fraction:
        """Resultant over Q via the Euclidean remainder sequence."""
        self._require_same_var(other)
        a, b = self, other
        if a.is_zero or b.is_zero:
            return Fraction(0)
        res = Fraction(1)
        while b.degree > 0:
            r = a % b
            if r.is_zero:
                return Fraction(0)
            res *= (b.leading ** (a.degree - r.degree)) * Fraction(-1) ** (a.degree * b.degree)
            a, b = b, r
        return res * b.leading ** a.degree

    def __str__(self):
        if self.is_zero:
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeff(i)
            if c == 0:
                continue
            if i == 0:
                term = str(c)
            else:
                v = self.var if i == 1 else f"{self.var}^{i}"
                if c == 1:
                    term = v
                elif c == -1:
                    term = f"-{v}"
                else:
                    term = f"{c}*{v}"
            parts.append(term)
        s = parts[0]
        for t in parts[1:]:
            s += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
        return s

    def __repr__(self):
        return f"Poly({self})"


def _divisors(n: int) -> list[int]:
    n = abs(n)
    out = set()
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.add(d)
            out.add(n // d)
        d += 1
    return sorted(out)


def rational_roots(p: Poly) -> list[Fraction]:
    """All rational roots of p, without multiplicity, ascending.

    Classical p/q candidate search on the primitive part; exact evaluation
    confirms each candidate, so no root is ever missed or invented.
    """
    if p.is_zero:
        raise ValueError("zero polynomial has every rational root")
    if p.degree == 0:
        return []
    _, pp = p.primitive()
    # primitive part has integer coefficients with positive leading
    ints = [int(c) for c in pp.coeffs]
    low = 0
    while ints[low] == 0:
        low += 1
    roots = set()
    if low > 0:
        roots.add(Fraction(0))
    a0, an = ints[low], ints[-1]
    for pnum in _divisors(a0):
        for qden in _divisors(an):
            for s in (1, -1):
                cand = Fraction(s * pnum, qden)
                if cand in roots:
                    continue
                if p(cand) == 0:
                    roots.add(cand)
    return sorted(roots)


def integer_roots(p: Poly) -> list[int]:
    """Integer roots of p, ascending, without multiplicity."""
    return [int(r) for r in rational_roots(p) if r.denominator == 1]


class Factor:
    """One factor of a partial factorization: monic poly, multiplicity, residual flag.

    ``residual`` marks a squarefree block with no rational roots; it may still
    be reducible over Q, and callers must treat it as an opaque unit.
    """

    __slots__ = ("poly", "multiplicity", "residual")

    def __init__(self, poly: Poly, multiplicity: int, residual: bool):
        self.poly = poly
        self.multiplicity = multiplicity
        self.residual = residual

    def __iter__(self):
        return iter((self.poly, self.multiplicity, self.residual))

    def __repr__(self):
        tag = "residual" if self.residual else "linear"
        return f"Factor({self.poly}, ^{self.multiplicity}, {tag})"


def factor_rational(p: Poly) -> tuple[Fraction, list[Factor]]:
    """Partial factorization over Q: content and linear factors split off.

    Returns ``(c, factors)`` with ``p = c * prod(f.poly ** f.multiplicity)``.
    Linear factors are found through rational roots of the squarefree parts;
    whatever remains of each squarefree part is returned as a single residual
    Factor.  No full irreducible factorization is attempted.
    """
    if p.is_zero:
        return Fraction(0), []
    c, pp = p.primitive()
    c *= pp.leading
    pp = pp.monic()
    factors: list[Factor] = []
    for sq, mult in pp.squarefree_decomposition():
        rest = sq
        for r in rational_roots(sq):
            lin = Poly([-r, 1], p.var)
            rest = rest.exact_div(lin)
            factors.append(Factor(lin, mult, False))
        if rest.degree >= 1:
            factors.append(Factor(rest.monic(), mult, True))
    return c, factors


class RatFunc:
    """Rational function over Q in canonical form: monic denominator, gcd 1.

    >>> r = RatFunc(Poly([0, 2], "z"), Poly([2, 2], "z"))
    >>> str(r)
    'z/(z + 1)'
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None):
        if den is None:
            den = Poly.one(num.var)
        if den.is_zero:
            raise ZeroDivisionError("rational function with zero denominator")
        if num.var != den.var:
            raise ValueError("mixed indeterminates in RatFunc")
        if num.is_zero:
            den = Poly.one(num.var)
        else:
            g = num.gcd(den)
            if g.degree >= 1:
                num, den = num.exact_div(g), den.exact_div(g)
            lc = den.leading
            if lc != 1:
                num, den = num * (1 / lc), den * (1 / lc)
        self.num = num
        self.den = den

    @classmethod
    def const(cls, c, var: str) -> "RatFunc":
        return cls(Poly.const(c, var))

    @classmethod
    def from_poly(cls, p: Poly) -> "RatFunc":
        return cls(p)

    @property
    def var(self) -> str:
        return self.num.var

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_poly(self) -> bool:
        return self.den.degree == 0

    def as_poly(self) -> Poly:
        if not self.is_poly:
            raise ValueError(f"{self} is not polynomial")
        return self.num

    def _coerce(self, other) -> "RatFunc | None":
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, Poly):
            return RatFunc(other)
        if isinstance(other, (int, Fraction)):
            return RatFunc.const(other, self.var)
        return None

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero:
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        return o / self

    def __pow__(self, e: int):
        if e >= 0:
            return RatFunc(self.num ** e, self.den ** e)
        if self.is_zero:
            raise ZeroDivisionError("0 to a negative power")
        return RatFunc(self.den ** (-e), self.num ** (-e))

    def __call__(self, x):
        d = self.den(x)
        if isinstance(d, Fraction) and d == 0:
            raise ZeroDivisionError(f"pole of {self} at {x}")
        return self.num(x) / d

    def derivative(self) -> "RatFunc":
        return RatFunc(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def shift(self, a) -> "RatFunc":
        return RatFunc(self.num.shift(a), self.den.shift(a))

    def compose_affine(self, m, b) -> "RatFunc":
        return RatFunc(self.num.compose_affine(m, b), self.den.compose_affine(m, b))

    def rename(self, var: str) -> "RatFunc":
        return RatFunc(self.num.rename(var), self.den.rename(var))

    def __str__(self):
        if self.is_poly:
            return str(self.num)
        ns = str(self.num)
        if self.num.degree > 0 and len(self.num.coeffs) - self.num.coeffs.count(Fraction(0)) > 1:
            ns = f"({ns})"
        return f"{ns}/({self.den})"

    def __repr__(self):
        return f"RatFunc({self})"


def _row_clear_denominators(row: list[RatFunc], rhs: RatFunc) -> tuple[list[Poly], Poly]:
    var = row[0].var if row else rhs.var
    den = Poly.one(var)
    for e in itertools.chain(row, [rhs]):
        den = den * e.den.exact_div(den.gcd(e.den))
    return [e.num * den.exact_div(e.den) for e in row], rhs.num * den.exact_div(rhs.den)


class LinearSolution:
    """Solution of A x = b over the fraction field: particular + nullspace basis."""

    __slots__ = ("particular", "nullspace")

    def __init__(self, particular: list[RatFunc], nullspace: list[list[RatFunc]]):
        self.particular = particular
        self.nullspace = nullspace

    @property
    def is_unique(self) -> bool:
        return not self.nullspace


def solve_linear_system(rows, rhs, var: str | None = None) -> LinearSolution | None:
    """Solve A x = b exactly over Q(var) (or plain Q), or return None.

    Entries may be RatFunc, Poly, Fraction or int.  Rows are cleared to
    polynomial form and eliminated fraction-free (Bareiss), so no rational
    function gcd churn happens during pivoting.  Returns a particular solution
    with free variables at zero plus a nullspace basis; None if inconsistent.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    if var is None:
        var = "_x"
        for row in itertools.chain(rows, [rhs]):
            for e in (row if isinstance(row, list) else [row]):
                if isinstance(e, (RatFunc, Poly)):
                    var = e.var
                    break
            else:
                continue
            break

    def conv(e) -> RatFunc:
        if isinstance(e, RatFunc):
            return e
        if isinstance(e, Poly):
            return RatFunc(e)
        return RatFunc.const(e, var)

    aug: list[list[Poly]] = []
    for i in range(m):
        row = [conv(e) for e in rows[i]]
        r, b = _row_clear_denominators(row, conv(rhs[i]))
        aug.append(r + [b])

    # Bareiss fraction-free elimination on the polynomial augmented matrix:
    # eliminate below each pivot only, dividing by the previous pivot (exact).
    piv_rows: list[int] = []
    piv_cols: list[int] = []
    prev: Poly | None = None
    r = 0
    for c in range(n):
        pr = None
        best = None
        for i in range(r, m):
            e = aug[i][c]
            if not e.is_zero and (best is None or e.degree < best):
                best, pr = e.degree, i
        if pr is None:
            continue
        aug[r], aug[pr] = aug[pr], aug[r]
        piv = aug[r][c]
        for i in range(r + 1, m):
            fi = aug[i][c]
            for j in range(c, n + 1):
                t = aug[i][j] * piv - fi * aug[r][j]
                aug[i][j] = t.exact_div(prev) if prev is not None else t
        prev = piv
        piv_rows.append(r)
        piv_cols.append(c)
        r += 1
        if r == m:
            break

    # consistency: any zero row with nonzero rhs means no solution
    for i in range(r, m):
        if all(aug[i][j].is_zero for j in range(n)) and not aug[i][n].is_zero:
            return None

    free_cols = [c for c in range(n) if c not in piv_cols]
    # back-substitute in the reduced (echelon) system
    particular = [RatFunc.const(0, var) for _ in range(n)]
    for k in range(len(piv_cols) - 1, -1, -1):
        i, c = piv_rows[k], piv_cols[k]
        acc = RatFunc(aug[i][n])
        for j in range(c + 1, n):
            if not aug[i][j].is_zero and not particular[j].is_zero:
                acc = acc - RatFunc(aug[i][j]) * particular[j]
        particular[c] = acc / RatFunc(aug[i][c])

    nullspace = []
    for fc in free_cols:
        vec = [RatFunc.const(0, var) for _ in range(n)]
        vec[fc] = RatFunc.const(1, var)
        for k in range(len(piv_cols) - 1, -1, -1):
            i, c = piv_rows[k], piv_cols[k]
            acc = RatFunc.const(0, var)
            for j in range(c + 1, n):
                if not aug[i][j].is_zero and not vec[j].is_zero:
                    acc = acc - RatFunc(aug[i][j]) * vec[j]
            vec[c] = acc / RatFunc(aug[i][c])
        nullspace.append(vec)
    return LinearSolution(particular, nullspace)


def lcm_int(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return abs(a * b) // _intgcd(a, b)


def pochhammer(x, n: int) -> Fraction:
    """Rising factorial (x)_n = x (x+1) ... (x+n-1), with (x)_0 = 1."""
    x = _frac(x)
    acc = Fraction(1)
    for i in range(n):
        acc *= x + i
    return acc
