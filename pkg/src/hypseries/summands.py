"""Structural normal form: rewrite, align, and bundle transcendental atoms.

An expression built from elementary functions is flattened into a sum of
monomials over a small set of atoms (sin(u), cos(u), exp-cores, logs,
inverse functions, fractional-power roots, pi) with coefficients in Q(z).
Two expressions whose difference flattens to the empty sum are equal, since
every rewrite applied here only merges mathematically equal summands:

  * tan, sec, csc, tanh, acos, atanh, asinh, acosh, asech are replaced by
    sin/cos/sinh/cosh/exp/log/asin combinations;
  * sin/cos (and sinh/cosh) arguments that are rational multiples of a
    common core are aligned to the gcd multiple with multiple-angle
    expansion, and odd/even symmetry fixes argument signs;
  * even powers of cos collapse through cos^2 = 1 - sin^2 (cosh^2 = 1 +
    sinh^2), fractional-power atoms spill integer parts of their exponent,
    and positive powers of sum atoms distribute;
  * negative powers of sum atoms are cleared by a common denominator, which
    makes relations like E/(E-1)^2 = 1/(E-1) + 1/(E-1)^2 visible;
  * square roots of perfect squares in the atom algebra collapse, with the
    branch sign checked against the series oracle.

The reverse map from atoms to expressions is kept, so bundles can be turned
back into expressions for reporting.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .expressions import (
    Add, App, Const, Expr, Mul, Pow, Rat, Var,
    app, radd, rmul, rpow, to_text, _rat_pow,
)
from .polys import Poly, RatFunc
from .oracle import expand_truncated, UnsupportedExpansion

__all__ = [
    "canonicalize", "decompose", "decompose_common", "structural_zero",
    "bundle_to_expr", "AtomRegistry",
]

HALF = Fraction(1, 2)


# ---------------------------------------------------------------------------
# function rewrites

def _rw_tan(a):
    return rmul([app("sin", a), rpow(app("cos", a), Fraction(-1))])


def _rw_sec(a):
    return rpow(app("cos", a), Fraction(-1))


def _rw_csc(a):
    return rpow(app("sin", a), Fraction(-1))


def _rw_tanh(a):
    return rmul([app("sinh", a), rpow(app("cosh", a), Fraction(-1))])


def _rw_acos(a):
    return radd([rmul([Rat(HALF), Const("pi")]),
                 rmul([Rat(-1), app("asin", a)])])


def _rw_atanh(a):
    one = Rat(1)
    return rmul([Rat(HALF), app("log", rmul([
        radd([one, a]), rpow(radd([one, rmul([Rat(-1), a])]), Fraction(-1))
    ]))])


def _rw_asinh(a):
    return app("log", radd([a, rpow(radd([Rat(1), rmul([a, a])]), HALF)]))


def _rw_acosh(a):
    return app("log", radd([a, rpow(radd([rmul([a, a]), Rat(-1)]), HALF)]))


def _rw_asech(a):
    sq = rpow(radd([Rat(1), rmul([Rat(-1), a, a])]), HALF)
    return radd([app("log", radd([Rat(1), sq])),
                 rmul([Rat(-1), app("log", a)])])


_REWRITES = {
    "tan": _rw_tan, "sec": _rw_sec, "csc": _rw_csc, "tanh": _rw_tanh,
    "acos": _rw_acos, "atanh": _rw_atanh, "asinh": _rw_asinh,
    "acosh": _rw_acosh, "asech": _rw_asech,
}

_ODD = {"sin": -1, "sinh": -1, "asin": -1, "atan": -1}
_EVEN = {"cos": 1, "cosh": 1}


def _rewrite_funcs(e: Expr) -> Expr:
    if isinstance(e, (Rat, Const, Var)):
        return e
    if isinstance(e, Add):
        return radd([_rewrite_funcs(t) for t in e.terms])
    if isinstance(e, Mul):
        return rmul([_rewrite_funcs(f) for f in e.factors])
    if isinstance(e, Pow):
        return rpow(_rewrite_funcs(e.base), e.exponent)
    if isinstance(e, App):
        a = _rewrite_funcs(e.arg)
        rw = _REWRITES.get(e.func)
        if rw is not None:
            return _rewrite_funcs(rw(a))
        c, _ = _arg_split(a)
        if c < 0:
            if e.func in _ODD:
                return rmul([Rat(-1), app(e.func, rmul([Rat(-1), a]))])
            if e.func in _EVEN:
                return app(e.func, rmul([Rat(-1), a]))
        return app(e.func, a)
    raise TypeError(type(e).__name__)


def _arg_split(u: Expr):
    """u = c * core with rational c > 0 unless u is a pure constant."""
    if isinstance(u, Rat):
        return u.value, None
    if isinstance(u, Mul) and isinstance(u.factors[0], Rat):
        rest = u.factors[1:]
        core = rest[0] if len(rest) == 1 else Mul(rest)
        return u.factors[0].value, core
    return Fraction(1), u


def _frac_gcd(a: Fraction, b: Fraction) -> Fraction:
    return Fraction(math.gcd(a.numerator, b.numerator),
                    (a.denominator * b.denominator)
                    // math.gcd(a.denominator, b.denominator))


# ---------------------------------------------------------------------------
# trig argument alignment

_TRIG = {"sin": ("sin", "cos"), "cos": ("sin", "cos")}
_HYP = {"sinh": ("sinh", "cosh"), "cosh": ("sinh", "cosh")}


def _collect_args(e: Expr, table, found: dict):
    if isinstance(e, App):
        if e.func in table:
            c, core = _arg_split(e.arg)
            if core is not None:
                key = core.sort_key()
                fam = found.setdefault(key, [core, []])
                fam[1].append(c)
        _collect_args(e.arg, table, found)
    elif isinstance(e, Add):
        for t in e.terms:
            _collect_args(t, table, found)
    elif isinstance(e, Mul):
        for f in e.factors:
            _collect_args(f, table, found)
    elif isinstance(e, Pow):
        _collect_args(e.base, table, found)


def _multiple_angle(kind: str, n: int, base: Expr) -> Expr:
    """sin/cos (or sinh/cosh) of n*base in terms of the base-angle pair."""
    circular = kind in ("sin", "cos")
    s1 = app("sin" if circular else "sinh", base)
    c1 = app("cos" if circular else "cosh", base)
    s, c = s1, c1
    sign = Rat(-1) if circular else Rat(1)
    for _ in range(n - 1):
        s, c = (
            radd([rmul([s, c1]), rmul([c, s1])]),
            radd([rmul([c, c1]), rmul([sign, s, s1])]),
        )
    return s if kind in ("sin", "sinh") else c


def _align_pass(e: Expr, gcds: dict, table) -> Expr:
    if isinstance(e, (Rat, Const, Var)):
        return e
    if isinstance(e, Add):
        return radd([_align_pass(t, gcds, table) for t in e.terms])
    if isinstance(e, Mul):
        return rmul([_align_pass(f, gcds, table) for f in e.factors])
    if isinstance(e, Pow):
        return rpow(_align_pass(e.base, gcds, table), e.exponent)
    if isinstance(e, App):
        a = _align_pass(e.arg, gcds, table)
        if e.func in table:
            c, core = _arg_split(a)
            if core is not None:
                g = gcds.get(core.sort_key())
                if g is not None and c != g:
                    n = c / g
                    if n.denominator == 1 and n > 1:
                        return _multiple_angle(
                            e.func, int(n), rmul([Rat(g), core])
                        )
        return app(e.func, a)
    raise TypeError(type(e).__name__)


def _align_family(e: Expr, table) -> Expr:
    for _ in range(4):
        found: dict = {}
        _collect_args(e, table, found)
        gcds = {}
        for key, (core, cs) in found.items():
            if len(set(cs)) < 2:
                continue
            g = cs[0]
            for c in cs[1:]:
                g = _frac_gcd(g, c)
            if all((c / g).denominator == 1 for c in cs):
                gcds[key] = g
        if not gcds:
            return e
        e = _align_pass(e, gcds, table)
    return e


# ---------------------------------------------------------------------------
# atoms and monomials

class AtomRegistry:
    """Interns atom keys and remembers how to print them back."""

    def __init__(self, var: str):
        self.var = var
        self.exprs: dict = {}

    def key_of(self, kind: str, payload) -> tuple:
        return (kind,) + payload

    def register(self, key: tuple, expr_builder) -> tuple:
        if key not in self.exprs:
            self.exprs[key] = expr_builder
        return key

    def to_expr(self, key: tuple, exponent) -> Expr:
        base = self.exprs[key]
        if key[0] == "exp":
            return app("exp", rmul([Rat(exponent), base])) if base is not None \
                else app("exp", Rat(exponent))
        if key[0] == "root":
            q = key[-1]
            return rpow(base, Fraction(exponent, q))
        return rpow(base, Fraction(exponent))


class Monomial:
    __slots__ = ("coeff", "zpow", "atoms")

    def __init__(self, coeff: Fraction, zpow: int, atoms: dict):
        self.coeff = coeff
        self.zpow = zpow
        self.atoms = atoms

    def copy(self):
        return Monomial(self.coeff, self.zpow, dict(self.atoms))

    def mul_atom(self, key, e):
        cur = self.atoms.get(key, 0) + e
        if cur == 0:
            self.atoms.pop(key, None)
        else:
            self.atoms[key] = cur


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    out = a.copy()
    out.coeff = out.coeff * b.coeff
    out.zpow = out.zpow + b.zpow
    for k, e in b.atoms.items():
        out.mul_atom(k, e)
    return out


class _Flattener:
    def __init__(self, var: str, reg: AtomRegistry):
        self.var = var
        self.reg = reg

    # -- atom construction -------------------------------------------------

    def _exp_atoms(self, arg: Expr, power: Fraction) -> Monomial:
        """exp(arg)^power as exp-core atoms with rational exponents."""
        m = Monomial(Fraction(1), 0, {})
        terms = arg.terms if isinstance(arg, Add) else (arg,)
        for t in terms:
            c, core = _arg_split(t)
            if core is None:
                key = self.reg.register(("exp", 0), None)
            else:
                key = self.reg.register(("exp", core.sort_key()), core)
            m.mul_atom(key, c * power)
        return m

    def _func_atom(self, e: App, power: int) -> Monomial:
        if e.func == "exp":
            return self._exp_atoms(e.arg, Fraction(power))
        key = self.reg.register(("f", e.func, e.arg.sort_key()), e)
        m = Monomial(Fraction(1), 0, {})
        m.mul_atom(key, power)
        return m

    def _root_atom(self, base: Expr, num: int, q: int) -> list:
        """base^(num/q) with q > 1: root atom with integer-part spill."""
        key = self.reg.register(("root", base.sort_key(), q), base)
        p = num % q
        spill = (num - p) // q
        out = [Monomial(Fraction(1), 0, ({key: p} if p else {}))]
        if spill:
            out = self._mul_lists(out, self._power(base, spill))
        return out

    # -- expansion ---------------------------------------------------------

    def flatten(self, e: Expr) -> list:
        if isinstance(e, Rat):
            return [] if e.value == 0 else [Monomial(e.value, 0, {})]
        if isinstance(e, Const):
            key = self.reg.register(("pi",), Const("pi"))
            return [Monomial(Fraction(1), 0, {key: 1})]
        if isinstance(e, Var):
            if e.name != self.var:
                raise ValueError(f"free variable {e.name!r}")
            return [Monomial(Fraction(1), 1, {})]
        if isinstance(e, Add):
            out = []
            for t in e.terms:
                out.extend(self.flatten(t))
            return out
        if isinstance(e, Mul):
            out = [Monomial(Fraction(1), 0, {})]
            for f in e.factors:
                out = self._mul_lists(out, self.flatten(f))
            return out
        if isinstance(e, Pow):
            num, q = e.exponent.numerator, e.exponent.denominator
            if q == 1:
                return self._power(e.base, num)
            return self._root_atom(e.base, num, q)
        if isinstance(e, App):
            return [self._func_atom(e, 1)]
        raise TypeError(type(e).__name__)

    def _power(self, base: Expr, n: int) -> list:
        if isinstance(base, Var):
            if base.name != self.var:
                raise ValueError(f"free variable {base.name!r}")
            return [Monomial(Fraction(1), n, {})]
        if isinstance(base, App):
            return [self._func_atom(base, n)]
        if isinstance(base, Pow):
            # (X^(p/q))^n
            num = base.exponent.numerator * n
            q = base.exponent.denominator
            if q == 1:
                return self._power(base.base, num)
            return self._root_atom(base.base, num, q)
        if isinstance(base, (Add, Mul)):
            if n > 0:
                out = [Monomial(Fraction(1), 0, {})]
                flat = self.flatten(base)
                for _ in range(n):
                    out = self._mul_lists(out, flat)
                return out
            # negative power of a sum: an atom cleared later by the common
            # denominator; of a product: distribute over the factors
            if isinstance(base, Mul):
                out = [Monomial(Fraction(1), 0, {})]
                for f in base.factors:
                    if isinstance(f, Rat):
                        out = [
                            Monomial(m.coeff * f.value ** n, m.zpow, m.atoms)
                            for m in out
                        ]
                        continue
                    b, ex = (f.base, f.exponent) if isinstance(f, Pow) else (f, Fraction(1))
                    exn = ex * n
                    out = self._mul_lists(
                        out, self.flatten(rpow(b, exn))
                    )
                return out
            key = self.reg.register(("sum", base.sort_key()), base)
            return [Monomial(Fraction(1), 0, {key: n})]
        if isinstance(base, Rat):
            v = _rat_pow(base.value, Fraction(n))
            return [Monomial(v, 0, {})]
        if isinstance(base, Const):
            key = self.reg.register(("pi",), Const("pi"))
            return [Monomial(Fraction(1), 0, {key: n})]
        raise TypeError(type(base).__name__)

    @staticmethod
    def _mul_lists(a: list, b: list) -> list:
        return [_mono_mul(x, y) for x in a for y in b]


# -- reductions -------------------------------------------------------------

def _reduce_monomial(m: Monomial, reg: AtomRegistry, flat: _Flattener) -> list:
    """Apply cos^2/cosh^2 reduction, root spills, and sum-atom distribution.

    Returns a list of monomials equal in value to m; every returned monomial
    is irreducible (cos/cosh exponents in {-inf..1}, root exponents in
    [0, q), no positive sum-atom powers).
    """
    for key, e in m.atoms.items():
        kind = key[0]
        if kind == "f" and key[1] in ("cos", "cosh") and isinstance(e, int) and e >= 2:
            # cos^2 -> 1 - sin^2 ; cosh^2 -> 1 + sinh^2
            base = reg.exprs[key]
            sname = "sin" if key[1] == "cos" else "sinh"
            sign = Fraction(-1) if key[1] == "cos" else Fraction(1)
            skey = reg.register(("f", sname, base.arg.sort_key()),
                                app(sname, base.arg))
            m1 = m.copy()
            m1.mul_atom(key, -2)
            m2 = m1.copy()
            m2.coeff = m2.coeff * sign
            m2.mul_atom(skey, 2)
            return _reduce_list([m1, m2], reg, flat)
        if kind == "root":
            q = key[-1]
            if isinstance(e, int) and (e < 0 or e >= q):
                p = e % q
                spill = (e - p) // q
                base = reg.exprs[key]
                m1 = m.copy()
                del m1.atoms[key]
                if p:
                    m1.atoms[key] = p
                spilled = flat._power(base, spill)
                return _reduce_list(
                    [_mono_mul(m1, s) for s in spilled], reg, flat
                )
        if kind == "sum" and isinstance(e, int) and e > 0:
            base = reg.exprs[key]
            m1 = m.copy()
            del m1.atoms[key]
            expanded = [Monomial(Fraction(1), 0, {})]
            fl = flat.flatten(base)
            for _ in range(e):
                expanded = flat._mul_lists(expanded, fl)
            return _reduce_list(
                [_mono_mul(m1, s) for s in expanded], reg, flat
            )
    return [m]


def _reduce_list(ms: list, reg: AtomRegistry, flat: _Flattener) -> list:
    out = []
    for m in ms:
        out.extend(_reduce_monomial(m, reg, flat))
    return out


def _collect(ms: list) -> dict:
    """Combine equal-bundle monomials; bundle key excludes the z power."""
    out: dict = {}
    for m in ms:
        bundle = frozenset(m.atoms.items())
        cur = out.setdefault(bundle, {})
        cur[m.zpow] = cur.get(m.zpow, Fraction(0)) + m.coeff
    return {
        b: zt for b, zt in (
            (b, {z: c for z, c in zt.items() if c != 0}) for b, zt in out.items()
        ) if zt
    }


def _zdict_to_ratfunc(zt: dict, var: str) -> RatFunc:
    shift = min(zt)
    neg = -shift if shift < 0 else 0
    deg = max(zt) + neg
    coeffs = [Fraction(0)] * (deg + 1)
    for z, c in zt.items():
        coeffs[z + neg] = c
    num = Poly(coeffs, var)
    if neg:
        den = Poly([Fraction(0)] * neg + [Fraction(1)], var)
        return RatFunc(num, den)
    return RatFunc(num)


def _clear_denominators(collected: list) -> list:
    """Multiply all decompositions by the common sum-atom denominator."""
    needed: dict = {}
    for bundles in collected:
        for b in bundles:
            for key, e in b:
                if key[0] == "sum" and e < 0:
                    needed[key] = max(needed.get(key, 0), -e)
    return needed


def decompose_common(exprs: list, var: str, reg: AtomRegistry | None = None):
    """Jointly decompose expressions over one atom basis.

    Returns (registry, [dict bundle -> RatFunc]).  All inputs are multiplied
    by the same positive product of sum atoms, clearing every negative
    sum-atom power, so a Q(z)-linear combination of the inputs vanishes iff
    the same combination of the decompositions does.
    """
    reg = reg or AtomRegistry(var)
    flat = _Flattener(var, reg)
    mono_lists = []
    for e in exprs:
        ms = _reduce_list(flat.flatten(e), reg, flat)
        mono_lists.append(ms)
    # negative powers of sum atoms hide polynomial relations between the
    # bundles, and negative cos/cosh powers hide the Pythagorean reduction;
    # both are cleared by a common positive multiplier.
    def _clearable(key, e):
        if e >= 0:
            return False
        return key[0] == "sum" or (key[0] == "f" and key[1] in ("cos", "cosh"))

    for _ in range(8):
        needed: dict = {}
        for ms in mono_lists:
            for m in ms:
                for key, e in m.atoms.items():
                    if _clearable(key, e):
                        cur = needed.get(key, 0)
                        needed[key] = max(cur, -e)
        if not needed:
            break
        mult = Monomial(Fraction(1), 0, dict(needed))
        mono_lists = [
            _reduce_list([_mono_mul(m, mult) for m in ms], reg, flat)
            for ms in mono_lists
        ]
    out = []
    for ms in mono_lists:
        coll = _collect(ms)
        out.append({b: _zdict_to_ratfunc(zt, var) for b, zt in coll.items()})
    return reg, out


def decompose(e: Expr, var: str):
    """Decompose one expression; returns (registry, dict bundle -> RatFunc)."""
    reg, (d,) = decompose_common([e], var)
    return reg, d


def bundle_to_expr(reg: AtomRegistry, bundle: frozenset) -> Expr:
    return rmul([reg.to_expr(k, e) for k, e in sorted(bundle, key=str)]) \
        if bundle else Rat(1)


# ---------------------------------------------------------------------------
# square-root collapse

def _mono_key(m: Monomial):
    return (m.zpow, tuple(sorted(m.atoms.items(), key=str)))


def _poly_from_monomials(ms: list):
    """([(atom key, denominator)], dict exponent-tuple -> Fraction) or None.

    Fractional exponents (exp atoms) are scaled to integers per atom; the
    recorded denominator undoes the scaling when rebuilding.
    """
    dens: dict = {}
    for m in ms:
        for k, e in m.atoms.items():
            d = 1 if isinstance(e, int) else e.denominator
            dens[k] = (dens.get(k, 1) * d) // math.gcd(dens.get(k, 1), d)
    vars_ = sorted(dens.items(), key=str)
    index = {k: i for i, (k, _) in enumerate(vars_)}
    nv = len(vars_) + 1  # slot 0 is the z power
    out: dict = {}
    for m in ms:
        expv = [0] * nv
        expv[0] = m.zpow
        for k, e in m.atoms.items():
            scaled = e * dens[k]
            if not isinstance(scaled, int):
                if scaled.denominator != 1:
                    return None
                scaled = int(scaled)
            expv[index[k] + 1] = scaled
        key = tuple(expv)
        out[key] = out.get(key, Fraction(0)) + m.coeff
    return vars_, {k: c for k, c in out.items() if c != 0}


def _mp_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            out[k] = out.get(k, Fraction(0)) + ca * cb
    return {k: c for k, c in out.items() if c != 0}


def _mp_sub(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, c in b.items():
        out[k] = out.get(k, Fraction(0)) - c
    return {k: c for k, c in out.items() if c != 0}


def _mp_div(a: dict, b: dict) -> dict | None:
    """Exact multivariate division via leading-term elimination."""
    if not b:
        raise ZeroDivisionError
    lead_b = max(b)
    cb = b[lead_b]
    out: dict = {}
    a = dict(a)
    guard = 0
    while a:
        guard += 1
        if guard > 10000:
            return None
        lead_a = max(a)
        k = tuple(x - y for x, y in zip(lead_a, lead_b))
        if any(x < 0 for x in k):
            return None
        q = a[lead_a] / cb
        out[k] = out.get(k, Fraction(0)) + q
        a = _mp_sub(a, _mp_mul({k: q}, b))
    return out


def _mp_sqrt(p: dict, pos: int) -> dict | None:
    """Square root over Q of a multivariate polynomial, or None.

    ``pos`` is the slot treated as the outer variable; recursion moves right.
    """
    if not p:
        return {}
    nv = len(next(iter(p)))
    if pos >= nv:
        if len(p) != 1:
            return None
        k, c = next(iter(p.items()))
        r = _rat_pow(c, HALF) if c > 0 else None
        return None if r is None else {k: r}
    degs = {k[pos] for k in p}
    if degs == {0}:
        return _mp_sqrt(p, pos + 1)
    d = max(degs)
    if d % 2:
        return None
    # coefficients as polynomials in the remaining slots
    cs: dict = {}
    for k, c in p.items():
        rest = k[:pos] + (0,) + k[pos + 1:]
        cs.setdefault(k[pos], {})[rest] = c
    mdeg = d // 2
    top = _mp_sqrt(cs.get(d, {}), pos + 1)
    if top is None or not top:
        return None
    rs = {mdeg: top}
    two_top = {k: 2 * c for k, c in top.items()}
    for step in range(1, mdeg + 1):
        tdeg = d - step
        acc = dict(cs.get(tdeg, {}))
        for i in range(mdeg - step + 1, mdeg):
            j = tdeg - i
            if j <= mdeg - step or j > mdeg or j < 0:
                continue
            if j in rs and i in rs:
                acc = _mp_sub(acc, _mp_mul(rs[i], rs[j]))
        q = _mp_div(acc, two_top)
        if q is None:
            return None
        rs[mdeg - step] = q
    # assemble and verify
    out: dict = {}
    for i, poly in rs.items():
        for rest, c in poly.items():
            k = rest[:pos] + (i,) + rest[pos + 1:]
            if c != 0:
                out[k] = c
    if _mp_sub(_mp_mul(out, out), p):
        return None
    return out


def _mp_sqrt_paired(p: dict, vars_: list, reg: AtomRegistry):
    """Root of p as (dict, cofactor Expr or None), using sin/cos pairing.

    A radicand like 4 - 4*sin^2 is no polynomial square, but dividing by
    1 - sin^2 (or 1 + sinh^2) can leave one; the half of the divisor is
    the paired cosine (hyperbolic cosine) of the same argument.
    """
    root = _mp_sqrt(p, 0)
    if root is not None:
        return root, None
    nv = len(vars_) + 1
    for i, (k, dscale) in enumerate(vars_):
        if dscale != 1 or k[0] != "f" or k[1] not in ("sin", "sinh"):
            continue
        sq = tuple(2 if j == i + 1 else 0 for j in range(nv))
        sign = Fraction(-1) if k[1] == "sin" else Fraction(1)
        q = _mp_div(p, {tuple([0] * nv): Fraction(1), sq: sign})
        if q is None:
            continue
        root = _mp_sqrt(q, 0)
        if root is not None:
            pair = "cos" if k[1] == "sin" else "cosh"
            return root, app(pair, reg.exprs[k].arg)
    return None, None


def _try_sqrt_collapse(base: Expr, exponent: Fraction, var: str) -> Expr | None:
    """Collapse base^exponent when base is a perfect square times a monomial."""
    if exponent.denominator != 2:
        return None
    reg = AtomRegistry(var)
    flat = _Flattener(var, reg)
    try:
        ms = _reduce_list(flat.flatten(base), reg, flat)
    except (ValueError, TypeError):
        return None
    if not ms:
        return None
    # factor out the atom-wise minimal monomial so negative powers clear
    common: dict = {}
    allkeys = set()
    for m in ms:
        allkeys.update(m.atoms)
    zmin = min(m.zpow for m in ms)
    for k in allkeys:
        exps = [m.atoms.get(k, 0) for m in ms]
        common[k] = min(exps)
    shifted = []
    for m in ms:
        mm = m.copy()
        mm.zpow -= zmin
        for k, e in common.items():
            if e:
                mm.mul_atom(k, -e)
        shifted.append(mm)
    # pulling a sum atom out of the denominators leaves positive powers
    # behind; distribute them before packing
    try:
        shifted = _reduce_list(shifted, reg, flat)
    except (ValueError, TypeError):
        return None
    packed = _poly_from_monomials(shifted)
    if packed is None:
        return None
    vars_, p = packed
    root, pair = _mp_sqrt_paired(p, vars_, reg)
    if root is None:
        return None
    # rebuild: candidate = monomial^(1/2) * root, then raise to the numerator;
    # halved odd exponents are fine because the oracle check below settles
    # both validity and branch sign
    parts = []
    if zmin:
        parts.append(rpow(Var(var), Fraction(zmin, 2)))
    for k, e in sorted(common.items(), key=str):
        if e:
            parts.append(reg.to_expr(k, Fraction(e, 2)))
    if pair is not None:
        parts.append(pair)
    terms = []
    for k, c in root.items():
        fs = [Rat(c)]
        if k[0]:
            fs.append(rpow(Var(var), Fraction(k[0])))
        for i, (kk, den) in enumerate(vars_):
            if k[i + 1]:
                fs.append(reg.to_expr(kk, Fraction(k[i + 1], den)))
        terms.append(rmul(fs))
    candidate_sqrt = rmul(parts + [radd(terms)]) if terms else rmul(parts)
    # choose the branch by comparing leading series coefficients
    target = rpow(base, HALF)
    for cand in (candidate_sqrt, rmul([Rat(-1), candidate_sqrt])):
        try:
            diff = expand_truncated(
                radd([target, rmul([Rat(-1), cand])]), var, 6
            )
        except (UnsupportedExpansion, ZeroDivisionError, ValueError):
            continue
        if diff.is_zero_series():
            return rpow(cand, Fraction(exponent.numerator))
    return None


def _sqrt_collapse_pass(e: Expr, var: str) -> Expr:
    if isinstance(e, (Rat, Const, Var)):
        return e
    if isinstance(e, Add):
        return radd([_sqrt_collapse_pass(t, var) for t in e.terms])
    if isinstance(e, Mul):
        return rmul([_sqrt_collapse_pass(f, var) for f in e.factors])
    if isinstance(e, Pow):
        b = _sqrt_collapse_pass(e.base, var)
        if e.exponent.denominator == 2 and isinstance(b, (Add, Mul, Pow, App)):
            hit = _try_sqrt_collapse(b, e.exponent, var)
            if hit is not None:
                return hit
        return rpow(b, e.exponent)
    if isinstance(e, App):
        return app(e.func, _sqrt_collapse_pass(e.arg, var))
    raise TypeError(type(e).__name__)


# ---------------------------------------------------------------------------
# public entry points

def canonicalize(e: Expr, var: str) -> Expr:
    """Full structural normal form pass (value-preserving rewrites only)."""
    e = _rewrite_funcs(e)
    e = _align_family(e, _TRIG)
    e = _align_family(e, _HYP)
    e = _sqrt_collapse_pass(e, var)
    return e


def structural_zero(e: Expr, var: str) -> bool:
    """True when e flattens to the empty monomial sum."""
    if isinstance(e, Rat):
        return e.value == 0
    try:
        _, d = decompose(canonicalize(e, var), var)
    except (ValueError, TypeError, ZeroDivisionError):
        return False
    return not d
