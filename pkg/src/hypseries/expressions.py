"""Expression trees for elementary closed-form functions.

Nodes are immutable and built through canonicalizing constructors: sums are
flattened with like terms collected, products fold their rational content and
merge equal bases into powers, exponentials multiply into a single ``exp``,
and rational arithmetic on constants happens eagerly.  Logarithms of products
are deliberately left alone (branch-cut safety); only ``exp``/``log``
round-trips and rational powers collapse.

The printable grammar (also accepted by :func:`parse`):

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary)?          # right associative
    atom    := INTEGER | '%pi' | NAME | NAME '(' expr ')' | '(' expr ')'

Numbers are integers; rationals are written as quotients (``3/4``).  Any NAME
that is not a known function is a variable.
"""

from __future__ import annotations

from fractions import Fraction

from .polys import Poly, RatFunc

__all__ = [
    "Expr", "Rat", "Const", "Var", "Add", "Mul", "Pow", "App",
    "radd", "rmul", "rpow", "app", "ratex",
    "differentiate", "substitute", "parse", "to_text", "to_json",
    "free_functions", "as_ratfunc", "is_rational_in",
    "ParseError", "FUNCTIONS",
]


class ParseError(ValueError):
    pass


class Expr:
    __slots__ = ()

    def __add__(self, other):
        return radd([self, ratex(other)])

    def __radd__(self, other):
        return radd([ratex(other), self])

    def __sub__(self, other):
        return radd([self, rmul([Rat(-1), ratex(other)])])

    def __rsub__(self, other):
        return radd([ratex(other), rmul([Rat(-1), self])])

    def __mul__(self, other):
        return rmul([self, ratex(other)])

    def __rmul__(self, other):
        return rmul([ratex(other), self])

    def __truediv__(self, other):
        return rmul([self, rpow(ratex(other), Fraction(-1))])

    def __rtruediv__(self, other):
        return rmul([ratex(other), rpow(self, Fraction(-1))])

    def __pow__(self, other):
        if isinstance(other, Rat):
            other = other.value
        if not isinstance(other, (int, Fraction)):
            raise TypeError("exponents must be rational")
        return rpow(self, Fraction(other))

    def __neg__(self):
        return rmul([Rat(-1), self])

    def sort_key(self):
        raise NotImplementedError

    def __repr__(self):
        return to_text(self)


class Rat(Expr):
    """Rational constant."""

    __slots__ = ("value",)

    def __init__(self, value):
        object.__setattr__(self, "value", Fraction(value))

    def __setattr__(self, k, v):
        raise AttributeError("immutable")

    def __eq__(self, other):
        return isinstance(other, Rat) and self.value == other.value

    def __hash__(self):
        return hash(("Rat", self.value))

    def sort_key(self):
        return (0, str(self.value))


class Const(Expr):
    """Declared symbolic constant; only 'pi' is recognized."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        if name != "pi":
            raise ValueError(f"unknown symbolic constant {name!r}")
        object.__setattr__(self, "name", name)

    def __setattr__(self, k, v):
        raise AttributeError("immutable")

    def __eq__(self, other):
        return isinstance(other, Const) and self.name == other.name

    def __hash__(self):
        return hash(("Const", self.name))

    def sort_key(self):
        return (1, self.name)


class Var(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)

    def __setattr__(self, k, v):
        raise AttributeError("immutable")

    def __eq__(self, other):
        return isinstance(other, Var) and self.name == other.name

    def __hash__(self):
        return hash(("Var", self.name))

    def sort_key(self):
        return (2, self.name)


class Add(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms):
        object.__setattr__(self, "terms", tuple(terms))

    def __setattr__(self, k, v):
        raise AttributeError("immutable")

    def __eq__(self, other):
        return isinstance(other, Add) and self.terms == other.terms

    def __hash__(self):
        return hash(("Add", self.terms))

    def sort_key(self):
        return (4, tuple(t.sort_key() for t in self.terms))


class Mul(Expr):
    __slots__ = ("factors",)

    def __init__(self, factors):
        object.__setattr__(self, "factors", tuple(factors))

    def __setattr__(self, k, v):
        raise AttributeError("immutable")

    def __eq__(self, other):
        return isinstance(other, Mul) and self.factors == other.factors

    def __hash__(self):
        return hash(("Mul", self.factors))

    def sort_key(self):
        return (5, tuple(f.sort_key() for f in self.factors))


class Pow(Expr):
    """base ** exponent with a rational exponent."""

    __slots__ = ("base", "exponent")

    def __init__(self, base: Expr, exponent: Fraction):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exponent", Fraction(exponent))

    def __setattr__(self, k, v):
        raise AttributeError("immutable")

    def __eq__(self, other):
        return (
            isinstance(other, Pow)
            and self.base == other.base
            and self.exponent == other.exponent
        )

    def __hash__(self):
        return hash(("Pow", self.base, self.exponent))

    def sort_key(self):
        return (6, self.base.sort_key(), str(self.exponent))


class App(Expr):
    """Application of a named elementary function to one argument."""

    __slots__ = ("func", "arg")

    def __init__(self, func: str, arg: Expr):
        if func not in FUNCTIONS:
            raise ValueError(f"unknown function {func!r}")
        object.__setattr__(self, "func", func)
        object.__setattr__(self, "arg", arg)

    def __setattr__(self, k, v):
        raise AttributeError("immutable")

    def __eq__(self, other):
        return isinstance(other, App) and self.func == other.func and self.arg == other.arg

    def __hash__(self):
        return hash(("App", self.func, self.arg))

    def sort_key(self):
        return (3, self.func, self.arg.sort_key())


ZERO = Rat(0)
ONE = Rat(1)
HALF = Fraction(1, 2)


def ratex(x) -> Expr:
    """Coerce ints/Fractions to Rat, pass expressions through."""
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Rat(x)
    raise TypeError(f"cannot build an expression from {type(x).__name__}")


def _as_coeff_rest(e: Expr) -> tuple[Fraction, Expr | None]:
    if isinstance(e, Rat):
        return e.value, None
    if isinstance(e, Mul) and isinstance(e.factors[0], Rat):
        rest = e.factors[1:]
        return e.factors[0].value, (rest[0] if len(rest) == 1 else Mul(rest))
    return Fraction(1), e


def radd(terms) -> Expr:
    """Canonical sum: flatten, fold rationals, collect like terms."""
    const = Fraction(0)
    buckets: dict = {}
    order: list = []

    def absorb(t: Expr):
        nonlocal const
        if isinstance(t, Add):
            for s in t.terms:
                absorb(s)
            return
        c, rest = _as_coeff_rest(t)
        if rest is None:
            const += c
            return
        k = rest.sort_key()
        if k in buckets:
            buckets[k] = (buckets[k][0] + c, rest)
        else:
            buckets[k] = (c, rest)
            order.append(k)

    for t in terms:
        absorb(ratex(t))

    out = []
    for k in sorted(order):
        c, rest = buckets[k]
        if c == 0:
            continue
        out.append(rest if c == 1 else rmul([Rat(c), rest]))
    if const != 0 or not out:
        out.insert(0, Rat(const))
    if len(out) == 1:
        return out[0]
    return Add(out)


def _as_base_exp(f: Expr) -> tuple[Expr, Fraction]:
    if isinstance(f, Pow):
        return f.base, f.exponent
    return f, Fraction(1)


def rmul(factors) -> Expr:
    """Canonical product: flatten, fold rationals, merge powers and exps."""
    coeff = Fraction(1)
    bases: dict = {}
    order: list = []

    def absorb(f: Expr):
        nonlocal coeff
        if isinstance(f, Mul):
            for g in f.factors:
                absorb(g)
            return
        if isinstance(f, Rat):
            coeff *= f.value
            return
        b, e = _as_base_exp(f)
        if isinstance(b, Rat):
            # rational base with rational exponent: fold what folds exactly
            folded = _rat_pow(b.value, e)
            if folded is not None:
                coeff *= folded
                return
        k = b.sort_key()
        if k in bases:
            bases[k] = (bases[k][0] + e, b)
        else:
            bases[k] = (e, b)
            order.append(k)

    for f in factors:
        absorb(ratex(f))
    if coeff == 0:
        return ZERO

    # merge exp factors into a single exponential
    exp_args = []
    out = []
    for k in sorted(order):
        e, b = bases[k]
        if e == 0:
            continue
        if isinstance(b, App) and b.func == "exp":
            exp_args.append(rmul([Rat(e), b.arg]) if e != 1 else b.arg)
            continue
        out.append(rpow(b, e))
    if exp_args:
        merged = app("exp", radd(exp_args))
        if not (isinstance(merged, Rat) and merged.value == 1):
            out.append(merged)

    out = [f for f in out if not (isinstance(f, Rat) and f.value == 1)]
    for f in out:
        if isinstance(f, Rat):
            coeff *= f.value
    out = [f for f in out if not isinstance(f, Rat)]
    out.sort(key=lambda f: f.sort_key())
    if not out:
        return Rat(coeff)
    if coeff != 1:
        out.insert(0, Rat(coeff))
    if len(out) == 1:
        return out[0]
    return Mul(out)


def _rat_pow(base: Fraction, e: Fraction) -> Fraction | None:
    """base**e as an exact Fraction, or None when it does not fold."""
    if e.denominator == 1:
        k = int(e)
        if k >= 0:
            return base ** k
        if base == 0:
            raise ZeroDivisionError("division by zero")
        return Fraction(1) / base ** (-k)
    if base == 0:
        return Fraction(0) if e > 0 else None
    if base < 0:
        return None
    # exact rational root if numerator and denominator are perfect powers
    q = e.denominator
    rn = _iroot(base.numerator, q)
    rd = _iroot(base.denominator, q)
    if rn is None or rd is None:
        return None
    return _rat_pow(Fraction(rn, rd), Fraction(e.numerator))


def _iroot(n: int, q: int) -> int | None:
    if n < 0:
        return None
    r = round(n ** (1.0 / q))
    for c in (r - 1, r, r + 1):
        if c >= 0 and c ** q == n:
            return c
    return None


def rpow(base: Expr, exponent) -> Expr:
    """Canonical power with rational exponent."""
    e = Fraction(exponent)
    base = ratex(base)
    if e == 0:
        return ONE
    if e == 1:
        return base
    if isinstance(base, Rat):
        folded = _rat_pow(base.value, e)
        if folded is not None:
            return Rat(folded)
        return Pow(base, e)
    if isinstance(base, Pow):
        inner = base.exponent
        # (x^a)^b -> x^(ab) when it cannot jump branches: integer outer
        # exponent, or a positive inner exponent on a bare variable germ.
        if e.denominator == 1 or (inner > 0 and isinstance(base.base, (Var, Rat))):
            return rpow(base.base, inner * e)
        return Pow(base, e)
    if isinstance(base, Mul):
        if e.denominator == 1:
            return rmul([rpow(f, e) for f in base.factors])
        # pull out a positive rational factor with an exact rational root
        if isinstance(base.factors[0], Rat) and base.factors[0].value > 0:
            c = base.factors[0].value
            folded = _rat_pow(c, e)
            if folded is not None:
                rest = base.factors[1:]
                rest_e = rest[0] if len(rest) == 1 else Mul(rest)
                return rmul([Rat(folded), rpow(rest_e, e)])
        return Pow(base, e)
    if isinstance(base, App) and base.func == "exp":
        return app("exp", rmul([Rat(e), base.arg]))
    return Pow(base, e)


# exact values at rational arguments (kept tiny on purpose); pi/2 multiples
# come from the inverse trig family
_EXACT = {
    ("exp", Fraction(0)): lambda: ONE,
    ("log", Fraction(1)): lambda: ZERO,
    ("sin", Fraction(0)): lambda: ZERO,
    ("cos", Fraction(0)): lambda: ONE,
    ("tan", Fraction(0)): lambda: ZERO,
    ("sec", Fraction(0)): lambda: ONE,
    ("sinh", Fraction(0)): lambda: ZERO,
    ("cosh", Fraction(0)): lambda: ONE,
    ("tanh", Fraction(0)): lambda: ZERO,
    ("asin", Fraction(0)): lambda: ZERO,
    ("asin", Fraction(1)): lambda: rmul([Rat(HALF), Const("pi")]),
    ("acos", Fraction(1)): lambda: ZERO,
    ("acos", Fraction(0)): lambda: rmul([Rat(HALF), Const("pi")]),
    ("atan", Fraction(0)): lambda: ZERO,
    ("atan", Fraction(1)): lambda: rmul([Rat(Fraction(1, 4)), Const("pi")]),
    ("atanh", Fraction(0)): lambda: ZERO,
    ("asinh", Fraction(0)): lambda: ZERO,
    ("acosh", Fraction(1)): lambda: ZERO,
}


def app(func: str, arg) -> Expr:
    """Canonical function application."""
    arg = ratex(arg)
    if func == "sqrt":
        return rpow(arg, HALF)
    if func not in FUNCTIONS:
        raise ValueError(f"unknown function {func!r}")
    if isinstance(arg, Rat):
        hit = _EXACT.get((func, arg.value))
        if hit is not None:
            return hit()
    if func == "exp":
        # exp(q*log(X) + rest) -> X^q * exp(rest) for rational q
        terms = arg.terms if isinstance(arg, Add) else (arg,)
        logs = []
        rest = []
        for t in terms:
            c, r = _as_coeff_rest(t)
            if r is not None and isinstance(r, App) and r.func == "log":
                logs.append((c, r.arg))
            else:
                rest.append(t)
        if logs:
            parts = [rpow(x, c) for c, x in logs]
            if rest:
                parts.append(App("exp", radd(rest)) if radd(rest) != ZERO else ONE)
            return rmul(parts)
        if isinstance(arg, App) and arg.func == "log":
            return arg.arg
    if func == "log" and isinstance(arg, App) and arg.func == "exp":
        return arg.arg
    return App(func, arg)


def _d_asech(a, da):
    # -1/(a*sqrt(1-a^2)) * da
    return rmul([Rat(-1), da, rpow(a, Fraction(-1)),
                 rpow(radd([ONE, rmul([Rat(-1), a, a])]), Fraction(-1, 2))])


# name -> derivative rule (arg, darg) -> Expr
FUNCTIONS = {
    "exp": lambda a, da: rmul([da, app("exp", a)]),
    "log": lambda a, da: rmul([da, rpow(a, Fraction(-1))]),
    "sin": lambda a, da: rmul([da, app("cos", a)]),
    "cos": lambda a, da: rmul([Rat(-1), da, app("sin", a)]),
    "tan": lambda a, da: rmul([da, radd([ONE, rpow(app("tan", a), Fraction(2))])]),
    "sec": lambda a, da: rmul([da, app("sec", a), app("tan", a)]),
    "csc": lambda a, da: rmul([Rat(-1), da, app("cos", a), rpow(app("csc", a), Fraction(2))]),
    "sinh": lambda a, da: rmul([da, app("cosh", a)]),
    "cosh": lambda a, da: rmul([da, app("sinh", a)]),
    "tanh": lambda a, da: rmul([da, radd([ONE, rmul([Rat(-1), rpow(app("tanh", a), Fraction(2))])])]),
    "asin": lambda a, da: rmul([da, rpow(radd([ONE, rmul([Rat(-1), a, a])]), Fraction(-1, 2))]),
    "acos": lambda a, da: rmul([Rat(-1), da, rpow(radd([ONE, rmul([Rat(-1), a, a])]), Fraction(-1, 2))]),
    "atan": lambda a, da: rmul([da, rpow(radd([ONE, rmul([a, a])]), Fraction(-1))]),
    "atanh": lambda a, da: rmul([da, rpow(radd([ONE, rmul([Rat(-1), a, a])]), Fraction(-1))]),
    "asinh": lambda a, da: rmul([da, rpow(radd([ONE, rmul([a, a])]), Fraction(-1, 2))]),
    "acosh": lambda a, da: rmul([da, rpow(radd([rmul([a, a]), Rat(-1)]), Fraction(-1, 2))]),
    "asech": _d_asech,
}


def differentiate(e: Expr, var: str) -> Expr:
    """d e / d var, staying inside the expression algebra."""
    if isinstance(e, (Rat, Const)):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.name == var else ZERO
    if isinstance(e, Add):
        return radd([differentiate(t, var) for t in e.terms])
    if isinstance(e, Mul):
        fs = e.factors
        terms = []
        for i, f in enumerate(fs):
            df = differentiate(f, var)
            if df == ZERO:
                continue
            terms.append(rmul([*fs[:i], df, *fs[i + 1:]]))
        return radd(terms) if terms else ZERO
    if isinstance(e, Pow):
        db = differentiate(e.base, var)
        if db == ZERO:
            return ZERO
        return rmul([Rat(e.exponent), rpow(e.base, e.exponent - 1), db])
    if isinstance(e, App):
        da = differentiate(e.arg, var)
        if da == ZERO:
            return ZERO
        return FUNCTIONS[e.func](e.arg, da)
    raise TypeError(f"cannot differentiate {type(e).__name__}")


def substitute(e: Expr, var: str, replacement: Expr) -> Expr:
    """Substitute replacement for the variable, rebuilding canonically."""
    if isinstance(e, Var):
        return replacement if e.name == var else e
    if isinstance(e, (Rat, Const)):
        return e
    if isinstance(e, Add):
        return radd([substitute(t, var, replacement) for t in e.terms])
    if isinstance(e, Mul):
        return rmul([substitute(f, var, replacement) for f in e.factors])
    if isinstance(e, Pow):
        return rpow(substitute(e.base, var, replacement), e.exponent)
    if isinstance(e, App):
        return app(e.func, substitute(e.arg, var, replacement))
    raise TypeError(f"cannot substitute in {type(e).__name__}")


def free_functions(e: Expr) -> set[str]:
    """Names of all function applications occurring in e."""
    if isinstance(e, App):
        return {e.func} | free_functions(e.arg)
    if isinstance(e, Add):
        return set().union(*(free_functions(t) for t in e.terms))
    if isinstance(e, Mul):
        return set().union(*(free_functions(f) for f in e.factors))
    if isinstance(e, Pow):
        return free_functions(e.base)
    return set()


def is_rational_in(e: Expr, var: str) -> bool:
    """True when e is a rational function of var over Q (no pi, no functions)."""
    if isinstance(e, Rat):
        return True
    if isinstance(e, Var):
        return True
    if isinstance(e, Const):
        return False
    if isinstance(e, Add):
        return all(is_rational_in(t, var) for t in e.terms)
    if isinstance(e, Mul):
        return all(is_rational_in(f, var) for f in e.factors)
    if isinstance(e, Pow):
        return e.exponent.denominator == 1 and is_rational_in(e.base, var)
    return False


def as_ratfunc(e: Expr, var: str) -> RatFunc:
    """Convert a rational expression to a RatFunc in var."""
    if isinstance(e, Rat):
        return RatFunc.const(e.value, var)
    if isinstance(e, Var):
        if e.name != var:
            raise ValueError(f"unexpected variable {e.name!r}")
        return RatFunc(Poly.x(var))
    if isinstance(e, Add):
        acc = RatFunc.const(0, var)
        for t in e.terms:
            acc = acc + as_ratfunc(t, var)
        return acc
    if isinstance(e, Mul):
        acc = RatFunc.const(1, var)
        for f in e.factors:
            acc = acc * as_ratfunc(f, var)
        return acc
    if isinstance(e, Pow):
        if e.exponent.denominator != 1:
            raise ValueError("fractional power is not rational")
        return as_ratfunc(e.base, var) ** int(e.exponent)
    raise ValueError(f"not a rational expression: {to_text(e)}")


# ---------------------------------------------------------------------------
# printing

_PREC_ADD, _PREC_MUL, _PREC_UNARY, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _fmt(e: Expr, prec: int) -> str:
    if isinstance(e, Rat):
        v = e.value
        if v.denominator == 1:
            s = str(v.numerator)
            need = _PREC_UNARY if v < 0 else _PREC_ATOM
        else:
            s = f"{v.numerator}/{v.denominator}"
            need = _PREC_MUL if v >= 0 else _PREC_UNARY
        return f"({s})" if need < prec else s
    if isinstance(e, Const):
        return "%pi"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Add):
        parts = [_fmt(e.terms[0], _PREC_ADD)]
        for t in e.terms[1:]:
            c, rest = _as_coeff_rest(t)
            if c < 0:
                pos = Rat(-c) if rest is None else rmul([Rat(-c), rest])
                parts.append(" - " + _fmt(pos, _PREC_MUL))
            else:
                parts.append(" + " + _fmt(t, _PREC_MUL))
        s = "".join(parts)
        return f"({s})" if _PREC_ADD < prec else s
    if isinstance(e, Mul):
        c, rest = _as_coeff_rest(e)
        if c < 0:
            pos = Rat(-c) if rest is None else (rest if c == -1 else rmul([Rat(-c), rest]))
            s = "-" + _fmt(pos, _PREC_MUL)
            return f"({s})" if _PREC_UNARY < prec else s
        num, den = [], []
        for f in e.factors:
            b, ex = _as_base_exp(f)
            if ex < 0 and not isinstance(b, Rat):
                den.append(rpow(b, -ex))
            else:
                num.append(f)
        if den:
            ns = _fmt(rmul(num) if num else ONE, _PREC_MUL)
            ds = _fmt(rmul(den), _PREC_POW)
            s = f"{ns}/{ds}"
        else:
            s = "*".join(_fmt(f, _PREC_MUL + 1 if i > 0 else _PREC_MUL)
                         for i, f in enumerate(e.factors))
        return f"({s})" if _PREC_MUL < prec else s
    if isinstance(e, Pow):
        ex = e.exponent
        if ex < 0:
            s = "1/" + _fmt(rpow(e.base, -ex), _PREC_POW)
            return f"({s})" if _PREC_MUL < prec else s
        bs = _fmt(e.base, _PREC_POW + 1)
        es = str(ex) if ex.denominator == 1 else f"({ex.numerator}/{ex.denominator})"
        s = f"{bs}^{es}"
        return f"({s})" if _PREC_POW < prec else s
    if isinstance(e, App):
        return f"{e.func}({_fmt(e.arg, 0)})"
    raise TypeError(type(e).__name__)


def to_text(e: Expr) -> str:
    """Render e in the package grammar; parse(to_text(e)) == e."""
    return _fmt(e, 0)


def to_json(e: Expr):
    """Plain-dict rendering of the tree (for the CLI's json format)."""
    if isinstance(e, Rat):
        return {"num": e.value.numerator, "den": e.value.denominator}
    if isinstance(e, Const):
        return {"const": e.name}
    if isinstance(e, Var):
        return {"var": e.name}
    if isinstance(e, Add):
        return {"sum": [to_json(t) for t in e.terms]}
    if isinstance(e, Mul):
        return {"product": [to_json(f) for f in e.factors]}
    if isinstance(e, Pow):
        return {
            "base": to_json(e.base),
            "exp": {"num": e.exponent.numerator, "den": e.exponent.denominator},
        }
    if isinstance(e, App):
        return {"func": e.func, "arg": to_json(e.arg)}
    raise TypeError(type(e).__name__)


# ---------------------------------------------------------------------------
# parsing (precedence climbing)

_TOKEN_CHARS = set("+-*/^()")


def _tokenize(text: str):
    toks = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _TOKEN_CHARS:
            toks.append((ch, ch))
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == ".":
                raise ParseError(
                    f"floating point literal at position {i}; use exact rationals like 3/10"
                )
            toks.append(("int", text[i:j]))
            i = j
            continue
        if ch == "%":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word != "%pi":
                raise ParseError(f"unknown constant {word!r}")
            toks.append(("const", "pi"))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word == "pi":
                toks.append(("const", "pi"))
            else:
                toks.append(("name", word))
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r} at position {i}")
    toks.append(("end", ""))
    return toks


class _Parser:
    def __init__(self, toks):
        self.toks = toks
        self.pos = 0

    def peek(self):
        return self.toks[self.pos]

    def take(self, kind=None):
        tok = self.toks[self.pos]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind}, found {tok[1]!r}")
        self.pos += 1
        return tok

    def expr(self) -> Expr:
        t = self.term()
        terms = [t]
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            nxt = self.term()
            terms.append(nxt if op == "+" else rmul([Rat(-1), nxt]))
        return radd(terms) if len(terms) > 1 else terms[0]

    def term(self) -> Expr:
        f = self.unary()
        factors = [f]
        while self.peek()[0] in ("*", "/"):
            op = self.take()[0]
            nxt = self.unary()
            factors.append(nxt if op == "*" else rpow(nxt, Fraction(-1)))
        return rmul(factors) if len(factors) > 1 else factors[0]

    def unary(self) -> Expr:
        if self.peek()[0] == "-":
            self.take()
            return rmul([Rat(-1), self.unary()])
        if self.peek()[0] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        b = self.atom()
        if self.peek()[0] == "^":
            self.take()
            e = self.unary()
            if isinstance(e, Rat):
                return rpow(b, e.value)
            if isinstance(b, Rat) and b.value > 0:
                # c^x with a positive rational base is exp(x*log(c))
                return app("exp", rmul([e, app("log", b)]))
            raise ParseError(
                "symbolic exponents need a positive rational base (got "
                f"{to_text(b)}^{to_text(e)})"
            )
        return b

    def atom(self) -> Expr:
        kind, val = self.peek()
        if kind == "int":
            self.take()
            return Rat(int(val))
        if kind == "const":
            self.take()
            return Const("pi")
        if kind == "(":
            self.take()
            e = self.expr()
            self.take(")")
            return e
        if kind == "name":
            self.take()
            if self.peek()[0] == "(":
                if val not in FUNCTIONS and val != "sqrt":
                    raise ParseError(f"unknown function {val!r}")
                self.take("(")
                a = self.expr()
                self.take(")")
                return app(val, a)
            if val in FUNCTIONS or val == "sqrt":
                raise ParseError(f"function {val!r} needs an argument")
            return Var(val)
        raise ParseError(f"unexpected token {val!r}")


def parse(text: str) -> Expr:
    """Parse the package grammar into a canonical expression tree."""
    if not isinstance(text, str) or not text.strip():
        raise ParseError("empty expression")
    p = _Parser(_tokenize(text))
    e = p.expr()
    p.take("end")
    return e
