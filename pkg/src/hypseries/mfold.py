"""m-fold hypergeometric term solutions of holonomic recurrences.

A term is m-fold hypergeometric when a(n+m)/a(n) is a rational function of n.
The solver splits a recurrence into its residue classes mod m, rewrites each
class on the subsequence index through n = m*k + j, computes a basis of plain
hypergeometric solutions per class with a Petkovsek-style search, and keeps
the families whose ratio appears in every class.  Confirmed ratios are turned
into closed forms built from a constant power, factorials, Pochhammer symbols
and a rational cofactor.
"""

import itertools
import math
from fractions import Fraction

from .holonomic import HolonomicRE
from .polys import (
    Poly,
    RatFunc,
    factor_rational,
    integer_roots,
    rational_roots,
    solve_linear_system,
)

try:
    import sympy as _sympy
except ImportError:  # pragma: no cover
    _sympy = None

__all__ = [
    "GPForm",
    "HyperTerm",
    "MFoldBasis",
    "gosper_petkovsek_form",
    "hyper_solutions",
    "mfold_hyper",
    "mfold_split",
]


def _split_residual(p: Poly) -> list[Poly]:
    """Split a rational-root-free block into irreducible monic parts.

    Quadratic and cubic blocks without rational roots are already irreducible
    over Q.  Higher degrees go through sympy's factorization when available;
    without it the block stays atomic, which can only shrink the candidate
    set, never corrupt a confirmed solution.
    """
    if p.degree < 4 or _sympy is None:
        return [p]
    x = _sympy.Symbol(p.var)
    expr = sum(
        _sympy.Rational(c.numerator, c.denominator) * x**i
        for i, c in enumerate(p.coeffs)
    )
    parts = []
    for q, _ in _sympy.Poly(expr, x).factor_list()[1]:
        coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(q.all_coeffs())]
        parts.append(Poly(coeffs, p.var).monic())
    return parts


def _irreducible_factors(p: Poly) -> list[tuple[Poly, int]]:
    """Monic irreducible factors of p with multiplicities (content dropped)."""
    _, facs = factor_rational(p)
    merged: dict[Poly, int] = {}
    for f in facs:
        pieces = _split_residual(f.poly) if f.residual else [f.poly]
        for q in pieces:
            merged[q] = merged.get(q, 0) + f.multiplicity
    return list(merged.items())


def _monic_divisors(p: Poly) -> list[Poly]:
    """All monic divisors of p over Q, including 1 and the monic p itself."""
    divisors = [Poly.one(p.var)]
    for q, mult in _irreducible_factors(p):
        divisors = [d * q**e for d in divisors for e in range(mult + 1)]
    return divisors


class GPForm:
    """Gosper-Petkovsek decomposition (p, q, r) of a rational ratio.

    The defining property is ratio(k) = p(k+1)/p(k) * q(k+1)/r(k+1) with
    gcd(q(k), r(k+j)) = 1 for every integer j >= 0, so that the q/r part
    carries no factor chain that telescopes into a rational function.
    """

    __slots__ = ("p", "q", "r")

    def __init__(self, p: Poly, q: Poly, r: Poly):
        self.p = p
        self.q = q
        self.r = r

    def ratio(self) -> RatFunc:
        """Reconstruct the ratio the form was derived from."""
        lhs = RatFunc(self.p.shift(1), self.p)
        return lhs * RatFunc(self.q.shift(1), self.r.shift(1))

    def __repr__(self):
        return f"GPForm(p={self.p}, q={self.q}, r={self.r})"


def _shift_match(phi: Poly, psi: Poly):
    """Nonnegative integer j with psi(k+j) == phi(k), or None.

    Both arguments are monic irreducible; a shared root under shift forces
    outright equality of the shifted polynomials, so j is pinned by the
    subleading coefficients.
    """
    if phi.degree != psi.degree or phi.degree == 0:
        return None
    diff = phi.coeff(phi.degree - 1) - psi.coeff(psi.degree - 1)
    j = diff / phi.degree
    if j.denominator != 1 or j < 0:
        return None
    return int(j) if psi.shift(int(j)) == phi else None


def gosper_petkovsek_form(ratio: RatFunc) -> GPForm:
    """Gosper-Petkovsek normal form of a nonzero rational ratio."""
    if ratio.is_zero:
        raise ValueError("ratio must be nonzero")
    var = ratio.var
    q = ratio.num.shift(-1)
    r = ratio.den.shift(-1)
    p = Poly.one(var)
    while True:
        best = None
        for phi, _ in _irreducible_factors(q):
            for psi, _ in _irreducible_factors(r):
                j = _shift_match(phi, psi)
                if j is not None and (best is None or j < best[0]):
                    best = (j, phi)
        if best is None:
            return GPForm(p, q, r)
        j, g = best
        q = q.exact_div(g)
        r = r.exact_div(g.shift(-j))
        for i in range(j):
            p = p * g.shift(-i)


def _delta_degree_candidates(q: list[Poly], var: str) -> list[int]:
    """Possible degrees of polynomial solutions c of sum q[i](n) c(n+i) = 0.

    Rewriting the shift operator through the difference operator bounds the
    degree drop exactly, and the leading coefficient of the image is an
    indicial polynomial in deg(c) whose nonnegative integer roots are the
    only candidates.
    """
    d = len(q) - 1
    rj = []
    for j in range(d + 1):
        acc = Poly.zero(var)
        for i in range(j, d + 1):
            acc = acc + q[i] * math.comb(i, j)
        rj.append(acc)
    levels = [(rj[j].degree - j, j) for j in range(d + 1) if not rj[j].is_zero]
    if not levels:
        return []
    top = max(lev for lev, _ in levels)
    ind = Poly.zero("_e")
    for lev, j in levels:
        if lev != top:
            continue
        fall = Poly.const(rj[j].leading, "_e")
        for t in range(j):
            fall = fall * Poly([Fraction(-t), Fraction(1)], "_e")
        ind = ind + fall
    return sorted(e for e in integer_roots(ind) if e >= 0)


def _poly_solutions(q: list[Poly], var: str) -> list[Poly]:
    """Basis of polynomial solutions c(n) of sum q[i](n) c(n+i) = 0."""
    candidates = _delta_degree_candidates(q, var)
    if not candidates:
        return []
    e = candidates[-1]
    cols = []
    for k in range(e + 1):
        col = Poly.zero(var)
        for i, qi in enumerate(q):
            if not qi.is_zero:
                col = col + qi * Poly([Fraction(i), Fraction(1)], var) ** k
        cols.append(col)
    height = max((c.degree for c in cols), default=-1) + 1
    if height == 0:
        # operator vanishes on every candidate monomial
        return [Poly.x(var) ** k for k in range(e + 1)]
    rows = [[cols[k].coeff(t) for k in range(e + 1)] for t in range(height)]
    sol = solve_linear_system(rows, [Fraction(0)] * height)
    out = []
    for vec in sol.nullspace:
        c = Poly([Fraction(entry(0)) for entry in vec], var)
        if not c.is_zero:
            out.append(c)
    return out


class HyperTerm:
    """Hypergeometric term h with rational ratio h(n+1)/h(n), h(start) = 1.

    ``start`` is one past the largest integer root or pole of the ratio
    (never below 0); evaluations below it are errors.  The display
    decomposition (c^n, factorial powers, Pochhammer symbols, rational
    cofactor, residual product blocks) reproduces the term up to a nonzero
    rational constant and is reconstructed from the ratio's factors, while
    value() iterates the ratio itself.
    """

    __slots__ = ("ratio", "start", "c", "fact", "fact2", "pochs", "cof", "blocks", "_vals")

    def __init__(self, ratio: RatFunc):
        if ratio.is_zero:
            raise ValueError("hypergeometric ratio must be nonzero")
        self.ratio = ratio
        roots = integer_roots(ratio.num * ratio.den)
        self.start = max(0, 1 + max(roots)) if roots else 0
        self._vals = [Fraction(1)]
        self._decompose()

    def _decompose(self):
        var = self.ratio.var
        self.c = self.ratio.num.leading / self.ratio.den.leading
        self.fact = 0
        self.fact2 = 0
        self.pochs: dict[Fraction, int] = {}
        cof_num = Poly.one(var)
        cof_den = Poly.one(var)
        self.blocks: list[tuple[Poly, int]] = []
        for poly, sign in ((self.ratio.num.monic(), 1), (self.ratio.den.monic(), -1)):
            _, facs = factor_rational(poly)
            for f in facs:
                if f.residual:
                    self.blocks.append((f.poly, sign * f.multiplicity))
                    continue
                alpha = f.poly.coeff(0)
                e = sign * f.multiplicity
                frac = alpha - math.floor(alpha)
                t = int(alpha - frac)
                if frac == 0:
                    # gamma(n + alpha) collapses onto n! and linear factors
                    self.fact += e
                    lo, hi = (1, t) if t >= 1 else (t, 0)
                    aim = e if t >= 1 else -e
                    for s in range(lo, hi + (t < 1)):
                        step = Poly([Fraction(s), Fraction(1)], var)
                        if aim > 0:
                            cof_num = cof_num * step**abs(aim)
                        else:
                            cof_den = cof_den * step**abs(aim)
                    continue
                if frac == Fraction(1, 2):
                    self.fact2 += e
                    self.fact -= e
                    self.c *= Fraction(1, 4) ** e
                else:
                    self.pochs[frac] = self.pochs.get(frac, 0) + e
                for s in range(min(t, 0), max(t, 0)):
                    step = Poly([frac + s, Fraction(1)], var)
                    if (e > 0) == (t > 0):
                        cof_num = cof_num * step**abs(e)
                    else:
                        cof_den = cof_den * step**abs(e)
        # a block pair U = V(.+s) telescopes: prod U(i)/V(i) is rational in n
        changed = True
        while changed:
            changed = False
            for iu, (u, eu) in enumerate(self.blocks):
                if eu <= 0:
                    continue
                for iv, (v, ev) in enumerate(self.blocks):
                    if ev >= 0 or v.degree != u.degree:
                        continue
                    s = (u.coeff(u.degree - 1) - v.coeff(v.degree - 1)) / u.degree
                    if s.denominator != 1 or v.shift(s) != u:
                        continue
                    s = int(s)
                    for t in range(s):
                        cof_num = cof_num * v.shift(t)
                    for t in range(s, 0):
                        cof_den = cof_den * v.shift(t)
                    self.blocks[iu] = (u, eu - 1)
                    self.blocks[iv] = (v, ev + 1)
                    self.blocks = [(p, e) for p, e in self.blocks if e]
                    changed = True
                    break
                if changed:
                    break
        self.pochs = {a: e for a, e in self.pochs.items() if e}
        self.cof = RatFunc(cof_num, cof_den)

    def value(self, n: int) -> Fraction:
        """Exact h(n) for n >= start, from the ratio recursion."""
        if n < self.start:
            raise ValueError(f"term valid from {self.start}, got {n}")
        while len(self._vals) <= n - self.start:
            k = self.start + len(self._vals) - 1
            self._vals.append(self._vals[-1] * self.ratio(Fraction(k)))
        return self._vals[n - self.start]

    def formula_value(self, n: int) -> Fraction:
        """Evaluate the display decomposition at n (h(n) up to a constant)."""
        if n < self.start:
            raise ValueError(f"term valid from {self.start}, got {n}")
        acc = self.c**n
        acc *= Fraction(math.factorial(n)) ** self.fact
        acc *= Fraction(math.factorial(2 * n)) ** self.fact2
        for a, e in self.pochs.items():
            rising = Fraction(1)
            for i in range(n):
                rising *= a + i
            acc *= rising**e
        for poly, e in self.blocks:
            prod = Fraction(1)
            for i in range(self.start, n):
                prod *= poly(Fraction(i))
            acc *= prod**e
        return acc * self.cof(Fraction(n))

    def proportional(self, other: "HyperTerm") -> bool:
        """Same one-dimensional family: equal ratio (values then agree up to Q)."""
        return self.ratio == other.ratio

    def rendered_scale(self) -> Fraction:
        """Constant ratio text-denoted value / formula_value.

        The printed cofactor clears fractions per irreducible factor, e.g.
        (n - 3/2) appears as (2*n - 3); formula_value keeps the monic form.
        """
        d = Fraction(1)
        for poly, side in ((self.cof.num, 1), (self.cof.den, -1)):
            for g, mult in _irreducible_factors(poly):
                scale = 1
                for cc in g.coeffs:
                    scale = scale * cc.denominator // math.gcd(scale, cc.denominator)
                d *= Fraction(scale) ** (side * mult)
        return d

    def _sides(self) -> tuple[list[str], list[str]]:
        var = self.ratio.var
        num: list[str] = []
        den: list[str] = []

        def push(base: str, e: int):
            (num if e > 0 else den).append(base if abs(e) == 1 else f"{base}^{abs(e)}")

        def cof_side(poly: Poly) -> list[str]:
            out = []
            for g, mult in _irreducible_factors(poly):
                scale = 1
                for cc in g.coeffs:
                    scale = scale * cc.denominator // math.gcd(scale, cc.denominator)
                text = str(g * scale)
                if " " in text:
                    text = f"({text})"
                out.append(text if mult == 1 else f"{text}^{mult}")
            return out

        c_num: list[str] = []
        c_den: list[str] = []
        if self.c != 1:
            cn, cd = self.c.numerator, self.c.denominator
            if cn == -1 and cd > 1:
                c_num.append(f"(-1)^{var}")
            elif cn != 1:
                c_num.append(f"({cn})^{var}" if cn < 0 else f"{cn}^{var}")
            if cd > 1:
                c_den.append(f"{cd}^{var}")
        num += c_num
        if self.cof.den.degree >= 1:
            den += cof_side(self.cof.den)
        den += c_den
        for a, e in sorted(self.pochs.items()):
            push(f"poch({a},{var})", e)
        if self.fact:
            push(f"{var}!", self.fact)
        if self.fact2:
            push(f"(2*{var})!", self.fact2)
        if self.cof.num.degree >= 1:
            num += cof_side(self.cof.num)
        for poly, e in self.blocks:
            push(f"prod({poly},{self.start}..{var}-1)", e)
        return num, den

    def text(self) -> str:
        """Closed form up to a nonzero rational constant, Maxima style."""
        num, den = self._sides()
        top = "*".join(num) if num else "1"
        if not den:
            return top
        bottom = "*".join(den)
        if len(den) > 1:
            bottom = f"({bottom})"
        return f"{top}/{bottom}"

    def __str__(self):
        return self.text()

    def __repr__(self):
        return f"HyperTerm({self.text()}, ratio={self.ratio}, start={self.start})"

    def to_json(self) -> dict:
        factors = []
        if self.fact:
            factors.append({"kind": "factorial", "shift": None, "exponent": self.fact})
        if self.fact2:
            factors.append({"kind": "factorial2n", "shift": None, "exponent": self.fact2})
        for a, e in sorted(self.pochs.items()):
            factors.append({"kind": "pochhammer", "shift": str(a), "exponent": e})
        for poly, e in self.blocks:
            factors.append({"kind": "product", "poly": str(poly), "exponent": e})
        return {
            "c": str(self.c),
            "factors": factors,
            "cofactor": str(self.cof),
            "ratio": str(self.ratio),
            "start": self.start,
            "text": self.text(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "HyperTerm":
        return cls(ratfunc_from_text(data["ratio"], "n"))


def _constant_candidates(re: HolonomicRE, dega: int, degb: int, notes: list[str]):
    """Nonzero rational roots of the leading-coefficient polynomial in z.

    For fixed factor degrees the top n-degree of the certificate identity is
    known without building it, and its coefficient is a polynomial in the
    ratio constant z that any solution must annihilate.
    """
    d = re.order
    degs = {i: p.degree for i, p in re.polys.items()}
    top = max(deg + i * dega + (d - i) * degb for i, deg in degs.items())
    phi = [Fraction(0)] * (d + 1)
    for i, deg in degs.items():
        if deg + i * dega + (d - i) * degb == top:
            phi[i] = re.polys[i].leading
    poly = Poly(phi, "_z")
    roots = [r for r in rational_roots(poly) if r != 0]
    if not roots:
        shifted = list(poly.coeffs)
        while shifted and shifted[0] == 0:
            shifted.pop(0)
        reduced = Poly(shifted, "_z")
        if reduced.degree >= 2 and reduced.degree % 2 == 0:
            notes.append(
                "extension field required: constant candidates of degree "
                f"{reduced.degree} have no rational roots"
            )
    return roots


def hyper_solutions(re: HolonomicRE, notes: list[str] | None = None) -> list["HyperTerm"]:
    """Basis of all hypergeometric term solutions of a holonomic RE over Q.

    Candidate ratios are z * a(n) c(n+1) / (b(n) c(n)) where a runs over the
    monic divisors of the trailing coefficient, b over those of the shifted
    leading coefficient P_d(n-d+1), z over the rational roots of the
    leading-coefficient candidate polynomial, and c over a basis of
    polynomial certificates found by degree-bounded linear algebra.  An empty
    list means there are no solutions.
    """
    if notes is None:
        notes = []
    d = re.order
    if d < 1:
        raise ValueError("recurrence must have positive order")
    var = re.var
    P = [re.polys.get(i, Poly.zero(var)) for i in range(d + 1)]
    ztab: dict[tuple[int, int], list[Fraction]] = {}
    found: dict[RatFunc, HyperTerm] = {}
    for a in _monic_divisors(P[0]):
        for b in _monic_divisors(P[d].shift(-(d - 1))):
            key = (a.degree, b.degree)
            if key not in ztab:
                ztab[key] = _constant_candidates(re, a.degree, b.degree, notes)
            if not ztab[key]:
                continue
            # certificate operator without z: Q_i = P_i * prod a-shifts * prod b-shifts
            q_base = []
            for i in range(d + 1):
                acc = P[i]
                for t in range(i):
                    acc = acc * a.shift(t)
                for t in range(i, d):
                    acc = acc * b.shift(t)
                q_base.append(acc)
            for z in ztab[key]:
                q = [qi * z**i for i, qi in enumerate(q_base)]
                for c in _poly_solutions(q, var):
                    ratio = RatFunc(a * c.shift(1) * z, b * c)
                    if ratio not in found:
                        found[ratio] = HyperTerm(ratio)
    return sorted(found.values(), key=lambda t: (t.start, str(t.ratio)))


class MFoldBasis:
    """Solutions of a holonomic RE grouped by fold: entries [(m, terms)].

    ``j`` records which residue representation the terms use (a_{m*k+j} as a
    function of k); the default output takes j = 0.  ``notes`` collects
    diagnostics such as constant candidates that exist only over an
    extension field.
    """

    __slots__ = ("entries", "j", "notes")

    def __init__(self, entries, j: int = 0, notes: list[str] | None = None):
        self.entries = entries
        self.j = j
        self.notes = sorted(set(notes or []))

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def terms_for(self, m: int) -> list[HyperTerm]:
        for mm, terms in self.entries:
            if mm == m:
                return terms
        return []

    def __str__(self):
        if not self.entries:
            return "[]"
        parts = []
        for m, terms in self.entries:
            body = ", ".join(t.text() for t in terms)
            parts.append(f"[{m}, {{{body}}}]")
        return "[" + ", ".join(parts) + "]"

    def __repr__(self):
        return f"MFoldBasis({self}, j={self.j})"

    def to_json(self) -> dict:
        return {
            "j": self.j,
            "notes": list(self.notes),
            "entries": [
                {"m": m, "terms": [t.to_json() for t in terms]}
                for m, terms in self.entries
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "MFoldBasis":
        entries = [
            (e["m"], [HyperTerm.from_json(t) for t in e["terms"]])
            for e in data["entries"]
        ]
        return cls(entries, j=data.get("j", 0), notes=data.get("notes"))


def _classes(re: HolonomicRE, m: int):
    """Partition the shifts by residue mod m, or None when not splittable.

    A nonempty class with a single term forces its subsequence to vanish, so
    no m-fold hypergeometric solution exists and the split is rejected.
    """
    classes: dict[int, dict[int, Poly]] = {}
    for s, p in re.polys.items():
        classes.setdefault(s % m, {})[s] = p
    for members in classes.values():
        if len(members) == 1:
            return None
    return classes


def mfold_split(re: HolonomicRE, m: int):
    """The m-fold component recurrences of re, or None when not splittable.

    m above the order always fails to split: every class is then a
    singleton, whose subsequence would have to vanish.
    """
    if m < 2:
        raise ValueError(f"need m >= 2, got m={m}")
    classes = _classes(re, m)
    if classes is None:
        return None
    return [HolonomicRE(classes[c], re.var) for c in sorted(classes)]


def mfold_hyper(
    re: HolonomicRE,
    field: str = "Q",
    m: int | None = None,
    j: int | None = None,
) -> MFoldBasis:
    """Basis of all m-fold hypergeometric term solutions of a holonomic RE.

    Without m, every fold from 1 to the order is tried and the result lists
    the nonempty bases as [m, terms] with terms in the residue-0
    representation.  With m (and optionally j), only that fold is solved and
    terms come out in the residue-j representation.  Splitting the RE into
    residue classes mod m, composing each class onto the subsequence index
    through n = m*k + j - c, and intersecting the per-class ratio sets keeps
    exactly the families that solve every component.
    """
    if field != "Q":
        raise ValueError("only field Q is supported; extension fields are out of scope")
    if j is not None and m is None:
        raise ValueError("j requires an explicit m")
    d = re.order
    jj = 0 if j is None else j
    if m is not None and not 0 <= jj < m:
        raise ValueError(f"need 0 <= j < m, got j={jj}")
    notes: list[str] = []
    entries = []
    for mm in [m] if m is not None else range(1, d + 1):
        if mm < 1 or mm > d:
            continue
        if mm == 1:
            terms = hyper_solutions(re, notes)
        else:
            classes = _classes(re, mm)
            if classes is None:
                continue
            bases: list[list[HyperTerm]] = []
            for c in sorted(classes):
                composed = {
                    (s - c) // mm: p.compose_affine(mm, jj - c)
                    for s, p in classes[c].items()
                }
                sols = hyper_solutions(HolonomicRE(composed, re.var), notes)
                if not sols:
                    bases = []
                    break
                bases.append(sols)
            if not bases:
                continue
            ratios = set(t.ratio for t in bases[0])
            for basis in bases[1:]:
                ratios &= set(t.ratio for t in basis)
            terms = sorted(
                (t for t in bases[0] if t.ratio in ratios),
                key=lambda t: (t.start, str(t.ratio)),
            )
        if terms:
            entries.append((mm, terms))
    return MFoldBasis(entries, j=jj, notes=notes)
