"""Formal layer: affine forms, theta-product expressions, Gamma-symbol ledgers.

All coefficients are exact rationals.  A ThetaExpr is a finite product of
theta factors with affine-linear arguments, an integer exponent each, and an
exponential prefactor; a GammaProduct is a formal product of elliptic Gamma
symbols with a fixed step, tracked by the polarization/weight ledger

    pol(gamma_q(a)) = a(a-q)(2a-q) / 12q,      wt(gamma_q(a)) = -a/q,

and resolved into a ThetaExpr through the functional equation whenever its
class in Z[Hom/q] is trivial.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction

from mpmath import mp, mpc


# ---------------------------------------------------------------------------
# polynomials over Q in named symbols, with negative powers of q permitted


class Poly:
    """Sparse polynomial over Q; monomials may carry negative exponents of 'q'."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for mono, c in terms.items():
                c = Fraction(c)
                if c:
                    self.terms[mono] = self.terms.get(mono, Fraction(0)) + c
            self.terms = {m: c for m, c in self.terms.items() if c}

    @staticmethod
    def const(c):
        c = Fraction(c)
        return Poly({(): c} if c else {})

    @staticmethod
    def var(sym, exp=1):
        return Poly({((sym, exp),): Fraction(1)})

    def __add__(self, other):
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return Poly(out)

    def __sub__(self, other):
        return self + other * Fraction(-1)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Poly({m: c * Fraction(other) for m, c in self.terms.items()})
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def __neg__(self):
        return self * Fraction(-1)

    def div_q(self):
        """Divide by the symbol q (exponent bookkeeping, exact)."""
        out = {}
        for m, c in self.terms.items():
            out[_mono_mul(m, (("q", -1),))] = c
        return Poly(out)

    def __eq__(self, other):
        return isinstance(other, Poly) and self.terms == other.terms

    def is_zero(self):
        return not self.terms

    def eval(self, bind):
        total = mpc(0)
        for m, c in self.terms.items():
            v = mpc(c.numerator) / c.denominator
            for sym, e in m:
                v *= mpc(bind[sym]) ** e
            total += v
        return total

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for m, c in sorted(self.terms.items()):
            mono = "*".join("%s^%d" % (s, e) if e != 1 else s for s, e in m) or "1"
            bits.append("%s*%s" % (c, mono))
        return " + ".join(bits)


def _mono_mul(m1, m2):
    d = {}
    for s, e in m1:
        d[s] = d.get(s, 0) + e
    for s, e in m2:
        d[s] = d.get(s, 0) + e
    return tuple(sorted((s, e) for s, e in d.items() if e))


# ---------------------------------------------------------------------------
# affine forms


class AffineForm:
    """Affine-linear form sum_i c_i * sym_i + const with rational coefficients."""

    __slots__ = ("coeffs", "const")

    def __init__(self, coeffs=None, const=0):
        self.coeffs = {}
        if coeffs:
            for s, c in coeffs.items():
                c = Fraction(c)
                if c:
                    self.coeffs[s] = c
        self.const = Fraction(const)

    @staticmethod
    def var(sym, c=1):
        return AffineForm({sym: Fraction(c)})

    @staticmethod
    def const_form(c):
        return AffineForm({}, c)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            return AffineForm(self.coeffs, self.const + Fraction(other))
        out = dict(self.coeffs)
        for s, c in other.coeffs.items():
            out[s] = out.get(s, Fraction(0)) + c
        return AffineForm(out, self.const + other.const)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return AffineForm({s: -c for s, c in self.coeffs.items()}, -self.const)

    def __mul__(self, k):
        k = Fraction(k)
        return AffineForm({s: c * k for s, c in self.coeffs.items()}, self.const * k)

    __rmul__ = __mul__

    def __eq__(self, other):
        return (
            isinstance(other, AffineForm)
            and self.coeffs == other.coeffs
            and self.const == other.const
        )

    def __hash__(self):
        return hash((tuple(sorted(self.coeffs.items())), self.const))

    def key(self):
        return (tuple(sorted(self.coeffs.items())), self.const)

    def coeff(self, sym):
        return self.coeffs.get(sym, Fraction(0))

    def substitute(self, assignments):
        """Replace symbols by affine forms; assignments: sym -> AffineForm."""
        out = AffineForm({}, self.const)
        for s, c in self.coeffs.items():
            if s in assignments:
                out = out + assignments[s] * c
            else:
                out = out + AffineForm({s: c})
        return out

    def eval(self, bind):
        total = mpc(self.const.numerator) / self.const.denominator
        for s, c in self.coeffs.items():
            total += mpc(bind[s]) * mpc(c.numerator) / c.denominator
        return total

    def to_poly(self):
        terms = {((s, 1),): c for s, c in self.coeffs.items()}
        if self.const:
            terms[()] = self.const
        return Poly(terms)

    def proportional_ratio(self, other):
        """If self = r * other for a rational r (on the symbol part), return r."""
        if not other.coeffs:
            return None
        items = iter(other.coeffs.items())
        s0, c0 = next(items)
        r = self.coeff(s0) / c0
        probe = other * r
        if dict(probe.coeffs) == dict(self.coeffs):
            return r
        return None

    def __repr__(self):
        bits = []
        for s, c in sorted(self.coeffs.items()):
            bits.append("%s*%s" % (c, s))
        if self.const or not bits:
            bits.append(str(self.const))
        return " + ".join(bits)


def zvar(i):
    """The i-th curve coordinate symbol (1-based)."""
    return AffineForm.var("z%d" % i)


# ---------------------------------------------------------------------------
# polarization records


@dataclass(frozen=True)
class PolarizationRecord:
    """Symmetric quadratic form Q (rational entries) plus integer weight."""

    Q: tuple
    w: int

    @staticmethod
    def zero(n):
        return PolarizationRecord(tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(n)), 0)

    def __add__(self, other):
        n = len(self.Q)
        Q = tuple(
            tuple(self.Q[i][j] + other.Q[i][j] for j in range(n)) for i in range(n)
        )
        return PolarizationRecord(Q, self.w + other.w)

    def pullback(self, g):
        """Pull back through the integer matrix g: Q -> g^T Q g (w unchanged)."""
        rows_g = len(g)
        cols_g = len(g[0]) if rows_g else 0
        if rows_g != len(self.Q):
            raise ValueError("dimension mismatch in polarization pullback")
        Q = [[Fraction(0)] * cols_g for _ in range(cols_g)]
        for a in range(cols_g):
            for b in range(cols_g):
                s = Fraction(0)
                for i in range(rows_g):
                    for j in range(rows_g):
                        s += Fraction(g[i][a]) * self.Q[i][j] * Fraction(g[j][b])
                Q[a][b] = s
        return PolarizationRecord(tuple(tuple(r) for r in Q), self.w)


# ---------------------------------------------------------------------------
# theta expressions


class ThetaExpr:
    """Product of theta factors with an exponential prefactor; immutable.

    factors: tuple of (AffineForm, int exponent); prefactor: (constant,
    Poly exponent) meaning constant * e(poly).  Evaluation memoizes per
    (bindings, precision) key.
    """

    __slots__ = ("factors", "pref_const", "pref_exp", "arity", "_cache", "_lock")

    def __init__(self, factors=(), pref_const=1, pref_exp=None, arity=0):
        canon = []
        for form, m in factors:
            m = int(m)
            if m:
                canon.append((form, m))
        self.factors = tuple(canon)
        self.pref_const = pref_const
        self.pref_exp = pref_exp if pref_exp is not None else Poly()
        self.arity = arity
        self._cache = {}
        self._lock = threading.Lock()

    @staticmethod
    def one(arity=0):
        return ThetaExpr((), 1, None, arity)

    @staticmethod
    def theta(form, arity=0):
        return ThetaExpr(((form, 1),), 1, None, arity)

    def __mul__(self, other):
        if isinstance(other, ThetaExpr):
            return ThetaExpr(
                self.factors + other.factors,
                _cmul(self.pref_const, other.pref_const),
                self.pref_exp + other.pref_exp,
                max(self.arity, other.arity),
            )
        return ThetaExpr(self.factors, _cmul(self.pref_const, other), self.pref_exp, self.arity)

    def power(self, k):
        k = int(k)
        return ThetaExpr(
            tuple((f, m * k) for f, m in self.factors),
            _cpow(self.pref_const, k),
            self.pref_exp * k,
            self.arity,
        )

    def inverse(self):
        return self.power(-1)

    def weight(self):
        return -sum(m for _, m in self.factors)

    def polarization_poly(self):
        """sum_i m_i * l_i^2 / 2 as a polynomial (all symbols included)."""
        total = Poly()
        for form, m in self.factors:
            p = form.to_poly()
            total = total + p * p * Fraction(m, 2)
        return total

    def zpart_quadratic(self, n):
        """The z-variable quadratic form of the polarization as a matrix."""
        Q = [[Fraction(0)] * n for _ in range(n)]
        for form, m in self.factors:
            for i in range(n):
                ci = form.coeff("z%d" % (i + 1))
                if not ci:
                    continue
                for j in range(n):
                    cj = form.coeff("z%d" % (j + 1))
                    Q[i][j] += Fraction(m) * ci * cj
        return tuple(tuple(row) for row in Q)

    def polarization_record(self, n):
        return PolarizationRecord(self.zpart_quadratic(n), self.weight())

    def is_function_on_curve_power(self, n):
        """Whether the well-definedness constraints hold (weight 0, trivial form)."""
        if self.weight() != 0:
            return False
        Q = self.zpart_quadratic(n)
        return all(not Q[i][j] for i in range(n) for j in range(n))

    def denominator_forms(self):
        return tuple(f for f, m in self.factors if m < 0)

    def substitute(self, assignments):
        return ThetaExpr(
            tuple((f.substitute(assignments), m) for f, m in self.factors),
            self.pref_const,
            _poly_substitute(self.pref_exp, assignments),
            self.arity,
        )

    def eval(self, ctx, bind, skip=None):
        """Evaluate at the bindings; `skip` omits one factor index (numerator path)."""
        key = None
        if skip is None:
            key = (tuple(sorted((s, _ckey(v)) for s, v in bind.items())), ctx.prec)
            hit = self._cache.get(key)
            if hit is not None:
                return hit
        with mp.workprec(ctx.prec + 16):
            val = mpc(self.pref_const if not isinstance(self.pref_const, Fraction)
                      else mpc(self.pref_const.numerator) / self.pref_const.denominator)
            if self.pref_exp.terms:
                val *= ctx.e(self.pref_exp.eval(bind))
            for idx, (form, m) in enumerate(self.factors):
                if skip is not None and idx == skip:
                    continue
                val *= ctx.theta(form.eval(bind)) ** m
        if key is not None:
            with self._lock:
                self._cache[key] = val
        return val

    def __repr__(self):
        bits = []
        if self.pref_const != 1 or self.pref_exp.terms:
            bits.append("pref(%s, e(%s))" % (self.pref_const, self.pref_exp))
        for f, m in self.factors:
            bits.append("theta(%s)^%d" % (f, m))
        return " * ".join(bits) if bits else "1"


def _cmul(a, b):
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a * b
    return mpc(a) * mpc(b) if not (a == 1) else b if not (b == 1) else 1


def _cpow(a, k):
    if isinstance(a, Fraction):
        return a ** k
    if a == 1:
        return 1
    return mpc(a) ** k


def _ckey(v):
    v = mpc(v)
    return (v.real._mpf_, v.imag._mpf_)


def _poly_substitute(poly, assignments):
    out = Poly()
    for mono, c in poly.terms.items():
        term = Poly.const(c)
        for s, e in mono:
            if s in assignments and e > 0:
                p = assignments[s].to_poly()
                for _ in range(e):
                    term = term * p
            else:
                term = term * Poly.var(s, e)
        out = out + term
    return out


# ---------------------------------------------------------------------------
# Gamma products


@dataclass(frozen=True)
class Unbalanced:
    """Non-trivial class of a Gamma product; carries the residual ledger."""

    residual: tuple  # tuple of (class representative AffineForm, net exponent)


class GammaProduct:
    """Formal product prod_i gamma_step(a_i)^{m_i} with a common step form."""

    __slots__ = ("step", "terms")

    def __init__(self, step=None, terms=()):
        self.step = step if step is not None else AffineForm.var("q")
        canon = []
        for form, m in terms:
            m = int(m)
            if m:
                canon.append((form, m))
        self.terms = tuple(canon)

    @staticmethod
    def one():
        return GammaProduct(terms=())

    def __mul__(self, other):
        if self.step != other.step:
            raise ValueError("Gamma products with different steps")
        return GammaProduct(self.step, self.terms + other.terms)

    def inverse(self):
        return GammaProduct(self.step, tuple((f, -m) for f, m in self.terms))

    def substitute(self, assignments):
        return GammaProduct(
            self.step.substitute(assignments),
            tuple((f.substitute(assignments), m) for f, m in self.terms),
        )

    def polarization_poly(self):
        """Ledger polarization sum m * a(a-q)(2a-q)/12q, q = the step."""
        q = self.step.to_poly()
        total = Poly()
        for form, m in self.terms:
            a = form.to_poly()
            p = a * (a - q) * (a * 2 - q) * Fraction(m, 12)
            total = total + _poly_div_form(p, self.step)
        return total

    def weight_poly(self):
        """Ledger weight sum m * (-a/q)."""
        total = Poly()
        for form, m in self.terms:
            total = total + _poly_div_form(form.to_poly() * Fraction(-m), self.step)
        return total

    def _classes(self):
        """Group terms by argument modulo integer multiples of the step."""
        classes = []  # list of [rep AffineForm, dict k -> exponent]
        for form, m in self.terms:
            placed = False
            for cls in classes:
                rep = cls[0]
                diff = form - rep
                r = _integer_step_multiple(diff, self.step)
                if r is not None:
                    cls[1][r] = cls[1].get(r, 0) + m
                    placed = True
                    break
            if not placed:
                classes.append([form, {0: m}])
        return classes

    def is_balanced(self):
        return all(sum(ks.values()) == 0 for _, ks in self._classes())

    def reduce(self, arity=0):
        """Resolve a balanced product into a ThetaExpr; else return Unbalanced.

        gamma(a + k*step) = theta(a; step)_k * gamma(a), so within each class
        the Gamma symbols cancel and the theta shifted factorials remain.
        """
        classes = self._classes()
        residual = []
        for rep, ks in classes:
            net = sum(ks.values())
            if net:
                residual.append((rep, net))
        if residual:
            return Unbalanced(tuple(residual))
        factors = []
        for rep, ks in classes:
            for k, m in ks.items():
                if not m:
                    continue
                if k >= 0:
                    for i in range(k):
                        factors.append((rep + self.step * i, m))
                else:
                    for i in range(1, -k + 1):
                        factors.append((rep - self.step * i, -m))
        return ThetaExpr(tuple(factors), 1, None, arity)

    def __repr__(self):
        return " * ".join("Gamma(%s)^%d" % (f, m) for f, m in self.terms) or "Gamma()"


def _integer_step_multiple(diff, step):
    """If diff == n*step with n an integer, return n, else None."""
    if not diff.coeffs and not diff.const:
        return 0
    # match against n*step: pick any anchor coefficient of step
    if step.coeffs:
        sym, c = next(iter(step.coeffs.items()))
        n = diff.coeff(sym) / c
    elif step.const:
        n = diff.const / step.const
    else:
        return None
    if n.denominator != 1:
        return None
    if (step * n).key() == diff.key():
        return int(n)
    return None


def _poly_div_form(poly, form):
    """Divide a polynomial by an affine form c*q (single-symbol) exactly."""
    syms = list(form.coeffs.items())
    if form.const or len(syms) != 1:
        raise ValueError("step must be a rational multiple of a single symbol")
    sym, c = syms[0]
    out = {}
    for mono, coeff in poly.terms.items():
        out[_mono_mul(mono, ((sym, -1),))] = coeff / c
    return Poly(out)


def gamma_product_reduce(product, arity=0):
    """Resolve a balanced GammaProduct to a ThetaExpr, else Unbalanced."""
    return product.reduce(arity=arity)
