"""Sparse multivariate polynomials over exact rationals.

A monomial is a sorted tuple of ``(Var, exponent)`` pairs with all exponents
positive; the empty tuple is the constant monomial.  A polynomial maps
monomials to nonzero rational coefficients.  Term order for printing,
hashing, and sign normalization is graded lexicographic with lower-index
variables ranked higher.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .atoms import ConstVerdict, Relation, Var, _FLIP, _as_fraction, _simplify_rat
from .errors import MissingAssignment

Monomial = tuple
MONO_ONE: Monomial = ()


def mono(pairs) -> Monomial:
    """Build a monomial from (var, exponent) pairs; zero exponents dropped."""
    return tuple(sorted(((v, int(e)) for v, e in pairs if e), key=lambda p: p[0]))


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps = {}
    for v, e in a:
        exps[v] = e
    for v, e in b:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items(), key=lambda p: p[0]))


def mono_total_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def mono_degree_in(m: Monomial, x: Var) -> int:
    for v, e in m:
        if v == x:
            return e
    return 0


def mono_key(m: Monomial):
    """Graded-lex sort key; larger key = larger monomial."""
    return (mono_total_degree(m), tuple((-v.index, e) for v, e in m))


def _mono_str(m: Monomial) -> str:
    if not m:
        return "1"
    return "*".join(v.name if e == 1 else f"{v.name}^{e}" for v, e in m)


class Poly:
    """Immutable sparse polynomial.

    The raw constructor trusts its input: monomial keys must be sorted by
    variable and zero-coefficient entries absent.  Use :meth:`from_pairs`
    when building from unnormalized data.  Never mutate ``terms``.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        self.terms = dict(terms) if terms else {}
        self._hash = None

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def const(cls, c):
        c = _simplify_rat(_as_fraction(c))
        return cls({MONO_ONE: c}) if c != 0 else cls()

    @classmethod
    def variable(cls, v: Var):
        return cls({((v, 1),): 1})

    @classmethod
    def from_pairs(cls, pairs):
        """Build from (monomial, coefficient) pairs, normalizing monomials."""
        terms = {}
        for m, c in pairs:
            m = mono(m)
            c = terms.get(m, 0) + _as_fraction(c)
            if c == 0:
                terms.pop(m, None)
            else:
                terms[m] = _simplify_rat(c)
        return cls(terms)

    # -- structure ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and MONO_ONE in self.terms)

    def const_value(self):
        return self.terms.get(MONO_ONE, 0)

    def vars(self) -> frozenset:
        out = set()
        for m in self.terms:
            for v, _ in m:
                out.add(v)
        return frozenset(out)

    def degree_in(self, x: Var) -> int:
        return max((mono_degree_in(m, x) for m in self.terms), default=0)

    def total_degree(self) -> int:
        return max((mono_total_degree(m) for m in self.terms), default=0)

    def leading_term(self):
        """(monomial, coefficient) of the graded-lex leading term; requires nonzero."""
        m = max(self.terms, key=mono_key)
        return m, self.terms[m]

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        terms = dict(self.terms)
        for m, c in other.terms.items():
            s = terms.get(m, 0) + c
            if s == 0:
                terms.pop(m, None)
            else:
                terms[m] = _simplify_rat(s)
        return Poly(terms)

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        if len(self.terms) > len(other.terms):
            self, other = other, self
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                s = out.get(m, 0) + c1 * c2
                if s == 0:
                    out.pop(m, None)
                else:
                    out[m] = s
        return Poly({m: _simplify_rat(c) for m, c in out.items()})

    __rmul__ = __mul__

    def scale(self, c):
        c = _as_fraction(c)
        if c == 0:
            return Poly()
        return Poly({m: _simplify_rat(x * c) for m, x in self.terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def derivative(self, x: Var):
        out = {}
        for m, c in self.terms.items():
            e = mono_degree_in(m, x)
            if not e:
                continue
            dm = mono((v, ev - 1 if v == x else ev) for v, ev in m)
            out[dm] = out.get(dm, 0) + c * e
        return Poly({m: c for m, c in out.items() if c != 0})

    def eval(self, point) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            val = _as_fraction(c)
            for v, e in m:
                if v not in point:
                    raise MissingAssignment(f"variable {v.name} unassigned")
                val *= _as_fraction(point[v]) ** e
            total += val
        return total

    def subs(self, x: Var, value) -> "Poly":
        """Substitute a rational value for one variable."""
        value = _as_fraction(value)
        out = Poly()
        for m, c in self.terms.items():
            e = mono_degree_in(m, x)
            rest = mono((v, ev) for v, ev in m if v != x)
            out = out + Poly({rest: 1}).scale(_as_fraction(c) * value ** e)
        return out

    # -- univariate views ----------------------------------------------

    def as_univariate(self, x: Var):
        """Dense coefficient list in ``x``, ascending power; empty for zero."""
        d = self.degree_in(x)
        if self.is_zero():
            return []
        out = [dict() for _ in range(d + 1)]
        for m, c in self.terms.items():
            e = mono_degree_in(m, x)
            rest = mono((v, ev) for v, ev in m if v != x)
            out[e][rest] = out[e].get(rest, 0) + c
        return [Poly({m: c for m, c in t.items() if c != 0}) for t in out]

    @staticmethod
    def from_univariate(coeffs, x: Var) -> "Poly":
        """Inverse of :meth:`as_univariate`."""
        total = {}
        for e, p in enumerate(coeffs):
            if p.is_zero():
                continue
            m_x = MONO_ONE if e == 0 else ((x, e),)
            for m, c in p.terms.items():
                mm = mono_mul(m, m_x)
                total[mm] = total.get(mm, 0) + c
        return Poly({m: c for m, c in total.items() if c != 0})

    # -- canonical form -------------------------------------------------

    def primitive_rational(self):
        """Split ``f = c * g`` with ``c`` a positive rational and ``g`` integer
        primitive (coefficient gcd 1), sign of ``g`` matching ``f``.

        Returns ``(c, g)``; for the zero polynomial returns ``(1, 0)``.
        """
        if self.is_zero():
            return Fraction(1), self
        denom_lcm = 1
        for c in self.terms.values():
            d = _as_fraction(c).denominator
            denom_lcm = denom_lcm * d // math.gcd(denom_lcm, d)
        g = 0
        for c in self.terms.values():
            g = math.gcd(g, abs(int(_as_fraction(c) * denom_lcm)))
        scale = Fraction(g, denom_lcm)
        return scale, Poly({m: int(_as_fraction(c) / scale) for m, c in self.terms.items()})

    def canonical(self) -> "Poly":
        """Primitive integer form with positive graded-lex leading coefficient."""
        if self.is_zero():
            return self
        _, g = self.primitive_rational()
        _, lc = g.leading_term()
        return -g if lc < 0 else g

    # -- dunder plumbing -------------------------------------------------

    def _key(self):
        return tuple(sorted(((m, _as_fraction(c)) for m, c in self.terms.items()),
                            key=lambda t: mono_key(t[0])))

    def __eq__(self, other):
        if not isinstance(other, Poly):
            if self.is_constant():
                return _as_fraction(self.const_value()) == _as_fraction(other)
            return NotImplemented
        if len(self.terms) != len(other.terms):
            return False
        for m, c in self.terms.items():
            if m not in other.terms or _as_fraction(other.terms[m]) != _as_fraction(c):
                return False
        return True

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __repr__(self):
        return f"Poly({self!s})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=mono_key, reverse=True):
            c = self.terms[m]
            body = _mono_str(m)
            if m == MONO_ONE:
                term = str(c)
            elif c == 1:
                term = body
            elif c == -1:
                term = f"-{body}"
            else:
                term = f"{c}*{body}"
            if parts and not term.startswith("-"):
                parts.append(f"+ {term}")
            elif parts:
                parts.append(f"- {term[1:]}")
            else:
                parts.append(term)
        return " ".join(parts)


class PolyAtom:
    """Canonical polynomial constraint ``poly rel 0``.

    Canonicalization matches :class:`~sparseqe.atoms.LinearAtom`: the
    polynomial is reduced to primitive integer form, >/>= flip to </<= by
    negation, and equalities get a positive leading coefficient.
    """

    __slots__ = ("poly", "rel", "_hash")

    def __init__(self, poly, rel, _trusted=False):
        if not _trusted:
            raise TypeError("use normalize_poly_atom() to build canonical atoms")
        self.poly = poly
        self.rel = rel
        self._hash = hash((poly, rel))

    def __eq__(self, other):
        return (isinstance(other, PolyAtom) and self.rel == other.rel
                and self.poly == other.poly)

    def __hash__(self):
        return self._hash

    def vars(self) -> frozenset:
        return self.poly.vars()

    def eval_lhs(self, point) -> Fraction:
        return self.poly.eval(point)

    def __repr__(self):
        return f"PolyAtom({self!s})"

    def __str__(self):
        return f"{self.poly} {self.rel.symbol} 0"


def normalize_poly_atom(poly: Poly, rel: Relation):
    """Canonicalize ``poly rel 0``; constants collapse to a verdict."""
    if rel in _FLIP:
        poly, rel = -poly, _FLIP[rel]
    if poly.is_constant():
        c = _as_fraction(poly.const_value())
        if rel is Relation.EQ:
            ok = c == 0
        elif rel is Relation.LT:
            ok = c < 0
        else:
            ok = c <= 0
        return ConstVerdict.TriviallyTrue if ok else ConstVerdict.TriviallyFalse
    _, prim = poly.primitive_rational()
    if rel is Relation.EQ:
        _, lc = prim.leading_term()
        if lc < 0:
            prim = -prim
    return PolyAtom(prim, rel, _trusted=True)
