"""Variables, relations, and exact-rational linear atoms.

A linear atom is stored in canonical form: integer coefficients with
collective gcd 1 and no zero entries, a rational right-hand side, and a
relation from {<, <=, =} (>, >= are removed by negating both sides).
Equalities additionally have a positive coefficient on their lowest-index
variable.  Canonical form makes duplicate detection a set lookup.
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction

from .errors import MissingAssignment


class Var:
    """A named variable with a stable ordering key."""

    __slots__ = ("name", "index", "_hash")

    def __init__(self, name: str, index: int):
        self.name = name
        self.index = index
        self._hash = hash((name, index))

    def __repr__(self):
        return f"Var({self.name!r}, {self.index})"

    def __str__(self):
        return self.name

    def __eq__(self, other):
        return isinstance(other, Var) and self.index == other.index and self.name == other.name

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return (self.index, self.name) < (other.index, other.name)


class Relation(enum.Enum):
    LT = "<"
    GT = ">"
    EQ = "="
    LE = "<="
    GE = ">="

    @property
    def symbol(self):
        return self.value


#: Relations permitted in canonical atoms.
CANONICAL_RELATIONS = (Relation.LT, Relation.LE, Relation.EQ)

_FLIP = {Relation.GT: Relation.LT, Relation.GE: Relation.LE}


class ConstVerdict(enum.Enum):
    """Outcome of a constraint whose variables all cancelled."""

    TriviallyTrue = True
    TriviallyFalse = False


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def _simplify_rat(x):
    """Collapse integral Fractions to plain ints (cheaper arithmetic, same value)."""
    if isinstance(x, Fraction) and x.denominator == 1:
        return x.numerator
    return x


class LinearAtom:
    """Canonical linear constraint ``sum(coeff * var) rel rhs``.

    Instances are immutable, hashable, and only produced by
    :func:`normalize_atom` (or internally by the FME engine, which keeps its
    results canonical).  Syntactic equality coincides with canonical-form
    equality.
    """

    __slots__ = ("coeffs", "rhs", "rel", "_hash")

    def __init__(self, coeffs, rhs, rel, _trusted=False):
        if not _trusted:
            raise TypeError("use normalize_atom() to build canonical atoms")
        self.coeffs = coeffs        # tuple[(Var, int)], sorted by var
        self.rhs = rhs              # int or Fraction
        self.rel = rel              # Relation in CANONICAL_RELATIONS
        self._hash = hash((coeffs, rhs, rel))

    def __eq__(self, other):
        return (isinstance(other, LinearAtom)
                and self._hash == other._hash
                and self.coeffs == other.coeffs
                and self.rhs == other.rhs
                and self.rel == other.rel)

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        return (len(self.coeffs),
                tuple((v.index, c) for v, c in self.coeffs),
                _as_fraction(self.rhs),
                self.rel.value)

    def coeff(self, var: Var) -> int:
        for v, c in self.coeffs:
            if v == var:
                return c
        return 0

    def vars(self) -> frozenset:
        return frozenset(v for v, _ in self.coeffs)

    def __repr__(self):
        return f"LinearAtom({self!s})"

    def __str__(self):
        if not self.coeffs:
            lhs = "0"
        else:
            parts = []
            for v, c in self.coeffs:
                if c == 1:
                    term = v.name
                elif c == -1:
                    term = f"-{v.name}"
                else:
                    term = f"{c}*{v.name}"
                if parts and not term.startswith("-"):
                    parts.append(f"+ {term}")
                elif parts:
                    parts.append(f"- {term[1:]}")
                else:
                    parts.append(term)
            lhs = " ".join(parts)
        return f"{lhs} {self.rel.symbol} {self.rhs}"


def normalize_atom(coeffs, rhs, rel: Relation):
    """Canonicalize a raw linear constraint.

    ``coeffs`` maps variables to rational coefficients (zeros allowed, they
    are dropped).  Returns a :class:`LinearAtom`, or a :class:`ConstVerdict`
    when no variable survives simplification.
    """
    if rel in _FLIP:
        coeffs = {v: -_as_fraction(c) for v, c in coeffs.items()}
        rhs = -_as_fraction(rhs)
        rel = _FLIP[rel]
    items = sorted(((v, _as_fraction(c)) for v, c in coeffs.items() if c != 0),
                   key=lambda vc: vc[0])
    rhs = _as_fraction(rhs)

    if not items:
        if rel is Relation.EQ:
            ok = rhs == 0
        elif rel is Relation.LT:
            ok = 0 < rhs
        else:
            ok = 0 <= rhs
        return ConstVerdict.TriviallyTrue if ok else ConstVerdict.TriviallyFalse

    denom_lcm = 1
    for _, c in items:
        denom_lcm = denom_lcm * c.denominator // math.gcd(denom_lcm, c.denominator)
    ints = [(v, int(c * denom_lcm)) for v, c in items]
    rhs = rhs * denom_lcm

    g = 0
    for _, c in ints:
        g = math.gcd(g, abs(c))
    if g > 1:
        ints = [(v, c // g) for v, c in ints]
        rhs = rhs / g

    # Equalities are sign-free: fix the lowest-index coefficient positive.
    if rel is Relation.EQ and ints[0][1] < 0:
        ints = [(v, -c) for v, c in ints]
        rhs = -rhs

    return LinearAtom(tuple(ints), _simplify_rat(rhs), rel, _trusted=True)


def eval_atom(atom, point) -> bool:
    """Evaluate an atom at a rational point (exact arithmetic).

    Works for linear and polynomial atoms alike.  Raises
    :class:`MissingAssignment` if the point leaves an atom variable unbound.
    """
    if isinstance(atom, LinearAtom):
        total = Fraction(0)
        for v, c in atom.coeffs:
            if v not in point:
                raise MissingAssignment(f"variable {v.name} unassigned")
            total += c * _as_fraction(point[v])
        lhs, rhs = total, _as_fraction(atom.rhs)
        rel = atom.rel
    else:
        lhs, rhs, rel = atom.eval_lhs(point), Fraction(0), atom.rel
    if rel is Relation.LT:
        return lhs < rhs
    if rel is Relation.LE:
        return lhs <= rhs
    if rel is Relation.EQ:
        return lhs == rhs
    if rel is Relation.GT:
        return lhs > rhs
    return lhs >= rhs


def atom_vars(atom) -> frozenset:
    """Variables with nonzero coefficient/exponent in the atom."""
    return atom.vars()
