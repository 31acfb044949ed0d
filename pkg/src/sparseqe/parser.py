"""Native formula text format.

Grammar::

    document := header atom*
    header   := 'exists' NAME* ';'
    atom     := expr REL rational          -- one atom per line
    expr     := ['+'|'-'] term (('+'|'-') term)*
    term     := factor ('*' factor)*
    factor   := rational | NAME ['^' NAT]
    rational := NAT ['/' NAT]
    REL      := '<' | '>' | '=' | '<=' | '>='

Whitespace is insignificant, ``#`` starts a comment.  Variables are interned
in first-appearance order (header first), which fixes their indices; the
printer emits canonical forms, so print-then-parse is the identity on
parser-produced formulas.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .atoms import ConstVerdict, LinearAtom, Relation, Var, normalize_atom
from .errors import ParseError
from .formula import QuantFormula
from .poly import MONO_ONE, Poly, PolyAtom, mono_key, normalize_poly_atom

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:/\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><=|>=|<|>|=|\^|\*|\+|-|;)
""", re.VERBOSE)

_RELS = {"<": Relation.LT, ">": Relation.GT, "=": Relation.EQ,
         "<=": Relation.LE, ">=": Relation.GE}


def _tokenize_line(line, lineno):
    pos = 0
    hash_at = line.find("#")
    if hash_at >= 0:
        line = line[:hash_at]
    out = []
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if m is None:
            raise ParseError(lineno, pos + 1, f"unexpected character {line[pos]!r}")
        if m.lastgroup != "ws":
            out.append((m.lastgroup, m.group(), lineno, pos + 1))
        pos = m.end()
    return out


class _Interner:
    def __init__(self):
        self.by_name = {}

    def get(self, name):
        v = self.by_name.get(name)
        if v is None:
            v = Var(name, len(self.by_name))
            self.by_name[name] = v
        return v


def _parse_rational(tok):
    if "/" in tok:
        num, den = tok.split("/")
        return Fraction(int(num), int(den))
    return Fraction(int(tok))


def _parse_expr(tokens, i, interner, lineno):
    """Parse a sum of product terms into a Poly; returns (poly, next_index)."""
    poly = Poly()
    sign = 1
    expect_term = True
    n = len(tokens)
    while i < n:
        kind, text, ln, col = tokens[i]
        if kind == "op" and text in ("+", "-"):
            if expect_term and text == "-":
                sign = -sign
                i += 1
                continue
            if expect_term:
                i += 1
                continue
            sign = 1 if text == "+" else -1
            expect_term = True
            i += 1
            continue
        if kind == "op":
            break  # relation symbol or ';' ends the expression
        # parse one product term
        coeff = Fraction(sign)
        exps = {}
        saw_factor = False
        while i < n:
            kind, text, ln, col = tokens[i]
            if kind == "num":
                coeff *= _parse_rational(text)
                saw_factor = True
                i += 1
            elif kind == "name":
                v = interner.get(text)
                e = 1
                if i + 1 < n and tokens[i + 1][:2] == ("op", "^"):
                    if i + 2 >= n or tokens[i + 2][0] != "num" or "/" in tokens[i + 2][1]:
                        raise ParseError(ln, col, "exponent must be a natural number")
                    e = int(tokens[i + 2][1])
                    i += 3
                else:
                    i += 1
                exps[v] = exps.get(v, 0) + e
                saw_factor = True
            else:
                raise ParseError(ln, col, f"unexpected token {text!r} in term")
            if i < n and tokens[i][:2] == ("op", "*"):
                i += 1
                continue
            break
        if not saw_factor:
            raise ParseError(lineno, 1, "empty term")
        m = tuple(sorted(((v, e) for v, e in exps.items() if e), key=lambda p: p[0]))
        poly = poly + Poly({m: coeff})
        sign = 1
        expect_term = False
    if expect_term:
        raise ParseError(lineno, 1, "expression ends with a dangling sign")
    return poly, i


def _parse_atom_tokens(tokens, lineno, interner):
    poly, i = _parse_expr(tokens, 0, interner, lineno)
    if i >= len(tokens) or tokens[i][0] != "op" or tokens[i][1] not in _RELS:
        raise ParseError(lineno, tokens[i][3] if i < len(tokens) else 1,
                         "expected a relation symbol")
    rel = _RELS[tokens[i][1]]
    i += 1
    sign = 1
    if i < len(tokens) and tokens[i][:2] in (("op", "-"), ("op", "+")):
        sign = -1 if tokens[i][1] == "-" else 1
        i += 1
    if i >= len(tokens) or tokens[i][0] != "num":
        raise ParseError(lineno, tokens[i - 1][3], "right-hand side must be a rational")
    rhs = sign * _parse_rational(tokens[i][1])
    i += 1
    if i != len(tokens):
        raise ParseError(lineno, tokens[i][3], f"trailing input {tokens[i][1]!r}")
    return poly, rel, rhs


def parse_formula(text: str) -> QuantFormula:
    """Parse a formula document; mode (linear vs polynomial) is auto-detected."""
    interner = _Interner()
    lines = text.splitlines()
    header_done = False
    quantified = []
    pending = []  # (poly, rel, rhs, lineno)
    header_tokens = []
    for lineno, raw in enumerate(lines, 1):
        tokens = _tokenize_line(raw, lineno)
        if not tokens:
            continue
        if not header_done:
            header_tokens.extend(tokens)
            semi = next((j for j, t in enumerate(header_tokens) if t[:2] == ("op", ";")), None)
            if semi is None:
                continue
            head, rest = header_tokens[:semi], header_tokens[semi + 1:]
            if not head or head[0][:2] != ("name", "exists"):
                t = head[0] if head else (None, None, lineno, 1)
                raise ParseError(t[2], t[3], "document must start with 'exists'")
            for kind, name, ln, col in head[1:]:
                if kind != "name":
                    raise ParseError(ln, col, f"expected variable name, got {name!r}")
                if name in interner.by_name:
                    raise ParseError(ln, col, f"duplicate quantified variable {name!r}")
                quantified.append(interner.get(name))
            header_done = True
            if rest:
                pending.append((*_parse_atom_tokens(rest, lineno, interner), lineno))
            continue
        pending.append((*_parse_atom_tokens(tokens, lineno, interner), lineno))
    if not header_done:
        raise ParseError(len(lines) or 1, 1, "missing 'exists ... ;' header")

    linear = all(p.total_degree() <= 1 for p, _, _, _ in pending)
    atoms = []
    is_false = False
    for poly, rel, rhs, lineno in pending:
        if linear:
            coeffs = {m[0][0]: c for m, c in poly.terms.items() if m != MONO_ONE}
            const = poly.terms.get(MONO_ONE, 0)
            a = normalize_atom(coeffs, rhs - const, rel)
        else:
            a = normalize_poly_atom(poly - Poly.const(rhs), rel)
        if a is ConstVerdict.TriviallyTrue:
            continue
        if a is ConstVerdict.TriviallyFalse:
            is_false = True
            continue
        atoms.append(a)
    return QuantFormula(quantified, atoms, is_false=is_false)


def _format_rat(x) -> str:
    f = Fraction(x)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _format_linear(a: LinearAtom) -> str:
    if not a.coeffs:
        return f"0 {a.rel.symbol} {_format_rat(a.rhs)}"
    parts = []
    for v, c in a.coeffs:
        mag = abs(c)
        body = v.name if mag == 1 else f"{mag}*{v.name}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return f"{' '.join(parts)} {a.rel.symbol} {_format_rat(a.rhs)}"


def _format_poly(p: Poly) -> str:
    parts = []
    for m in sorted(p.terms, key=mono_key, reverse=True):
        c = Fraction(p.terms[m])
        mag = abs(c)
        if m == MONO_ONE:
            body = _format_rat(mag)
        else:
            head = "*".join(v.name if e == 1 else f"{v.name}^{e}" for v, e in m)
            body = head if mag == 1 else f"{_format_rat(mag)}*{head}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if c > 0 else f"- {body}")
    return " ".join(parts) if parts else "0"


def format_formula(f: QuantFormula, comment: str | None = None) -> str:
    """Canonical document text; ``parse_formula`` restores the formula."""
    lines = []
    if comment:
        for c in comment.splitlines():
            lines.append(f"# {c}")
    lines.append("exists " + " ".join(v.name for v in f.quantified) + " ;"
                 if f.quantified else "exists ;")
    for a in f.atoms:
        if isinstance(a, LinearAtom):
            lines.append(_format_linear(a))
        else:
            lines.append(f"{_format_poly(a.poly)} {a.rel.symbol} 0")
    if getattr(f, "is_false", False):
        lines.append("0 = 1")
    return "\n".join(lines) + "\n"


def format_constraints(atoms) -> str:
    """Quantifier-free conjunction as document text (empty exists block)."""
    parts = ["exists ;"]
    for a in sorted(atoms, key=lambda a: a.sort_key() if isinstance(a, LinearAtom) else str(a)):
        parts.append(_format_linear(a) if isinstance(a, LinearAtom)
                     else f"{_format_poly(a.poly)} {a.rel.symbol} 0")
    return "\n".join(parts) + "\n"
