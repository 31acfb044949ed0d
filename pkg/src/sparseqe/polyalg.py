"""Exact multivariate polynomial algebra.

Everything here is deterministic and exact: gcd via primitive
pseudo-remainder sequences, resultants via fraction-free Bareiss elimination
on the Sylvester matrix, discriminants with a checked exact division.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .atoms import Var, _as_fraction
from .errors import DegreeTooLow, DegreeZero, InexactDivision, ZeroPolynomial
from .poly import Poly, mono_key


def deg(f: Poly, x: Var) -> int:
    """Degree of ``f`` in ``x``; 0 when ``x`` is absent."""
    return f.degree_in(x)


def coeffs(f: Poly, x: Var):
    """Nonzero coefficients of ``f`` viewed as univariate in ``x``, descending degree."""
    dense = f.as_univariate(x)
    return [c for c in reversed(dense) if not c.is_zero()]


def poly_div_exact(f: Poly, g: Poly) -> Poly:
    """Quotient of an exact division ``f / g``; raises InexactDivision otherwise."""
    if g.is_zero():
        raise ZeroPolynomial("division by the zero polynomial")
    if f.is_zero():
        return f
    if g.is_constant():
        return f.scale(Fraction(1) / _as_fraction(g.const_value()))
    q = {}
    r = f
    gm, gc = g.leading_term()
    gm_map = dict(gm)
    while not r.is_zero():
        rm, rc = r.leading_term()
        rm_map = dict(rm)
        qm_map = {}
        for v, e in gm_map.items():
            re = rm_map.get(v, 0)
            if re < e:
                raise InexactDivision(f"{g} does not divide {f}")
            qm_map[v] = re - e
        for v, e in rm_map.items():
            if v not in gm_map:
                qm_map[v] = e
        qm = tuple(sorted(((v, e) for v, e in qm_map.items() if e), key=lambda p: p[0]))
        qc = _as_fraction(rc) / _as_fraction(gc)
        q[qm] = q.get(qm, 0) + qc
        r = r - Poly({qm: qc}) * g
        if not r.is_zero() and mono_key(r.leading_term()[0]) >= mono_key(rm):
            raise InexactDivision("no reduction progress")  # defensive; unreachable
    return Poly({m: c for m, c in q.items() if c != 0})


def _rat_gcd(a: Fraction, b: Fraction) -> Fraction:
    a, b = _as_fraction(a), _as_fraction(b)
    num = math.gcd(abs(a.numerator), abs(b.numerator))
    den = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
    return Fraction(num, den)


def _gcd_full(f: Poly, g: Poly, main: Var | None = None) -> Poly:
    """GCD including the numeric content, positive leading coefficient."""
    if f.is_zero():
        c, p = g.primitive_rational()
        return (p if p.is_zero() or p.leading_term()[1] > 0 else -p).scale(c)
    if g.is_zero():
        return _gcd_full(g, f)
    cf, pf = f.primitive_rational()
    cg, pg = g.primitive_rational()
    num = _rat_gcd(cf, cg)
    if pf.is_constant() or pg.is_constant():
        return Poly.const(num)
    if pf.leading_term()[1] < 0:
        pf = -pf
    if pg.leading_term()[1] < 0:
        pg = -pg

    candidates = pf.vars() | pg.vars()
    x = main if main is not None and main in candidates else max(candidates)

    def content_and_primitive(p):
        parts = [c for c in p.as_univariate(x) if not c.is_zero()]
        cont = parts[0]
        for c in parts[1:]:
            cont = _gcd_full(cont, c)
            if cont.is_constant():
                break
        return cont, poly_div_exact(p, cont)

    ca, pa = content_and_primitive(pf)
    cb, pb = content_and_primitive(pg)
    cont = _gcd_full(ca, cb)

    # primitive PRS in x
    u, v = pa, pb
    if u.degree_in(x) < v.degree_in(x):
        u, v = v, u
    while True:
        r = _prem(u, v, x)
        if r.is_zero():
            head = v
            break
        if r.degree_in(x) == 0:
            head = Poly.const(1)
            break
        _, r = r.primitive_rational()
        rc = [c for c in r.as_univariate(x) if not c.is_zero()]
        rcont = rc[0]
        for c in rc[1:]:
            rcont = _gcd_full(rcont, c)
            if rcont.is_constant():
                break
        u, v = v, poly_div_exact(r, rcont)
    _, head = head.primitive_rational()
    if head.leading_term()[1] < 0:
        head = -head
    return (cont * head).scale(num)


def _prem(f: Poly, g: Poly, x: Var) -> Poly:
    """Pseudo-remainder of ``f`` by ``g`` w.r.t. ``x`` (up to a constant factor)."""
    fd = f.as_univariate(x)
    gd = g.as_univariate(x)
    dg = len(gd) - 1
    glc = gd[-1]
    r = list(fd)
    while len(r) - 1 >= dg and any(not c.is_zero() for c in r):
        while r and r[-1].is_zero():
            r.pop()
        dr = len(r) - 1
        if dr < dg:
            break
        rlc = r[-1]
        shift = dr - dg
        new = [glc * c for c in r]
        for i, gc in enumerate(gd):
            new[i + shift] = new[i + shift] - rlc * gc
        new.pop()  # leading term cancels exactly
        r = new
    while r and r[-1].is_zero():
        r.pop()
    return Poly.from_univariate(r, x)


def poly_gcd(f: Poly, g: Poly, x: Var | None = None) -> Poly:
    """GCD up to a positive rational constant, normalized primitive with
    positive leading coefficient.  ``x`` is a main-variable hint."""
    if f.is_zero() and g.is_zero():
        return Poly.zero()
    return _gcd_full(f, g, main=x).canonical()


def content_primitive(f: Poly, x: Var):
    """Split ``f = content * primitive`` w.r.t. ``x`` (exact reconstruction).

    The content is the gcd of the coefficients of ``f`` in ``x``, numeric
    part included, with positive leading coefficient; the primitive part
    carries the sign of ``f``.
    """
    if f.is_zero():
        raise ZeroPolynomial("content of the zero polynomial")
    parts = [c for c in f.as_univariate(x) if not c.is_zero()]
    cont = parts[0]
    for c in parts[1:]:
        cont = _gcd_full(cont, c)
        if cont == 1:
            break
    if cont.leading_term()[1] < 0:
        cont = -cont
    return cont, poly_div_exact(f, cont)


class SylvesterMatrix:
    """Sylvester matrix of two polynomials w.r.t. one variable.

    ``entries`` is an (s+r) x (s+r) grid of polynomials in the remaining
    variables; ``s`` and ``r`` are the degrees of the inputs in the
    eliminated variable.
    """

    __slots__ = ("entries", "s", "r")

    def __init__(self, f: Poly, g: Poly, x: Var):
        s, r = f.degree_in(x), g.degree_in(x)
        if s < 1 or r < 1:
            raise DegreeZero(f"resultant inputs must contain {x.name}")
        fd = list(reversed(f.as_univariate(x)))   # descending: a_s .. a_0
        gd = list(reversed(g.as_univariate(x)))   # descending: b_r .. b_0
        n = s + r
        zero = Poly.zero()
        rows = []
        for i in range(r):
            row = [zero] * n
            for j, c in enumerate(fd):
                row[i + j] = c
            rows.append(row)
        for i in range(s):
            row = [zero] * n
            for j, c in enumerate(gd):
                row[i + j] = c
            rows.append(row)
        self.entries = rows
        self.s = s
        self.r = r

    def determinant(self) -> Poly:
        """Fraction-free Bareiss elimination; divisions are exact by construction."""
        m = [row[:] for row in self.entries]
        n = len(m)
        sign = 1
        prev = Poly.const(1)
        for k in range(n - 1):
            if m[k][k].is_zero():
                for i in range(k + 1, n):
                    if not m[i][k].is_zero():
                        m[k], m[i] = m[i], m[k]
                        sign = -sign
                        break
                else:
                    return Poly.zero()
            pivot = m[k][k]
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = poly_div_exact(m[i][j] * pivot - m[i][k] * m[k][j], prev)
                m[i][k] = Poly.zero()
            prev = pivot
        det = m[n - 1][n - 1]
        return -det if sign < 0 else det


def resultant(f: Poly, g: Poly, x: Var) -> Poly:
    """Sylvester determinant of ``f`` and ``g`` w.r.t. ``x``."""
    return SylvesterMatrix(f, g, x).determinant()


def discriminant(f: Poly, x: Var) -> Poly:
    """``(-1)^(s(s-1)/2) / lc(f) * Res(f, df/dx, x)`` with ``s = deg(f, x)``."""
    s = f.degree_in(x)
    if s < 2:
        raise DegreeTooLow(f"discriminant needs degree >= 2 in {x.name}, got {s}")
    lead = f.as_univariate(x)[-1]
    res = resultant(f, f.derivative(x), x)
    quo = poly_div_exact(res, lead)
    return -quo if (s * (s - 1) // 2) % 2 else quo


def squarefree_basis(polys, x: Var):
    """Square-free, pairwise-coprime basis of the primitive parts of ``polys``
    w.r.t. ``x``.

    The product of the basis equals the square-free part of the product of
    the primitive parts, up to a rational constant.  Inputs free of ``x``
    are ignored.  Returns a sorted tuple of canonical polynomials.
    """
    work = []
    for p in polys:
        if p.is_zero() or p.degree_in(x) == 0:
            continue
        _, prim = content_primitive(p, x)
        work.append(prim)

    basis = []
    while work:
        q = work.pop()
        if q.degree_in(x) == 0:
            continue
        d = q.derivative(x)
        g = poly_gcd(q, d, x)
        if g.degree_in(x) >= 1:
            q = poly_div_exact(q, g)
        q = q.canonical()
        if q.degree_in(x) == 0:
            continue
        split = False
        for b in basis:
            g = poly_gcd(q, b, x)
            if g.degree_in(x) >= 1:
                basis.remove(b)
                if g != b:
                    work.append(poly_div_exact(b, g))
                if g != q:
                    work.append(poly_div_exact(q, g))
                work.append(g)
                split = True
                break
        if not split and q not in basis:
            basis.append(q)
    return tuple(sorted(basis, key=lambda p: p._key()))
