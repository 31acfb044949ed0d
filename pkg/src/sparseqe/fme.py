"""Fourier-Motzkin elimination: single steps, order-driven runs, and the
dynamic program over a nice tree decomposition.

All canonical-mode results are duplicate-free sets of canonical atoms;
trivially true constraints vanish and a trivially false one collapses the
whole set to FALSE.  A bound pair combines strictly when at least one side
is strict (``l < x <= u`` forces ``l < u``).
"""

from __future__ import annotations

import time
from fractions import Fraction
from typing import NamedTuple

from .atoms import ConstVerdict, LinearAtom, Relation, Var, _as_fraction, normalize_atom
from .errors import CapExceeded, InvalidDecomposition, MixedMode
from .formula import QuantFormula
from .graph import build_primal
from .treedecomp import NiceTreeDecomp, bfs_order, validate_nice, validate_td


class ConstraintSet:
    """Set of canonical atoms, or the absorbing FALSE verdict."""

    __slots__ = ("atoms", "false")

    def __init__(self, atoms=(), false=False):
        self.false = bool(false)
        self.atoms = frozenset() if self.false else frozenset(atoms)

    @classmethod
    def from_parts(cls, parts):
        """Collect atoms and verdicts; TriviallyFalse wins, TriviallyTrue drops."""
        atoms = set()
        for p in parts:
            if p is ConstVerdict.TriviallyFalse:
                return cls(false=True)
            if p is ConstVerdict.TriviallyTrue:
                continue
            atoms.add(p)
        return cls(atoms)

    def union(self, *others):
        if self.false or any(o.false for o in others):
            return ConstraintSet(false=True)
        atoms = set(self.atoms)
        for o in others:
            atoms |= o.atoms
        return ConstraintSet(atoms)

    def __len__(self):
        return len(self.atoms)

    def __iter__(self):
        return iter(self.atoms)

    def __eq__(self, other):
        return (isinstance(other, ConstraintSet) and self.false == other.false
                and self.atoms == other.atoms)

    def __hash__(self):
        return hash((self.false, self.atoms))

    def __repr__(self):
        return "ConstraintSet(FALSE)" if self.false else f"ConstraintSet({len(self.atoms)} atoms)"


FALSE_SET = ConstraintSet(false=True)


class AffineTerm(NamedTuple):
    """Rational affine expression ``const + sum(coeff * var)``."""

    coeffs: tuple
    const: Fraction

    def eval(self, point) -> Fraction:
        total = _as_fraction(self.const)
        for v, c in self.coeffs:
            total += _as_fraction(c) * _as_fraction(point[v])
        return total

    def __str__(self):
        parts = [str(self.const)]
        for v, c in self.coeffs:
            parts.append(f"+ {c}*{v.name}" if c >= 0 else f"- {-c}*{v.name}")
        return " ".join(parts)


def _partition(atoms, x: Var):
    eqs, lowers, uppers, rest = [], [], [], []
    for a in atoms:
        c = a.coeff(x)
        if c == 0:
            rest.append(a)
        elif a.rel is Relation.EQ:
            eqs.append(a)
        elif c > 0:
            uppers.append(a)
        else:
            lowers.append(a)
    return eqs, lowers, uppers, rest


def bounds(C, x: Var):
    """Partition by the role of ``x``: lower bounds, upper bounds, equalities
    containing ``x``, and atoms free of ``x``.

    Bounds are ``(AffineTerm, strict)`` pairs obtained by solving each
    inequality for ``x``.
    """
    eqs, lowers, uppers, rest = _partition(C, x)

    def term(a):
        c = Fraction(a.coeff(x))
        coeffs = tuple((v, -Fraction(cv) / c) for v, cv in a.coeffs if v != x)
        return AffineTerm(coeffs, _as_fraction(a.rhs) / c), a.rel is Relation.LT

    lower_terms = [term(a) for a in sorted(lowers, key=LinearAtom.sort_key)]
    upper_terms = [term(a) for a in sorted(uppers, key=LinearAtom.sort_key)]
    eqs = sorted(eqs, key=LinearAtom.sort_key)
    return lower_terms, upper_terms, eqs, ConstraintSet(rest)


def _substitute(atom: LinearAtom, eq: LinearAtom, x: Var):
    """Eliminate ``x`` from ``atom`` using the equality ``eq`` (exact)."""
    er = eq.coeff(x)
    ar = atom.coeff(x)
    if er > 0:
        fa, fe = er, -ar
    else:
        fa, fe = -er, ar
    d = {}
    for v, c in atom.coeffs:
        d[v] = fa * c
    for v, c in eq.coeffs:
        d[v] = d.get(v, 0) + fe * c
    rhs = fa * atom.rhs + fe * eq.rhs
    return normalize_atom(d, rhs, atom.rel)


def _combine(lo: LinearAtom, up: LinearAtom, x: Var):
    """Pair a lower and an upper bound of ``x``; strict iff either is strict."""
    cl = lo.coeff(x)
    cu = up.coeff(x)
    d = {}
    for v, c in lo.coeffs:
        if v is not x and v != x:
            d[v] = cu * c
    for v, c in up.coeffs:
        if v != x:
            d[v] = d.get(v, 0) - cl * c
    rhs = cu * lo.rhs - cl * up.rhs
    rel = Relation.LT if (lo.rel is Relation.LT or up.rel is Relation.LT) else Relation.LE
    return normalize_atom(d, rhs, rel)


def fme_step(C: ConstraintSet, x: Var, cap: int | None = None) -> ConstraintSet:
    """One elimination step.  Substitutes through an equality containing ``x``
    when one exists, otherwise pairs lower with upper bounds; atoms free of
    ``x`` are retained."""
    if C.false:
        return C
    eqs, lowers, uppers, rest = _partition(C, x)
    if eqs:
        # fewest variables first keeps fill low; any choice is sound
        eq = min(eqs, key=lambda e: (len(e.coeffs), e.sort_key()))
        parts = list(rest)
        for a in eqs + lowers + uppers:
            if a is eq:
                continue
            parts.append(_substitute(a, eq, x))
        return ConstraintSet.from_parts(parts)
    if cap is not None and len(rest) + len(lowers) * len(uppers) > cap:
        raise CapExceeded(cap)
    parts = list(rest)
    for lo in lowers:
        for up in uppers:
            parts.append(_combine(lo, up, x))
    return ConstraintSet.from_parts(parts)


def fme_order(C: ConstraintSet, order, cap: int | None = None,
              trace: list | None = None) -> ConstraintSet:
    """Left fold of :func:`fme_step` over an elimination order."""
    cur = C
    for v in order:
        cur = fme_step(cur, v, cap=cap)
        if trace is not None:
            trace.append((v, 0 if cur.false else len(cur)))
        if cur.false:
            break
    return cur


# -- raw counting mode -------------------------------------------------------

def fme_step_raw(atoms: list, x: Var, drop_trivial: bool = True):
    """Single step without deduplication: a list with multiplicities.

    Used to probe counting policies; semantics match :func:`fme_step` except
    that with ``drop_trivial=False`` constant verdicts stay in the list as
    rows (the naive-implementation counting convention).  Returns a list, or
    FALSE_SET if a trivially false atom appears while ``drop_trivial`` is set.
    """
    real = [a for a in atoms if isinstance(a, LinearAtom)]
    carried = [a for a in atoms if not isinstance(a, LinearAtom)]
    eqs, lowers, uppers, rest = _partition(real, x)
    out = carried + list(rest)

    def push(p):
        if isinstance(p, LinearAtom):
            out.append(p)
            return True
        if p is ConstVerdict.TriviallyFalse:
            if drop_trivial:
                return False
            out.append(p)
        elif not drop_trivial:
            out.append(p)
        return True

    if eqs:
        eq = min(eqs, key=lambda e: (len(e.coeffs), e.sort_key()))
        skipped = False
        for a in eqs + lowers + uppers:
            if not skipped and a is eq:
                skipped = True
                continue
            if not push(_substitute(a, eq, x)):
                return FALSE_SET
        return out
    for lo in lowers:
        for up in uppers:
            if not push(_combine(lo, up, x)):
                return FALSE_SET
    return out


def fme_order_raw(atoms, order, drop_trivial: bool = True,
                  cap: int | None = None, trace: list | None = None):
    """Raw-counting fold; atoms is any iterable of canonical atoms."""
    cur = [a for a in atoms]
    for v in order:
        if cap is not None:
            eqs, lowers, uppers, rest = _partition(
                [a for a in cur if isinstance(a, LinearAtom)], v)
            if not eqs and len(rest) + len(lowers) * len(uppers) > cap:
                raise CapExceeded(cap)
        cur = fme_step_raw(cur, v, drop_trivial=drop_trivial)
        if trace is not None:
            trace.append((v, 0 if isinstance(cur, ConstraintSet) else len(cur)))
        if isinstance(cur, ConstraintSet):
            return cur
    return cur


# -- dynamic program over a nice tree decomposition --------------------------

class ValueTables:
    """The bag-indexed assignment (I) and propagation (V) tables."""

    __slots__ = ("I", "V")

    def __init__(self, I, V):
        self.I = I
        self.V = V


def _assign_atoms(formula: QuantFormula, t: NiceTreeDecomp, child_key=None):
    """Top-down BFS assignment: each atom lands in the first-visited bag
    containing all its quantified variables.  Atoms over free variables only
    land at the (empty) root and pass through."""
    order = bfs_order(t, child_key=child_key)
    qset = formula.quantified_set()
    tables = {b: [] for b in t.bags}
    for atom in formula.atoms:
        need = atom.vars() & qset
        for b in order:
            if need <= t.bags[b]:
                tables[b].append(atom)
                break
        else:
            raise InvalidDecomposition(
                f"no bag covers atom variables {sorted(v.name for v in need)}")
    return order, {b: ConstraintSet(atoms) for b, atoms in tables.items()}


def fme_dp_tables(formula: QuantFormula, t: NiceTreeDecomp, child_key=None,
                  cap: int | None = None):
    """Run the decomposition-driven elimination; returns (result, tables)."""
    if not formula.linear:
        raise MixedMode("fme_dp requires a linear formula")
    primal = build_primal(formula)
    if not primal.vertices:
        return ConstraintSet(formula.atoms), ValueTables({}, {})
    bad = validate_td(primal, t)
    if bad is not None:
        raise InvalidDecomposition(f"{bad.condition}: {bad.witness}")
    bad = validate_nice(t)
    if bad is not None:
        raise InvalidDecomposition(f"{bad.condition}: {bad.witness}")

    order, I = _assign_atoms(formula, t, child_key=child_key)
    V = {}
    for b in reversed(order):
        kind, var = t.kind[b]
        kids = t.children(b)
        if kind == NiceTreeDecomp.LEAF:
            V[b] = I[b]
        elif kind == NiceTreeDecomp.INTRODUCE:
            V[b] = I[b].union(V[kids[0]])
        elif kind == NiceTreeDecomp.JOIN:
            V[b] = I[b].union(V[kids[0]], V[kids[1]])
        else:  # forget
            V[b] = I[b].union(fme_step(V[kids[0]], var, cap=cap))
    return V[t.root], ValueTables(I, V)


def fme_dp(formula: QuantFormula, t: NiceTreeDecomp, cap: int | None = None) -> ConstraintSet:
    result, _ = fme_dp_tables(formula, t, cap=cap)
    return result


# -- statistics ---------------------------------------------------------------

class FmeStats(NamedTuple):
    order: tuple
    per_step_counts: tuple
    peak: int
    final: int
    elapsed_ms: float
    verdict: str
    contradiction_step: int | None

    def to_dict(self):
        return {
            "order": [v.name for v in self.order],
            "per_step_counts": list(self.per_step_counts),
            "peak": self.peak,
            "final": self.final,
            "elapsed_ms": self.elapsed_ms,
            "verdict": self.verdict,
            "contradiction_step": self.contradiction_step,
        }


def fme_stats(trace, elapsed_ms=0.0, verdict="qf") -> FmeStats:
    """Summarize a per-step ``(var, count)`` trace."""
    counts = tuple(c for _, c in trace)
    order = tuple(v for v, _ in trace)
    contradiction = None
    if verdict == "false":
        contradiction = len(trace) - 1 if trace else 0
    peak = max(counts, default=0)
    final = counts[-1] if counts else 0
    return FmeStats(order, counts, peak, final, elapsed_ms, verdict, contradiction)


def run_fme(formula: QuantFormula, order, cap: int | None = None, raw: bool = False):
    """Eliminate ``order`` from the formula's atoms and time it.

    Returns ``(result, FmeStats)``; the result is a ConstraintSet in
    canonical mode or a list in raw mode.
    """
    trace = []
    start = time.perf_counter()
    verdict = "qf"
    if raw:
        # raw runs use the naive row-counting convention: no deduplication,
        # constant rows kept, so counts line up with a naive implementation
        try:
            result = fme_order_raw(formula.atoms, order, drop_trivial=False,
                                   cap=cap, trace=trace)
            if any(r is ConstVerdict.TriviallyFalse for r in result):
                verdict = "false"
        except CapExceeded:
            result = None
            verdict = "cap_exceeded"
    else:
        try:
            result = fme_order(ConstraintSet(formula.atoms), order, cap=cap, trace=trace)
            if result.false:
                verdict = "false"
        except CapExceeded:
            result = None
            verdict = "cap_exceeded"
    elapsed = (time.perf_counter() - start) * 1000.0
    return result, fme_stats(trace, elapsed_ms=elapsed, verdict=verdict)
