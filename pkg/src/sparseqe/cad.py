"""McCallum projection and the decomposition-driven projection phase.

Projection sets are canonical: primitive integer polynomials with positive
leading coefficient, no constants, no duplicates, so set sizes are counted
modulo nonzero constant factors.  The basis is square-free and pairwise
coprime (a practical relaxation of a full irreducible basis; it can merge
factors but never lose a projection root).
"""

from __future__ import annotations

import itertools
import time

from .atoms import Var
from .errors import EmptySet, InvalidDecomposition, MixedMode
from .formula import QuantFormula
from .graph import build_primal
from .poly import Poly, PolyAtom
from .polyalg import coeffs, content_primitive, discriminant, resultant, squarefree_basis
from .treedecomp import NiceTreeDecomp, bfs_order, validate_nice, validate_td


class PolySet:
    """Frozen set of canonical, non-constant polynomials."""

    __slots__ = ("polys",)

    def __init__(self, polys=()):
        canon = set()
        for p in polys:
            c = p.canonical()
            if not c.is_constant():
                canon.add(c)
        self.polys = frozenset(canon)

    @classmethod
    def from_formula(cls, formula: QuantFormula) -> "PolySet":
        if formula.linear:
            raise MixedMode("PolySet.from_formula expects a polynomial formula")
        return cls(a.poly for a in formula.atoms)

    def sorted(self):
        return sorted(self.polys, key=lambda p: p._key())

    def vars(self) -> frozenset:
        out = set()
        for p in self.polys:
            out |= p.vars()
        return frozenset(out)

    def __len__(self):
        return len(self.polys)

    def __iter__(self):
        return iter(self.polys)

    def __contains__(self, p):
        return p in self.polys

    def __eq__(self, other):
        return isinstance(other, PolySet) and self.polys == other.polys

    def __hash__(self):
        return hash(self.polys)

    def union(self, *others):
        out = set(self.polys)
        for o in others:
            out |= o.polys
        return PolySet(out)

    def __repr__(self):
        return f"PolySet({len(self.polys)} polys)"


def combined_degree(P) -> int:
    """max over variables of the degree of the product of the set
    (per-variable degrees add; no cancellation over an integral domain)."""
    polys = list(P)
    if not polys:
        raise EmptySet("combined degree of an empty set")
    totals = {}
    for p in polys:
        for v in p.vars():
            totals[v] = totals.get(v, 0) + p.degree_in(v)
    return max(totals.values(), default=0)


def mccallum_proj(P: PolySet, x: Var) -> PolySet:
    """Contents of all members, plus coefficients, discriminants, and pairwise
    resultants of the square-free basis of the primitive parts.

    Polynomials free of ``x`` pass through unchanged (they are their own
    content).  No output mentions ``x``.
    """
    out = set()
    carrying_x = []
    for f in P:
        if f.degree_in(x) == 0:
            out.add(f)
            continue
        cont, prim = content_primitive(f, x)
        if not cont.is_constant():
            out.add(cont)
        carrying_x.append(prim)
    basis = squarefree_basis(carrying_x, x)
    for b in basis:
        for c in coeffs(b, x):
            if not c.is_constant():
                out.add(c)
        if b.degree_in(x) >= 2:
            d = discriminant(b, x)
            if not d.is_constant():
                out.add(d)
    for f, g in itertools.combinations(basis, 2):
        r = resultant(f, g, x)
        if not r.is_constant():
            out.add(r)
    return PolySet(out)


def projection_sequence(P: PolySet, order):
    """Iterated projection ``[P, Proj(P, v1), Proj(Proj(P, v1), v2), ...]``.

    Callers eliminating a full formula pass quantified variables first, then
    the free ones.
    """
    seq = [P]
    cur = P
    for v in order:
        cur = mccallum_proj(cur, v)
        seq.append(cur)
    return seq


def cad_dp_tables(formula: QuantFormula, t: NiceTreeDecomp, child_key=None):
    """Projection dynamic program over the nice decomposition.

    Identical propagation scheme to the FME program, with the elimination
    step replaced by McCallum projection; returns (PolySet, tables) where
    the set is the projection past all quantified variables.
    """
    if formula.linear:
        raise MixedMode("cad_dp expects a polynomial formula")
    primal = build_primal(formula)
    all_polys = PolySet.from_formula(formula)
    if not primal.vertices:
        return all_polys, None
    bad = validate_td(primal, t)
    if bad is not None:
        raise InvalidDecomposition(f"{bad.condition}: {bad.witness}")
    bad = validate_nice(t)
    if bad is not None:
        raise InvalidDecomposition(f"{bad.condition}: {bad.witness}")

    order = bfs_order(t, child_key=child_key)
    qset = formula.quantified_set()
    I = {b: set() for b in t.bags}
    for p in all_polys:
        need = p.vars() & qset
        for b in order:
            if need <= t.bags[b]:
                I[b].add(p)
                break
        else:
            raise InvalidDecomposition(
                f"no bag covers polynomial variables {sorted(v.name for v in need)}")
    I = {b: PolySet(ps) for b, ps in I.items()}

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
            V[b] = I[b].union(mccallum_proj(V[kids[0]], var))
    return V[t.root], (I, V)


def cad_dp(formula: QuantFormula, t: NiceTreeDecomp) -> PolySet:
    result, _ = cad_dp_tables(formula, t)
    return result


# -- (m, d)-property instrumentation ------------------------------------------

class MDCertificate:
    """A partition witnessing the (m, d)-property."""

    __slots__ = ("partition", "d", "m", "mode")

    def __init__(self, partition, d, mode):
        self.partition = tuple(tuple(g) for g in partition)
        self.d = d
        self.m = len(self.partition)
        self.mode = mode

    def __repr__(self):
        return f"MDCertificate(m={self.m}, d={self.d}, mode={self.mode})"


class NotFound:
    """Exhaustive search proved no partition meets the requested bound."""

    def __init__(self, bound):
        self.bound = bound

    def __repr__(self):
        return f"NotFound(bound={self.bound})"


def _group_degree(group):
    totals = {}
    for p in group:
        for v in p.vars():
            totals[v] = totals.get(v, 0) + p.degree_in(v)
    return max(totals.values(), default=0)


def md_certificate(P, max_groups: int, d_bound: int | None = None):
    """Partition ``P`` into at most ``max_groups`` groups minimizing the
    maximum group combined degree.

    Exhaustive (optimal) for at most 15 polynomials and 3 groups, greedy
    first-fit beyond that; the mode is recorded in the certificate.  With a
    ``d_bound``, exhaustive mode returns :class:`NotFound` when the optimum
    exceeds the bound.
    """
    polys = sorted(P, key=lambda p: (-max((p.degree_in(v) for v in p.vars()), default=0),
                                     p._key()))
    if not polys:
        return MDCertificate((), 0, "exhaustive")
    max_groups = max(1, max_groups)
    exhaustive = len(polys) <= 15 and max_groups <= 3

    if exhaustive:
        best = {"d": None, "groups": None}

        degs = [{v: p.degree_in(v) for v in p.vars()} for p in polys]

        def rec(i, groups, tallies, cur_max):
            if best["d"] is not None and cur_max >= best["d"]:
                return
            if i == len(polys):
                if best["d"] is None or cur_max < best["d"]:
                    best["d"] = cur_max
                    best["groups"] = [list(g) for g in groups]
                return
            # adding to an existing group, or opening one new group
            n_open = len(groups)
            options = range(n_open + 1) if n_open < max_groups else range(n_open)
            for gi in options:
                if gi == n_open:
                    groups.append([polys[i]])
                    tallies.append(dict(degs[i]))
                    gmax = max(tallies[gi].values(), default=0)
                    rec(i + 1, groups, tallies, max(cur_max, gmax))
                    groups.pop()
                    tallies.pop()
                else:
                    groups[gi].append(polys[i])
                    saved = []
                    for v, d in degs[i].items():
                        saved.append((v, tallies[gi].get(v)))
                        tallies[gi][v] = tallies[gi].get(v, 0) + d
                    gmax = max(tallies[gi].values(), default=0)
                    rec(i + 1, groups, tallies, max(cur_max, gmax))
                    groups[gi].pop()
                    for v, old in saved:
                        if old is None:
                            del tallies[gi][v]
                        else:
                            tallies[gi][v] = old
            return

        rec(0, [], [], 0)
        if d_bound is not None and best["d"] > d_bound:
            return NotFound(d_bound)
        return MDCertificate(best["groups"], best["d"], "exhaustive")

    groups = [[] for _ in range(max_groups)]
    tallies = [dict() for _ in range(max_groups)]
    for i, p in enumerate(polys):
        best_gi, best_max = 0, None
        for gi in range(max_groups):
            trial = dict(tallies[gi])
            for v in p.vars():
                trial[v] = trial.get(v, 0) + p.degree_in(v)
            m = max((max(trial.values(), default=0),) +
                    tuple(max(t.values(), default=0) for j, t in enumerate(tallies) if j != gi))
            if best_max is None or m < best_max:
                best_gi, best_max = gi, m
        groups[best_gi].append(p)
        for v in p.vars():
            tallies[best_gi][v] = tallies[best_gi].get(v, 0) + p.degree_in(v)
    groups = [g for g in groups if g]
    d = max((_group_degree(g) for g in groups), default=0)
    return MDCertificate(groups, d, "greedy")


# -- statistics ---------------------------------------------------------------

def run_projection(formula: QuantFormula, order):
    """Project along ``order`` and collect trace statistics."""
    start = time.perf_counter()
    P = PolySet.from_formula(formula)
    seq = projection_sequence(P, order)
    elapsed = (time.perf_counter() - start) * 1000.0
    counts = [len(s) for s in seq]
    degrees = []
    for s in seq:
        if len(s) == 0:
            degrees.append(0)
        else:
            degrees.append(combined_degree(s))
    return seq, {
        "order": [v.name for v in order],
        "per_step_counts": counts[1:],
        "initial_count": counts[0],
        "peak": max(counts),
        "final": counts[-1],
        "max_combined_degree": max(degrees),
        "elapsed_ms": elapsed,
        "verdict": "projected",
    }
