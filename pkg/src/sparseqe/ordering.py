"""Elimination orders: extraction from decompositions and baseline heuristics."""

from __future__ import annotations

import random
import sys
from typing import NamedTuple

from .atoms import LinearAtom, Relation, Var
from .errors import InvalidDecomposition
from .fme import ConstraintSet, fme_step, fme_step_raw
from .graph import Graph
from .poly import Poly, mono_total_degree
from .treedecomp import TreeDecomp, bfs_order, validate_td


class ElimOrder(NamedTuple):
    vars: tuple
    provenance: tuple

    def names(self):
        return [v.name for v in self.vars]


def natural_order(quantified) -> ElimOrder:
    return ElimOrder(tuple(quantified), ("natural",))


def order_from_td(t: TreeDecomp, graph: Graph | None = None, child_key=None) -> ElimOrder:
    """Top-down BFS over the decomposition collecting, per bag, the variables
    absent from its parent (the root contributes its whole bag); the reversed
    collection is the elimination order."""
    if graph is not None:
        bad = validate_td(graph, t)
        if bad is not None:
            raise InvalidDecomposition(f"{bad.condition}: {bad.witness}")
    collected = []
    seen = set()
    for b in bfs_order(t, child_key=child_key):
        p = t.parent[b]
        fresh = t.bags[b] if p is None else t.bags[b] - t.bags[p]
        for v in sorted(fresh):
            if v in seen:
                raise InvalidDecomposition(f"{v.name} introduced twice (disconnected occurrences)")
            seen.add(v)
            collected.append(v)
    if seen != t.vertex_union():
        raise InvalidDecomposition("collection missed a vertex")
    collected.reverse()
    return ElimOrder(tuple(collected), ("td",))


def is_peo(g: Graph, order: ElimOrder) -> bool:
    """True iff every vertex's later neighbors form a clique."""
    vs = order.vars if isinstance(order, ElimOrder) else tuple(order)
    pos = {v: i for i, v in enumerate(vs)}
    if set(pos) != set(g.vertices):
        raise ValueError("order must permute the graph's vertices")
    for v in vs:
        later = [u for u in g.adj[v] if pos[u] > pos[v]]
        for i, a in enumerate(later):
            for b in later[i + 1:]:
                if not g.has_edge(a, b):
                    return False
    return True


def greedy_order(C, vars, policy: str = "rows") -> ElimOrder:
    """Eliminate, at each round, the variable whose single elimination step
    produces the smallest constraint set; ties break on variable index.
    The winning simulation is reused as the next state.

    Counting policy:

    - ``rows``: no deduplication, constant rows kept (the naive row-counting
      convention; default, and the one that reproduces published orders)
    - ``raw``: no deduplication, trivial constants dropped
    - ``canonical``: deduplicated canonical atoms with verdicts resolved, so
      a revealed contradiction counts as the smallest possible result
    """
    if policy not in ("rows", "raw", "canonical"):
        raise ValueError(f"unknown counting policy {policy!r}")
    remaining = sorted(vars)
    order = []
    if policy == "canonical":
        cur = C if isinstance(C, ConstraintSet) else ConstraintSet(C)
    else:
        cur = list(C)

    def rows_count(state, v):
        # closed form: no dedup and no constant dropping means the result size
        # is known without materializing it
        n_carried = 0
        eqs = lowers = uppers = rest = 0
        for a in state:
            if not isinstance(a, LinearAtom):
                n_carried += 1
                continue
            c = a.coeff(v)
            if c == 0:
                rest += 1
            elif a.rel is Relation.EQ:
                eqs += 1
            elif c > 0:
                uppers += 1
            else:
                lowers += 1
        if eqs:
            return n_carried + eqs + lowers + uppers + rest - 1
        return n_carried + rest + lowers * uppers

    def simulate(state, v):
        if policy == "canonical":
            after = fme_step(state, v)
            return (0 if after.false else len(after)), after
        after = fme_step_raw(list(state), v, drop_trivial=(policy == "raw"))
        return (0 if isinstance(after, ConstraintSet) else len(after)), after

    while remaining:
        best = None
        if policy == "rows":
            for v in remaining:
                n = rows_count(cur, v)
                if best is None or (n, v.index) < (best[0], best[1].index):
                    best = (n, v)
            _, v = best
            after = fme_step_raw(list(cur), v, drop_trivial=False)
        else:
            for v in remaining:
                n, sim = simulate(cur, v)
                if best is None or (n, v.index) < (best[0], best[1].index):
                    best = (n, v, sim)
            _, v, after = best
        order.append(v)
        remaining.remove(v)
        cur = after
        if isinstance(cur, ConstraintSet) and cur.false:
            order.extend(remaining)
            break
    return ElimOrder(tuple(order), ("greedy",))


def random_orders(vars, n_trials: int, seed: int):
    """``n_trials`` reproducible uniform permutations."""
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    rng = random.Random(seed)
    base = sorted(vars)
    out = []
    for t in range(n_trials):
        perm = rng.sample(base, len(base))
        out.append(ElimOrder(tuple(perm), ("random", seed, t)))
    return out


def brown_order(P, vars) -> ElimOrder:
    """Lowest maximum degree first; ties by lowest maximum total degree of
    the terms containing the variable, then by fewest such terms, then by
    variable index."""
    polys = list(P)

    def score(v: Var):
        max_deg = 0
        max_term_deg = 0
        n_terms = 0
        for p in polys:
            d = p.degree_in(v)
            if d:
                max_deg = max(max_deg, d)
            for m in p.terms:
                if any(u == v for u, _ in m):
                    n_terms += 1
                    max_term_deg = max(max_term_deg, mono_total_degree(m))
        return (max_deg, max_term_deg, n_terms, v.index)

    ordered = sorted(vars, key=score)
    return ElimOrder(tuple(ordered), ("brown",))
