"""Primal graphs: variable co-occurrence over the quantified block."""

from __future__ import annotations

from collections import deque

from .atoms import Var, atom_vars
from .errors import ParseError


class Graph:
    """Undirected graph over variables; symmetric adjacency, no self-loops."""

    __slots__ = ("vertices", "adj")

    def __init__(self, vertices, edges=()):
        self.vertices = frozenset(vertices)
        adj = {v: set() for v in self.vertices}
        for u, v in edges:
            if u == v:
                continue
            adj[u].add(v)
            adj[v].add(u)
        self.adj = {v: frozenset(ns) for v, ns in adj.items()}

    def neighbors(self, v) -> frozenset:
        return self.adj[v]

    def edges(self):
        """Edges as sorted (u, v) pairs with u < v, in deterministic order."""
        out = []
        for v in sorted(self.vertices):
            for u in self.adj[v]:
                if v < u:
                    out.append((v, u))
        return out

    def num_edges(self) -> int:
        return sum(len(ns) for ns in self.adj.values()) // 2

    def has_edge(self, u, v) -> bool:
        return v in self.adj.get(u, ())

    def is_clique(self, vs) -> bool:
        vs = list(vs)
        for i, u in enumerate(vs):
            for w in vs[i + 1:]:
                if not self.has_edge(u, w):
                    return False
        return True

    def __eq__(self, other):
        return (isinstance(other, Graph) and self.vertices == other.vertices
                and self.adj == other.adj)

    def __repr__(self):
        return f"Graph({len(self.vertices)} vertices, {self.num_edges()} edges)"


def build_primal(formula) -> Graph:
    """Co-occurrence graph over the quantified variables.

    Two quantified variables are adjacent iff some atom contains both; free
    variables never appear.
    """
    qvars = formula.quantified_set()
    edges = []
    for a in formula.atoms:
        scoped = sorted(atom_vars(a) & qvars)
        for i, u in enumerate(scoped):
            for w in scoped[i + 1:]:
                edges.append((u, w))
    return Graph(formula.quantified, edges)


def connected_components(g: Graph):
    """Partition into maximal connected subgraphs (deterministic order)."""
    seen = set()
    comps = []
    for start in sorted(g.vertices):
        if start in seen:
            continue
        comp = {start}
        queue = deque([start])
        seen.add(start)
        while queue:
            v = queue.popleft()
            for u in g.adj[v]:
                if u not in seen:
                    seen.add(u)
                    comp.add(u)
                    queue.append(u)
        sub_edges = [(u, w) for u in comp for w in g.adj[u] if u < w]
        comps.append(Graph(comp, sub_edges))
    return comps


def is_connected(g: Graph) -> bool:
    return len(connected_components(g)) <= 1


def write_gr(g: Graph) -> str:
    """PACE .gr text: ``p tw <n> <m>`` then 1-indexed edge lines.

    Vertices are numbered by ascending variable order; a comment line per
    vertex records the mapping.
    """
    order = sorted(g.vertices)
    idx = {v: i + 1 for i, v in enumerate(order)}
    lines = [f"c sparseqe primal graph"]
    for v in order:
        lines.append(f"c var {idx[v]} {v.name}")
    edges = g.edges()
    lines.append(f"p tw {len(order)} {len(edges)}")
    for u, v in edges:
        lines.append(f"{idx[u]} {idx[v]}")
    return "\n".join(lines) + "\n"


def read_gr(text: str) -> Graph:
    """Parse PACE .gr text into a Graph over synthetic variables v1..vn."""
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if n is not None:
                raise ParseError(lineno, 1, "duplicate p line")
            if len(parts) != 4 or parts[1] != "tw":
                raise ParseError(lineno, 1, f"malformed p line: {line!r}")
            try:
                n = int(parts[2])
                int(parts[3])
            except ValueError:
                raise ParseError(lineno, 1, f"non-integer p line: {line!r}") from None
        else:
            if n is None:
                raise ParseError(lineno, 1, "edge line before p line")
            if len(parts) != 2:
                raise ParseError(lineno, 1, f"malformed edge line: {line!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(lineno, 1, f"non-integer edge line: {line!r}") from None
            if not (1 <= u <= n and 1 <= v <= n):
                raise ParseError(lineno, 1, f"vertex out of range: {line!r}")
            edges.append((u, v))
    if n is None:
        raise ParseError(1, 1, "missing p line")
    vs = [Var(f"v{i}", i - 1) for i in range(1, n + 1)]
    return Graph(vs, [(vs[u - 1], vs[v - 1]) for u, v in edges])
