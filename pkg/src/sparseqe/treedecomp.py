"""Tree decompositions: heuristic construction, validation, nicification,
and PACE .td interop.

A decomposition is a rooted bag tree.  The nice variant additionally tags
every bag Leaf / Introduce / Forget / Join and has an empty root bag; it is
the shape the dynamic programs consume.
"""

from __future__ import annotations

import sys
from collections import deque

from .atoms import Var
from .errors import DisconnectedGraph, InvalidDecomposition, ParseError, ValidationError
from .graph import Graph, is_connected


class Violation:
    """A failed decomposition condition plus a witness."""

    __slots__ = ("condition", "witness")

    def __init__(self, condition, witness):
        self.condition = condition
        self.witness = witness

    def __repr__(self):
        return f"Violation({self.condition}: {self.witness})"


class TreeDecomp:
    __slots__ = ("bags", "parent", "root", "_children")

    def __init__(self, bags, parent, root):
        self.bags = {b: frozenset(vs) for b, vs in bags.items()}
        self.parent = dict(parent)
        self.root = root
        children = {b: [] for b in self.bags}
        for b, p in self.parent.items():
            if p is not None:
                children[p].append(b)
        self._children = {b: tuple(sorted(cs)) for b, cs in children.items()}

    def children(self, b):
        return self._children[b]

    def bag_ids(self):
        return sorted(self.bags)

    def vertex_union(self):
        out = set()
        for vs in self.bags.values():
            out |= vs
        return frozenset(out)

    def __repr__(self):
        return f"{type(self).__name__}({len(self.bags)} bags, width {width(self)})"


class NiceTreeDecomp(TreeDecomp):
    __slots__ = ("kind",)

    LEAF = "leaf"
    INTRODUCE = "introduce"
    FORGET = "forget"
    JOIN = "join"

    def __init__(self, bags, parent, root, kind):
        super().__init__(bags, parent, root)
        self.kind = dict(kind)


def width(t: TreeDecomp) -> int:
    """Largest bag size minus one."""
    return max((len(vs) for vs in t.bags.values()), default=0) - 1


def height(t: TreeDecomp) -> int:
    """Maximum root-to-leaf edge count."""
    depth = {t.root: 0}
    best = 0
    queue = deque([t.root])
    while queue:
        b = queue.popleft()
        for c in t.children(b):
            depth[c] = depth[b] + 1
            best = max(best, depth[c])
            queue.append(c)
    return best


def bfs_order(t: TreeDecomp, child_key=None):
    """Top-down BFS bag order.  ``child_key`` breaks ties among siblings;
    the default enqueues children by ascending minimum variable index."""
    if child_key is None:
        def child_key(b):
            bag = t.bags[b]
            return (min((v.index for v in bag), default=sys.maxsize), b)
    out = []
    queue = deque([t.root])
    while queue:
        b = queue.popleft()
        out.append(b)
        for c in sorted(t.children(b), key=child_key):
            queue.append(c)
    return out


def validate_td(g: Graph, t: TreeDecomp):
    """Check the four decomposition conditions; None means Ok."""
    # tree structure
    if t.root not in t.bags or t.parent.get(t.root) is not None:
        return Violation("tree", f"bad root {t.root}")
    seen = set()
    queue = deque([t.root])
    while queue:
        b = queue.popleft()
        if b in seen:
            return Violation("tree", f"cycle through bag {b}")
        seen.add(b)
        queue.extend(t.children(b))
    if seen != set(t.bags):
        stray = sorted(set(t.bags) - seen)
        return Violation("tree", f"bags unreachable from root: {stray}")

    union = t.vertex_union()
    foreign = union - g.vertices
    if foreign:
        return Violation("cover-vertices", f"foreign vertex {sorted(foreign)[0].name}")
    missing = g.vertices - union
    if missing:
        return Violation("cover-vertices", f"vertex {sorted(missing)[0].name} in no bag")

    for u, v in g.edges():
        if not any(u in vs and v in vs for vs in t.bags.values()):
            return Violation("cover-edges", f"edge ({u.name},{v.name}) in no bag")

    for v in sorted(union):
        occ = {b for b, vs in t.bags.items() if v in vs}
        start = next(iter(occ))
        reach = {start}
        queue = deque([start])
        while queue:
            b = queue.popleft()
            for nb in t.children(b) + ((t.parent[b],) if t.parent[b] is not None else ()):
                if nb in occ and nb not in reach:
                    reach.add(nb)
                    queue.append(nb)
        if reach != occ:
            return Violation("connected-subtree",
                             f"occurrences of {v.name} split across the tree")
    return None


def heuristic_td(g: Graph, strategy: str = "min_fill", seed: int = 0) -> TreeDecomp:
    """Decomposition from a greedy elimination ordering.

    ``strategy`` is ``min_degree`` or ``min_fill``; ties break on lowest
    variable index, so runs are reproducible and ``seed`` is accepted only
    for interface symmetry with randomized strategies.
    """
    if strategy not in ("min_degree", "min_fill"):
        raise ValueError(f"unknown strategy {strategy!r}")
    if not g.vertices:
        return TreeDecomp({0: frozenset()}, {0: None}, 0)
    if not is_connected(g):
        raise DisconnectedGraph("heuristic_td requires a connected graph")

    adj = {v: set(ns) for v, ns in g.adj.items()}

    def fill_count(v):
        ns = sorted(adj[v])
        c = 0
        for i, a in enumerate(ns):
            for b in ns[i + 1:]:
                if b not in adj[a]:
                    c += 1
        return c

    order = []
    bags = []
    while adj:
        if strategy == "min_degree":
            v = min(adj, key=lambda u: (len(adj[u]), u.index))
        else:
            v = min(adj, key=lambda u: (fill_count(u), u.index))
        ns = sorted(adj[v])
        bags.append(frozenset([v] + ns))
        order.append(v)
        for i, a in enumerate(ns):
            for b in ns[i + 1:]:
                adj[a].add(b)
                adj[b].add(a)
        for a in ns:
            adj[a].discard(v)
        del adj[v]

    pos = {v: i for i, v in enumerate(order)}
    parent = {}
    for i, bag in enumerate(bags):
        later = [pos[u] for u in bag if pos[u] > i]
        parent[i] = min(later) if later else None
    roots = [b for b, p in parent.items() if p is None]
    # the last-eliminated vertex owns the only parentless bag on connected input
    root = roots[-1]
    return TreeDecomp(dict(enumerate(bags)), parent, root)


def restrict_td(t: TreeDecomp, keep) -> TreeDecomp:
    """Induced decomposition on a vertex subset (every bag intersected).

    Valid for any subgraph on ``keep``: coverage and per-vertex connectivity
    survive intersection.
    """
    keep = frozenset(keep)
    return TreeDecomp({b: vs & keep for b, vs in t.bags.items()}, t.parent, t.root)


def _center_bag(t: TreeDecomp) -> int:
    """Tree center by leaf peeling; ties favor larger bags, then lower ids.

    Rooting at the center keeps branch variables deep, which is what makes
    the extracted elimination orders competitive (rooting at a leaf bag
    reverses them and can inflate elimination blowup by orders of magnitude).
    """
    adj = {b: set(t.children(b)) for b in t.bags}
    for b, p in t.parent.items():
        if p is not None:
            adj[b].add(p)
    remaining = set(adj)
    layer = sorted(b for b in remaining if len(adj[b]) <= 1)
    while len(remaining) > 2:
        nxt = []
        for b in layer:
            remaining.discard(b)
            for nb in adj[b]:
                adj[nb].discard(b)
                if len(adj[nb]) == 1 and nb in remaining:
                    nxt.append(nb)
        layer = sorted(set(nxt) & remaining)
    return min(remaining, key=lambda b: (-len(t.bags[b]), b))


def _reroot(t: TreeDecomp, new_root: int):
    """Reorient parent pointers towards ``new_root``."""
    adj = {b: set(t.children(b)) for b in t.bags}
    for b, p in t.parent.items():
        if p is not None:
            adj[b].add(p)
    parent = {new_root: None}
    queue = deque([new_root])
    seen = {new_root}
    while queue:
        b = queue.popleft()
        for nb in sorted(adj[b]):
            if nb not in seen:
                seen.add(nb)
                parent[nb] = b
                queue.append(nb)
    return TreeDecomp(t.bags, parent, new_root)


def nicify(t: TreeDecomp) -> NiceTreeDecomp:
    """Rebuild ``t`` as a nice decomposition of the same width.

    Multi-child bags are first binarized into join cascades, joins get
    identical-bag children, consecutive bags are chained to differ by one
    variable, leaves are extended down to singletons, and an empty root is
    chained above the chosen root bag (largest bag, lowest id on ties).
    """
    # drop empty bags hanging off the tree (undirected degree <= 1); they
    # carry nothing and would otherwise become ill-formed leaves
    bags = dict(t.bags)
    adj = {b: set(t.children(b)) for b in bags}
    for b, p in t.parent.items():
        if p is not None:
            adj[b].add(p)
    changed = True
    while changed and len(bags) > 1:
        changed = False
        for b in sorted(bags):
            if not bags[b] and len(adj[b]) <= 1 and len(bags) > 1:
                for nb in adj[b]:
                    adj[nb].discard(b)
                del bags[b], adj[b]
                changed = True
    anchor = min(bags)
    parent = {anchor: None}
    seen = {anchor}
    queue = deque([anchor])
    while queue:
        b = queue.popleft()
        for nb in sorted(adj[b]):
            if nb not in seen:
                seen.add(nb)
                parent[nb] = b
                queue.append(nb)
    base = TreeDecomp(bags, parent, anchor)

    if not base.vertex_union():
        # decomposition of the empty graph: a lone empty root
        return NiceTreeDecomp({0: frozenset()}, {0: None}, 0,
                              {0: (NiceTreeDecomp.LEAF, None)})

    base = _reroot(base, _center_bag(base))

    out_bags = {}
    out_parent = {}
    out_kind = {}
    counter = [0]

    def new_node(bagset, parent_id):
        b = counter[0]
        counter[0] += 1
        out_bags[b] = frozenset(bagset)
        out_parent[b] = parent_id
        return b

    def connect(top_id, sub_id):
        """Insert a one-variable-per-step chain between two differing bags."""
        cur = out_bags[top_id]
        target = out_bags[sub_id]
        steps = []
        s = cur
        for v in sorted(cur - target, reverse=True):
            s = s - {v}
            steps.append((NiceTreeDecomp.INTRODUCE, v, s))
        for v in sorted(target - cur):
            s = s | {v}
            steps.append((NiceTreeDecomp.FORGET, v, s))
        cur_id = top_id
        for k, v, s in steps[:-1]:
            nid = new_node(s, cur_id)
            out_kind[cur_id] = (k, v)
            cur_id = nid
        k, v, _ = steps[-1]
        out_kind[cur_id] = (k, v)
        out_parent[sub_id] = cur_id

    def build(b):
        bag = base.bags[b]
        kids = base.children(b)
        if not kids:
            top = new_node(bag, None)
            cur, cur_id = bag, top
            while len(cur) > 1:
                v = max(cur)
                nid = new_node(cur - {v}, cur_id)
                out_kind[cur_id] = (NiceTreeDecomp.INTRODUCE, v)
                cur, cur_id = cur - {v}, nid
            out_kind[cur_id] = (NiceTreeDecomp.LEAF, None)
            return top

        def branch(kid):
            sub = build(kid)
            if out_bags[sub] == bag:
                return sub
            top = new_node(bag, None)
            connect(top, sub)
            return top

        if len(kids) == 1:
            return branch(kids[0])
        tops = [branch(k) for k in kids]
        while len(tops) > 1:
            right = tops.pop()
            left = tops.pop()
            j = new_node(bag, None)
            out_parent[left] = j
            out_parent[right] = j
            out_kind[j] = (NiceTreeDecomp.JOIN, None)
            tops.append(j)
        return tops[0]

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * len(base.bags) + 1000))
    try:
        body = build(base.root)
    finally:
        sys.setrecursionlimit(limit)

    root = new_node(frozenset(), None)
    connect(root, body)
    return NiceTreeDecomp(out_bags, out_parent, root, out_kind)


def validate_nice(nt: NiceTreeDecomp):
    """Structural invariants of the four bag kinds; None means Ok."""
    if nt.bags[nt.root]:
        return Violation("nice-root", "root bag not empty")
    for b in nt.bags:
        k, v = nt.kind.get(b, (None, None))
        kids = nt.children(b)
        bag = nt.bags[b]
        if k == NiceTreeDecomp.LEAF:
            if kids or len(bag) != 1:
                return Violation("nice-leaf", f"bag {b}")
        elif k == NiceTreeDecomp.JOIN:
            if len(kids) != 2 or any(nt.bags[c] != bag for c in kids):
                return Violation("nice-join", f"bag {b}")
        elif k == NiceTreeDecomp.INTRODUCE:
            if len(kids) != 1 or nt.bags[kids[0]] != bag - {v} or v not in bag:
                return Violation("nice-introduce", f"bag {b}")
        elif k == NiceTreeDecomp.FORGET:
            if len(kids) != 1 or nt.bags[kids[0]] != bag | {v} or v in bag:
                return Violation("nice-forget", f"bag {b}")
        else:
            return Violation("nice-kind", f"bag {b} untagged")
    return None


def forget_bag_of(nt: NiceTreeDecomp, v: Var):
    """The unique bag at which ``v`` is forgotten."""
    for b, (k, u) in nt.kind.items():
        if k == NiceTreeDecomp.FORGET and u == v:
            return b
    raise KeyError(v.name)


# -- PACE .td text format ---------------------------------------------------

def write_td(t: TreeDecomp, n_vertices: int | None = None) -> str:
    """Serialize with bags renumbered 1..k in BFS order (root first).

    Vertices are numbered 1..n by ascending variable order over the bag
    union; the mapping is recorded in comment lines.
    """
    vs = sorted(t.vertex_union())
    vnum = {v: i + 1 for i, v in enumerate(vs)}
    order = bfs_order(t)
    bnum = {b: i + 1 for i, b in enumerate(order)}
    n = n_vertices if n_vertices is not None else len(vs)
    lines = ["c sparseqe tree decomposition"]
    for v in vs:
        lines.append(f"c var {vnum[v]} {v.name}")
    lines.append(f"s td {len(order)} {width(t) + 1} {n}")
    for b in order:
        vals = " ".join(str(vnum[v]) for v in sorted(t.bags[b]))
        lines.append(f"b {bnum[b]} {vals}".rstrip())
    for b in order:
        p = t.parent[b]
        if p is not None:
            lines.append(f"{bnum[p]} {bnum[b]}")
    return "\n".join(lines) + "\n"


def read_td(text: str, variables=None) -> TreeDecomp:
    """Parse PACE .td text; bag 1 (or the lowest id) becomes the root.

    ``variables`` maps 1-indexed vertex numbers onto an existing universe;
    without it synthetic variables v1..vn are created.
    """
    header = None
    raw_bags = {}
    edges = []
    for lineno, rawline in enumerate(text.splitlines(), 1):
        line = rawline.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "s":
            if header is not None:
                raise ParseError(lineno, 1, "duplicate s line")
            if len(parts) != 5 or parts[1] != "td":
                raise ParseError(lineno, 1, f"malformed s line: {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]), int(parts[4]))
            except ValueError:
                raise ParseError(lineno, 1, f"non-integer s line: {line!r}") from None
        elif parts[0] == "b":
            if header is None:
                raise ParseError(lineno, 1, "bag line before s line")
            try:
                bid = int(parts[1])
                vals = [int(x) for x in parts[2:]]
            except (ValueError, IndexError):
                raise ParseError(lineno, 1, f"malformed bag line: {line!r}") from None
            if bid in raw_bags:
                raise ParseError(lineno, 1, f"duplicate bag id {bid}")
            raw_bags[bid] = vals
        else:
            if header is None:
                raise ParseError(lineno, 1, "edge line before s line")
            if len(parts) != 2:
                raise ParseError(lineno, 1, f"malformed edge line: {line!r}")
            try:
                edges.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise ParseError(lineno, 1, f"non-integer edge line: {line!r}") from None
    if header is None:
        raise ParseError(1, 1, "missing s td line")
    n_bags, w_plus_1, n_vertices = header
    if len(raw_bags) != n_bags:
        raise ValidationError(f"declared {n_bags} bags, found {len(raw_bags)}")
    max_bag = max((len(vs) for vs in raw_bags.values()), default=0)
    if max_bag != w_plus_1:
        raise ValidationError(f"declared width+1 = {w_plus_1}, bags give {max_bag}")

    if variables is None:
        universe = {i: Var(f"v{i}", i - 1) for i in range(1, n_vertices + 1)}
    else:
        variables = list(variables)
        if len(variables) < n_vertices:
            raise ValidationError(f"td needs {n_vertices} variables, got {len(variables)}")
        universe = {i + 1: v for i, v in enumerate(variables)}
    bags = {}
    for bid, vals in raw_bags.items():
        for x in vals:
            if x not in universe:
                raise ValidationError(f"bag {bid} references unknown vertex {x}")
        bags[bid] = frozenset(universe[x] for x in vals)

    adj = {b: set() for b in bags}
    for u, v in edges:
        if u not in bags or v not in bags:
            raise ValidationError(f"edge ({u},{v}) references unknown bag")
        adj[u].add(v)
        adj[v].add(u)
    if len(bags) > 1 and len(edges) != len(bags) - 1:
        raise ValidationError(f"{len(bags)} bags need {len(bags) - 1} edges, got {len(edges)}")

    root = min(bags)
    parent = {root: None}
    seen = {root}
    queue = deque([root])
    while queue:
        b = queue.popleft()
        for nb in sorted(adj[b]):
            if nb not in seen:
                seen.add(nb)
                parent[nb] = b
                queue.append(nb)
    if seen != set(bags):
        raise ValidationError("bag tree is disconnected")
    return TreeDecomp(bags, parent, root)


def td_canonical_form(t: TreeDecomp):
    """Rooted-tree shape with bag contents, for equality up to renumbering."""
    def form(b):
        kids = tuple(sorted(form(c) for c in t.children(b)))
        return (tuple(sorted(v.name for v in t.bags[b])), kids)
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * len(t.bags) + 1000))
    try:
        return form(t.root)
    finally:
        sys.setrecursionlimit(limit)
