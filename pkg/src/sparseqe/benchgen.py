"""Random sparse LRA/NRA benchmark families with prescribed treewidth.

Two stages: grow a k-tree by attaching each new vertex to a random k-subset
of an existing (k+1)-clique, then draw atoms bag by bag from the monomials
of total degree up to the maximum, always keeping one monomial of exactly
that degree and re-drawing a bag's atoms until each of its variables shows
up.  Everything is a deterministic function of the configuration.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .atoms import Relation, Var, normalize_atom
from .errors import ConfigError
from .formula import QuantFormula
from .graph import Graph, build_primal
from .poly import MONO_ONE, Poly, normalize_poly_atom
from .treedecomp import TreeDecomp, width


@dataclass(frozen=True)
class GenConfig:
    k: int
    n_vars: int
    max_deg: int = 1
    include_prob: float = 0.1
    coeff_lo: int = -10
    coeff_hi: int = 10
    seed: int = 0
    n_atoms: int | None = None
    n_elim: int | None = None
    relation: Relation | None = None

    def __post_init__(self):
        if self.n_vars < self.k + 1:
            raise ConfigError(f"need n_vars >= k+1, got n_vars={self.n_vars}, k={self.k}")
        if self.max_deg < 1:
            raise ConfigError("max_deg must be >= 1")
        if not (Fraction(1, 20) <= Fraction(self.include_prob).limit_denominator(10**6)
                <= Fraction(3, 20)):
            raise ConfigError("include_prob must lie in [0.05, 0.15]")
        if self.coeff_lo > self.coeff_hi or (self.coeff_lo == 0 and self.coeff_hi == 0):
            raise ConfigError("coefficient range is empty or {0}")
        if self.n_elim is not None and not (0 <= self.n_elim <= self.n_vars):
            raise ConfigError("n_elim out of range")

    @property
    def effective_relation(self) -> Relation:
        if self.relation is not None:
            return self.relation
        return Relation.LE if self.max_deg == 1 else Relation.GE

    def to_dict(self):
        return {
            "k": self.k, "n_vars": self.n_vars, "max_deg": self.max_deg,
            "include_prob": self.include_prob,
            "coeff_range": [self.coeff_lo, self.coeff_hi],
            "seed": self.seed, "n_atoms": self.n_atoms, "n_elim": self.n_elim,
            "relation": self.effective_relation.symbol,
        }


class KTree(NamedTuple):
    graph: Graph
    bags: list          # list[frozenset[Var]], attachment order
    parents: list       # parent bag index per bag; None for the seed clique
    order: tuple        # all variables in attachment order


def gen_ktree(cfg: GenConfig) -> KTree:
    """Seed (k+1)-clique, then attach each new vertex to a random k-subset of
    an existing bag, forming a new (k+1)-clique bag.  Treewidth is exactly
    ``k`` once n_vars > k."""
    rng = random.Random(cfg.seed)
    vs = [Var(f"x{i+1}", i) for i in range(cfg.n_vars)]
    k = cfg.k
    edges = [(a, b) for a, b in itertools.combinations(vs[:k + 1], 2)]
    bags = [frozenset(vs[:k + 1])]
    parents = [None]
    for i in range(k + 1, cfg.n_vars):
        v = vs[i]
        j = rng.randrange(len(bags))
        subset = rng.sample(sorted(bags[j]), k)
        edges.extend((u, v) for u in subset)
        bags.append(frozenset(subset) | {v})
        parents.append(j)
    return KTree(Graph(vs, edges), bags, parents, tuple(vs))


def ktree_decomposition(kt: KTree) -> TreeDecomp:
    """The attachment-order decomposition; every bag is a (k+1)-clique."""
    return TreeDecomp(dict(enumerate(kt.bags)),
                      {i: p for i, p in enumerate(kt.parents)}, 0)


def _enum_monomials(bag_vars, max_deg):
    """All monomials over the bag of total degree <= max_deg (first entry is
    the constant one)."""
    out = [MONO_ONE]
    for d in range(1, max_deg + 1):
        for combo in itertools.combinations_with_replacement(bag_vars, d):
            exps = {}
            for v in combo:
                exps[v] = exps.get(v, 0) + 1
            out.append(tuple(sorted(exps.items(), key=lambda p: p[0])))
    return out


def _draw_coeff(rng, cfg):
    c = 0
    while c == 0:
        c = rng.randint(cfg.coeff_lo, cfg.coeff_hi)
    return c


def _draw_atom(rng, cfg, bag_vars):
    monos = _enum_monomials(bag_vars, cfg.max_deg)
    top = [m for m in monos if sum(e for _, e in m) == cfg.max_deg]
    chosen = {rng.choice(top)}
    for m in monos:
        if m not in chosen and rng.random() < cfg.include_prob:
            chosen.add(m)
    return {m: _draw_coeff(rng, cfg) for m in sorted(chosen, key=lambda m: (len(m), m))}


def gen_formula(bags, cfg: GenConfig) -> QuantFormula:
    """Draw the atom set over the given bags (round-robin budget) and wrap it
    in a prenex block over the first ``n_elim`` attachment-order variables."""
    rng = random.Random(f"{cfg.seed}:atoms")
    all_vars = sorted({v for bag in bags for v in bag})
    n_atoms = cfg.n_atoms if cfg.n_atoms is not None else len(bags)
    if n_atoms < len(bags):
        raise ConfigError(f"need at least one atom per bag ({len(bags)}), got {n_atoms}")
    counts = [0] * len(bags)
    for i in range(n_atoms):
        counts[i % len(bags)] += 1

    rel = cfg.effective_relation
    raw_atoms = []
    for bag, count in zip(bags, counts):
        bag_vars = sorted(bag)
        for _ in range(10000):
            drawn = [_draw_atom(rng, cfg, bag_vars) for _ in range(count)]
            covered = {v for d in drawn for m in d for v, _ in m}
            if covered >= set(bag_vars):
                raw_atoms.extend(drawn)
                break
        else:  # pragma: no cover - p >= 0.05 makes this unreachable in practice
            raise ConfigError(f"could not cover bag {sorted(v.name for v in bag)}")

    n_elim = cfg.n_elim if cfg.n_elim is not None else cfg.n_vars
    quantified = [v for v in all_vars if v.index < n_elim]

    # free variables are renumbered by first appearance so that printing and
    # re-parsing the instance reproduces it exactly
    mapping = {v: v for v in quantified}
    next_idx = len(quantified)
    for d in raw_atoms:
        for m in d:
            for v, _ in m:
                if v not in mapping:
                    mapping[v] = Var(v.name, next_idx)
                    next_idx += 1

    atoms = []
    if cfg.max_deg == 1:
        for d in raw_atoms:
            coeffs = {}
            rhs = 0
            for m, c in d.items():
                if m == MONO_ONE:
                    rhs -= c
                else:
                    coeffs[mapping[m[0][0]]] = c
            atoms.append(normalize_atom(coeffs, rhs, rel))
    else:
        for d in raw_atoms:
            p = Poly({tuple(sorted(((mapping[v], e) for v, e in m), key=lambda q: q[0])): c
                      for m, c in d.items()})
            atoms.append(normalize_poly_atom(p, rel))
    return QuantFormula([mapping[v] for v in quantified], atoms)


def gen_instance(cfg: GenConfig):
    """Full two-stage generation; returns (formula, ktree)."""
    kt = gen_ktree(cfg)
    return gen_formula(kt.bags, cfg), kt


@dataclass
class GenReport:
    primal_subgraph_of_ktree: bool
    attachment_width: int
    width_is_k: bool
    all_vars_occur: bool
    details: list = field(default_factory=list)

    @property
    def ok(self):
        return self.primal_subgraph_of_ktree and self.width_is_k and self.all_vars_occur


def gen_properties_check(formula: QuantFormula, kt: KTree, cfg: GenConfig) -> GenReport:
    """Generator guards: primal graph inside the k-tree, attachment
    decomposition of width exactly k, every variable used."""
    details = []
    primal = build_primal(formula)
    ok_sub = True
    kt_names = {(min(u.name, v.name), max(u.name, v.name)) for u, v in kt.graph.edges()}
    for u, v in primal.edges():
        key = (min(u.name, v.name), max(u.name, v.name))
        if key not in kt_names:
            ok_sub = False
            details.append(f"primal edge {key} not in k-tree")
    w = width(ktree_decomposition(kt))
    occurring = set()
    for a in formula.atoms:
        occurring |= {v.name for v in a.vars()}
    expected = {v.name for v in kt.order}
    ok_occ = occurring == expected
    if not ok_occ:
        details.append(f"missing variables: {sorted(expected - occurring)}")
    return GenReport(ok_sub, w, w == cfg.k, ok_occ, details)
