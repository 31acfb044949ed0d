import random
from fractions import Fraction
from pathlib import Path

import pytest

from sparseqe.atoms import Relation, Var, normalize_atom
from sparseqe.parser import parse_formula

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def running_example_text():
    return (DATA / "running_example.qf").read_text()


@pytest.fixture(scope="session")
def running_example(running_example_text):
    """The 20-atom instance with the 5-variable quantified block."""
    return parse_formula(running_example_text)


@pytest.fixture(scope="session")
def running_example_full(running_example_text):
    """Same 20 atoms with all eight variables quantified."""
    text = running_example_text.replace("exists x1 x2 x3 x4 x5 ;",
                                        "exists x1 x2 x3 x4 x5 x6 x7 x8 ;")
    return parse_formula(text)


def make_vars(n, prefix="x"):
    return [Var(f"{prefix}{i+1}", i) for i in range(n)]


def atom(coeffs, rhs, rel=Relation.LE):
    a = normalize_atom(coeffs, rhs, rel)
    return a


def rand_point(vars, rng, lo=-20, hi=20, max_den=5):
    return {v: Fraction(rng.randint(lo, hi), rng.randint(1, max_den)) for v in vars}


def rand_graph(n, rng, extra_edges=None):
    """Random connected graph: a random spanning tree plus extra edges."""
    from sparseqe.graph import Graph
    vs = make_vars(n)
    edges = []
    for i in range(1, n):
        edges.append((vs[rng.randrange(i)], vs[i]))
    m = extra_edges if extra_edges is not None else rng.randint(0, n)
    for _ in range(m):
        a, b = rng.sample(range(n), 2)
        edges.append((vs[a], vs[b]))
    return Graph(vs, edges)
