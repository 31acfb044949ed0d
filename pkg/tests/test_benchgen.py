import itertools
import random

import pytest

from sparseqe.atoms import LinearAtom, Relation
from sparseqe.benchgen import (GenConfig, gen_formula, gen_instance, gen_ktree,
                               gen_properties_check, ktree_decomposition)
from sparseqe.errors import ConfigError
from sparseqe.graph import build_primal
from sparseqe.parser import format_formula, parse_formula
from sparseqe.poly import PolyAtom
from sparseqe.treedecomp import validate_td, width


def test_ktree_smallest_is_clique():
    kt = gen_ktree(GenConfig(k=2, n_vars=3, seed=0))
    assert len(kt.bags) == 1
    assert kt.graph.num_edges() == 3
    assert kt.graph.is_clique(kt.graph.vertices)


def test_ktree_structure_and_width():
    kt = gen_ktree(GenConfig(k=2, n_vars=8, seed=5))
    assert len(kt.bags) == 8 - 2
    assert all(len(b) == 3 for b in kt.bags)
    t = ktree_decomposition(kt)
    assert width(t) == 2
    assert validate_td(kt.graph, t) is None
    # every bag is a clique of the graph
    for bag in kt.bags:
        assert kt.graph.is_clique(bag)


def test_ktree_table_shape_row():
    kt = gen_ktree(GenConfig(k=4, n_vars=15, seed=1))
    assert len(kt.graph.vertices) == 15
    assert width(ktree_decomposition(kt)) == 4


def test_generation_is_deterministic():
    cfg = GenConfig(k=2, n_vars=10, n_atoms=20, n_elim=5, seed=123)
    f1, kt1 = gen_instance(cfg)
    f2, kt2 = gen_instance(cfg)
    assert f1 == f2
    assert {tuple(sorted((a.name, b.name))) for a, b in kt1.graph.edges()} == \
           {tuple(sorted((a.name, b.name))) for a, b in kt2.graph.edges()}
    f3, _ = gen_instance(GenConfig(k=2, n_vars=10, n_atoms=20, n_elim=5, seed=124))
    assert f1 != f3


def test_gen_formula_lra_properties():
    cfg = GenConfig(k=2, n_vars=15, n_atoms=75, n_elim=5, seed=9)
    f, kt = gen_instance(cfg)
    assert len(f.atoms) <= 75  # canonical dedup may merge rare duplicates
    assert len(f.quantified) == 5
    assert all(isinstance(a, LinearAtom) for a in f.atoms)
    assert all(a.rel is Relation.LE for a in f.atoms)
    report = gen_properties_check(f, kt, cfg)
    assert report.ok
    assert report.attachment_width == 2
    # atoms stay inside bags: quantified co-occurrence edges are k-tree edges
    primal = build_primal(f)
    ktree_edges = {tuple(sorted((a.name, b.name))) for a, b in kt.graph.edges()}
    for u, v in primal.edges():
        assert tuple(sorted((u.name, v.name))) in ktree_edges


def test_gen_formula_nra_properties():
    cfg = GenConfig(k=2, n_vars=6, max_deg=2, n_atoms=6, n_elim=6, seed=4)
    f, kt = gen_instance(cfg)
    assert all(isinstance(a, PolyAtom) for a in f.atoms)
    for a in f.atoms:
        assert a.poly.total_degree() == 2  # one monomial of exactly max_deg survives
    assert gen_properties_check(f, kt, cfg).ok


def test_gen_formula_coefficient_range():
    cfg = GenConfig(k=1, n_vars=6, n_atoms=12, seed=3, coeff_lo=-10, coeff_hi=10)
    f, kt = gen_instance(cfg)
    # canonical gcd reduction can shrink magnitudes, never grow them
    for a in f.atoms:
        for _, c in a.coeffs:
            assert -10 <= c <= 10


def test_degenerate_single_edge_family():
    cfg = GenConfig(k=1, n_vars=2, max_deg=1, seed=0)
    f, kt = gen_instance(cfg)
    assert len(f.atoms) == 1
    assert gen_properties_check(f, kt, cfg).ok


def test_round_trip_through_text():
    for seed in range(5):
        cfg = GenConfig(k=2, n_vars=9, n_atoms=18, n_elim=4, seed=seed)
        f, _ = gen_instance(cfg)
        assert parse_formula(format_formula(f)) == f
        cfg = GenConfig(k=2, n_vars=6, max_deg=2, n_atoms=8, n_elim=3, seed=seed)
        f, _ = gen_instance(cfg)
        assert parse_formula(format_formula(f)) == f


def test_config_errors():
    with pytest.raises(ConfigError):
        GenConfig(k=3, n_vars=3)
    with pytest.raises(ConfigError):
        GenConfig(k=1, n_vars=3, max_deg=0)
    with pytest.raises(ConfigError):
        GenConfig(k=1, n_vars=3, include_prob=0.5)
    with pytest.raises(ConfigError):
        GenConfig(k=1, n_vars=3, coeff_lo=0, coeff_hi=0)
    with pytest.raises(ConfigError):
        GenConfig(k=1, n_vars=3, n_elim=9)
    cfg = GenConfig(k=2, n_vars=10, n_atoms=3)
    kt = gen_ktree(cfg)
    with pytest.raises(ConfigError):
        gen_formula(kt.bags, cfg)


def test_every_bag_variable_appears_even_on_awkward_seeds():
    for seed in range(40):
        cfg = GenConfig(k=2, n_vars=12, include_prob=0.05, seed=seed)
        f, kt = gen_instance(cfg)
        occurring = set()
        for a in f.atoms:
            occurring |= {v.name for v in a.vars()}
        assert occurring == {v.name for v in kt.order}
