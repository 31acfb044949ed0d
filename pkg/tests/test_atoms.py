import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparseqe.atoms import (ConstVerdict, LinearAtom, Relation, Var, atom_vars,
                            eval_atom, normalize_atom)
from sparseqe.errors import MissingAssignment

from conftest import make_vars, rand_point

X1, X2, X3 = make_vars(3)


def test_normalize_flips_ge_and_matches_both_paper_orientations():
    a = normalize_atom({X1: -1, X2: 1, X3: -2}, 5, Relation.LE)
    b = normalize_atom({X1: 1, X2: -1, X3: 2}, -5, Relation.GE)
    assert isinstance(a, LinearAtom)
    assert a == b
    assert a.rel in (Relation.LT, Relation.LE, Relation.EQ)
    assert hash(a) == hash(b)


def test_normalize_constant_verdicts():
    assert normalize_atom({}, 1, Relation.LE) is ConstVerdict.TriviallyTrue
    assert normalize_atom({X1: 0}, -1, Relation.LE) is ConstVerdict.TriviallyFalse
    assert normalize_atom({}, 0, Relation.LT) is ConstVerdict.TriviallyFalse
    assert normalize_atom({}, 0, Relation.EQ) is ConstVerdict.TriviallyTrue


def test_normalize_clears_denominators_and_gcd():
    a = normalize_atom({X1: Fraction(2, 3), X2: Fraction(-4, 3)}, 0, Relation.LE)
    assert a.coeffs == ((X1, 1), (X2, -2))
    assert a.rhs == 0


def test_normalize_equality_sign():
    a = normalize_atom({X1: -2, X2: 4}, 6, Relation.EQ)
    assert a.coeffs == ((X1, 1), (X2, -2))
    assert a.rhs == -3


def test_eval_atom_examples():
    a = normalize_atom({X1: 1, X2: -4}, 0, Relation.LE)
    assert eval_atom(a, {X1: 1, X2: 1})
    b = normalize_atom({X3: 1}, -1, Relation.LE)
    assert eval_atom(b, {X3: -1})
    assert not eval_atom(b, {X3: 0})
    e = normalize_atom({X1: 2, X2: -1}, 0, Relation.EQ)
    assert eval_atom(e, {X1: 3, X2: 6})


def test_eval_missing_assignment():
    a = normalize_atom({X1: 1, X2: 1}, 0, Relation.LE)
    with pytest.raises(MissingAssignment):
        eval_atom(a, {X1: 0})


def test_atom_vars():
    a = normalize_atom({X1: 1, X2: 2, X3: 3}, 20, Relation.LE)
    assert atom_vars(a) == {X1, X2, X3}


coeff_st = st.fractions(min_value=-9, max_value=9, max_denominator=4)
rel_st = st.sampled_from(list(Relation))


@st.composite
def raw_atoms(draw):
    n = draw(st.integers(min_value=0, max_value=3))
    vs = make_vars(3)
    coeffs = {vs[i]: draw(coeff_st) for i in range(n)}
    return coeffs, draw(coeff_st), draw(rel_st)


@given(raw_atoms())
@settings(max_examples=200, deadline=None)
def test_normalize_idempotent(raw):
    coeffs, rhs, rel = raw
    a = normalize_atom(coeffs, rhs, rel)
    if isinstance(a, ConstVerdict):
        return
    again = normalize_atom(dict(a.coeffs), a.rhs, a.rel)
    assert again == a


@given(raw_atoms(), st.integers(0, 2**32))
@settings(max_examples=200, deadline=None)
def test_normalize_preserves_semantics(raw, seed):
    coeffs, rhs, rel = raw
    a = normalize_atom(coeffs, rhs, rel)
    rng = random.Random(seed)
    vs = make_vars(3)
    for _ in range(5):
        p = rand_point(vs, rng)
        before = _eval_raw(coeffs, rhs, rel, p)
        if isinstance(a, ConstVerdict):
            assert before == (a is ConstVerdict.TriviallyTrue)
        else:
            assert before == eval_atom(a, p)


def _eval_raw(coeffs, rhs, rel, point):
    total = sum(Fraction(c) * point[v] for v, c in coeffs.items())
    rhs = Fraction(rhs)
    return {Relation.LT: total < rhs, Relation.LE: total <= rhs,
            Relation.EQ: total == rhs, Relation.GT: total > rhs,
            Relation.GE: total >= rhs}[rel]


def test_disagreement_implies_distinct_canonical_forms():
    rng = random.Random(7)
    vs = make_vars(3)
    distinct_pairs = 0
    for _ in range(300):
        c1 = {v: rng.randint(-5, 5) for v in vs}
        c2 = {v: rng.randint(-5, 5) for v in vs}
        a = normalize_atom(c1, rng.randint(-5, 5), Relation.LE)
        b = normalize_atom(c2, rng.randint(-5, 5), Relation.LE)
        if isinstance(a, ConstVerdict) or isinstance(b, ConstVerdict):
            continue
        disagreed = False
        for _ in range(20):
            p = rand_point(vs, rng)
            if eval_atom(a, p) != eval_atom(b, p):
                disagreed = True
                break
        if disagreed:
            assert a != b
            distinct_pairs += 1
        elif a == b:
            for _ in range(5):
                p = rand_point(vs, rng)
                assert eval_atom(a, p) == eval_atom(b, p)
    assert distinct_pairs > 100  # sampling actually separates most random pairs
