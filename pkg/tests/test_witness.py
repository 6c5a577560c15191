from __future__ import annotations

import random

import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st
from planted import PLANE_SCHEMES, plane_sample

from waring5.apolar import border_rank_lower_bound
from waring5.classify import rank_from_type
from waring5.construct import canonical_scheme, random_projectivity, sample_point, transform_sample
from waring5.decomposition import Decomposition, verify_decomposition
from waring5.errors import NotInSpan, NotPlanar, WitnessSearchFailed
from waring5.poly import parse_poly, substitute_linear
from waring5.schemes import DEGREE_FIVE_TYPES, SchemeType
from waring5.witness import REDUCED, block_size, decompose, decompose_scheme, merge_proportional, plane_upper_bound, structure_check

type_indices = st.integers(0, len(DEGREE_FIVE_TYPES) - 1)


def e(n, k):
    return tuple(mpq(int(i == k)) for i in range(n))


def sample(t, m=4, d=9, seed=0, coefficients=None):
    return sample_point(canonical_scheme(t, m), d, seed=seed, coefficients=coefficients)


# ---- verify_decomposition


def test_verify_examples():
    f = parse_poly("x0^9 + x1^9")
    D = Decomposition(((mpq(1), e(2, 0)), (mpq(1), e(2, 1))), "rational")
    assert verify_decomposition(f, D).ok
    D = Decomposition(((mpq(1), e(2, 1)),), "rational")
    assert not verify_decomposition(parse_poly("x0^9", 2), D).ok


def test_verify_nine_term_line_construction():
    # sum lam_i (c_i x0 + x1)^9 = 9 x0^8 x1 needs 9 distinct c_i summing to 0; lam solved independently
    cs = [1, 2, 3, 4, 5, -1, -2, -3, -9]
    lam = sympy.symbols("l0:9")
    x, y = sympy.symbols("x y")
    expr = sympy.expand(sum(l * (c * x + y) ** 9 for l, c in zip(lam, cs)) - 9 * x**8 * y)
    (sol,) = sympy.solve(sympy.Poly(expr, x, y).coeffs(), lam, dict=True)
    terms = tuple((mpq(int(sol[l].p), int(sol[l].q)), (mpq(c), mpq(1))) for l, c in zip(lam, cs))
    assert verify_decomposition(parse_poly("9*x0^8*x1"), Decomposition(terms, "rational")).ok
    # an off-by-one choice of nodes has no solution at all
    bad = sympy.expand(sum(l * (c * x + y) ** 9 for l, c in zip(lam, cs[:-1] + [7])) - 9 * x**8 * y)
    assert sympy.solve(sympy.Poly(bad, x, y).coeffs(), lam, dict=True) == []


def test_verify_rejects_proportional_terms():
    f = parse_poly("2*x0^9", 2)
    D = Decomposition(((mpq(1), e(2, 0)), (mpq(1), e(2, 0))), "rational")
    assert not verify_decomposition(f, D).ok
    merged = merge_proportional(D, 9)
    assert len(merged) == 1 and verify_decomposition(f, merged).ok


# ---- decompositions of rank size


def test_five_points():
    D = decompose(sample(SchemeType((1,) * 5)))
    assert len(D) == 5 and D.exactness == "rational" and set(D.structure) == {REDUCED}


def test_one_double_point():
    sp = sample(SchemeType((2, 1, 1, 1)), seed=3)
    D = decompose(sp)
    assert len(D) == 12 and D.exactness == "rational"
    assert D.structure.count(REDUCED) == 3 and D.structure.count("A1") == 9
    O1 = sp.scheme.components[0].support
    line = sp.scheme.components[0].path.points
    for label, (_, vec) in zip(D.structure, D.terms):
        if label == "A1":
            assert not (vec[0] != 0 and all(v == 0 for v in vec[1:]))  # never O1 = e0
            assert all(v == 0 for v in vec[2:])  # on the line <e0, e1>
    assert O1 == line[0]
    assert structure_check(D, sp.scheme, 9).ok


def test_quintic_jet():
    sp = sample(SchemeType((5,)), seed=1)
    D = decompose(sp)
    assert len(D) == 33
    assert verify_decomposition(sp.f, D).ok
    assert structure_check(D, sp.scheme, 9).ok


def test_block_sizes():
    assert [block_size(b, 9) for b in (1, 2, 3, 4, 5)] == [1, 9, 17, 25, 33]


def test_monomial_jets_use_roots_of_unity():
    sp = sample(SchemeType((3, 1, 1)), coefficients=[[0, 0, 1], [1], [1]])
    D = decompose(sp)
    assert D.exactness == "cyclotomic"
    assert len(D) == 19 and verify_decomposition(sp.f, D).ok
    with pytest.raises(WitnessSearchFailed):
        decompose(sp, rational_only=True)


def test_rational_only_refuses_numeric_witnesses():
    sp = sample(SchemeType((5,)), seed=1)
    with pytest.raises(WitnessSearchFailed):
        decompose(sp, rational_only=True)


def test_decompose_from_recovered_scheme_needs_membership():
    sp = sample(SchemeType((2, 2, 1)), seed=2)
    with pytest.raises(NotInSpan):
        decompose_scheme(sp.f + parse_poly("x1^9", 5), canonical_scheme(SchemeType((1,) * 5), 4))


# ---- structure


def test_structure_blocks_for_two_double_points():
    sp = sample(SchemeType((2, 2, 1)), seed=4)
    D = decompose(sp)
    assert sorted(D.structure.count(k) for k in set(D.structure)) == [1, 9, 9]
    assert structure_check(D, sp.scheme, 9).ok


def test_structure_blocks_for_triple_and_double():
    sp = sample(SchemeType((3, 2)), seed=4)
    D = decompose(sp)
    assert D.structure.count("A1") == 2 * 9 - 1 and D.structure.count("A2") == 9
    assert structure_check(D, sp.scheme, 9).ok


def test_structure_rejects_a_term_at_the_support():
    sp = sample(SchemeType((2, 1, 1, 1)), seed=5)
    D = decompose(sp)
    k = D.structure.index("A1")
    terms = list(D.terms)
    terms[k] = (terms[k][0], sp.scheme.components[0].support)
    bad = Decomposition(tuple(terms), D.exactness, D.structure)
    check = structure_check(bad, sp.scheme, 9)
    assert not check.ok and any("support" in r for r in check.reasons)


def test_structure_rejects_wrong_sizes_and_labels():
    sp = sample(SchemeType((2, 1, 1, 1)), seed=5)
    D = decompose(sp)
    short = Decomposition(D.terms[1:], D.exactness, D.structure[1:])
    assert not structure_check(short, sp.scheme, 9).ok
    assert not structure_check(Decomposition(D.terms, D.exactness), sp.scheme, 9).ok
    off = list(D.terms)
    k = D.structure.index("A1")
    off[k] = (off[k][0], e(5, 4))
    assert not structure_check(Decomposition(tuple(off), D.exactness, D.structure), sp.scheme, 9).ok


# ---- properties


@settings(max_examples=10, deadline=None)
@given(type_indices, st.integers(0, 2**32), st.sampled_from([9, 10]))
def test_rank_size_verified_structured(ti, seed, d):
    t = DEGREE_FIVE_TYPES[ti]
    sp = sample(t, d=d, seed=seed)
    D = decompose(sp, seed=seed)
    assert len(D) == rank_from_type(t, d)
    assert verify_decomposition(sp.f, D).ok
    assert structure_check(D, sp.scheme, d).ok
    assert border_rank_lower_bound(sp.f) == 5 <= len(D)


@settings(max_examples=7, deadline=None)
@given(type_indices, st.integers(0, 2**32))
def test_decomposition_commutes_with_projectivities(ti, seed):
    sp = sample(DEGREE_FIVE_TYPES[ti], seed=seed)
    M = random_projectivity(4, seed=seed, height=9)
    D = decompose(sp, seed=seed)
    moved = transform_sample(sp, M)
    assert moved.f == substitute_linear(sp.f, M)
    assert verify_decomposition(moved.f, D.transform(M)).ok
    assert len(decompose(moved, seed=seed)) == len(D)


# ---- plane bounds


@pytest.mark.parametrize("name", sorted(PLANE_SCHEMES))
def test_plane_bound_shapes(name):
    kind, A, f = plane_sample(name, 9, seed=1)
    pb = plane_upper_bound(f, A, decompose=True, seed=1)
    assert pb.kind == kind
    assert pb.bound == {"smooth_conic": 18, "line_pair": 18, "line_triple": 27}[kind]
    assert pb.curve.degree == (3 if kind == "line_triple" else 2)
    assert len(pb.factors) == {"smooth_conic": 1, "line_pair": 2, "line_triple": 3}[kind]
    if name.startswith("line"):
        # the line x2 = 0 carries the scheme's collinear part and is one of the factors
        assert any(set(q.terms) == {(0, 0, 1)} for q in pb.factors)
    D = pb.decomposition
    assert D is not None and len(D) <= pb.bound
    assert D.exactness == "rational" and verify_decomposition(f, D).ok


def test_plane_bound_without_decomposition():
    _, A, f = plane_sample("conic_points", 10, seed=2)
    pb = plane_upper_bound(f, A)
    assert pb.bound == 20 and pb.decomposition is None
    assert pb.to_json()["kind"] == "smooth_conic"


def test_plane_bound_errors():
    sp = sample(SchemeType((5,)))
    with pytest.raises(NotPlanar):
        plane_upper_bound(sp.f, sp.scheme)
    _, A, f = plane_sample("line4_points", 9, seed=0)
    rng = random.Random(0)
    g = f + parse_poly("x0^4*x1^2*x2^3").scale(mpq(rng.randint(1, 9)))
    with pytest.raises(NotInSpan):
        plane_upper_bound(g, A)
