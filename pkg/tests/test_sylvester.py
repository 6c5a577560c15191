from __future__ import annotations

import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from waring5.decomposition import verify_decomposition
from waring5.errors import NotOnCurve, ZeroForm
from waring5.linalg import Matrix, mat_rank
from waring5.poly import CurvePath, HomogPoly, jet_coefficients, parse_poly, power_of_linear, substitute_linear
from waring5.sylvester import (
    binary_decomposition,
    binary_rank,
    curve_pullback,
    curve_rank_decomposition,
    first_kernel_degree,
    rational_decomposition,
)


def monomial(a, b):
    return HomogPoly.monomial((a, b))


def e(n, k):
    return tuple(mpq(int(i == k)) for i in range(n))


def assert_reexpands(g, bd):
    if bd.exactness == "numeric":
        assert bd.residual is not None and bd.residual < mpq(1, 10**40)
    else:
        assert bd.expand() == g


def distinct_roots(pairs):
    pts = [r for _, r in pairs]
    return all(p[0] * q[1] != p[1] * q[0] for i, p in enumerate(pts) for q in pts[i + 1 :])


# ---- examples


def test_rank_examples():
    assert binary_rank(monomial(7, 0)) == 1
    assert binary_rank(monomial(8, 1)) == 9
    assert binary_rank(monomial(32, 4)) == 33
    with pytest.raises(ZeroForm):
        binary_rank(HomogPoly.zero(2, 4))


def test_first_kernel_degree_of_monomial():
    # apolar ideal of x^8 y is (Y^2, X^9)
    assert first_kernel_degree(monomial(8, 1)) == 2


def test_power_sum_decomposition():
    g = parse_poly("x0^4 + x1^4")
    bd = binary_decomposition(g)
    assert len(bd) == 2 and bd.exactness == "rational"
    assert_reexpands(g, bd)


def test_jet_monomial_decomposition():
    g = monomial(8, 1)
    bd = binary_decomposition(g, rational_only=True)
    assert len(bd) == 9 and bd.exactness == "rational"
    assert distinct_roots(bd.pairs)
    assert_reexpands(g, bd)


def test_deep_jet_decomposition():
    g = monomial(32, 4)
    bd = binary_decomposition(g)
    assert len(bd) == 33
    assert distinct_roots(bd.pairs)
    assert_reexpands(g, bd)


def test_rational_decomposition_is_exact():
    rng = random.Random(3)
    g = HomogPoly(2, 7, [((7 - k, k), mpq(rng.randint(-9, 9))) for k in range(8)])
    bd = rational_decomposition(g, seed=1)
    assert len(bd) <= 7 and bd.exactness == "rational"
    assert bd.expand() == g


def test_curve_examples():
    path = CurvePath(tuple(e(5, k) for k in range(5)))
    f = power_of_linear(e(5, 0), 9)
    D = curve_rank_decomposition(f, path)
    assert len(D) == 1
    top = parse_poly("9*x0^8*x4 + 72*x0^7*x1*x3 + 36*x0^7*x2^2 + 252*x0^6*x1^2*x2 + 126*x0^5*x1^4")
    D = curve_rank_decomposition(top, path)
    assert len(D) == 4 * 9 - 3
    assert verify_decomposition(top, D).ok
    line = CurvePath((e(2, 0), e(2, 1)))
    D = curve_rank_decomposition(parse_poly("9*x0^8*x1"), line)
    assert len(D) == 9 and D.exactness == "rational"


def test_curve_rejects_points_off_the_curve():
    path = CurvePath((e(3, 0), e(3, 1)))
    with pytest.raises(NotOnCurve):
        curve_pullback(parse_poly("x2^9"), path, 9)


# ---- properties


def test_monomial_rank_family():
    for a in range(1, 40):
        for b in range(1, min(a, 40 - a) + 1):
            assert binary_rank(monomial(a, b)) == max(a, b) + 1


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32), st.integers(4, 12))
def test_rank_of_generic_power_sums(seed, D):
    rng = random.Random(seed)
    k = rng.randint(1, (D + 1) // 2)
    params = rng.sample(range(-40, 41), k)
    g = HomogPoly.zero(2, D)
    for c in params:
        g = g + power_of_linear([mpq(1), mpq(c)], D).scale(mpq(rng.choice([-3, -1, 1, 2, 5])))
    assert binary_rank(g, seed) == k
    bd = binary_decomposition(g, seed=seed)
    assert len(bd) == k
    assert_reexpands(g, bd)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32))
def test_rank_invariant_under_substitution(seed):
    rng = random.Random(seed)
    D = rng.randint(3, 10)
    g = HomogPoly(2, D, [((D - k, k), mpq(rng.randint(-5, 5))) for k in range(D + 1)])
    if g.is_zero():
        return
    rows = [[mpq(rng.randint(-4, 4)) for _ in range(2)] for _ in range(2)]
    if mat_rank(rows) < 2:
        return
    assert binary_rank(substitute_linear(g, Matrix.from_rows(rows)), seed) == binary_rank(g, seed)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32))
def test_decompositions_reexpand(seed):
    rng = random.Random(seed)
    D = rng.randint(2, 9)
    g = HomogPoly(2, D, [((D - k, k), mpq(rng.randint(-5, 5), rng.randint(1, 4))) for k in range(D + 1)])
    if g.is_zero():
        return
    bd = binary_decomposition(g, seed=seed)
    assert len(bd) == binary_rank(g, seed)
    assert distinct_roots(bd.pairs)
    assert_reexpands(g, bd)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32))
def test_curve_decomposition_length_is_binary_rank(seed):
    rng = random.Random(seed)
    path = CurvePath((e(4, 0), e(4, 1), e(4, 2)))
    jets = jet_coefficients(path, 9, 2)
    f = HomogPoly.zero(4, 9)
    for J in jets:
        f = f + J.scale(mpq(rng.randint(-9, 9), rng.randint(1, 9)))
    if f.is_zero():
        return
    D = curve_rank_decomposition(f, path, seed=seed)
    assert len(D) == binary_rank(curve_pullback(f, path, 9), seed)
    assert verify_decomposition(f, D).ok
