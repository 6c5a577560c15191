from __future__ import annotations

import sympy
import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from waring5.classify import CHECK_NAMES, classify_rank, rank_from_type, recover_scheme, verify_certificate
from waring5.construct import canonical_scheme, random_projectivity, sample_point, scheme_polynomial, transform_sample
from waring5.errors import BadType, DegreeTooSmall, IrrationalSupport, NonCurvilinear, NotBorderRankFive, TooFewVariables
from waring5.poly import CurvePath, parse_poly, power_of_linear
from waring5.schemes import DEGREE_FIVE_TYPES, JetComponent, JetScheme, SchemeType, equivalent

RANKS_AT_9 = {"1:5": 33, "2:3,2": 26, "2:4,1": 26, "3:3,1,1": 19, "3:2,2,1": 19, "4:2,1,1,1": 12, "5:1,1,1,1,1": 5}
type_indices = st.integers(0, len(DEGREE_FIVE_TYPES) - 1)


def sample(t, m=4, d=9, seed=0, transform=False):
    sp = sample_point(canonical_scheme(t, m), d, seed=seed)
    if transform:
        sp = transform_sample(sp, random_projectivity(m, seed))
    return sp


def to_poly(expr, n):
    return parse_poly(str(sympy.expand(expr)).replace("**", "^"), n)


# ---- rank table


def test_rank_table_examples():
    assert rank_from_type(SchemeType((5,)), 9) == 33
    assert rank_from_type(SchemeType((2, 2, 1)), 10) == 21
    for d in (9, 13, 40):
        assert rank_from_type(SchemeType((1,) * 5), d) == 5
    with pytest.raises(BadType):
        rank_from_type(SchemeType((2, 2)), 9)
    with pytest.raises(DegreeTooSmall):
        rank_from_type(SchemeType((5,)), 8)


def test_rank_table_formulas():
    for d in range(9, 20):
        got = [rank_from_type(t, d) for t in DEGREE_FIVE_TYPES]
        assert got == [4 * d - 3, 3 * d - 1, 3 * d - 1, 2 * d + 1, 2 * d + 1, d + 3, 5]


# ---- classification


def test_power_sum_classifies_as_five_points():
    r = classify_rank(parse_poly("x0^9 + x1^9 + x2^9 + x3^9 + x4^9"))
    assert str(r.type) == "5:1,1,1,1,1" and r.rank == 5
    supports = sorted(tuple(c.support) for c in r.scheme.components)
    assert supports == sorted(tuple(mpq(int(i == k)) for i in range(5)) for k in range(5))


def test_every_type_at_degree_nine():
    for t in DEGREE_FIVE_TYPES:
        sp = sample(t, seed=4)
        r = classify_rank(sp.f)
        assert r.type == t
        assert r.rank == RANKS_AT_9[str(t)]
        assert r.ok and r.essential == 5
        assert equivalent(r.scheme, sp.scheme)


def test_deep_jet_round_trip():
    sp = sample(SchemeType((5,)), seed=2)
    assert equivalent(recover_scheme(sp.f), sp.scheme)


def test_equal_rank_types_are_distinguished():
    a = classify_rank(sample(SchemeType((3, 2)), seed=1, transform=True).f)
    b = classify_rank(sample(SchemeType((4, 1)), seed=1, transform=True).f)
    assert a.rank == b.rank == 26 and a.type != b.type
    a = classify_rank(sample(SchemeType((3, 1, 1)), seed=1, transform=True).f)
    b = classify_rank(sample(SchemeType((2, 2, 1)), seed=1, transform=True).f)
    assert a.rank == b.rank == 19 and a.type != b.type


def test_rank_at_degree_eleven():
    r = classify_rank(sample(SchemeType((4, 1)), d=11, seed=3).f)
    assert r.rank == 32


def test_report_json():
    r = classify_rank(sample(SchemeType((2, 1, 1, 1)), seed=5).f)
    out = r.to_json()
    assert out["type"] == "4:2,1,1,1" and out["rank"] == 12 and out["essential"] == 5
    assert set(out["checks"]) == set(CHECK_NAMES) and all(out["checks"].values())
    assert JetScheme.from_json(out["scheme"]) == r.scheme


# ---- refusals


def test_power_of_linear_is_refused():
    with pytest.raises(NotBorderRankFive):
        classify_rank(parse_poly("x0^9", 5))


def test_border_rank_six_is_refused():
    with pytest.raises(NotBorderRankFive):
        classify_rank(parse_poly("x0^9 + x1^9 + x2^9 + x3^9 + x4^9 + x5^9"))


def test_four_essential_variables_are_refused():
    x = sympy.symbols("x0:5")
    f = to_poly(x[0] ** 9 + x[1] ** 9 + x[2] ** 9 + x[3] ** 9 + (x[0] + x[1] + x[2] + x[3]) ** 9, 5)
    with pytest.raises(TooFewVariables):
        classify_rank(f)


def test_conjugate_support_is_refused_with_a_suggestion():
    x = sympy.symbols("x0:5")
    s = sympy.sqrt(2)
    f = to_poly((x[0] + s * x[1]) ** 9 + (x[0] - s * x[1]) ** 9 + x[2] ** 9 + x[3] ** 9 + x[4] ** 9, 5)
    with pytest.raises(IrrationalSupport) as info:
        classify_rank(f)
    assert str(info.value.suggested_type) == "5:1,1,1,1,1"


def test_non_curvilinear_scheme_is_refused():
    # local scheme with Hilbert function (1, 3, 1) at e0
    f = parse_poly("x0^7*x1^2 + x0^7*x2^2 + x0^7*x3^2 + x0^8*x4")
    with pytest.raises(NonCurvilinear):
        classify_rank(f)


# ---- certificate checks and their mutations


def test_certificate_passes_on_constructor_output():
    for t in DEGREE_FIVE_TYPES:
        sp = sample(t, seed=6)
        r = verify_certificate(sp.f, sp.scheme)
        assert r.ok and r.type == t and r.rank == rank_from_type(t, 9)


def test_membership_mutation():
    A = canonical_scheme(SchemeType((5,)), 4)
    r = verify_certificate(parse_poly("x1^9", 5), A)
    assert "membership" in r.failed and r.rank is None
    # x0^9 is the order-0 jet itself: inside the span, but only via a truncation
    r = verify_certificate(parse_poly("x0^9", 5), A)
    assert r.checks["membership"] and r.failed == ["minimality", "border_rank_5"]


def test_minimality_mutation():
    sp = sample(SchemeType((2, 1, 1, 1)), seed=7)
    cs = [list(c) for c in sp.coefficients]
    cs[0][-1] = mpq(0)
    f = scheme_polynomial(sp.scheme, cs, 9)
    r = verify_certificate(f, sp.scheme)
    assert r.checks["membership"] and not r.checks["minimality"]


def test_independence_mutation():
    e = [tuple(mpq(int(i == k)) for i in range(5)) for k in range(5)]
    dependent = [e[0], e[1], e[2], e[3], tuple(a + b for a, b in zip(e[0], e[1]))]
    A = JetScheme(tuple(JetComponent(CurvePath((p,)), 1) for p in dependent), 4)
    f = scheme_polynomial(A, [[1]] * 5, 9)
    r = verify_certificate(f, A)
    assert not r.checks["independence"] and r.rank is None


def test_border_rank_mutation():
    sp = sample(SchemeType((3, 1, 1)), m=5, seed=8)
    f = sp.f + parse_poly("x5^9", 6)
    r = verify_certificate(f, sp.scheme)
    assert not r.checks["border_rank_5"] and not r.ok


def test_degree_mutation():
    e = [tuple(mpq(int(i == k)) for i in range(6)) for k in range(6)]
    A = JetScheme(tuple(JetComponent(CurvePath((p,)), 1) for p in e), 5)
    f = scheme_polynomial(A, [[1]] * 6, 9)
    r = verify_certificate(f, A)
    assert not r.checks["degree_5"] and r.type is None and r.rank is None


def test_zeroing_any_top_coefficient_is_detected():
    for t in DEGREE_FIVE_TYPES:
        sp = sample(t, seed=9)
        for i in range(t.s):
            cs = [list(c) for c in sp.coefficients]
            cs[i][-1] = mpq(0)
            f = scheme_polynomial(sp.scheme, cs, 9)
            r = verify_certificate(f, sp.scheme)
            assert not r.checks["minimality"] or not r.checks["border_rank_5"]


# ---- properties


@settings(max_examples=8, deadline=None)
@given(type_indices, st.integers(0, 2**32), st.sampled_from([4, 5]))
def test_round_trip_under_projectivities(ti, seed, m):
    t = DEGREE_FIVE_TYPES[ti]
    sp = sample(t, m=m, seed=seed, transform=True)
    r = classify_rank(sp.f, seed=seed)
    assert r.type == t and r.ok
    assert equivalent(r.scheme, sp.scheme)


@settings(max_examples=6, deadline=None)
@given(type_indices, st.integers(0, 2**32))
def test_classification_is_projectively_invariant(ti, seed):
    sp = sample(DEGREE_FIVE_TYPES[ti], seed=seed)
    moved = transform_sample(sp, random_projectivity(4, seed, height=9))
    a, b = classify_rank(sp.f, seed=seed), classify_rank(moved.f, seed=seed + 1)
    assert (a.type, a.rank) == (b.type, b.rank)


def test_power_of_generic_linear_form_refused():
    with pytest.raises(NotBorderRankFive):
        classify_rank(power_of_linear([1, 2, 3, 4, 5], 9))
