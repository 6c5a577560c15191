from __future__ import annotations

import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from waring5.errors import BadType, DegreeTooSmall
from waring5.linalg import mat_rank
from waring5.poly import CurvePath, HomogPoly, jet_coefficients, monomials
from waring5.schemes import DEGREE_FIVE_TYPES, SchemeType
from waring5.strata import CSV_FIELDS, jacobian_rows, parameter_count, probes_to_csv, stratum_dimension, sweep

type_indices = st.integers(0, len(DEGREE_FIVE_TYPES) - 1)


def forward(t, m, d, params):
    """The parametrisation itself: sum_ij c_ij [t^j](c_i(t) . x)^d, unnormalised."""
    it = iter(params)
    f = HomogPoly.zero(m + 1, d)
    for b in t.degrees:
        path = CurvePath(tuple(tuple(next(it) for _ in range(m + 1)) for _ in range(b)))
        coeffs = [next(it) for _ in range(b)]
        for c, J in zip(coeffs, jet_coefficients(path, d, b - 1)):
            f = f + J.scale(c)
    return f


def derivative_weights(D):
    """w_k with P'(0) = sum_k w_k P(k) for every polynomial P of degree <= D."""
    ws = []
    for k in range(D + 1):
        # derivative at 0 of prod_(j != k) (h - j) / (k - j)
        others = [j for j in range(D + 1) if j != k]
        denom = mpq(1)
        for j in others:
            denom *= k - j
        s = mpq(0)
        for skip in others:
            term = mpq(1)
            for j in others:
                if j != skip:
                    term *= -j
            s += term
        ws.append(s / denom)
    return ws


def oracle_dimension(t, m, d, seed):
    """Projective dimension from a Jacobian built by exact interpolation of the forward map."""
    rng = random.Random(seed)
    n = sum(b * (m + 2) for b in t.degrees)
    p = [mpq(rng.randint(-7, 7), rng.randint(1, 5)) for _ in range(n)]
    ws = derivative_weights(d)
    cols = monomials(m + 1, d)
    rows = []
    for i in range(n):
        acc = HomogPoly.zero(m + 1, d)
        for k, w in enumerate(ws):
            q = list(p)
            q[i] += k
            acc = acc + forward(t, m, d, q).scale(w)
        rows.append([acc.coefficient(c) for c in cols])
    return mat_rank(rows) - 1


# ---- examples


def test_stratum_examples():
    assert stratum_dimension(SchemeType((1,) * 5), 4, 9).projective_dimension == 24
    assert stratum_dimension(SchemeType((5,)), 4, 9).projective_dimension == 20
    assert stratum_dimension(SchemeType((2, 1, 1, 1)), 5, 9).projective_dimension == 28


def test_parameter_counts():
    assert parameter_count(SchemeType((1,) * 5), 4) == 25
    assert parameter_count(SchemeType((5,)), 4) == 28
    for t in DEGREE_FIVE_TYPES:
        rows = jacobian_rows(t, 4, 9, random.Random(0))
        assert len(rows) == parameter_count(t, 4)


@pytest.mark.parametrize("name", ["1:5", "2:4,1", "4:2,1,1,1"])
def test_against_interpolated_jacobian(name):
    t = SchemeType.parse(name)
    assert stratum_dimension(t, 4, 9, seed=2).projective_dimension == oracle_dimension(t, 4, 9, seed=5)


def test_probe_errors():
    with pytest.raises(BadType):
        stratum_dimension(SchemeType((2, 2)), 4, 9)
    with pytest.raises(BadType):
        stratum_dimension(SchemeType((5,)), 3, 9)
    with pytest.raises(DegreeTooSmall):
        stratum_dimension(SchemeType((5,)), 4, 8)
    with pytest.raises(ValueError):
        stratum_dimension(SchemeType((5,)), 4, 9, trials=0)


def test_csv_output():
    probes = sweep(types=DEGREE_FIVE_TYPES[:2], ms=(4,), ds=(9,), trials=1)
    lines = probes_to_csv(probes).splitlines()
    assert lines[0] == ",".join(CSV_FIELDS)
    assert lines[1] == "1:5,4,9,28,21,20,20"
    assert len(lines) == 3


def test_probe_json():
    out = stratum_dimension(SchemeType((3, 2)), 4, 9, trials=2).to_json()
    assert out["projective_dimension"] == out["expected_dimension"] == 21
    assert len(out["trial_ranks"]) == 2


# ---- properties


@settings(max_examples=10, deadline=None)
@given(type_indices, st.integers(0, 2**32))
def test_dimension_formula_and_stable_trials(ti, seed):
    t = DEGREE_FIVE_TYPES[ti]
    probe = stratum_dimension(t, 4, 9, seed=seed)
    assert probe.stable
    assert probe.projective_dimension == 5 * 4 + t.s - 1 == probe.expected_dimension
    assert probe.jacobian_rank <= probe.parameter_count


def test_dimension_increases_with_component_count():
    dims = {}
    for t in DEGREE_FIVE_TYPES:
        dims.setdefault(t.s, set()).add(stratum_dimension(t, 4, 9).projective_dimension)
    assert all(len(v) == 1 for v in dims.values())
    ordered = [dims[s].pop() for s in sorted(dims)]
    assert ordered == sorted(ordered) and len(set(ordered)) == len(ordered)
