"""Canonical jet schemes of every type and sampled polynomials in their spans."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq

from .apolar import border_rank_lower_bound, essential_vars
from .errors import BadType, DegreeTooSmall, InputError
from .linalg import Matrix, mat_rank, transpose
from .poly import CurvePath, HomogPoly, format_poly, parse_poly
from .scalars import rational, rational_str
from .schemes import JetComponent, JetScheme, SchemeType, require_independent

DEFAULT_HEIGHT = 100
MIN_DEGREE = 9


def canonical_scheme(t: SchemeType, m: int) -> JetScheme:
    """Component i runs along e_k + t e_(k+1) + ... over its own block of basis vectors."""
    if t.total != 5:
        raise BadType(f"type {t} has total degree {t.total}, expected 5")
    if m < 4:
        raise BadType(f"ambient dimension m = {m} is below 4")

    def e(i: int) -> tuple:
        return tuple(mpq(int(i == k)) for k in range(m + 1))

    comps, k = [], 0
    for b in t.degrees:
        comps.append(JetComponent(CurvePath(tuple(e(k + j) for j in range(b))), b))
        k += b
    return JetScheme(tuple(comps), m)


def random_rational(rng: random.Random, height: int, nonzero: bool = False) -> mpq:
    while True:
        q = mpq(rng.randint(-height, height), rng.randint(1, height))
        if q != 0 or not nonzero:
            return q


def scheme_polynomial(A: JetScheme, coefficients: Sequence[Sequence], d: int) -> HomogPoly:
    """sum_i sum_j c_ij * jet_j(path_i, d)."""
    if len(coefficients) != len(A.components):
        raise InputError("one coefficient vector per component is required")
    f = HomogPoly.zero(A.num_vars, d)
    terms: dict = {}
    for comp, cs in zip(A.components, coefficients):
        if len(cs) != comp.length:
            raise InputError(f"component of length {comp.length} needs {comp.length} coefficients")
        for c, jet in zip(cs, comp.jets(d)):
            if c == 0:
                continue
            for e, v in jet.terms.items():
                terms[e] = terms[e] + c * v if e in terms else c * v
    return HomogPoly._trusted(f.num_vars, d, terms)


@dataclass(frozen=True)
class SamplePoint:
    f: HomogPoly
    scheme: JetScheme
    coefficients: tuple
    seed: int | None
    d: int

    def to_json(self) -> dict:
        out = self.scheme.to_json()
        out["d"] = self.d
        out["coefficients"] = [[rational_str(c) for c in cs] for cs in self.coefficients]
        out["f"] = format_poly(self.f)
        out["seed"] = self.seed
        return out

    @classmethod
    def from_json(cls, obj: dict) -> SamplePoint:
        A = JetScheme.from_json(obj)
        f = parse_poly(obj["f"], A.num_vars)
        coeffs = tuple(tuple(rational(c) for c in cs) for cs in obj["coefficients"])
        return cls(f, A, coeffs, obj.get("seed"), f.degree)


def sample_point(
    A: JetScheme,
    d: int,
    seed: int | None = 0,
    height: int = DEFAULT_HEIGHT,
    coefficients: Sequence[Sequence] | None = None,
    max_draws: int = 100,
) -> SamplePoint:
    """A polynomial in the span of the jets of ``A`` using every top jet.

    Coefficients are drawn as p/q with |p|, q <= height unless given. The
    result is re-checked to have 5 essential variables and catalecticant
    border-rank bound 5 (when deg A = 5).
    """
    if d < MIN_DEGREE:
        raise DegreeTooSmall(f"d = {d} is below {MIN_DEGREE}; the degree-5 scheme is not unique there")
    require_independent(A)
    rng = random.Random(seed)
    for _ in range(max_draws if coefficients is None else 1):
        if coefficients is None:
            cs = tuple(
                tuple(random_rational(rng, height, nonzero=(j == c.length - 1)) for j in range(c.length))
                for c in A.components
            )
        else:
            cs = tuple(tuple(rational(x) if isinstance(x, (int, str)) else x for x in v) for v in coefficients)
            if any(v[-1] == 0 for v in cs):
                raise InputError("every top jet coefficient must be nonzero")
        f = scheme_polynomial(A, cs, d)
        if A.degree != 5 or (essential_vars(f).essential_count == 5 and border_rank_lower_bound(f) == 5):
            return SamplePoint(f, A, cs, seed, d)
    raise InputError("could not draw a polynomial with 5 essential variables and border rank bound 5")


def random_projectivity(m: int, seed: int | None = 0, height: int = DEFAULT_HEIGHT) -> Matrix:
    """Invertible (m+1)x(m+1) matrix with integer entries in [-height, height]."""
    rng = random.Random(seed)
    while True:
        rows = [[mpq(rng.randint(-height, height)) for _ in range(m + 1)] for _ in range(m + 1)]
        if mat_rank(rows) == m + 1:
            return Matrix.from_rows(rows, m + 1)


def transform_scheme(A: JetScheme, M) -> JetScheme:
    """Scheme of f(M x) when A belongs to f: points move by M^T."""
    return A.transform(transpose(M))


def transform_sample(sp: SamplePoint, M) -> SamplePoint:
    """The sample for f(M x); coefficients are unchanged under the induced path map."""
    A = transform_scheme(sp.scheme, M)
    return SamplePoint(scheme_polynomial(A, sp.coefficients, sp.d), A, sp.coefficients, sp.seed, sp.d)
