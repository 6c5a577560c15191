"""Dimensions of the type strata by exact Jacobian ranks.

The cone over a stratum is the image of

    (paths, coefficients) -> sum_i sum_(j < b_i) c_ij [t^j] (c_i(t) . x)^d.

The map is polynomial, so its partial derivatives are written down exactly:

    d/dc_ij            = [t^j] (c_i(t) . x)^d
    d/d(p_il)_k        = x_k * d * sum_(j >= l) c_ij [t^(j-l)] (c_i(t) . x)^(d-1)

and the rank of the Jacobian is computed over Q at random rational points.
Per component the chart coordinate of p_0 and one coordinate of p_1 are
held fixed; by the Euler and reparametrisation identities their columns lie
in the span of the others, so dropping them leaves the rank unchanged.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass
from typing import Iterable

from gmpy2 import mpq

from .construct import MIN_DEGREE, random_rational
from .errors import BadType, DegreeTooSmall
from .linalg import mat_rank
from .poly import CurvePath, HomogPoly, jet_coefficients, monomial_index
from .schemes import DEGREE_FIVE_TYPES, SchemeType

DEFAULT_TRIALS = 3
PARAMETER_HEIGHT = 7


@dataclass(frozen=True)
class StratumProbe:
    type: SchemeType
    m: int
    d: int
    parameter_count: int
    jacobian_rank: int
    trial_ranks: tuple = ()

    @property
    def projective_dimension(self) -> int:
        return self.jacobian_rank - 1

    @property
    def expected_dimension(self) -> int:
        return 5 * self.m + self.type.s - 1

    @property
    def stable(self) -> bool:
        """Every trial reached the maximum rank."""
        return all(r == self.jacobian_rank for r in self.trial_ranks)

    def to_json(self) -> dict:
        return {
            "type": str(self.type),
            "m": self.m,
            "d": self.d,
            "parameter_count": self.parameter_count,
            "jacobian_rank": self.jacobian_rank,
            "projective_dimension": self.projective_dimension,
            "expected_dimension": self.expected_dimension,
            "trial_ranks": list(self.trial_ranks),
        }


def parameter_count(t: SchemeType, m: int) -> int:
    """Path and coefficient parameters after fixing the chart of p_0 and one entry of p_1."""
    return sum(b * (m + 2) - 1 - (b >= 2) for b in t.degrees)


def _dense(h: HomogPoly, index: dict) -> list:
    row = [mpq(0)] * len(index)
    for e, c in h.terms.items():
        row[index[e]] = c
    return row


def _random_path(rng: random.Random, m: int, b: int) -> CurvePath:
    pts = [[random_rational(rng, PARAMETER_HEIGHT) for _ in range(m + 1)] for _ in range(b)]
    pts[0][0] = mpq(1)  # chart: first coordinate of the support is 1
    if b >= 2:
        pts[1][0] = mpq(0)  # normalisation of the first tangent vector
    return CurvePath(tuple(tuple(p) for p in pts))


def jacobian_rows(t: SchemeType, m: int, d: int, rng: random.Random) -> list[list]:
    """Jacobian columns (stored as rows) at one random parameter point."""
    n = m + 1
    index = monomial_index(n, d)
    out = []
    for b in t.degrees:
        path = _random_path(rng, m, b)
        coeffs = [random_rational(rng, PARAMETER_HEIGHT, nonzero=True) for _ in range(b)]
        for jet in jet_coefficients(path, d, b - 1):
            out.append(_dense(jet, index))
        lower = jet_coefficients(path, d - 1, b - 1)
        for l in range(b):
            G: dict = {}
            for j in range(l, b):
                for e, v in lower[j - l].terms.items():
                    G[e] = G.get(e, 0) + d * coeffs[j] * v
            G_poly = HomogPoly._trusted(n, d - 1, {e: v for e, v in G.items() if v != 0})
            for k in range(n):
                if (l == 0 or l == 1) and k == 0:
                    continue  # held fixed by the normalisation
                out.append(_dense(G_poly.mul_var(k), index))
    return out


def stratum_dimension(t: SchemeType, m: int, d: int, seed: int = 0, trials: int = DEFAULT_TRIALS) -> StratumProbe:
    if t.total != 5:
        raise BadType(f"type {t} has total degree {t.total}, expected 5")
    if m < 4:
        raise BadType(f"ambient dimension m = {m} is below 4")
    if d < MIN_DEGREE:
        raise DegreeTooSmall(f"d = {d} is below {MIN_DEGREE}")
    if trials < 1:
        raise ValueError("at least one trial is needed")
    rng = random.Random(seed)
    ranks = tuple(mat_rank(jacobian_rows(t, m, d, rng)) for _ in range(trials))
    return StratumProbe(t, m, d, parameter_count(t, m), max(ranks), ranks)


def sweep(
    types: Iterable[SchemeType] = DEGREE_FIVE_TYPES,
    ms: Iterable[int] = (4, 5),
    ds: Iterable[int] = (9, 10),
    seed: int = 0,
    trials: int = DEFAULT_TRIALS,
) -> list[StratumProbe]:
    return [stratum_dimension(t, m, d, seed, trials) for t in types for m in ms for d in ds]


CSV_FIELDS = ("type", "m", "d", "parameter_count", "jacobian_rank", "projective_dimension", "expected_dimension")


def probes_to_csv(probes: Iterable[StratumProbe]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for p in probes:
        writer.writerow({k: v for k, v in p.to_json().items() if k in CSV_FIELDS})
    return buf.getvalue()


__all__ = [
    "CSV_FIELDS",
    "StratumProbe",
    "jacobian_rows",
    "parameter_count",
    "probes_to_csv",
    "stratum_dimension",
    "sweep",
]
