"""Catalecticants, apolar ideal slices, concision and the catalecticant bound."""

from __future__ import annotations

from dataclasses import dataclass

from math import factorial
from operator import add

from gmpy2 import mpq, mpz

from .errors import DegreeMismatch, ZeroPolynomial
from .linalg import Matrix, mat_kernel, mat_rank, row_echelon, transpose
from .poly import HomogPoly, contraction_weight, monomial_index, monomials


@dataclass(frozen=True)
class Catalecticant:
    """Matrix of g -> g o f on degree-``a`` dual monomials (rows) against degree ``d - a`` monomials."""

    a: int
    d: int
    matrix: Matrix


def _sub_exponents(e: tuple, total: int):
    """Exponent vectors a <= e (entrywise) with |a| = total."""
    if len(e) == 1:
        if total <= e[0]:
            yield (total,)
        return
    for k in range(min(e[0], total), -1, -1):
        for rest in _sub_exponents(e[1:], total - k):
            yield (k,) + rest


def _cat_rows(f: HomogPoly, a: int) -> list[list]:
    # entry (alpha, gamma) = f_(alpha+gamma) * (alpha+gamma)! / (gamma! a!)
    n, d = f.num_vars, f.degree
    row_mons = monomials(n, a)
    col_mons = monomials(n, d - a)
    fact = [factorial(k) for k in range(d + 1)]
    fa = fact[a]
    rows = [[mpq(0)] * len(col_mons) for _ in range(len(row_mons))]
    if len(f.terms) * 4 < len(col_mons):
        # sparse f: walk its terms
        row_index, col_index = monomial_index(n, a), monomial_index(n, d - a)
        for beta, c in f.terms.items():
            for alpha in _sub_exponents(beta, a):
                gamma = tuple(b - x for b, x in zip(beta, alpha))
                rows[row_index[alpha]][col_index[gamma]] = c * contraction_weight(beta, alpha)
        return rows
    scaled = {}
    for beta, c in f.terms.items():
        w = mpz(1)
        for b in beta:
            w *= fact[b]
        scaled[beta] = c * mpq(w, fa)
    inv_gamma = []
    for gamma in col_mons:
        w = mpz(1)
        for g in gamma:
            w *= fact[g]
        inv_gamma.append(w)
    get = scaled.get
    for row, alpha in zip(rows, row_mons):
        for j, gamma in enumerate(col_mons):
            v = get(tuple(map(add, alpha, gamma)))
            if v is not None:
                row[j] = v / inv_gamma[j]
    return rows


def catalecticant(f: HomogPoly, a: int) -> Catalecticant:
    if not 0 <= a <= f.degree:
        raise DegreeMismatch(f"split degree {a} outside 0..{f.degree}")
    rows = _cat_rows(f, a)
    return Catalecticant(a, f.degree, Matrix.from_rows(rows, len(monomials(f.num_vars, f.degree - a))))


def catalecticant_rank(f: HomogPoly, a: int) -> int:
    # rank C_a = rank C_(d-a), so work with the smaller side
    a = min(a, f.degree - a)
    return mat_rank(_cat_rows(f, a))


@dataclass(frozen=True)
class ConcisionReport:
    """``f(x) = concise_poly(restriction_matrix @ x)``.

    Row k of ``restriction_matrix`` is an essential linear form; ``pivots[k]``
    is the original variable it is normalised against.
    """

    essential_count: int
    restriction_matrix: Matrix
    concise_poly: HomogPoly
    pivots: tuple

    def lift_point(self, coeffs) -> list:
        """Coefficient vector of a concise linear form, written in original variables."""
        R = self.restriction_matrix
        return [sum((coeffs[k] * R[k, j] for k in range(R.rows)), mpq(0)) for j in range(R.cols)]


def essential_vars(f: HomogPoly) -> ConcisionReport:
    if f.is_zero():
        raise ZeroPolynomial("the zero polynomial has no essential variables")
    if f.degree == 0:
        return ConcisionReport(0, Matrix(0, f.num_vars, ()), HomogPoly(0, 0, {(): f.terms[()]}), ())
    # rows of C_1 are the first partials; its column space spans the essential forms
    red = row_echelon(transpose(_cat_rows(f, 1)))
    pivots = tuple(p for p, _ in red)
    R = Matrix.from_rows([row for _, row in red], f.num_vars)
    return ConcisionReport(len(pivots), R, f.restrict(pivots), pivots)


def border_rank_lower_bound(f: HomogPoly) -> int:
    """max_a rank C_a(f), computed on the concise form over a <= d/2."""
    if f.is_zero():
        raise ZeroPolynomial("border rank of the zero polynomial is not defined")
    g = essential_vars(f).concise_poly
    best = 1
    for a in range(1, g.degree // 2 + 1):
        best = max(best, mat_rank(_cat_rows(g, a)))
    return best


def apolar_ideal_slice(f: HomogPoly, k: int) -> list[HomogPoly]:
    """Basis of the degree-k part of the annihilator of ``f``."""
    if not 1 <= k <= f.degree:
        raise DegreeMismatch(f"slice degree {k} outside 1..{f.degree}")
    rows = _cat_rows(f, k)
    basis = mat_kernel(transpose(rows)) if rows else []
    mons = monomials(f.num_vars, k)
    return [HomogPoly._trusted(f.num_vars, k, dict(zip(mons, v))) for v in basis]
