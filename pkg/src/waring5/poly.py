"""Sparse homogeneous polynomials, linear forms, powers, jets and substitutions.

A ``HomogPoly`` maps exponent tuples to nonzero scalars. Dual forms (the
differential operators acting by contraction) use the same class; which role
a polynomial plays is decided by argument position.

Contraction convention: a dual monomial X^a of degree |a| acts on x^b as
the iterated partial derivative d^a divided by |a|!, i.e. as
b! / ((b-a)! |a|!) * x^(b-a). With this normalisation
g o l^d = C(d, |a|) * g(l) * l^(d-|a|) for every dual form g of degree |a|
and every linear form l, so g kills l^d exactly when g vanishes at l.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from .errors import DegreeMismatch, ParseError, VarMismatch
from .linalg import Matrix, _rows_of
from .scalars import rational, rational_str

Exponent = tuple


# --------------------------------------------------------------------------
# monomial bookkeeping


@lru_cache(maxsize=None)
def monomials(num_vars: int, degree: int) -> tuple[Exponent, ...]:
    """All exponent vectors of the given degree, in graded lex order (x0^d first)."""
    if num_vars == 0:
        return ((),) if degree == 0 else ()
    if num_vars == 1:
        return ((degree,),)
    out = []
    for a in range(degree, -1, -1):
        for rest in monomials(num_vars - 1, degree - a):
            out.append((a,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def monomial_index(num_vars: int, degree: int) -> dict:
    return {e: i for i, e in enumerate(monomials(num_vars, degree))}


@lru_cache(maxsize=4096)
def multinomial(exps: Exponent) -> int:
    out = factorial(sum(exps))
    for e in exps:
        out //= factorial(e)
    return out


def binomial_product(top: Exponent, bottom: Exponent) -> int:
    out = 1
    for b, a in zip(top, bottom):
        out *= comb(b, a)
    return out


def contraction_weight(top: Exponent, bottom: Exponent) -> mpq:
    """Coefficient of x^(top-bottom) in X^bottom o x^top."""
    return mpq(binomial_product(top, bottom), multinomial(tuple(bottom)))


# --------------------------------------------------------------------------
# polynomials


class HomogPoly:
    """Homogeneous polynomial in ``num_vars`` variables of fixed ``degree``."""

    __slots__ = ("num_vars", "degree", "terms")

    def __init__(self, num_vars: int, degree: int, terms: Mapping | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean = {}
        for e, c in items:
            e = tuple(int(v) for v in e)
            if len(e) != num_vars:
                raise VarMismatch(f"exponent {e} has {len(e)} entries, expected {num_vars}")
            if sum(e) != degree or min(e, default=0) < 0:
                raise DegreeMismatch(f"exponent {e} is not of degree {degree}")
            if c != 0:
                if e in clean:
                    c = clean[e] + c
                    if c == 0:
                        del clean[e]
                        continue
                clean[e] = c if not isinstance(c, int) else mpq(c)
        object.__setattr__(self, "num_vars", num_vars)
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("HomogPoly values are immutable")

    @classmethod
    def zero(cls, num_vars: int, degree: int) -> HomogPoly:
        return cls(num_vars, degree)

    @classmethod
    def monomial(cls, exps: Exponent, coeff=1) -> HomogPoly:
        return cls(len(exps), sum(exps), {tuple(exps): rational(coeff) if isinstance(coeff, int) else coeff})

    @classmethod
    def _trusted(cls, num_vars: int, degree: int, terms: dict) -> HomogPoly:
        obj = cls.__new__(cls)
        object.__setattr__(obj, "num_vars", num_vars)
        object.__setattr__(obj, "degree", degree)
        object.__setattr__(obj, "terms", {e: c for e, c in terms.items() if c != 0})
        return obj

    # -- queries -----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, exps: Exponent):
        return self.terms.get(tuple(exps), mpq(0))

    def sorted_terms(self) -> list[tuple[Exponent, object]]:
        return sorted(self.terms.items(), key=lambda kv: kv[0], reverse=True)

    def dense(self) -> list:
        """Coefficient vector in the graded lex monomial order."""
        return [self.terms.get(e, mpq(0)) for e in monomials(self.num_vars, self.degree)]

    @classmethod
    def from_dense(cls, num_vars: int, degree: int, vec: Sequence) -> HomogPoly:
        return cls._trusted(num_vars, degree, dict(zip(monomials(num_vars, degree), vec)))

    def evaluate(self, point: Sequence):
        total = mpq(0)
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v = v * x**k
            total = total + v
        return total

    def variables_used(self) -> list[int]:
        used = set()
        for e in self.terms:
            used.update(i for i, k in enumerate(e) if k)
        return sorted(used)

    def is_exact(self) -> bool:
        from .scalars import kind

        return all(kind(c) != "complex" for c in self.terms.values())

    # -- arithmetic --------------------------------------------------------
    def _check(self, other: HomogPoly) -> None:
        if other.num_vars != self.num_vars:
            raise VarMismatch("polynomials live in different rings")
        if other.degree != self.degree:
            raise DegreeMismatch("polynomials have different degrees")

    def __add__(self, other: HomogPoly) -> HomogPoly:
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return HomogPoly._trusted(self.num_vars, self.degree, out)

    def __sub__(self, other: HomogPoly) -> HomogPoly:
        return self + (-other)

    def __neg__(self) -> HomogPoly:
        return HomogPoly._trusted(self.num_vars, self.degree, {e: -c for e, c in self.terms.items()})

    def scale(self, s) -> HomogPoly:
        return HomogPoly._trusted(self.num_vars, self.degree, {e: c * s for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, HomogPoly):
            return poly_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        if not isinstance(other, HomogPoly):
            return NotImplemented
        return (
            self.num_vars == other.num_vars
            and self.degree == other.degree
            and self.terms.keys() == other.terms.keys()
            and all(self.terms[e] == other.terms[e] for e in self.terms)
        )

    def __hash__(self):
        return hash((self.num_vars, self.degree, frozenset(self.terms)))

    def mul_var(self, i: int) -> HomogPoly:
        """Multiply by the variable x_i."""
        out = {}
        for e, c in self.terms.items():
            e2 = list(e)
            e2[i] += 1
            out[tuple(e2)] = c
        return HomogPoly._trusted(self.num_vars, self.degree + 1, out)

    def restrict(self, keep: Sequence[int]) -> HomogPoly:
        """Set every variable not in ``keep`` to zero and renumber the rest."""
        keep = list(keep)
        kept = set(keep)
        out = {}
        for e, c in self.terms.items():
            if all(k == 0 for i, k in enumerate(e) if i not in kept):
                out[tuple(e[i] for i in keep)] = c
        return HomogPoly._trusted(len(keep), self.degree, out)

    def embed(self, num_vars: int, positions: Sequence[int]) -> HomogPoly:
        """Rename variable i to x_{positions[i]} in a ring with ``num_vars`` variables."""
        out = {}
        for e, c in self.terms.items():
            e2 = [0] * num_vars
            for i, k in zip(positions, e):
                e2[i] = k
            out[tuple(e2)] = c
        return HomogPoly._trusted(num_vars, self.degree, out)

    # -- text --------------------------------------------------------------
    def to_text(self) -> str:
        return format_poly(self)

    def __repr__(self):
        try:
            body = format_poly(self)
        except TypeError:
            body = f"{len(self.terms)} terms"
        return f"HomogPoly({self.num_vars} vars, degree {self.degree}: {body})"


def poly_mul(a: HomogPoly, b: HomogPoly) -> HomogPoly:
    if a.num_vars != b.num_vars:
        raise VarMismatch("polynomials live in different rings")
    out: dict = {}
    for ea, ca in a.terms.items():
        for eb, cb in b.terms.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            v = ca * cb
            out[e] = out[e] + v if e in out else v
    return HomogPoly._trusted(a.num_vars, a.degree + b.degree, out)


def linear_form(coeffs: Sequence) -> HomogPoly:
    n = len(coeffs)
    terms = {}
    for i, c in enumerate(coeffs):
        if c != 0:
            e = [0] * n
            e[i] = 1
            terms[tuple(e)] = rational(c) if isinstance(c, (int, str)) else c
    return HomogPoly._trusted(n, 1, terms)


def linear_coefficients(ell: HomogPoly | Sequence) -> list:
    if isinstance(ell, HomogPoly):
        if ell.degree != 1:
            raise DegreeMismatch("not a linear form")
        out = [mpq(0)] * ell.num_vars
        for e, c in ell.terms.items():
            out[e.index(1)] = c
        return out
    return list(ell)


# --------------------------------------------------------------------------
# contraction, powers, jets


def apolar_apply(g: HomogPoly, f: HomogPoly) -> HomogPoly:
    """Contraction g o f of degree deg f - deg g (see module docstring)."""
    if g.num_vars != f.num_vars:
        raise VarMismatch("dual form and polynomial have different variable counts")
    if g.degree > f.degree:
        raise DegreeMismatch("dual degree exceeds polynomial degree")
    out: dict = {}
    for a, ga in g.terms.items():
        for b, fb in f.terms.items():
            if all(x <= y for x, y in zip(a, b)):
                e = tuple(y - x for x, y in zip(a, b))
                v = ga * fb * contraction_weight(b, a)
                out[e] = out[e] + v if e in out else v
    return HomogPoly._trusted(f.num_vars, f.degree - g.degree, out)


def _monomials_on(support: Sequence[int], num_vars: int, degree: int):
    for sub in monomials(len(support), degree):
        e = [0] * num_vars
        for i, k in zip(support, sub):
            e[i] = k
        yield tuple(e), sub


def power_of_linear(ell, d: int) -> HomogPoly:
    """Expand l^d with exact multinomial coefficients."""
    coeffs = linear_coefficients(ell)
    n = len(coeffs)
    support = [i for i, c in enumerate(coeffs) if c != 0]
    if not support:
        return HomogPoly.zero(n, d)
    powers = {i: _powers(coeffs[i], d) for i in support}
    out = {}
    for e, sub in _monomials_on(support, n, d):
        v = multinomial(sub)
        for i, k in zip(support, sub):
            if k:
                v = powers[i][k] * v
        out[e] = v
    return HomogPoly._trusted(n, d, out)


def _powers(x, d: int) -> list:
    out = [mpq(1), x]
    for _ in range(d - 1):
        out.append(out[-1] * x)
    return out


@dataclass(frozen=True)
class CurvePath:
    """Polynomial path c(t) = sum_j t^j p_j in the affine cone over P^m."""

    points: tuple

    def __post_init__(self):
        pts = tuple(tuple(p) for p in self.points)
        if not pts:
            raise ValueError("a path needs at least one point")
        if len({len(p) for p in pts}) != 1:
            raise VarMismatch("path points have different lengths")
        if all(x == 0 for x in pts[0]):
            raise ValueError("the supporting point p0 of a path must be nonzero")
        object.__setattr__(self, "points", pts)

    @property
    def num_vars(self) -> int:
        return len(self.points[0])

    @property
    def order(self) -> int:
        """Index of the last point (the polynomial degree of the path in t)."""
        return len(self.points) - 1

    def at(self, t) -> list:
        out = [mpq(0)] * self.num_vars
        tp = mpq(1)
        for p in self.points:
            out = [o + tp * x for o, x in zip(out, p)]
            tp = tp * t
        return out

    def at_homogeneous(self, alpha, beta, e: int | None = None) -> list:
        """sum_k alpha^(e-k) beta^k p_k, the homogenised path of degree e."""
        e = self.order if e is None else e
        out = [mpq(0)] * self.num_vars
        for k, p in enumerate(self.points):
            w = alpha ** (e - k) * beta**k
            if w != 0:
                out = [o + w * x for o, x in zip(out, p)]
        return out

    def truncate(self, length: int) -> CurvePath:
        return CurvePath(self.points[:length])

    def transform(self, M) -> CurvePath:
        """Apply the point map p -> M p to every coefficient vector."""
        rows, _ = _rows_of(M)
        return CurvePath(tuple(tuple(sum((a * x for a, x in zip(r, p)), mpq(0)) for r in rows) for p in self.points))


def _truncated_mul(a: list, b: list, jmax: int) -> list:
    out = [mpq(0)] * min(jmax + 1, len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j in range(min(len(b), jmax + 1 - i)):
            y = b[j]
            if y != 0:
                out[i + j] = out[i + j] + x * y
    return out


def jet_coefficients(c: CurvePath, d: int, jmax: int) -> list[HomogPoly]:
    """[t^j] (c(t).x)^d for j = 0..jmax."""
    n = c.num_vars
    coords = []
    for i in range(n):
        poly = [p[i] for p in c.points]
        while poly and poly[-1] == 0:
            poly.pop()
        coords.append(poly)
    support = [i for i in range(n) if coords[i]]
    val = {i: next(k for k, x in enumerate(coords[i]) if x != 0) for i in support}
    power_cache: dict = {}

    def power(i: int, k: int) -> list:
        key = (i, k)
        if key not in power_cache:
            if k == 0:
                power_cache[key] = [mpq(1)]
            else:
                power_cache[key] = _truncated_mul(power(i, k - 1), coords[i], jmax)
        return power_cache[key]

    outs: list[dict] = [{} for _ in range(jmax + 1)]
    order = sorted(support, key=lambda i: val[i])

    def rec(pos: int, remaining: int, budget: int, exps: dict):
        if pos == len(order) - 1:
            i = order[pos]
            if remaining * val[i] > budget:
                return
            exps[i] = remaining
            _emit(exps)
            return
        i = order[pos]
        for k in range(remaining, -1, -1):
            if k * val[i] > budget:
                continue
            exps[i] = k
            rec(pos + 1, remaining - k, budget - k * val[i], exps)
        exps[i] = 0

    def _emit(exps: dict):
        series = [mpq(1)]
        for i in order:
            k = exps.get(i, 0)
            if k:
                series = _truncated_mul(series, power(i, k), jmax)
        e = [0] * n
        for i in order:
            e[i] = exps.get(i, 0)
        e = tuple(e)
        mult = multinomial(e)
        for j, v in enumerate(series):
            if v != 0:
                outs[j][e] = v * mult

    if order:
        rec(0, d, jmax, {})
    return [HomogPoly._trusted(n, d, o) for o in outs]


def jet_coefficient(c: CurvePath, j: int, d: int) -> HomogPoly:
    """Coefficient of t^j in (c(t).x)^d, without any factorial scaling."""
    if j > c.order * d:
        raise DegreeMismatch(f"jet order {j} exceeds path degree times d = {c.order * d}")
    return jet_coefficients(c, d, j)[j]


# --------------------------------------------------------------------------
# linear substitution


def _substitute_triangular(f: HomogPoly, rows: list[list], order: Iterable[int]) -> HomogPoly:
    """Substitute x_i -> rows[i].x one variable at a time in the given order.

    Correct when every row only involves variables already processed or the
    variable itself (triangular matrices processed in the matching order).
    """
    n = f.num_vars
    cur = dict(f.terms)
    for i in order:
        row = rows[i]
        if all((row[j] == 0) == (j != i) for j in range(n)) and row[i] == 1:
            continue
        cache: dict = {}
        new: dict = {}
        for e, c in cur.items():
            k = e[i]
            if k == 0:
                new[e] = new[e] + c if e in new else c
                continue
            if k not in cache:
                cache[k] = power_of_linear(row, k).terms
            base = list(e)
            base[i] = 0
            for pe, pc in cache[k].items():
                e2 = tuple(x + y for x, y in zip(base, pe))
                v = c * pc
                new[e2] = new[e2] + v if e2 in new else v
        cur = {e: c for e, c in new.items() if c != 0}
    return HomogPoly._trusted(n, f.degree, cur)


def _plu(rows: list[list]) -> tuple[list[int], list[list], list[list]]:
    """Decompose A = P^T L U with partial pivoting; works for singular A."""
    n = len(rows)
    U = [[rational(x) for x in r] for r in rows]
    L = [[mpq(int(i == j)) for j in range(n)] for i in range(n)]
    perm = list(range(n))
    for c in range(n):
        p = next((r for r in range(c, n) if U[r][c] != 0), None)
        if p is None:
            continue
        if p != c:
            U[c], U[p] = U[p], U[c]
            perm[c], perm[p] = perm[p], perm[c]
            for j in range(c):
                L[c][j], L[p][j] = L[p][j], L[c][j]
        for r in range(c + 1, n):
            if U[r][c] != 0:
                f = U[r][c] / U[c][c]
                L[r][c] = f
                U[r] = [x - f * y for x, y in zip(U[r], U[c])]
    return perm, L, U


def substitute_linear(f: HomogPoly, M) -> HomogPoly:
    """Return f(M x): variable x_i becomes the linear form given by row i of M."""
    rows, ncols = _rows_of(M)
    n = f.num_vars
    if len(rows) != n or ncols != n:
        raise VarMismatch(f"substitution matrix must be {n}x{n}")
    perm, L, U = _plu(rows)
    # A = P^T L U with (P A)[c] = A[perm[c]]; f(Ax) = f(P^T (L (U x)))
    g = HomogPoly._trusted(
        n, f.degree, {tuple(e[perm[c]] for c in range(n)): v for e, v in f.terms.items()}
    )
    g = _substitute_triangular(g, L, range(n))
    return _substitute_triangular(g, U, range(n - 1, -1, -1))


# --------------------------------------------------------------------------
# text grammar


_POWER = re.compile(r"^x(\d+)(?:\^(\d+))?$")
_COEFF = re.compile(r"^(\d+)(?:/(\d+))?$")


def parse_poly(text: str, num_vars: int | None = None) -> HomogPoly:
    """Parse e.g. ``126*x0^5*x1^4 + 252*x0^6*x1^2*x2 - 1/2*x4^9``."""
    s = re.sub(r"\s+", "", text)
    if not s:
        raise ParseError("empty polynomial")
    pieces = re.findall(r"[+-]?[^+-]+", s)
    if "".join(pieces) != s:
        raise ParseError(f"cannot parse polynomial {text!r}")
    raw = []
    for piece in pieces:
        sign = 1
        if piece[0] in "+-":
            sign = -1 if piece[0] == "-" else 1
            piece = piece[1:]
        if not piece:
            raise ParseError(f"dangling sign in {text!r}")
        coeff = mpq(sign)
        powers: dict[int, int] = {}
        for j, factor in enumerate(piece.split("*")):
            m = _POWER.match(factor)
            if m:
                i = int(m.group(1))
                powers[i] = powers.get(i, 0) + int(m.group(2) or 1)
                continue
            m = _COEFF.match(factor)
            if m and j == 0:
                den = int(m.group(2) or 1)
                if den == 0:
                    raise ParseError("zero denominator")
                coeff *= mpq(int(m.group(1)), den)
                continue
            raise ParseError(f"bad factor {factor!r} in {text!r}")
        raw.append((powers, coeff))
    top = max((max(p) for p, _ in raw if p), default=-1)
    nv = num_vars if num_vars is not None else max(top + 1, 1)
    if top >= nv:
        raise ParseError(f"variable x{top} out of range for {nv} variables")
    degrees = {sum(p.values()) for p, _ in raw}
    if len(degrees) != 1:
        raise ParseError("polynomial is not homogeneous")
    deg = degrees.pop()
    terms: dict = {}
    for p, c in raw:
        e = tuple(p.get(i, 0) for i in range(nv))
        terms[e] = terms.get(e, mpq(0)) + c
    return HomogPoly(nv, deg, terms)


def format_poly(f: HomogPoly) -> str:
    """Canonical text in graded lex order; coefficients must be rational."""
    if f.is_zero():
        return "0"
    parts = []
    for e, c in f.sorted_terms():
        q = rational(c)
        mono = "*".join(f"x{i}" if k == 1 else f"x{i}^{k}" for i, k in enumerate(e) if k)
        neg = q < 0
        a = -q if neg else q
        if mono and a == 1:
            body = mono
        elif mono:
            body = f"{rational_str(a)}*{mono}"
        else:
            body = rational_str(a)
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


__all__ = [
    "CurvePath",
    "HomogPoly",
    "Matrix",
    "apolar_apply",
    "format_poly",
    "jet_coefficient",
    "jet_coefficients",
    "linear_coefficients",
    "linear_form",
    "monomial_index",
    "monomials",
    "multinomial",
    "parse_poly",
    "poly_mul",
    "power_of_linear",
    "substitute_linear",
]
