"""Sylvester's algorithm for binary forms and its push-forward along curves.

Binary forms are ``HomogPoly`` objects in two variables (x, y); a term of a
binary decomposition is lambda * (alpha*x + beta*y)^D, stored as the pair
(lambda, (alpha, beta)).

Jet-shaped forms g = sum_{n<=k} g_n x^(D-n) y^n with g_k != 0 and 2k <= D
(exactly the pull-backs of jet pieces) have rank r = D-k+1 and are handled
in closed form: with G_n = g_n / C(D, n), distinct c_1..c_r give
g = sum_i lambda_i (c_i x + y)^D, lambda_i = G_k / P'(c_i), P = prod(T - c_i),
precisely when the complete homogeneous symmetric functions satisfy
h_q(c) = G_(k-q) / G_k for q = 1..k.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product
from math import comb
from typing import Sequence

import gmpy2
import mpmath
import sympy
from gmpy2 import mpc, mpfr, mpq

from .apolar import apolar_ideal_slice, catalecticant_rank
from .decomposition import Decomposition, verify_decomposition
from .errors import NotOnCurve, PullbackMismatch, ZeroForm
from .linalg import solve_linear
from .poly import CurvePath, HomogPoly, apolar_apply, jet_coefficients, poly_mul
from .scalars import (
    DEFAULT_PRECISION,
    BigComplex,
    Cyclotomic,
    big_complex,
    magnitude,
    working_precision,
)

RANDOM_DRAWS = 32
SWEEP_RANGE = range(-2, 3)
RATIONAL_TRIES = 16
MAX_DENOMINATOR = 10**6


@dataclass(frozen=True)
class BinaryDecomposition:
    pairs: tuple
    exactness: str
    degree: int
    residual: object | None = None

    def __len__(self) -> int:
        return len(self.pairs)

    def coefficients(self, bits: int = DEFAULT_PRECISION) -> list:
        """Coefficients of x^(D-n) y^n, n = 0..D, of the re-expanded sum."""
        D = self.degree
        out = [mpq(0)] * (D + 1)
        with working_precision(bits):
            for lam, (a, b) in self.pairs:
                for n in range(D + 1):
                    if b == 0 and n > 0 or a == 0 and n < D:
                        continue
                    out[n] = out[n] + comb(D, n) * lam * a ** (D - n) * b**n
        return out

    def expand(self, bits: int = DEFAULT_PRECISION) -> HomogPoly:
        D = self.degree
        return HomogPoly._trusted(2, D, {(D - n, n): c for n, c in enumerate(self.coefficients(bits))})


# --------------------------------------------------------------------------
# helpers


def binary_coefficients(g: HomogPoly) -> list:
    D = g.degree
    return [g.coefficient((D - n, n)) for n in range(D + 1)]


def _check_binary(g: HomogPoly) -> None:
    if g.num_vars != 2:
        raise ValueError("binary forms have exactly two variables")
    if g.is_zero():
        raise ZeroForm("the zero form has no decomposition")


def _to_sympy(q) -> sympy.Rational:
    q = mpq(q)
    return sympy.Rational(int(q.numerator), int(q.denominator))


def _dehomogenise(h: HomogPoly) -> tuple[int, sympy.Poly]:
    """(multiplicity of the root [1:0], h(T, 1) as a polynomial in T)."""
    coeffs = binary_coefficients(h)  # coefficient of X^(r-i) Y^i
    inf = next(i for i, c in enumerate(coeffs) if c != 0)
    T = sympy.Symbol("T")
    return inf, sympy.Poly([_to_sympy(c) for c in coeffs[inf:]], T, domain=sympy.QQ)


def is_squarefree(h: HomogPoly) -> bool:
    """No repeated projective root (gcd with the derivative is constant)."""
    inf, p = _dehomogenise(h)
    if inf > 1:
        return False
    return p.degree() <= 0 or sympy.gcd(p, p.diff()).degree() == 0


def _combine(basis: Sequence[HomogPoly], weights: Sequence[int]) -> HomogPoly:
    out = HomogPoly.zero(basis[0].num_vars, basis[0].degree)
    for w, b in zip(weights, basis):
        if w:
            out = out + b.scale(mpq(w))
    return out


def _squarefree_member(basis: Sequence[HomogPoly], rng: random.Random) -> HomogPoly | None:
    """A square-free element of span(basis): random draws, then a small sweep."""
    if not basis:
        return None
    if len(basis) == 1:
        return basis[0] if is_squarefree(basis[0]) else None
    for _ in range(RANDOM_DRAWS):
        h = _combine(basis, [rng.randint(-50, 50) for _ in basis])
        if not h.is_zero() and is_squarefree(h):
            return h
    for weights in product(SWEEP_RANGE, repeat=len(basis)):
        if any(weights):
            h = _combine(basis, weights)
            if not h.is_zero() and is_squarefree(h):
                return h
    return None


def first_kernel_degree(g: HomogPoly) -> int:
    """Smallest r with a nonzero degree-r apolar form (binary search; kernels grow with r)."""
    lo, hi = 1, g.degree // 2 + 1
    while lo < hi:
        mid = (lo + hi) // 2
        if catalecticant_rank(g, mid) < mid + 1:
            hi = mid
        else:
            lo = mid + 1
    return lo


def _rank_and_element(g: HomogPoly, rng: random.Random) -> tuple[int, HomogPoly | None]:
    r1 = first_kernel_degree(g)
    h = _squarefree_member(apolar_ideal_slice(g, r1), rng)
    if h is not None:
        return r1, h
    return g.degree - r1 + 2, None


def binary_rank(g: HomogPoly, seed: int = 0) -> int:
    """Waring rank of a binary form by Sylvester's r1 / (D - r1 + 2) dichotomy."""
    _check_binary(g)
    if g.degree == 0:
        return 1
    return _rank_and_element(g, random.Random(seed))[0]


# --------------------------------------------------------------------------
# root extraction


def _rational_roots(h: HomogPoly) -> list[tuple] | None:
    """All projective roots of h if they are rational and simple."""
    inf, p = _dehomogenise(h)
    roots = [(mpq(1), mpq(0))] * inf
    if p.degree() > 0:
        _, factors = sympy.factor_list(p)
        for fac, mult in factors:
            if fac.degree() != 1 or mult != 1:
                return None
            a, b = fac.all_coeffs()
            t = -b / a
            if t.q > MAX_DENOMINATOR:
                return None
            roots.append((mpq(int(t.p), int(t.q)), mpq(1)))
    return roots


def _mp_to_mpc(z, bits: int) -> BigComplex:
    digits = int(bits * 0.30103) + 10
    return mpc(
        f"({mpmath.nstr(mpmath.re(z), digits)} {mpmath.nstr(mpmath.im(z), digits)})", precision=bits
    )


def _numeric_roots(h: HomogPoly, bits: int) -> list[tuple]:
    inf, p = _dehomogenise(h)
    roots = [(mpc(1, precision=bits), mpc(0, precision=bits))] * inf
    if p.degree() > 0:
        with mpmath.workprec(bits + 64):
            coeffs = [mpmath.mpf(int(c.p)) / int(c.q) for c in p.all_coeffs()]
            found = mpmath.polyroots(coeffs, maxsteps=400, extraprec=2 * bits)
        roots.extend((_mp_to_mpc(z, bits), mpc(1, precision=bits)) for z in found)
    return roots


def _coefficients_from_roots(g: HomogPoly, roots: list[tuple], bits: int) -> list | None:
    """Solve for lambda on the power matrix of the roots."""
    D = g.degree
    numeric = any(isinstance(x, BigComplex) for r in roots for x in r)
    with working_precision(bits):
        rows = [[comb(D, n) * a ** (D - n) * b**n for a, b in roots] for n in range(D + 1)]
        rhs = binary_coefficients(g)
        if numeric:
            rows = [[big_complex(x, bits) for x in r] for r in rows]
            rhs = [big_complex(x, bits) for x in rhs]
        else:
            rows = [[mpq(x) for x in r] for r in rows]
        return solve_linear(rows, rhs)


def _binary_residual(g: HomogPoly, bd: BinaryDecomposition, bits: int):
    got = bd.coefficients(bits)
    want = binary_coefficients(g)
    with working_precision(bits):
        scale = max(magnitude(c, bits) for c in want)
        diff = max(magnitude(big_complex(a, bits) - big_complex(b, bits), bits) for a, b in zip(want, got))
        return diff / scale


# --------------------------------------------------------------------------
# jet-shaped forms


def _jet_shape(coeffs: list) -> tuple[int, bool] | None:
    D = len(coeffs) - 1
    support = [n for n, c in enumerate(coeffs) if c != 0]
    if 2 * support[-1] <= D:
        return support[-1], False
    if 2 * (D - support[0]) <= D:
        return D - support[0], True
    return None


def _symmetric_targets(G: list, k: int) -> list:
    """Signed top coefficients P_0..P_k of prod(T - c_i) forced by h_q = G_(k-q)/G_k."""
    h = [mpq(1)] + [G[k - q] / G[k] for q in range(1, k + 1)]
    e = [mpq(1)]
    for q in range(1, k + 1):
        s = sum(((-1) ** i * e[i] * h[q - i] for i in range(q)), mpq(0))
        e.append((-1) ** (q + 1) * s)
    return [(-1) ** q * e[q] for q in range(k + 1)]


def _derivative_at_roots(cs: list) -> list:
    out = []
    for i, c in enumerate(cs):
        p = mpq(1)
        for j, x in enumerate(cs):
            if j != i:
                p = (c - x) * p
        out.append(p)
    return out


def _distinct_integers(rng: random.Random, count: int, exclude=()) -> list:
    span = 3 * count + 3
    pool = [x for x in range(-span, span + 1) if x not in exclude]
    return [mpq(x) for x in rng.sample(pool, count)]


def _jet_rational_roots(P: list, r: int, k: int, rng: random.Random) -> list | None:
    """Distinct rational roots with prescribed top coefficients P_0..P_k, if found."""
    if k == 1:
        for _ in range(64):
            free = _distinct_integers(rng, r - 1)
            last = -P[1] - sum(free, mpq(0))
            if last not in free:
                return free + [last]
        return None
    T = sympy.Symbol("T")
    for _ in range(RATIONAL_TRIES):
        free = _distinct_integers(rng, r - k)
        F = [mpq(1)]
        for f in free:  # multiply by (T - f)
            F = [a - f * b for a, b in zip(F + [mpq(0)], [mpq(0)] + F)]
        rho = [mpq(1)]
        for q in range(1, k + 1):
            rho.append(P[q] - sum((F[i] * rho[q - i] for i in range(1, min(q, r - k) + 1)), mpq(0)))
        R = sympy.Poly([_to_sympy(x) for x in rho], T, domain=sympy.QQ)
        _, factors = sympy.factor_list(R)
        if all(fac.degree() == 1 and mult == 1 for fac, mult in factors):
            rest = []
            for fac, _ in factors:
                a, b = fac.all_coeffs()
                t = -b / a
                rest.append(mpq(int(t.p), int(t.q)))
            if not set(rest) & set(free):
                return free + rest
    return None


def _jet_numeric_roots(P: list, r: int, k: int, bits: int) -> list:
    """Roots of T^(r-k) E(T) - rho^r, E(T) = sum_q P_q T^(k-q), refined by Newton."""
    work = bits + 32
    with working_precision(work):
        E = [mpc(x, precision=work) for x in P]
        bound = max((abs(E[q]) ** (mpfr(1) / q) for q in range(1, k + 1)), default=mpfr(0))
        rho = 4 * (bound + 1)
        tol = mpfr(2) ** (-(bits + 8))

        def value(z):
            ev, dv = mpc(0), mpc(0)
            for q, c in enumerate(E):
                dv = dv * z + ev
                ev = ev * z + c
            zp = z ** (r - k - 1)
            return zp * z * ev - rho_r, (r - k) * zp * ev + zp * z * dv

        for _ in range(12):
            rho_r = rho**r
            zs = [rho * gmpy2.root_of_unity(r, i) * gmpy2.root_of_unity(4 * r, 1) for i in range(r)]
            for _ in range(200):
                step = 0
                for i, z in enumerate(zs):
                    v, dv = value(z)
                    delta = v / dv
                    zs[i] = z - delta
                    step = max(step, abs(delta) / abs(zs[i]))
                if step < tol:
                    break
            gap = min(abs(a - b) for i, a in enumerate(zs) for b in zs[i + 1 :])
            if step < tol and gap > rho / (16 * r):
                return [mpc(z, precision=bits) for z in zs]
            rho = 2 * rho
    raise PullbackMismatch("Newton iteration for jet roots did not converge")


def _jet_decomposition(coeffs: list, rational_only: bool, rng: random.Random, bits: int) -> BinaryDecomposition | None:
    D = len(coeffs) - 1
    k, swapped = _jet_shape(coeffs)
    if swapped:
        coeffs = coeffs[::-1]
    G = [coeffs[n] / comb(D, n) for n in range(k + 1)]

    def pair(c):
        one = mpq(1) if not isinstance(c, BigComplex) else mpc(1, precision=bits)
        return (one, c) if swapped else (c, one)

    if k == 0:
        root = (mpq(0), mpq(1)) if swapped else (mpq(1), mpq(0))
        return BinaryDecomposition(((G[0], root),), "rational", D)
    r = D - k + 1
    P = _symmetric_targets(G, k)
    roots = _jet_rational_roots(P, r, k, rng)
    if roots is not None:
        lams = [G[k] / p for p in _derivative_at_roots(roots)]
        return BinaryDecomposition(tuple((lam, pair(c)) for lam, c in zip(lams, roots)), "rational", D)
    if rational_only:
        return None
    if all(x == 0 for x in P[1:]):
        # prod(T - zeta^i) = T^r - 1 has e_1 = ... = e_(r-1) = 0
        zs = [Cyclotomic.root_of_unity(r, i) for i in range(r)]
        pairs = tuple((G[k] * z / r, pair(z)) for z in zs)
        return BinaryDecomposition(pairs, "cyclotomic", D)
    zs = _jet_numeric_roots(P, r, k, bits)
    with working_precision(bits):
        lams = [G[k] / p for p in _derivative_at_roots(zs)]
        bd = BinaryDecomposition(tuple((lam, pair(z)) for lam, z in zip(lams, zs)), "numeric", D)
    g = HomogPoly._trusted(2, D, {(D - n, n): c for n, c in enumerate(coeffs[::-1] if swapped else coeffs)})
    return BinaryDecomposition(bd.pairs, "numeric", D, _binary_residual(g, bd, bits))


# --------------------------------------------------------------------------
# public entry points


def binary_decomposition(
    g: HomogPoly, rational_only: bool = False, seed: int = 0, bits: int = DEFAULT_PRECISION
) -> BinaryDecomposition | None:
    """A decomposition of length binary_rank(g): rational when found, else cyclotomic or numeric.

    With ``rational_only`` nothing but a rational decomposition is returned
    (None when the search fails).
    """
    _check_binary(g)
    D = g.degree
    rng = random.Random(seed)
    coeffs = binary_coefficients(g)
    if D == 0:
        return BinaryDecomposition(((coeffs[0], (mpq(1), mpq(0))),), "rational", 0)
    if _jet_shape(coeffs) is not None:
        return _jet_decomposition(coeffs, rational_only, rng, bits)

    rank, h = _rank_and_element(g, rng)
    basis = apolar_ideal_slice(g, rank) if h is None else [h]
    candidates = [h] if h is not None else []
    if len(basis) > 1:
        for _ in range(RATIONAL_TRIES):
            c = _squarefree_member(basis, rng)
            if c is not None:
                candidates.append(c)
    for cand in candidates:
        roots = _rational_roots(cand)
        if roots is not None:
            lams = _coefficients_from_roots(g, roots, bits)
            if lams is not None:
                return BinaryDecomposition(tuple(zip(lams, roots)), "rational", D)
    if rational_only or not candidates:
        return None
    roots = _numeric_roots(candidates[0], bits)
    lams = _coefficients_from_roots(g, roots, bits)
    if lams is None:
        raise PullbackMismatch("numeric Sylvester system was inconsistent")
    bd = BinaryDecomposition(tuple(zip(lams, roots)), "numeric", D)
    return BinaryDecomposition(bd.pairs, "numeric", D, _binary_residual(g, bd, bits))


def rational_decomposition(g: HomogPoly, seed: int = 0, tries: int = 64) -> BinaryDecomposition:
    """An exact rational decomposition with at most deg g terms (not minimal in general).

    D - 1 distinct rational roots are fixed at random. The apolar form of
    degree D with those roots has one unknown linear factor, and h o g = 0
    is a single linear condition on it, so the last root is rational too.
    """
    _check_binary(g)
    D = g.degree
    if D <= 1:
        coeffs = binary_coefficients(g)
        point = (mpq(1), mpq(0)) if D == 0 else (coeffs[0], coeffs[1])
        return BinaryDecomposition(((mpq(coeffs[0]) if D == 0 else mpq(1), point),), "rational", D)
    rng = random.Random(seed)
    for _ in range(tries):
        roots = [(c, mpq(1)) for c in _distinct_integers(rng, D - 1)]
        P = HomogPoly._trusted(2, 0, {(0, 0): mpq(1)})
        for a, b in roots:  # the factor b X - a Y vanishes at (a, b)
            P = poly_mul(P, HomogPoly(2, 1, {(1, 0): b, (0, 1): -a}))
        sx = apolar_apply(P.mul_var(0), g).coefficient((0, 0))
        sy = apolar_apply(P.mul_var(1), g).coefficient((0, 0))
        # the last factor u X + v Y with u sx + v sy = 0 vanishes at (sx, sy)
        if sx != 0 or sy != 0:
            last = (mpq(sx), mpq(sy))
            if any(last[0] * b == last[1] * a for a, b in roots):
                continue
            roots.append(last)
        lams = _coefficients_from_roots(g, roots, DEFAULT_PRECISION)
        if lams is None:
            raise PullbackMismatch("apolar roots did not give a consistent system")
        pairs = tuple((lam, r) for lam, r in zip(lams, roots) if lam != 0)
        return BinaryDecomposition(pairs, "rational", D)
    raise PullbackMismatch("could not place distinct rational roots")


def jet_form(coefficients: Sequence, D: int) -> HomogPoly:
    """Binary form of degree D pulling back sum_n y_n * jet_n along a path of order D/d."""
    return HomogPoly._trusted(2, D, {(D - n, n): y * comb(D, n) for n, y in enumerate(coefficients) if y != 0})


def _pullback(f: HomogPoly, path: CurvePath, d: int, jmax: int) -> list | None:
    jets = jet_coefficients(path, d, jmax)
    keys = sorted(set(f.terms).union(*(j.terms for j in jets)))
    rows = [[j.coefficient(e) for j in jets] for e in keys]
    return solve_linear(rows, [f.coefficient(e) for e in keys]) if keys else [mpq(0)] * len(jets)


def curve_pullback(f: HomogPoly, path: CurvePath, d: int) -> HomogPoly:
    """The binary form g of degree e*d mapping to f under (alpha u + beta v)^D -> (path(alpha, beta) . x)^d."""
    e = path.order
    D = e * d
    y = _pullback(f, path, d, e)
    if y is None and D > e:
        y = _pullback(f, path, d, D)
    if y is None:
        raise NotOnCurve("the polynomial is not in the span of the curve's d-th powers")
    return jet_form(y, D)


def push_forward(bd: BinaryDecomposition, path: CurvePath, bits: int = DEFAULT_PRECISION) -> Decomposition:
    e = path.order
    with working_precision(bits):
        terms = tuple((lam, tuple(path.at_homogeneous(a, b, e))) for lam, (a, b) in bd.pairs)
    return Decomposition(terms, bd.exactness, None, bd.residual)


def curve_rank_decomposition(
    f: HomogPoly,
    path: CurvePath,
    d: int | None = None,
    rational_only: bool = False,
    seed: int = 0,
    bits: int = DEFAULT_PRECISION,
) -> Decomposition | None:
    """Decompose f along the curve traced by ``path`` via its binary pull-back."""
    d = f.degree if d is None else d
    if d != f.degree:
        raise NotOnCurve(f"degree mismatch: f has degree {f.degree}, asked for {d}")
    g = curve_pullback(f, path, d)
    if g.is_zero():
        raise ZeroForm("the zero polynomial has no decomposition")
    bd = binary_decomposition(g, rational_only, seed, bits)
    if bd is None:
        return None
    D = push_forward(bd, path, bits)
    check = verify_decomposition(f, D)
    if not check.ok:
        raise PullbackMismatch("; ".join(check.reasons))
    return Decomposition(D.terms, D.exactness, None, check.residual)
