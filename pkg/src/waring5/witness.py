"""Explicit Waring decompositions of rank size, their structure, and plane bounds.

A polynomial in the span of a jet scheme splits into one jet piece per
component. A reduced component contributes its support point. A component
of length b >= 2 lies on its degree-(b-1) rational normal curve, where the
piece pulls back to a jet-shaped binary form of degree (b-1)d whose
Sylvester decomposition has (b-1)(d-1)+1 terms.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

import gmpy2
import sympy
from gmpy2 import mpq, mpz

from .construct import MIN_DEGREE, SamplePoint
from .decomposition import (
    Decomposition,
    Verification,
    _proportional_exact,
    _proportional_numeric,
    concatenate,
    verify_decomposition,
)
from .errors import (
    BadType,
    DegreeMismatch,
    DegreeTooSmall,
    NotInSpan,
    NotPlanar,
    PullbackMismatch,
    RecoveryInconsistent,
    WitnessSearchFailed,
)
from .linalg import mat_rank, solve_linear, transpose
from .poly import CurvePath, HomogPoly, jet_coefficients, multinomial, poly_mul
from .scalars import DEFAULT_PRECISION, big_complex, precision_of
from .schemes import JetScheme, curves_through, line_intersection_degree, veronese_span_matrix
from .sylvester import binary_decomposition, jet_form, push_forward, rational_decomposition

__all__ = [
    "PlaneBound",
    "block_size",
    "decompose",
    "decompose_scheme",
    "jet_piece_coefficients",
    "merge_proportional",
    "plane_upper_bound",
    "structure_check",
    "verify_decomposition",
]

REDUCED = "reduced"


def block_size(length: int, d: int) -> int:
    """Number of terms a component of the given length contributes."""
    return 1 if length == 1 else (length - 1) * (d - 1) + 1


def block_label(index: int, length: int) -> str:
    return REDUCED if length == 1 else f"A{index + 1}"


def jet_piece_coefficients(f: HomogPoly, A: JetScheme) -> list[list]:
    """The coefficients c_ij with f = sum c_ij jet_j(path_i, d)."""
    rows = veronese_span_matrix(A, f.degree).to_rows()
    sol = solve_linear(transpose(rows), f.dense()) if rows else None
    if sol is None:
        raise NotInSpan("f is not in the span of the scheme's jets")
    out, k = [], 0
    for c in A.components:
        out.append(list(sol[k : k + c.length]))
        k += c.length
    return out


def decompose_scheme(
    f: HomogPoly,
    A: JetScheme,
    coefficients: Sequence[Sequence] | None = None,
    rational_only: bool = False,
    seed: int = 0,
    bits: int = DEFAULT_PRECISION,
) -> Decomposition:
    """Per-component witnesses, concatenated and verified against f."""
    d = f.degree
    if coefficients is None:
        coefficients = jet_piece_coefficients(f, A)
    parts = []
    for i, (comp, cs) in enumerate(zip(A.components, coefficients)):
        label = block_label(i, comp.length)
        if comp.length == 1:
            if cs[0] != 0:
                parts.append(Decomposition(((cs[0], comp.support),), "rational", (label,)))
            continue
        g = jet_form(cs, comp.path.order * d)
        if g.is_zero():
            continue
        bd = binary_decomposition(g, rational_only, seed + i, bits)
        if bd is None:
            raise WitnessSearchFailed(f"no rational witness for component {label} and numeric fallback is disabled")
        parts.append(push_forward(bd, comp.path, bits).relabel(label))
    D = concatenate(parts)
    check = verify_decomposition(f, D)
    if not check:
        raise PullbackMismatch("; ".join(check.reasons))
    return Decomposition(D.terms, D.exactness, D.structure, check.residual)


def decompose(sp: SamplePoint, rational_only: bool = False, seed: int = 0, bits: int = DEFAULT_PRECISION) -> Decomposition:
    return decompose_scheme(sp.f, sp.scheme, sp.coefficients, rational_only, seed, bits)


# --------------------------------------------------------------------------
# structure


def _in_span(points: Sequence, vec: Sequence, numeric: bool, bits: int) -> bool:
    rows = [list(p) for p in points]
    if numeric:
        rows = [[big_complex(x, bits) for x in r] for r in rows + [list(vec)]]
        return mat_rank(rows) == mat_rank(rows[:-1])
    return mat_rank(rows + [list(vec)]) == mat_rank(rows)


def structure_check(D: Decomposition, A: JetScheme, d: int) -> Verification:
    """Blocks sit in their component's span, avoid its support, and have the expected sizes."""
    reasons = []
    if D.structure is None or len(D.structure) != len(D.terms):
        return Verification(False, None, ["decomposition carries no per-term labels"])
    numeric = D.exactness == "numeric"
    bits = max(precision_of([x for _, v in D.terms for x in v]) or DEFAULT_PRECISION, 64)

    def same_point(a, b):
        return _proportional_numeric(a, b, bits) if numeric else _proportional_exact(a, b)

    groups: dict = {}
    for label, (_, vec) in zip(D.structure, D.terms):
        groups.setdefault(label, []).append(vec)
    expected = {block_label(i, c.length) for i, c in enumerate(A.components)}
    if set(groups) != expected:
        reasons.append(f"labels {sorted(groups)} do not match components {sorted(expected)}")

    for i, comp in enumerate(A.components):
        if comp.length == 1:
            continue
        label = block_label(i, comp.length)
        block = groups.get(label, [])
        if len(block) != block_size(comp.length, d):
            reasons.append(f"block {label} has {len(block)} terms, expected {block_size(comp.length, d)}")
        for vec in block:
            if not _in_span(comp.path.points, vec, numeric, bits):
                reasons.append(f"a term of block {label} lies outside the span of its component")
                break
        if any(same_point(vec, comp.support) for vec in block):
            reasons.append(f"block {label} uses the support point of its component")

    reduced = [c.support for c in A.components if c.length == 1]
    terms = list(groups.get(REDUCED, []))
    if len(terms) != len(reduced):
        reasons.append(f"{len(terms)} reduced terms for {len(reduced)} reduced components")
    else:
        for p in reduced:
            hit = next((k for k, vec in enumerate(terms) if same_point(vec, p)), None)
            if hit is None:
                reasons.append("a reduced component has no term at its point")
                break
            terms.pop(hit)
    return Verification(not reasons, None, reasons)


def merge_proportional(D: Decomposition, d: int) -> Decomposition:
    """Combine exactly proportional terms: lam (c l)^d is added to l^d as lam c^d."""
    merged: list = []
    for lam, vec in D.terms:
        for k, (mu, base) in enumerate(merged):
            if _proportional_exact(vec, base):
                i = next(j for j, x in enumerate(base) if x != 0)
                merged[k] = (mu + lam * (vec[i] / base[i]) ** d, base)
                break
        else:
            merged.append((lam, tuple(vec)))
    terms = tuple((lam, vec) for lam, vec in merged if lam != 0)
    return Decomposition(terms, D.exactness, None, D.residual)


# --------------------------------------------------------------------------
# plane bounds


@dataclass(frozen=True)
class PlaneBound:
    """An upper bound on the rank from a plane curve containing the scheme."""

    bound: int
    kind: str  # "smooth_conic", "line_pair" or "line_triple"
    curve: HomogPoly
    factors: tuple
    decomposition: Decomposition | None = None

    def to_json(self) -> dict:
        out = {
            "bound": self.bound,
            "kind": self.kind,
            "curve": self.curve.to_text(),
            "factors": [q.to_text() for q in self.factors],
        }
        if self.decomposition is not None:
            out["decomposition"] = self.decomposition.to_json()
        return out


_XYZ = sympy.symbols("x0 x1 x2")


def _to_expr(h: HomogPoly):
    out = 0
    for e, c in h.terms.items():
        out += sympy.Rational(int(c.numerator), int(c.denominator)) * sympy.Mul(*(v**k for v, k in zip(_XYZ, e)))
    return sympy.expand(out)


def _from_expr(expr, degree: int) -> HomogPoly:
    P = sympy.Poly(expr, *_XYZ)
    terms = {}
    for e, c in P.terms():
        c = sympy.Rational(c)
        terms[tuple(int(k) for k in e)] = mpq(int(c.p), int(c.q))
    return HomogPoly(3, degree, terms)


def _line_factors(h: HomogPoly) -> list[HomogPoly] | None:
    """The rational linear factors of h (with multiplicity), or None if some factor is not linear."""
    _, facs = sympy.factor_list(_to_expr(h), *_XYZ)
    out = []
    for fac, mult in facs:
        if sympy.Poly(fac, *_XYZ).total_degree() != 1:
            return None
        out.extend([_from_expr(fac, 1)] * int(mult))
    return out


def _primitive(h: HomogPoly) -> HomogPoly:
    """h scaled to coprime integer coefficients with a positive leading term."""
    den = mpz(1)
    for c in h.terms.values():
        den = gmpy2.lcm(den, c.denominator)
    nums = [c * den for c in h.terms.values()]
    g = mpz(0)
    for x in nums:
        g = gmpy2.gcd(g, x.numerator)
    lead = h.terms[min(h.terms, key=lambda e: tuple(-k for k in e))]
    scale = den / g if lead > 0 else -den / g
    return h.scale(mpq(scale))


def _symmetric_rank(Q: HomogPoly) -> int:
    B = [[mpq(0)] * 3 for _ in range(3)]
    for e, c in Q.terms.items():
        idx = [i for i, k in enumerate(e) for _ in range(k)]
        i, j = idx
        if i == j:
            B[i][i] = c
        else:
            B[i][j] = B[j][i] = c / 2
    return mat_rank(B)


def _coeffs(line: HomogPoly) -> list:
    return [line.coefficient(tuple(int(i == j) for j in range(3))) for i in range(3)]


def _line_through(p: Sequence, q: Sequence) -> HomogPoly:
    a = [p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2], p[0] * q[1] - p[1] * q[0]]
    return HomogPoly(3, 1, {tuple(int(i == j) for j in range(3)): a[i] for i in range(3) if a[i] != 0})


def _on_line(line: HomogPoly, p: Sequence) -> bool:
    return sum((a * x for a, x in zip(_coeffs(line), p)), mpq(0)) == 0


def _auxiliary_point(rng: random.Random, avoid: Sequence[HomogPoly]) -> list:
    while True:
        p = [mpq(rng.randint(-20, 20)) for _ in range(3)]
        if any(p) and not any(_on_line(L, p) for L in avoid):
            return p


def _contains(Q: HomogPoly, A: JetScheme) -> bool:
    """Q(c(t)) = O(t^b) on every component."""
    for comp in A.components:
        for jet in jet_coefficients(comp.path, Q.degree, comp.length - 1):
            if sum((c * jet.coefficient(e) / multinomial(e) for e, c in Q.terms.items()), mpq(0)) != 0:
                return False
    return True


def _residual_points(A: JetScheme, L: HomogPoly) -> list[tuple[tuple, int]]:
    """Support points of Res_L(A) with their lengths."""
    a = _coeffs(L)
    out = []
    for comp in A.components:
        order = next((j for j, p in enumerate(comp.path.points) if sum((x * y for x, y in zip(a, p)), mpq(0)) != 0), comp.length)
        rest = comp.length - min(order, comp.length)
        if rest:
            out.append((comp.support, rest))
    return out


def _line_path(L: HomogPoly) -> CurvePath:
    """A degree-1 parametrisation alpha*P + beta*R of the line L."""
    a = _coeffs(L)
    basis = [v for v in ([a[1], -a[0], 0], [a[2], 0, -a[0]], [0, a[2], -a[1]]) if any(v)]
    P = [mpq(x) for x in basis[0]]
    R = next([mpq(x) for x in v] for v in basis[1:] if mat_rank([P, v]) == 2)
    return CurvePath((tuple(P), tuple(R)))


def _conic_path(Q: HomogPoly, O: Sequence, rng: random.Random) -> CurvePath:
    """Projection from the rational point O: (alpha, beta) -> Q(v) O - 2 B(O, v) v, v = alpha U + beta W."""
    B = [[mpq(0)] * 3 for _ in range(3)]
    for e, c in Q.terms.items():
        i, j = [i for i, k in enumerate(e) for _ in range(k)]
        if i == j:
            B[i][i] = c
        else:
            B[i][j] = B[j][i] = c / 2

    def bil(x, y):
        return sum((B[i][j] * x[i] * y[j] for i in range(3) for j in range(3)), mpq(0))

    O = [mpq(x) for x in O]
    while True:
        U = [mpq(rng.randint(-9, 9)) for _ in range(3)]
        W = [mpq(rng.randint(-9, 9)) for _ in range(3)]
        if mat_rank([O, U, W]) < 3:
            continue
        p0 = [bil(U, U) * o - 2 * bil(O, U) * u for o, u in zip(O, U)]
        p1 = [2 * bil(U, W) * o - 2 * bil(O, U) * w - 2 * bil(O, W) * u for o, u, w in zip(O, U, W)]
        p2 = [bil(W, W) * o - 2 * bil(O, W) * w for o, w in zip(O, W)]
        if any(p0):
            return CurvePath((tuple(p0), tuple(p1), tuple(p2)))


def _curve_decomposition(f: HomogPoly, paths: Sequence[CurvePath], seed: int) -> Decomposition:
    """Split f over the curves' spans, then an exact binary witness on each piece."""
    d = f.degree
    rows, sizes = [], []
    for p in paths:
        jets = jet_coefficients(p, d, p.order * d)
        rows.extend(j.dense() for j in jets)
        sizes.append(len(jets))
    sol = solve_linear(transpose(rows), f.dense())
    if sol is None:
        raise NotInSpan("f is not in the span of the curve")
    parts, k = [], 0
    for i, (p, n) in enumerate(zip(paths, sizes)):
        g = jet_form(sol[k : k + n], p.order * d)
        k += n
        if not g.is_zero():
            parts.append(push_forward(rational_decomposition(g, seed + i), p))
    return merge_proportional(concatenate(parts), d)


def plane_upper_bound(
    f: HomogPoly, A: JetScheme, d: int | None = None, decompose: bool = False, seed: int = 0
) -> PlaneBound:
    """Bound 2d from a reduced conic through A, else 3d from a line triple."""
    d = f.degree if d is None else d
    if d != f.degree:
        raise DegreeMismatch(f"f has degree {f.degree}, not {d}")
    if A.num_vars != 3 or f.num_vars != 3:
        raise NotPlanar("plane bounds need f and A in 3 variables")
    if d < MIN_DEGREE:
        raise DegreeTooSmall(f"d = {d} is below {MIN_DEGREE}")
    if A.degree != 5:
        raise BadType(f"the scheme has degree {A.degree}, expected 5")
    jet_piece_coefficients(f, A)  # raises NotInSpan
    rng = random.Random(seed)

    conics = curves_through(A, 2)
    if len(conics) >= 2:
        common = sympy.gcd_list([_to_expr(q) for q in conics])
        L = _from_expr(common, 1)
        while True:
            Q = sum((c.scale(mpq(rng.randint(-9, 9))) for c in conics[1:]), conics[0])
            lines = _line_factors(Q)
            if lines and len(lines) == 2 and not _proportional_exact(_coeffs(lines[0]), _coeffs(lines[1])):
                break
        other = lines[1] if _proportional_exact(_coeffs(lines[0]), _coeffs(L)) else lines[0]
        kind, bound, curve, factors = "line_pair", 2 * d, Q, (L, other)
    elif len(conics) == 1:
        Q = conics[0]
        r = _symmetric_rank(Q)
        if r == 3:
            kind, bound, curve, factors = "smooth_conic", 2 * d, Q, (Q,)
        elif r == 2:
            lines = _line_factors(Q)
            kind, bound, curve, factors = "line_pair", 2 * d, Q, tuple(lines) if lines else (Q,)
        else:
            L = _line_factors(Q)[0]
            meet = line_intersection_degree(A, _coeffs(L))
            if meet != 3:
                raise RecoveryInconsistent(f"double conic line meets the scheme in degree {meet}, expected 3")
            residual = _residual_points(A, L)
            if len(residual) == 2:
                (q1, _), (q2, _) = residual
                o = _auxiliary_point(rng, [L, _line_through(q1, q2)])
                D1, D2 = _line_through(q1, o), _line_through(q2, o)
            else:
                (q, _), = residual
                o1 = _auxiliary_point(rng, [L])
                o2 = _auxiliary_point(rng, [L, _line_through(q, o1)])
                D1, D2 = _line_through(q, o1), _line_through(q, o2)
            kind, bound, factors = "line_triple", 3 * d, (L, D1, D2)
            curve = poly_mul(poly_mul(L, D1), D2)
    else:
        raise RecoveryInconsistent("no conic through a degree-5 plane scheme")
    if not _contains(curve, A):
        raise RecoveryInconsistent(f"the {kind} does not contain the scheme")

    decomposition = None
    if decompose:
        if kind == "smooth_conic":
            paths = [_conic_path(curve, A.components[0].support, rng)]
        elif all(q.degree == 1 for q in factors):
            paths = [_line_path(q) for q in factors]
        else:
            paths = []  # a pair of conjugate lines has no rational parametrisation
        if paths:
            decomposition = _curve_decomposition(f, paths, seed)
            check = verify_decomposition(f, decomposition)
            if not check or len(decomposition) > bound:
                raise PullbackMismatch("plane witness failed verification")
    return PlaneBound(bound, kind, _primitive(curve), tuple(_primitive(q) for q in factors), decomposition)
