"""Curvilinear zero-dimensional schemes given by jets along polynomial paths.

Also hosts the Hilbert function bookkeeping h0/h1 of I_A(d) and the search
for low-degree plane curves that explain h1 > 0 for a reduced point set.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Sequence

from gmpy2 import mpq

from .errors import BadType, DependentScheme, NonReducedInput, VarMismatch
from .linalg import Matrix, mat_kernel, mat_rank, row_echelon, solve_linear, transpose
from .poly import CurvePath, HomogPoly, format_poly, jet_coefficients, monomials, multinomial, power_of_linear, substitute_linear
from .scalars import rational, rational_str


@dataclass(frozen=True, order=True)
class SchemeType:
    """Combinatorial type (s; b_1, ..., b_s) with b_1 >= ... >= b_s >= 1."""

    degrees: tuple

    def __post_init__(self):
        degs = tuple(int(b) for b in self.degrees)
        if not degs or min(degs) < 1:
            raise BadType(f"component degrees must be positive, got {degs}")
        object.__setattr__(self, "degrees", tuple(sorted(degs, reverse=True)))

    @property
    def s(self) -> int:
        return len(self.degrees)

    @property
    def total(self) -> int:
        return sum(self.degrees)

    @classmethod
    def parse(cls, text: str) -> SchemeType:
        m = re.fullmatch(r"\s*(\d+)\s*[:;]\s*(\d+(?:\s*,\s*\d+)*)\s*", text)
        if not m:
            raise BadType(f"cannot parse scheme type {text!r}; expected 's:b1,...,bs'")
        s = int(m.group(1))
        degs = tuple(int(x) for x in m.group(2).split(","))
        if s != len(degs):
            raise BadType(f"type {text!r} announces {s} components but lists {len(degs)}")
        return cls(degs)

    def __str__(self) -> str:
        return f"{self.s}:" + ",".join(str(b) for b in self.degrees)


# the seven types of total degree 5, ordered by the rank they force (largest first)
DEGREE_FIVE_TYPES = tuple(
    SchemeType(t) for t in [(5,), (3, 2), (4, 1), (3, 1, 1), (2, 2, 1), (2, 1, 1, 1), (1, 1, 1, 1, 1)]
)


@dataclass(frozen=True)
class JetComponent:
    """The length-``length`` jet at ``path(0)`` along ``path``."""

    path: CurvePath
    length: int

    def __post_init__(self):
        if self.length < 1:
            raise BadType("component length must be at least 1")
        pts = list(self.path.points[: self.length])
        zero = (mpq(0),) * self.path.num_vars
        pts += [zero] * (self.length - len(pts))
        object.__setattr__(self, "path", CurvePath(tuple(tuple(rational(x) if isinstance(x, (int, str)) else x for x in p) for p in pts)))

    @property
    def support(self) -> tuple:
        return self.path.points[0]

    def jets(self, d: int) -> list[HomogPoly]:
        if self.length == 1:
            return [power_of_linear(self.support, d)]
        return jet_coefficients(self.path, d, self.length - 1)


def proportional(p: Sequence, q: Sequence) -> bool:
    """True when p and q define the same projective point (both nonzero)."""
    n = len(p)
    i = next(k for k in range(n) if p[k] != 0)
    if q[i] == 0:
        return False
    return all(p[i] * q[k] == q[i] * p[k] for k in range(n))


@dataclass(frozen=True)
class JetScheme:
    """Disjoint union of jets with pairwise distinct supports in P^m."""

    components: tuple
    m: int

    def __post_init__(self):
        comps = tuple(self.components)
        for c in comps:
            if c.path.num_vars != self.m + 1:
                raise VarMismatch(f"component lives in {c.path.num_vars} coordinates, expected {self.m + 1}")
        for a, b in combinations(comps, 2):
            if proportional(a.support, b.support):
                raise BadType("two components share a support point")
        object.__setattr__(self, "components", comps)

    @property
    def degree(self) -> int:
        return sum(c.length for c in self.components)

    @property
    def type(self) -> SchemeType:
        return SchemeType(tuple(c.length for c in self.components))

    @property
    def num_vars(self) -> int:
        return self.m + 1

    def truncations(self) -> list[JetScheme]:
        """The maximal proper subschemes: drop the last jet of one component."""
        out = []
        for i, c in enumerate(self.components):
            rest = list(self.components)
            if c.length == 1:
                del rest[i]
            else:
                rest[i] = JetComponent(c.path, c.length - 1)
            out.append(JetScheme(tuple(rest), self.m))
        return out

    def transform(self, M) -> JetScheme:
        """Image of the scheme under the point map p -> M p."""
        return JetScheme(tuple(JetComponent(c.path.transform(M), c.length) for c in self.components), self.m)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "components": [
                {"length": c.length, "path": [[rational_str(x) for x in p] for p in c.path.points]}
                for c in self.components
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> JetScheme:
        try:
            m = int(obj["m"])
            comps = tuple(
                JetComponent(CurvePath(tuple(tuple(rational(x) for x in p) for p in c["path"])), int(c["length"]))
                for c in obj["components"]
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise BadType(f"malformed scheme JSON: {exc}") from exc
        return cls(comps, m)


def equivalent(A: JetScheme, B: JetScheme) -> bool:
    """Equality of schemes, independent of how the jet paths are parametrised.

    The ideal of a scheme of degree k is generated in degree <= k, so A = B
    exactly when their degree-k parts agree, i.e. when the spans of the
    degree-k jets coincide.
    """
    if A.m != B.m or A.type != B.type:
        return False
    unused = list(B.components)
    for a in A.components:
        match = next((b for b in unused if b.length == a.length and proportional(a.support, b.support)), None)
        if match is None:
            return False
        unused.remove(match)
    k = A.degree
    ra, rb = veronese_span_matrix(A, k).to_rows(), veronese_span_matrix(B, k).to_rows()
    r = mat_rank(ra)
    return r == mat_rank(rb) == mat_rank(ra + rb)


def veronese_span_matrix(A: JetScheme, d: int) -> Matrix:
    """One row per jet: the coefficient vector of each jet coefficient of each component."""
    rows = []
    for c in A.components:
        rows.extend(j.dense() for j in c.jets(d))
    return Matrix.from_rows(rows, comb(A.m + d, d))


def curves_through(A: JetScheme, k: int) -> list[HomogPoly]:
    """Basis of the degree-k forms Q with Q(c_i(t)) = O(t^(b_i)) on every component."""
    mons = monomials(A.num_vars, k)
    weights = [mpq(1, multinomial(e)) for e in mons]
    rows = [[x * w for x, w in zip(r, weights)] for r in veronese_span_matrix(A, k).to_rows()]
    if not rows:
        return [HomogPoly._trusted(A.num_vars, k, {e: mpq(1)}) for e in mons]
    return [HomogPoly._trusted(A.num_vars, k, {e: x for e, x in zip(mons, v) if x != 0}) for v in mat_kernel(rows)]


def line_intersection_degree(A: JetScheme, line: Sequence) -> int:
    """deg(L cap A) for the hyperplane L = sum line_i x_i: per component min(b, order of L(c(t)))."""
    total = 0
    for c in A.components:
        order = next((j for j, p in enumerate(c.path.points) if sum((a * x for a, x in zip(line, p)), mpq(0)) != 0), c.length)
        total += min(order, c.length)
    return total


def is_linearly_independent(A: JetScheme) -> bool:
    return mat_rank(veronese_span_matrix(A, 1)) == A.degree


def require_independent(A: JetScheme) -> None:
    if not is_linearly_independent(A):
        raise DependentScheme("the scheme does not span a linear space of dimension deg - 1")


def hilbert_h0_h1(A: JetScheme, d: int) -> tuple[int, int]:
    r = mat_rank(veronese_span_matrix(A, d))
    return comb(A.m + d, d) - r, A.degree - r


# --------------------------------------------------------------------------
# reduced point sets


def _check_reduced(Z: Sequence[Sequence]) -> list[list]:
    pts = [[rational(x) if isinstance(x, (int, str)) else x for x in p] for p in Z]
    if len({len(p) for p in pts}) > 1:
        raise VarMismatch("points have different numbers of coordinates")
    for p in pts:
        if all(x == 0 for x in p):
            raise NonReducedInput("the zero vector is not a projective point")
    for i, j in combinations(range(len(pts)), 2):
        if proportional(pts[i], pts[j]):
            raise NonReducedInput(f"points {i} and {j} coincide")
    return pts


def points_h1(Z: Sequence[Sequence], d: int) -> int:
    """h1(I_Z(d)) for a reduced set of rational points.

    The evaluation matrix E has E W E^T = [(p_i . p_j)^d] with W the diagonal
    of multinomial coefficients; W is positive definite and the points are
    real, so both matrices have the same rank.
    """
    pts = _check_reduced(Z)
    if not pts:
        return 0
    gram = [[sum((a * b for a, b in zip(p, q)), mpq(0)) ** d for q in pts] for p in pts]
    return len(pts) - mat_rank(gram)


@dataclass(frozen=True)
class CurveWitness:
    """A line, conic or plane cubic containing ``count`` points of Z.

    ``basis`` spans the line (2 vectors) or the plane (3 vectors); ``equation``
    is the conic/cubic in the coordinates of ``basis`` (None for lines).
    """

    kind: str
    count: int
    basis: tuple
    equation: HomogPoly | None
    indices: tuple

    def coordinates(self, p: Sequence) -> list | None:
        """Coordinates of p in ``basis``, or None when p is outside the span."""
        return solve_linear(transpose(self.basis), list(p))

    def contains(self, p: Sequence) -> bool:
        u = self.coordinates(p)
        if u is None:
            return False
        return self.equation is None or self.equation.evaluate(u) == 0

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "count": self.count,
            "basis": [[rational_str(x) for x in b] for b in self.basis],
            "indices": list(self.indices),
        }
        if self.equation is not None:
            out["equation"] = format_poly(self.equation)
        return out


def _span_members(basis_red, pts) -> list[int]:
    out = []
    for idx, p in enumerate(pts):
        coords = [p[piv] for piv, _ in basis_red]
        if all(
            sum((c * row[k] for c, (_, row) in zip(coords, basis_red)), mpq(0)) == p[k]
            for k in range(len(p))
        ):
            out.append(idx)
    return out


def _curve_through(plane_coords: list[list], degree: int) -> list[HomogPoly]:
    mons = monomials(3, degree)
    rows = []
    for u in plane_coords:
        row = []
        for e in mons:
            v = mpq(1)
            for x, k in zip(u, e):
                if k:
                    v *= x**k
            row.append(v)
        rows.append(row)
    return [HomogPoly._trusted(3, degree, dict(zip(mons, v))) for v in mat_kernel(Matrix.from_rows(rows, len(mons)))]


def _plane_curve(pts, members, red, degree, threshold, max_subsets):
    """A degree-``degree`` curve in the plane containing >= threshold of ``members``."""
    coords = [[pts[i][piv] for piv, _ in red] for i in members]
    n = len(members)
    whole = _curve_through(coords, degree)
    if whole:
        return whole[0], tuple(members)
    need = comb(degree + 2, 2) - 1
    head = n - threshold + need
    tried = 0
    for sub in combinations(range(min(head, n)), need):
        tried += 1
        if tried > max_subsets:
            break
        curves = _curve_through([coords[i] for i in sub], degree)
        if len(curves) != 1:
            continue
        eq = curves[0]
        on = tuple(members[i] for i in range(n) if eq.evaluate(coords[i]) == 0)
        if len(on) >= threshold:
            return eq, on
    return None


def low_degree_curve_witness(Z: Sequence[Sequence], d: int, max_subsets: int = 20000) -> CurveWitness | None:
    """Line with >= d+1, conic with >= 2d+2 or plane cubic with >= 3d points of Z.

    Returns None when h1(I_Z(d)) = 0 or when no such curve is found. Lines are
    searched exhaustively; conics and cubics inside every plane spanned by
    three points of Z.
    """
    pts = _check_reduced(Z)
    if len(pts) < 2 or points_h1(pts, d) == 0:
        return None

    best_line = None
    seen_lines: list[frozenset] = []
    for i, j in combinations(range(len(pts)), 2):
        if any(i in s and j in s for s in seen_lines):
            continue
        red = row_echelon([pts[i], pts[j]])
        members = _span_members(red, pts)
        seen_lines.append(frozenset(members))
        if len(members) >= d + 1 and (best_line is None or len(members) > best_line.count):
            best_line = CurveWitness("line", len(members), (tuple(pts[i]), tuple(pts[j])), None, tuple(members))
    if best_line is not None:
        return best_line

    planes = []
    seen_planes: list[frozenset] = []
    for i, j, k in combinations(range(len(pts)), 3):
        if any(i in s and j in s and k in s for s in seen_planes):
            continue
        red = row_echelon([pts[i], pts[j], pts[k]])
        if len(red) < 3:
            continue
        members = _span_members(red, pts)
        seen_planes.append(frozenset(members))
        planes.append(((pts[i], pts[j], pts[k]), red, members))

    for kind, degree, threshold in (("conic", 2, 2 * d + 2), ("plane_cubic", 3, 3 * d)):
        for basis, red, members in planes:
            if len(members) < threshold:
                continue
            found = _plane_curve(pts, members, red, degree, threshold, max_subsets)
            if found is None:
                continue
            eq_red, on = found
            # re-express the equation in the chosen basis coordinates
            eq = _pull_equation(eq_red, basis, red)
            return CurveWitness(kind, len(on), tuple(tuple(b) for b in basis), eq, on)
    return None


def _pull_equation(eq: HomogPoly, basis, red) -> HomogPoly:
    """Rewrite an equation in echelon coordinates as one in ``basis`` coordinates."""
    # the echelon coordinates of sum_k u_k b_k are sum_k u_k b_k[pivot]
    T = [[b[piv] for b in basis] for piv, _ in red]
    return substitute_linear(eq, Matrix.from_rows(T))
