"""Recover the degree-5 scheme of a border-rank-5 form and read off its rank.

Recovery works in the concise 5-variable form F. For d >= 9 the apolar
ideal of F agrees with the ideal of its scheme A in degrees 1 and 2, so the
second-order contractions X_i X_j o F model the 5-dimensional coordinate
ring of A. Multiplication by X_i / L (L a random linear form) becomes a 5x5
matrix M_i. The eigenvalues of a random combination of the M_i give the
support points and their multiplicities give the component lengths. On each
generalized eigenspace the M_i are polynomials in a single nilpotent
operator; their coefficients are the jet path of that component.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import sympy
from gmpy2 import mpq

from .apolar import _cat_rows, essential_vars
from .construct import MIN_DEGREE
from .errors import (
    BadType,
    DegreeMismatch,
    DegreeTooSmall,
    IrrationalSupport,
    NonCurvilinear,
    NotBorderRankFive,
    RecoveryInconsistent,
    TooFewVariables,
)
from .linalg import mat_inverse, mat_kernel, mat_rank, rank_exceeds, row_echelon, solve_linear, transpose
from .poly import CurvePath, HomogPoly, monomial_index
from .schemes import JetComponent, JetScheme, SchemeType, is_linearly_independent

RECOVERY_ATTEMPTS = 8
_RANK_TABLE = {
    (5,): (4, -3),
    (3, 2): (3, -1),
    (4, 1): (3, -1),
    (3, 1, 1): (2, 1),
    (2, 2, 1): (2, 1),
    (2, 1, 1, 1): (1, 3),
    (1, 1, 1, 1, 1): (0, 5),
}
CHECK_NAMES = ("independence", "membership", "minimality", "border_rank_5", "degree_5")


def rank_from_type(t: SchemeType, d: int) -> int:
    if t.total != 5 or t.degrees not in _RANK_TABLE:
        raise BadType(f"type {t} is not a degree-5 type")
    if d < MIN_DEGREE:
        raise DegreeTooSmall(f"the rank table needs d >= {MIN_DEGREE}, got {d}")
    a, b = _RANK_TABLE[t.degrees]
    return a * d + b


def _is_border_rank_five(F: HomogPoly) -> bool:
    """max_a rank C_a(F) == 5, never eliminating past 6 pivots."""
    best = 0
    for a in range(1, F.degree // 2 + 1):
        rows = _cat_rows(F, a)
        if rank_exceeds(rows, 5):
            return False
        best = max(best, mat_rank(rows))
    return best == 5


def border_rank_is_five(f: HomogPoly) -> bool:
    conc = essential_vars(f)
    return conc.essential_count <= 5 and _is_border_rank_five(conc.concise_poly)


# --------------------------------------------------------------------------
# certificate


@dataclass
class RankReport:
    type: SchemeType | None
    rank: int | None
    scheme: JetScheme
    d: int
    essential: int
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    @property
    def failed(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v]

    def to_json(self) -> dict:
        return {
            "type": str(self.type) if self.type is not None else None,
            "rank": self.rank,
            "d": self.d,
            "essential": self.essential,
            "checks": dict(self.checks),
            "scheme": self.scheme.to_json(),
        }


def _span_rows(A: JetScheme, d: int) -> tuple[list, list[int]]:
    """Jet rows of A and, per component, the index of its top jet row."""
    rows, tops = [], []
    for c in A.components:
        rows.extend(j.dense() for j in c.jets(d))
        tops.append(len(rows) - 1)
    return rows, tops


def _solves(rows: list, target: list) -> bool:
    if not rows:
        return all(x == 0 for x in target)
    return solve_linear(transpose(rows), target) is not None


def verify_certificate(
    f: HomogPoly, A: JetScheme, d: int | None = None, *, border_rank_five: bool | None = None, essential: int | None = None
) -> RankReport:
    """Run every certificate check; failures are reported, never raised.

    ``border_rank_five`` and ``essential`` let a caller that already knows
    them skip recomputation.
    """
    d = f.degree if d is None else d
    checks = {}
    shape_ok = A.num_vars == f.num_vars and d == f.degree
    checks["independence"] = shape_ok and is_linearly_independent(A)
    if shape_ok:
        rows, tops = _span_rows(A, d)
        target = f.dense()
        checks["membership"] = _solves(rows, target)
        # a maximal truncation drops exactly one component's top jet row
        checks["minimality"] = not any(_solves(rows[:t] + rows[t + 1 :], target) for t in tops)
    else:
        checks["membership"] = checks["minimality"] = False
    if border_rank_five is None:
        border_rank_five = not f.is_zero() and border_rank_is_five(f)
    checks["border_rank_5"] = bool(border_rank_five)
    checks["degree_5"] = A.degree == 5
    ok = all(checks.values())
    if essential is None:
        essential = essential_vars(f).essential_count if not f.is_zero() else 0
    t = A.type if A.degree == 5 else None
    rank = rank_from_type(A.type, d) if ok and d >= MIN_DEGREE else None
    return RankReport(t, rank, A, d, essential, checks)


# --------------------------------------------------------------------------
# recovery


def _second_contractions(F: HomogPoly) -> dict:
    rows = _cat_rows(F, 2)
    return {alpha: rows[i] for alpha, i in monomial_index(F.num_vars, 2).items()}


def _pair(i: int, j: int, n: int) -> tuple:
    e = [0] * n
    e[i] += 1
    e[j] += 1
    return tuple(e)


def _multiplication_matrices(F: HomogPoly, L: list) -> list | None:
    """M_i with (L X_k) o F combined by column j of M_i equal to X_i X_j o F."""
    n = F.num_vars
    second = _second_contractions(F)
    width = len(next(iter(second.values())))
    HL = []  # columns (L X_k) o F, stored as rows here
    for k in range(n):
        col = [mpq(0)] * width
        for i, li in enumerate(L):
            if li:
                col = [c + li * v for c, v in zip(col, second[_pair(i, k, n)])]
        HL.append(col)
    red = row_echelon(HL)
    if len(red) < n:
        return None
    rows_used = [c for c, _ in red]
    A = [[HL[k][r] for k in range(n)] for r in rows_used]
    Ainv = mat_inverse(A).to_rows()
    mats = []
    for i in range(n):
        Hi = [second[_pair(i, j, n)] for j in range(n)]
        B = [[Hi[j][r] for j in range(n)] for r in rows_used]
        Mi = [[sum((Ainv[a][b] * B[b][j] for b in range(n)), mpq(0)) for j in range(n)] for a in range(n)]
        # the 5 chosen rows determine M_i; every other row must agree
        for r in range(width):
            for j in range(n):
                if sum((HL[k][r] * Mi[k][j] for k in range(n)), mpq(0)) != Hi[j][r]:
                    raise RecoveryInconsistent("second-order contractions do not form a degree-5 algebra")
        mats.append(Mi)
    return mats


def _mat_poly_power(M: list, lam, power: int) -> list:
    n = len(M)
    S = [[M[i][j] - (lam if i == j else 0) for j in range(n)] for i in range(n)]
    P = [[mpq(int(i == j)) for j in range(n)] for i in range(n)]
    for _ in range(power):
        P = [[sum((P[i][k] * S[k][j] for k in range(n)), mpq(0)) for j in range(n)] for i in range(n)]
    return P


def _charpoly_factors(M: list) -> list[tuple[list, int]]:
    """Factors of det(T - M) over Q as (coefficient list, multiplicity)."""
    T = sympy.Symbol("T")
    SM = sympy.Matrix([[sympy.Rational(int(x.numerator), int(x.denominator)) for x in r] for r in M])
    _, facs = sympy.factor_list(SM.charpoly(T).as_expr(), T)
    out = []
    for poly, mult in facs:
        coeffs = [mpq(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1])) for c in sympy.Poly(poly, T).all_coeffs()]
        out.append((coeffs, int(mult)))
    return out


def _matvec(M: list, v: list) -> list:
    return [sum((a * b for a, b in zip(row, v)), mpq(0)) for row in M]


def _component_path(mats: list, weights: list, lam, b: int) -> CurvePath | None:
    """Jet path of the generalized eigenspace of sum w_i M_i at ``lam``."""
    n = len(mats)
    M = [[sum((w * Mi[r][c] for w, Mi in zip(weights, mats)), mpq(0)) for c in range(n)] for r in range(n)]
    basis = mat_kernel(_mat_poly_power(M, lam, b))
    if len(basis) != b:
        return None
    Bt = transpose([list(v) for v in basis]).to_rows()  # n x b, columns span the eigenspace

    def restrict(Mi):
        cols = [solve_linear(Bt, _matvec(Mi, v)) for v in basis]
        return transpose(cols).to_rows()

    R = [restrict(Mi) for Mi in mats]
    N = [[sum((w * Ri[r][c] for w, Ri in zip(weights, R)), mpq(0)) - (lam if r == c else 0) for c in range(b)] for r in range(b)]
    # single Jordan block <=> N^(b-1) != 0; its non-kernel directions are cyclic
    top = _mat_poly_power(N, 0, b - 1)
    k = next((j for j in range(b) if any(top[r][j] for r in range(b))), None)
    if k is None:
        return None
    v = [mpq(int(r == k)) for r in range(b)]
    krylov = [v]
    for _ in range(b - 1):
        krylov.append(_matvec(N, krylov[-1]))
    K = transpose(krylov).to_rows()
    coeffs = []
    for Ri in R:
        a = solve_linear(K, _matvec(Ri, v))
        if a is None:
            return None
        coeffs.append(a)
    return CurvePath(tuple(tuple(coeffs[i][l] for i in range(n)) for l in range(b)))


def _normalise(path: CurvePath) -> CurvePath:
    p0 = path.points[0]
    lead = next(x for x in p0 if x != 0)
    return CurvePath(tuple(tuple(x / lead for x in p) for p in path.points))


def _suggested_type(factors) -> SchemeType | None:
    degrees = []
    for coeffs, mult in factors:
        degrees.extend([mult] * (len(coeffs) - 1))
    try:
        return SchemeType(tuple(degrees))
    except BadType:
        return None


def _recover_concise(F: HomogPoly, rng: random.Random) -> list[CurvePath]:
    n = F.num_vars
    irrational = None
    for _ in range(RECOVERY_ATTEMPTS):
        L = [mpq(rng.randint(-9, 9)) for _ in range(n)]
        mats = _multiplication_matrices(F, L)
        if mats is None:
            continue  # L vanishes on the support
        weights = [mpq(rng.randint(-9, 9)) for _ in range(n)]
        M = [[sum((w * Mi[r][c] for w, Mi in zip(weights, mats)), mpq(0)) for c in range(n)] for r in range(n)]
        factors = _charpoly_factors(M)
        if any(len(c) > 2 for c, _ in factors):
            irrational = factors
            continue
        paths = []
        for coeffs, mult in factors:
            lam = -coeffs[1] / coeffs[0]
            p = _component_path(mats, weights, lam, mult)
            if p is None:
                break  # two support points collided or the combination missed a tangent
            paths.append(p)
        else:
            return paths
    if irrational is not None:
        t = _suggested_type(irrational)
        raise IrrationalSupport(f"support points are not rational (uncertified type {t})", suggested_type=t)
    raise NonCurvilinear("no combination of multiplication operators is cyclic on every component")


def _recover(f: HomogPoly, d: int | None, seed: int) -> JetScheme:
    """Scheme of f, before certification (preconditions are checked here)."""
    if d is not None and d != f.degree:
        raise DegreeMismatch(f"polynomial has degree {f.degree}, not {d}")
    if f.degree < MIN_DEGREE:
        raise DegreeTooSmall(f"recovery needs d >= {MIN_DEGREE}; the degree-5 scheme is not unique below that")
    conc = essential_vars(f)
    if conc.essential_count > 5 or not _is_border_rank_five(conc.concise_poly):
        raise NotBorderRankFive("catalecticant ranks do not certify border rank 5")
    if conc.essential_count < 5:
        raise TooFewVariables(f"f has {conc.essential_count} essential variables; only 5 are classified")
    paths = _recover_concise(conc.concise_poly, random.Random(seed))
    comps = []
    for p in paths:
        lifted = CurvePath(tuple(tuple(conc.lift_point(list(q))) for q in p.points))
        comps.append(JetComponent(_normalise(lifted), len(p.points)))
    comps.sort(key=lambda c: (-c.length, c.support))
    return JetScheme(tuple(comps), f.num_vars - 1)


def classify_rank(f: HomogPoly, d: int | None = None, seed: int = 0) -> RankReport:
    """Recover the scheme of f, certify it and report type and rank."""
    A = _recover(f, d, seed)
    # _recover already established border rank 5 with 5 essential variables
    report = verify_certificate(f, A, border_rank_five=True, essential=5)
    if not report.ok:
        raise RecoveryInconsistent(f"recovered scheme fails certificate checks: {', '.join(report.failed)}")
    return report


def recover_scheme(f: HomogPoly, d: int | None = None, seed: int = 0) -> JetScheme:
    return classify_rank(f, d, seed).scheme
