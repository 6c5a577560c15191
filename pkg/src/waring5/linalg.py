"""Dense linear algebra over the scalar universe.

Exact rational matrices are eliminated fraction-free (Bareiss) over the
integers after clearing denominators row by row. Cyclotomic matrices use
Gauss-Jordan over the field. Big complex matrices use partial pivoting with
a zero threshold of ``2**(-bits/2)`` times the original row norm.

Pivot rule for exact input: leftmost column first, then the entry of
smallest bit size, then the earliest row. Free variables of ``solve_linear``
are set to zero, so results are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import gmpy2
from gmpy2 import mpc, mpq, mpz

from .errors import MixedInexactExact
from .scalars import (
    BigComplex,
    Cyclotomic,
    big_complex,
    common_kind,
    common_order,
    kind,
    precision_of,
    rational,
    to_cyclotomic,
    working_precision,
)


@dataclass(frozen=True)
class Matrix:
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries length must equal rows * cols")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> Matrix:
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        flat = []
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged matrix")
            flat.extend(r)
        return cls(len(rows), cols, tuple(flat))

    def row(self, i: int) -> list:
        return list(self.entries[i * self.cols : (i + 1) * self.cols])

    def to_rows(self) -> list[list]:
        return [self.row(i) for i in range(self.rows)]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def transpose(self) -> Matrix:
        return Matrix.from_rows([list(c) for c in zip(*self.to_rows())], self.rows) if self.rows else Matrix(
            self.cols, 0, ()
        )


def _rows_of(M) -> tuple[list[list], int]:
    if isinstance(M, Matrix):
        return M.to_rows(), M.cols
    rows = [list(r) for r in M]
    return rows, (len(rows[0]) if rows else 0)


def identity(n: int) -> Matrix:
    return Matrix.from_rows([[mpq(int(i == j)) for j in range(n)] for i in range(n)], n)


def transpose(M) -> Matrix:
    rows, ncols = _rows_of(M)
    if not rows:
        return Matrix(ncols, 0, ())
    return Matrix.from_rows([list(c) for c in zip(*rows)], len(rows))


def mat_mul(A, B) -> Matrix:
    ra, _ = _rows_of(A)
    rb, nb = _rows_of(B)
    cols = list(zip(*rb)) if rb else []
    out = []
    for r in ra:
        out.append([sum((x * y for x, y in zip(r, c)), mpq(0)) for c in cols])
    return Matrix.from_rows(out, nb)


def mat_vec(M, v: Sequence) -> list:
    rows, _ = _rows_of(M)
    return [sum((x * y for x, y in zip(r, v)), mpq(0)) for r in rows]


def _engine(rows) -> str:
    flat = [x for r in rows for x in r]
    kinds = {kind(x) for x in flat}
    if "complex" in kinds and kinds != {"complex"}:
        # exact zeros are harmless next to floats; anything else is mixing
        if any(kind(x) != "complex" and x != 0 for x in flat):
            raise MixedInexactExact("exact and inexact entries mixed in one matrix")
        return "complex"
    return common_kind(flat) if flat else "rational"


# --------------------------------------------------------------------------
# fraction-free integer elimination


def _integer_rows(rows: list[list]) -> list[list]:
    out = []
    for r in rows:
        qs = [rational(x) for x in r]
        den = mpz(1)
        for q in qs:
            if q.denominator != 1:
                den = gmpy2.lcm(den, q.denominator)
        out.append([q.numerator * (den // q.denominator) for q in qs])
    return out


def _lead(row: list, start: int) -> int:
    for j in range(start, len(row)):
        if row[j]:
            return j
    return -1


def _bareiss(
    rows: list[list], stop_col: int | None = None, max_pivots: int | None = None
) -> tuple[list[tuple[int, list]], bool]:
    """Fraction-free forward elimination.

    Returns the echelon rows as ``(pivot_column, row)`` pairs in order of
    increasing pivot column, and a flag that is True if a pivot landed at
    or beyond ``stop_col`` (used to detect inconsistent augmented systems).
    """
    active = []
    leads = []
    for r in rows:
        j = _lead(r, 0)
        if j >= 0:
            active.append(r)
            leads.append(j)
    echelon: list[tuple[int, list]] = []
    prev = mpz(1)
    while active:
        c = min(leads)
        if stop_col is not None and c >= stop_col:
            return echelon, True
        best = None
        best_h = None
        for i, j in enumerate(leads):
            if j == c:
                h = active[i][c].bit_length()
                if best is None or h < best_h:
                    best, best_h = i, h
        prow = active[best]
        piv = prow[c]
        echelon.append((c, prow))
        ptail = prow[c + 1 :]
        new_active = []
        new_leads = []
        head = [mpz(0)] * (c + 1)
        for i, row in enumerate(active):
            if i == best:
                continue
            a = row[c]
            if a:
                tail = [(piv * x - a * y) // prev for x, y in zip(row[c + 1 :], ptail)]
            elif piv == prev:
                tail = row[c + 1 :]
            else:
                tail = [(piv * x) // prev for x in row[c + 1 :]]
            k = _lead(tail, 0)
            if k >= 0:
                new_active.append(head + tail)
                new_leads.append(c + 1 + k)
        active, leads = new_active, new_leads
        prev = piv
        if max_pivots is not None and len(echelon) >= max_pivots:
            break
    return echelon, False


def _rref_from_echelon(echelon: list[tuple[int, list]]) -> list[tuple[int, list]]:
    """Back-substitute integer echelon rows into reduced rational rows."""
    red = []
    for c, row in echelon:
        piv = row[c]
        red.append((c, [mpq(x, piv) if x else mpq(0) for x in row]))
    for i in range(len(red) - 1, -1, -1):
        ci, ri = red[i]
        for h in range(i):
            ch, rh = red[h]
            f = rh[ci]
            if f:
                red[h] = (ch, [x - f * y if y else x for x, y in zip(rh, ri)])
    return red


# --------------------------------------------------------------------------
# generic field elimination (cyclotomic and big complex)


def _field_rref(rows: list[list], ncols: int, mode: str, bits: int, stop_col: int | None = None):
    """Gauss-Jordan elimination. Returns (reduced rows, inconsistent flag)."""
    rows = [list(r) for r in rows]
    if mode == "complex":
        tol = []
        for r in rows:
            norm = max((abs(x) for x in r), default=0)
            tol.append(norm * gmpy2.exp2(-(bits // 2)))
        is_small = lambda x, i: abs(x) <= tol[i]  # noqa: E731
    else:
        tol = None
        is_small = lambda x, i: x == 0  # noqa: E731
    owner = list(range(len(rows)))
    done: list[tuple[int, list]] = []
    remaining = list(range(len(rows)))
    for c in range(ncols):
        cands = [i for i in remaining if not is_small(rows[i][c], owner[i])]
        if not cands:
            continue
        if stop_col is not None and c >= stop_col:
            return done, True
        if mode == "complex":
            p = max(cands, key=lambda i: (abs(rows[i][c]), -i))
        else:
            p = min(cands, key=lambda i: (_height(rows[i][c]), i))
        remaining.remove(p)
        prow = rows[p]
        inv = 1 / prow[c]
        prow = [x * inv for x in prow]
        prow[c] = _one_like(prow[c], mode)
        rows[p] = prow
        pnorm = max(abs(x) for x in prow) if mode == "complex" else None
        for i in remaining + [i for _, i in done]:
            a = rows[i][c]
            if a != 0:
                rows[i] = [x - a * y for x, y in zip(rows[i], prow)]
                rows[i][c] = _zero_like(mode)
                if mode == "complex":
                    # rounding scales with what was subtracted, not only the original row
                    tol[owner[i]] = max(tol[owner[i]], abs(a) * pnorm * gmpy2.exp2(-(bits // 2)))
        done.append((c, p))
        if not remaining:
            break
    return [(c, rows[p]) for c, p in done], False


def _height(x) -> int:
    if isinstance(x, Cyclotomic):
        return x.height()
    q = rational(x)
    return q.numerator.bit_length() + q.denominator.bit_length()


def _one_like(x, mode):
    return x / x if mode == "complex" else Cyclotomic(x.order, [1])


def _zero_like(mode):
    return mpc(0) if mode == "complex" else mpq(0)


def _prepare(rows):
    mode = _engine(rows)
    bits = 0
    if mode == "cyclotomic":
        n = common_order(x for r in rows for x in r)
        rows = [[to_cyclotomic(x, n) for x in r] for r in rows]
    elif mode == "complex":
        bits = precision_of(x for r in rows for x in r)
        rows = [[big_complex(x, bits) for x in r] for r in rows]
    return mode, rows, bits


# --------------------------------------------------------------------------
# public operations


def mat_rank(M) -> int:
    """Rank of ``M`` (a Matrix or a sequence of rows)."""
    rows, ncols = _rows_of(M)
    if not rows or ncols == 0:
        return 0
    mode, rows, bits = _prepare(rows)
    if mode == "rational":
        echelon, _ = _bareiss(_integer_rows(rows))
        return len(echelon)
    if mode == "complex":
        with working_precision(bits):
            red, _ = _field_rref(rows, ncols, mode, bits)
        return len(red)
    red, _ = _field_rref(rows, ncols, mode, bits)
    return len(red)


def rank_exceeds(M, k: int) -> bool:
    """True iff rank M > k; exact matrices stop eliminating after k + 1 pivots."""
    rows, ncols = _rows_of(M)
    if not rows or ncols == 0:
        return k < 0
    mode, rows, _ = _prepare(rows)
    if mode != "rational":
        return mat_rank(rows) > k
    echelon, _ = _bareiss(_integer_rows(rows), max_pivots=k + 1)
    return len(echelon) > k


def _reduced(rows, ncols, stop_col=None):
    mode, rows, bits = _prepare(rows)
    if mode == "rational":
        echelon, bad = _bareiss(_integer_rows(rows), stop_col)
        return mode, (None if bad else _rref_from_echelon(echelon)), bits
    if mode == "complex":
        with working_precision(bits):
            red, bad = _field_rref(rows, ncols, mode, bits, stop_col)
    else:
        red, bad = _field_rref(rows, ncols, mode, bits, stop_col)
    return mode, (None if bad else red), bits


def mat_kernel(M) -> list[list]:
    """Basis of the right kernel; one vector per free column, free entry 1."""
    rows, ncols = _rows_of(M)
    if ncols == 0:
        return []
    if not rows:
        return [[mpq(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    mode, red, bits = _reduced(rows, ncols)
    pivots = {c: r for c, r in red}
    zero = mpc(0, precision=bits) if mode == "complex" else mpq(0)
    one = mpc(1, precision=bits) if mode == "complex" else mpq(1)
    basis = []
    with working_precision(bits or 53):
        for f in range(ncols):
            if f in pivots:
                continue
            v = [zero] * ncols
            v[f] = one
            for c, r in red:
                if r[f] != 0:
                    v[c] = -r[f]
            basis.append(v)
    return basis


def solve_linear(M, b: Sequence) -> list | None:
    """One solution of M x = b, or None if the system is inconsistent."""
    rows, ncols = _rows_of(M)
    if len(b) != len(rows):
        raise ValueError("right-hand side length does not match row count")
    aug = [list(r) + [bi] for r, bi in zip(rows, b)]
    if not aug:
        return [mpq(0)] * ncols
    mode, red, bits = _reduced(aug, ncols + 1, stop_col=ncols)
    if red is None:
        return None
    zero = mpc(0, precision=bits) if mode == "complex" else mpq(0)
    x = [zero] * ncols
    for c, r in red:
        x[c] = r[ncols]
    return x


def row_echelon(M) -> list[tuple[int, list]]:
    """Reduced row echelon form as ``(pivot_column, row)`` pairs, zero rows dropped."""
    rows, ncols = _rows_of(M)
    if not rows or ncols == 0:
        return []
    _, red, _ = _reduced(rows, ncols)
    return red


def mat_inverse(M) -> Matrix:
    rows, n = _rows_of(M)
    if len(rows) != n:
        raise ValueError("matrix is not square")
    aug = [list(r) + [mpq(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    mode, red, _ = _reduced(aug, 2 * n)
    if red is None or len(red) < n or any(c >= n for c, _ in red):
        raise ZeroDivisionError("matrix is singular")
    return Matrix.from_rows([r[n:] for _, r in red], n)


def is_exact(x) -> bool:
    return kind(x) != "complex"


__all__ = [
    "BigComplex",
    "Matrix",
    "identity",
    "is_exact",
    "mat_inverse",
    "mat_kernel",
    "mat_mul",
    "mat_rank",
    "mat_vec",
    "rank_exceeds",
    "row_echelon",
    "solve_linear",
    "transpose",
]
