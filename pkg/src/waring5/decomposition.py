"""Waring decompositions f = sum_i lambda_i * l_i^d and their verification."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from gmpy2 import mpfr, mpq

from .errors import InputError
from .linalg import _rows_of
from .poly import HomogPoly, power_of_linear
from .scalars import (
    DEFAULT_PRECISION,
    big_complex,
    kind,
    magnitude,
    precision_of,
    scalar_from_json,
    scalar_to_json,
    working_precision,
)

NUMERIC_TOLERANCE = mpfr("1e-40", 256)
_RANK = {"rational": 0, "cyclotomic": 1, "numeric": 2}


def combine_exactness(flags: Sequence[str]) -> str:
    return max(flags, key=_RANK.__getitem__, default="rational")


def exactness_of(values: Sequence) -> str:
    kinds = {kind(x) for x in values}
    if "complex" in kinds:
        return "numeric"
    return "cyclotomic" if "cyclotomic" in kinds else "rational"


@dataclass(frozen=True)
class Decomposition:
    """Terms ``(lambda, coefficient vector of l)``; ``structure`` labels each term."""

    terms: tuple
    exactness: str
    structure: tuple | None = None
    residual: object | None = None

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def num_vars(self) -> int:
        return len(self.terms[0][1]) if self.terms else 0

    def expand(self, num_vars: int, d: int, bits: int = DEFAULT_PRECISION) -> HomogPoly:
        out: dict = {}
        with working_precision(bits):
            for lam, vec in self.terms:
                for e, v in power_of_linear(list(vec), d).terms.items():
                    v = lam * v
                    out[e] = out[e] + v if e in out else v
        return HomogPoly._trusted(num_vars, d, out)

    def transform(self, M) -> Decomposition:
        """Decomposition of f(M x) from one of f: every l maps to M^T l."""
        rows, _ = _rows_of(M)
        cols = list(zip(*rows))
        with working_precision(precision_of(x for _, vec in self.terms for x in vec)):
            terms = tuple(
                (lam, tuple(sum((a * x for a, x in zip(col, vec)), mpq(0)) for col in cols)) for lam, vec in self.terms
            )
        return Decomposition(terms, self.exactness, self.structure, self.residual)

    def relabel(self, label: str) -> Decomposition:
        return Decomposition(self.terms, self.exactness, (label,) * len(self.terms), self.residual)

    def to_json(self) -> dict:
        out = {
            "terms": [
                {"lambda": scalar_to_json(lam), "linear_form": [scalar_to_json(x) for x in vec]} for lam, vec in self.terms
            ],
            "exactness": self.exactness,
        }
        if self.residual is not None:
            out["residual"] = _fmt_residual(self.residual)
        if self.structure is not None:
            out["structure"] = list(self.structure)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> Decomposition:
        try:
            terms = tuple(
                (scalar_from_json(t["lambda"]), tuple(scalar_from_json(x) for x in t["linear_form"])) for t in obj["terms"]
            )
            exactness = obj["exactness"]
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed decomposition JSON: {exc}") from exc
        if exactness not in _RANK:
            raise InputError(f"unknown exactness flag {exactness!r}")
        residual = mpfr(obj["residual"], 256) if obj.get("residual") is not None else None
        structure = tuple(obj["structure"]) if obj.get("structure") is not None else None
        return cls(terms, exactness, structure, residual)


def _fmt_residual(r) -> str:
    r = mpfr(r)
    if r == 0:
        return "0"
    mant, exp, _ = r.digits(10, 6)
    sign = "-" if mant.startswith("-") else ""
    mant = mant.lstrip("-")
    return f"{sign}{mant[0]}.{mant[1:]}e{exp - 1}"


def concatenate(parts: Sequence[Decomposition]) -> Decomposition:
    terms, labels, residual = [], [], None
    for p in parts:
        terms.extend(p.terms)
        labels.extend(p.structure or ("",) * len(p.terms))
        if p.residual is not None:
            residual = p.residual if residual is None else max(residual, p.residual)
    return Decomposition(tuple(terms), combine_exactness([p.exactness for p in parts]), tuple(labels), residual)


@dataclass
class Verification:
    ok: bool
    residual: object | None = None
    reasons: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def _proportional_numeric(a, b, bits: int) -> bool:
    ma = max(magnitude(x, bits) for x in a)
    mb = max(magnitude(x, bits) for x in b)
    if ma == 0 or mb == 0:
        return True
    tol = mpfr(2) ** (-(bits // 2)) * ma * mb
    with working_precision(bits):
        i = max(range(len(a)), key=lambda k: magnitude(a[k], bits))
        ai, bi = big_complex(a[i], bits), big_complex(b[i], bits)
        return all(abs(bi * big_complex(a[k], bits) - ai * big_complex(b[k], bits)) <= tol for k in range(len(a)))


def _proportional_exact(a, b) -> bool:
    i = next((k for k in range(len(a)) if a[k] != 0), None)
    if i is None or all(x == 0 for x in b):
        return True
    if b[i] == 0:
        return False
    return all(a[i] * b[k] == b[i] * a[k] for k in range(len(a)))


def verify_decomposition(f: HomogPoly, D: Decomposition, tolerance=NUMERIC_TOLERANCE) -> Verification:
    """Re-expand ``D`` and compare with ``f``; also require non-proportional forms."""
    reasons = []
    if any(len(vec) != f.num_vars for _, vec in D.terms):
        return Verification(False, None, ["linear forms have the wrong number of variables"])
    values = [x for lam, vec in D.terms for x in (lam, *vec)]
    numeric = D.exactness == "numeric" or exactness_of(values) == "numeric"
    bits = max(precision_of(values) or DEFAULT_PRECISION, 64) if numeric else DEFAULT_PRECISION

    for (_, a), (_, b) in combinations(D.terms, 2):
        same = _proportional_numeric(a, b, bits) if numeric else _proportional_exact(a, b)
        if same:
            reasons.append("two linear forms are proportional")
            break
    if any(all(x == 0 for x in vec) or lam == 0 for lam, vec in D.terms):
        reasons.append("a term is zero")

    expanded = D.expand(f.num_vars, f.degree, bits)
    residual = None
    if not numeric:
        if expanded != f:
            reasons.append("re-expansion differs from f")
    else:
        with working_precision(bits):
            scale = max((magnitude(c, bits) for c in f.terms.values()), default=mpfr(0))
            keys = set(f.terms) | set(expanded.terms)
            diff = max(
                (magnitude(big_complex(f.coefficient(e), bits) - big_complex(expanded.coefficient(e), bits), bits) for e in keys),
                default=mpfr(0),
            )
            residual = diff / scale if scale else diff
        if not residual < tolerance:
            reasons.append(f"relative residual {_fmt_residual(residual)} exceeds tolerance")
    return Verification(not reasons, residual, reasons)
