"""Coefficient universe: exact rationals, cyclotomic numbers and big complex floats.

Rationals are ``gmpy2.mpq`` values. Big complex numbers are ``gmpy2.mpc``
values whose precision is fixed by the caller. ``Cyclotomic`` is an element
of Q(zeta_n) stored as a coefficient vector reduced modulo the n-th
cyclotomic polynomial, so equality is plain vector equality.

Mixed arithmetic promotes Rational -> Cyclotomic -> BigComplex.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from numbers import Integral

import gmpy2
from gmpy2 import mpc, mpfr, mpq, mpz

DEFAULT_PRECISION = 256

Rational = type(mpq(0))
BigComplex = type(mpc(0))

_RATIONAL_TYPES = (int, type(mpz(0)), Rational, Fraction)
_INEXACT_TYPES = (BigComplex, type(mpfr(0)), float, complex)

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def rational(value) -> Rational:
    """Convert an int, Fraction, mpq or ``"p/q"`` string to an exact rational."""
    if isinstance(value, Rational):
        return value
    if isinstance(value, (int, type(mpz(0)))):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        m = _RATIONAL_RE.match(value)
        if not m:
            raise ValueError(f"not a rational literal: {value!r}")
        num = int(m.group(1))
        den = int(m.group(2)) if m.group(2) else 1
        if den == 0:
            raise ValueError(f"zero denominator in {value!r}")
        return mpq(num, den)
    if isinstance(value, Cyclotomic) and value.is_rational():
        return value.coefficients[0]
    raise TypeError(f"cannot convert {type(value).__name__} to Rational")


def rational_str(q) -> str:
    q = rational(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def kind(x) -> str:
    """Return ``"rational"``, ``"cyclotomic"`` or ``"complex"``."""
    if isinstance(x, _RATIONAL_TYPES):
        return "rational"
    if isinstance(x, Cyclotomic):
        return "cyclotomic"
    if isinstance(x, _INEXACT_TYPES):
        return "complex"
    raise TypeError(f"not a scalar: {type(x).__name__}")


def big_complex(x, bits: int = DEFAULT_PRECISION) -> BigComplex:
    """Round any scalar to a complex float with ``bits`` of mantissa."""
    if isinstance(x, Cyclotomic):
        return x.to_complex(bits)
    if isinstance(x, Fraction):
        x = mpq(x.numerator, x.denominator)
    return mpc(x, precision=bits)


def working_precision(bits: int):
    """Context manager setting the mantissa size of mpfr/mpc arithmetic."""
    return gmpy2.context(precision=bits)


def is_zero(x) -> bool:
    return x == 0


# --------------------------------------------------------------------------
# cyclotomic fields


@lru_cache(maxsize=None)
def _cyclotomic_data(n: int) -> tuple[int, tuple[int, ...], tuple[tuple[int, ...], ...]]:
    """Return (phi(n), coefficients of Phi_n low to high, table of x^j mod Phi_n for j < n)."""
    from sympy import Poly, cyclotomic_poly, symbols

    t = symbols("t")
    coeffs = tuple(int(c) for c in reversed(Poly(cyclotomic_poly(n, t), t).all_coeffs()))
    phi = len(coeffs) - 1
    table = []
    cur = [1] + [0] * (phi - 1)
    for _ in range(max(n, phi)):
        table.append(tuple(cur))
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [c - top * p for c, p in zip(cur, coeffs)]
    return phi, coeffs, tuple(table)


def _poly_mul_int(a: list[int], b: list[int]) -> list[int]:
    """Product of integer coefficient lists via Kronecker substitution."""
    la, lb = len(a), len(b)
    ma = max(abs(v) for v in a)
    mb = max(abs(v) for v in b)
    if ma == 0 or mb == 0:
        return [0] * (la + lb - 1)
    bits = (ma * mb * min(la, lb)).bit_length() + 2
    A = 0
    for v in reversed(a):
        A = (A << bits) + v
    B = 0
    for v in reversed(b):
        B = (B << bits) + v
    P = A * B
    mask = (1 << bits) - 1
    half = 1 << (bits - 1)
    full = 1 << bits
    out = []
    for _ in range(la + lb - 1):
        low = P & mask
        if low >= half:
            low -= full
        out.append(low)
        P = (P - low) >> bits
    return out


def _reduce_int(n: int, vec: list[int]) -> list[int]:
    """Reduce an integer coefficient list modulo Phi_n (using x^n = 1 first)."""
    phi, _, table = _cyclotomic_data(n)
    if len(vec) > n:
        folded = [0] * n
        for j, v in enumerate(vec):
            folded[j % n] += v
        vec = folded
    out = list(vec[:phi]) + [0] * max(0, phi - len(vec))
    for j in range(phi, len(vec)):
        v = vec[j]
        if v:
            row = table[j]
            for i in range(phi):
                if row[i]:
                    out[i] += v * row[i]
    return out


def _as_ints(coeffs) -> tuple[list[int], int]:
    den = 1
    for c in coeffs:
        if c.denominator != 1:
            den = int(gmpy2.lcm(den, c.denominator))
    return [int(c.numerator) * (den // int(c.denominator)) for c in coeffs], den


def _normalise(nums: list[int], den: int) -> tuple[tuple[int, ...], int]:
    if den < 0:
        nums, den = [-v for v in nums], -den
    g = math.gcd(den, *nums)
    if g > 1:
        nums = [v // g for v in nums]
        den //= g
    return tuple(nums), den


class Cyclotomic:
    """Element of the cyclotomic field Q(zeta_n), zeta_n = exp(2*pi*i/n).

    ``coefficients[j]`` is the rational coefficient of zeta_n**j, for
    j < phi(n). Internally the vector is kept as integer numerators over
    one common denominator. Values are immutable.
    """

    __slots__ = ("order", "_nums", "_den")

    def __init__(self, order: int, coefficients=()):
        if order < 1:
            raise ValueError("cyclotomic order must be positive")
        cs = [rational(c) for c in coefficients]
        nums, den = _as_ints(cs) if cs else ([], 1)
        self._set(order, nums, den)

    def _set(self, order: int, nums: list[int], den: int) -> None:
        phi = _cyclotomic_data(order)[0]
        if len(nums) > phi:
            nums = _reduce_int(order, nums)
        nums = list(nums) + [0] * (phi - len(nums))
        nums, den = _normalise(nums, den)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "_nums", nums)
        object.__setattr__(self, "_den", den)

    @classmethod
    def _raw(cls, order: int, nums: list[int], den: int) -> Cyclotomic:
        obj = cls.__new__(cls)
        obj._set(order, nums, den)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("Cyclotomic values are immutable")

    @property
    def coefficients(self) -> tuple:
        return tuple(mpq(v, self._den) for v in self._nums)

    # -- constructors ------------------------------------------------------
    @classmethod
    def root_of_unity(cls, n: int, k: int = 1) -> Cyclotomic:
        """zeta_n ** k."""
        _, _, table = _cyclotomic_data(n)
        return cls._raw(n, list(table[k % n]), 1)

    @classmethod
    def from_rational(cls, q, n: int = 1) -> Cyclotomic:
        return cls(n, [rational(q)])

    # -- structure ---------------------------------------------------------
    def is_rational(self) -> bool:
        return not any(self._nums[1:])

    def rational_part(self):
        return mpq(self._nums[0], self._den)

    def promote(self, n: int) -> Cyclotomic:
        """Re-express in Q(zeta_n); ``self.order`` must divide n."""
        if n == self.order:
            return self
        if n % self.order:
            raise ValueError(f"order {self.order} does not divide {n}")
        step = n // self.order
        vec = [0] * (step * (len(self._nums) - 1) + 1)
        for j, c in enumerate(self._nums):
            vec[j * step] = c
        return Cyclotomic._raw(n, vec, self._den)

    def _common(self, other):
        if isinstance(other, Cyclotomic):
            if other.order == self.order:
                return self, other
            n = int(gmpy2.lcm(self.order, other.order))
            return self.promote(n), other.promote(n)
        if isinstance(other, _RATIONAL_TYPES):
            q = rational(other)
            return self, Cyclotomic._raw(self.order, [int(q.numerator)], int(q.denominator))
        return None

    def height(self) -> int:
        """Bit size used for deterministic pivot choice."""
        return sum(abs(v).bit_length() for v in self._nums) + self._den.bit_length()

    def to_complex(self, bits: int = DEFAULT_PRECISION) -> BigComplex:
        with working_precision(bits + 32):
            z = gmpy2.root_of_unity(self.order, 1)
            acc = mpc(0)
            p = mpc(1)
            for c in self._nums:
                if c:
                    acc += c * p
                p *= z
            acc = acc / self._den
        return mpc(acc, precision=bits)

    # -- arithmetic --------------------------------------------------------
    def __neg__(self):
        return Cyclotomic._raw(self.order, [-v for v in self._nums], self._den)

    def __pos__(self):
        return self

    def _addsub(self, other, sign: int):
        pair = self._common(other)
        if pair is None:
            return None
        a, b = pair
        da, db = a._den, b._den
        if da == db:
            nums = [x + sign * y for x, y in zip(a._nums, b._nums)]
            den = da
        else:
            nums = [x * db + sign * y * da for x, y in zip(a._nums, b._nums)]
            den = da * db
        return Cyclotomic._raw(a.order, nums, den)

    def __add__(self, other):
        r = self._addsub(other, 1)
        return _inexact_op(self, other, lambda a, b: a + b) if r is None else r

    __radd__ = __add__

    def __sub__(self, other):
        r = self._addsub(other, -1)
        return _inexact_op(self, other, lambda a, b: a - b) if r is None else r

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, _RATIONAL_TYPES):
            q = rational(other)
            return Cyclotomic._raw(
                self.order, [v * int(q.numerator) for v in self._nums], self._den * int(q.denominator)
            )
        pair = self._common(other)
        if pair is None:
            return _inexact_op(self, other, lambda a, b: a * b)
        a, b = pair
        if b.is_rational():
            return Cyclotomic._raw(a.order, [v * b._nums[0] for v in a._nums], a._den * b._den)
        if a.is_rational():
            return Cyclotomic._raw(a.order, [v * a._nums[0] for v in b._nums], a._den * b._den)
        prod = _poly_mul_int(list(a._nums), list(b._nums))
        return Cyclotomic._raw(a.order, prod, a._den * b._den)

    __rmul__ = __mul__

    def inverse(self) -> Cyclotomic:
        if self.is_rational():
            if self._nums[0] == 0:
                raise ZeroDivisionError("inverse of zero")
            return Cyclotomic._raw(self.order, [self._den], self._nums[0])
        _, phi_coeffs, _ = _cyclotomic_data(self.order)
        s = _poly_inverse_mod(list(self.coefficients), [mpq(c) for c in phi_coeffs])
        return Cyclotomic(self.order, s)

    def __truediv__(self, other):
        if isinstance(other, _RATIONAL_TYPES):
            return self * (1 / rational(other))
        if isinstance(other, Cyclotomic):
            return self * other.inverse()
        return _inexact_op(self, other, lambda a, b: a / b)

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if not isinstance(k, Integral):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = Cyclotomic._raw(self.order, [1], 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def conjugate(self) -> Cyclotomic:
        """Complex conjugate: zeta -> zeta**-1."""
        n = self.order
        vec = [0] * n
        for j, c in enumerate(self._nums):
            vec[(-j) % n] += c
        return Cyclotomic._raw(n, vec, self._den)

    # -- comparison --------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Cyclotomic) or isinstance(other, _RATIONAL_TYPES):
            a, b = self._common(other)
            return a._den == b._den and a._nums == b._nums
        return NotImplemented

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        # Equal values of different orders must hash equally; only the
        # rational case is cheap to normalise, so other values share a bucket.
        if self.is_rational():
            return hash(self.rational_part())
        return hash("cyclotomic")

    def __bool__(self):
        return any(self._nums)

    def __repr__(self):
        terms = ", ".join(rational_str(c) for c in self.coefficients)
        return f"Cyclotomic({self.order}, [{terms}])"

    def __str__(self):
        parts = []
        for j, c in enumerate(self.coefficients):
            if c:
                parts.append(rational_str(c) if j == 0 else f"{rational_str(c)}*z{self.order}^{j}")
        return " + ".join(parts) if parts else "0"



def _poly_trim(p):
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_divmod(a, b):
    a = list(a)
    q = [mpq(0)] * max(1, len(a) - len(b) + 1)
    lead = b[-1]
    while len(_poly_trim(a)) >= len(b):
        shift = len(a) - len(b)
        c = a[-1] / lead
        q[shift] = c
        for i, v in enumerate(b):
            a[shift + i] -= c * v
    return q, a


def _poly_sub_mul(a, b, c):
    """a - b*c for coefficient lists."""
    out = list(a) + [mpq(0)] * max(0, len(b) + len(c) - 1 - len(a))
    for i, x in enumerate(b):
        if x:
            for j, y in enumerate(c):
                out[i + j] -= x * y
    return _poly_trim(out)


def _poly_inverse_mod(a, m):
    """Inverse of a modulo m over Q by the extended Euclidean algorithm."""
    r0, r1 = _poly_trim(list(m)), _poly_trim(list(a))
    s0, s1 = [], [mpq(1)]
    while len(r1) > 1:
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, _poly_trim(r)
        s0, s1 = s1, _poly_sub_mul(s0, q, s1)
    if not r1:
        raise ZeroDivisionError("element is not invertible")
    c = r1[0]
    return [x / c for x in s1]


def _inexact_op(a, b, op):
    if isinstance(b, _INEXACT_TYPES):
        bits = _precision_of(b)
        return op(big_complex(a, bits), b)
    return NotImplemented


def _precision_of(x) -> int:
    if isinstance(x, BigComplex):
        return max(x.precision)
    if isinstance(x, type(mpfr(0))):
        return x.precision
    return 53


def precision_of(values) -> int:
    """Largest mantissa size among the inexact entries of ``values``."""
    bits = 0
    for v in values:
        if isinstance(v, _INEXACT_TYPES):
            bits = max(bits, _precision_of(v))
    return bits or DEFAULT_PRECISION


def common_kind(values) -> str:
    """Join of the kinds of ``values`` under Rational -> Cyclotomic -> BigComplex."""
    rank = {"rational": 0, "cyclotomic": 1, "complex": 2}
    best = "rational"
    for v in values:
        k = kind(v)
        if rank[k] > rank[best]:
            best = k
    return best


def common_order(values) -> int:
    n = 1
    for v in values:
        if isinstance(v, Cyclotomic):
            n = int(gmpy2.lcm(n, v.order))
    return n


def to_cyclotomic(x, n: int) -> Cyclotomic:
    if isinstance(x, Cyclotomic):
        return x.promote(n)
    return Cyclotomic(n, [rational(x)])


def magnitude(x, bits: int = DEFAULT_PRECISION):
    """Absolute value as an mpfr (exact kinds are rounded)."""
    with working_precision(bits):
        return abs(big_complex(x, bits))


# --------------------------------------------------------------------------
# JSON encoding


def scalar_to_json(x):
    k = kind(x)
    if k == "rational":
        return rational_str(x)
    if k == "cyclotomic":
        return {"cyclotomic": x.order, "coefficients": [rational_str(c) for c in x.coefficients]}
    z = x if isinstance(x, BigComplex) else mpc(x)
    bits = max(z.precision)
    digits = int(bits * 0.30103) + 2
    return {"re": _fmt_float(z.real, digits), "im": _fmt_float(z.imag, digits), "bits": bits}


def _fmt_float(v, digits: int) -> str:
    mant, exp, _ = v.digits(10, digits)
    sign = ""
    if mant.startswith("-"):
        sign, mant = "-", mant[1:]
    if not mant.strip("0"):
        return "0"
    return f"{sign}0.{mant}e{exp}"


def scalar_from_json(obj):
    if isinstance(obj, str):
        return rational(obj)
    if isinstance(obj, int):
        return mpq(obj)
    if isinstance(obj, dict) and "cyclotomic" in obj:
        return Cyclotomic(int(obj["cyclotomic"]), [rational(c) for c in obj["coefficients"]])
    if isinstance(obj, dict) and "re" in obj:
        bits = int(obj.get("bits", DEFAULT_PRECISION))
        with working_precision(bits):
            return mpc(mpfr(obj["re"]), mpfr(obj["im"]))
    raise ValueError(f"cannot decode scalar from {obj!r}")
