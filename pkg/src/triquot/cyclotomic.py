"""Exact arithmetic in cyclotomic fields Q(zeta_m).

Elements are polynomials in zeta_m reduced modulo the m-th cyclotomic
polynomial Phi_m, stored as an integer coefficient vector over a single
positive denominator.  Reduction modulo the irreducible Phi_m gives unique
normal forms, so zero tests and integrality certification are coefficient
checks.  All values are immutable; the per-conductor table cache is built
idempotently under `functools.lru_cache`.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import NamedTuple, Union

Rational = Fraction
Scalar = Union[int, Fraction]

__all__ = [
    "Rational",
    "CycloElem",
    "CycloField",
    "cyclo_field",
    "cyclotomic_polynomial",
    "cyclo_root",
    "cyclo_add",
    "cyclo_mul",
    "cyclo_pow",
    "cyclo_inv",
    "cyclo_conjugate",
    "cyclo_coerce",
    "as_rational",
    "as_rational_integer",
]


def _divisors(m: int) -> list[int]:
    out = [d for d in range(1, m // 2 + 1) if m % d == 0]
    out.append(m)
    return out


def _poly_divexact(num: list[int], den: tuple[int, ...]) -> list[int]:
    # Exact division of integer polynomials; divisor monic by construction.
    num = list(num)
    dd = len(den) - 1
    out = [0] * (len(num) - dd)
    for k in range(len(out) - 1, -1, -1):
        c = num[dd + k]
        out[k] = c
        if c:
            for j in range(dd + 1):
                num[k + j] -= c * den[j]
    if any(num):
        raise ArithmeticError("non-exact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Coefficients of Phi_m, ascending degree, monic."""
    if m < 1:
        raise ValueError("conductor must be positive")
    if m == 1:
        return (-1, 1)
    poly = [-1] + [0] * (m - 1) + [1]
    for d in _divisors(m)[:-1]:
        poly = _poly_divexact(poly, cyclotomic_polynomial(d))
    return tuple(poly)


class CycloField(NamedTuple):
    m: int
    phi: int
    phim: tuple[int, ...]
    # rows[i] = zeta^(phi+i) reduced, enough rows for full products and shifts
    rows: tuple[tuple[int, ...], ...]
    # zpow[k] = zeta^k reduced, k in [0, m)
    zpow: tuple[tuple[int, ...], ...]


@lru_cache(maxsize=None)
def cyclo_field(m: int) -> CycloField:
    phim = cyclotomic_polynomial(m)
    phi = len(phim) - 1
    top = max(2 * phi - 2, m - 1)
    rows: list[tuple[int, ...]] = []
    if top >= phi:
        cur = tuple(-c for c in phim[:phi])
        rows.append(cur)
        for _ in range(phi, top):
            shifted = (0,) + cur
            t = shifted[phi]
            cur = tuple(shifted[j] + t * rows[0][j] for j in range(phi))
            rows.append(cur)
    def unit(j: int) -> tuple[int, ...]:
        return tuple(1 if i == j else 0 for i in range(phi))

    zpow = tuple(unit(k) if k < phi else rows[k - phi] for k in range(m))
    return CycloField(m, phi, phim, tuple(rows), zpow)


def _mul_nums(a: tuple[int, ...], b: tuple[int, ...], fld: CycloField) -> list[int]:
    # Coefficient-vector product reduced modulo Phi_m; no normalization.
    phi = fld.phi
    conv = [0] * (2 * phi - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    conv[i + j] += ai * bj
    out = conv[:phi]
    while len(out) < phi:
        out.append(0)
    for k in range(phi, 2 * phi - 1):
        c = conv[k]
        if c:
            row = fld.rows[k - phi]
            for j in range(phi):
                out[j] += c * row[j]
    return out


def _reduce_pair(num: list[int] | tuple[int, ...], den: int) -> tuple[tuple[int, ...], int]:
    if den == 0:
        raise ZeroDivisionError("division by zero in cyclotomic field")
    if den < 0:
        den = -den
        num = [-c for c in num]
    g = den
    for c in num:
        g = gcd(g, c)
        if g == 1:
            break
    if g > 1:
        num = [c // g for c in num]
        den //= g
    if not any(num):
        den = 1
    return tuple(num), den


class CycloElem:
    __slots__ = ("m", "num", "den")

    def __init__(self, m: int, num: tuple[int, ...], den: int = 1, *, _normalized: bool = False) -> None:
        fld = cyclo_field(m)
        if len(num) != fld.phi:
            raise ValueError(f"coefficient vector must have length {fld.phi} for m={m}")
        if _normalized:
            self.m = m
            self.num = tuple(num)
            self.den = den
        else:
            self.m = m
            self.num, self.den = _reduce_pair(num, den)

    @classmethod
    def zero(cls, m: int) -> CycloElem:
        phi = cyclo_field(m).phi
        return cls(m, (0,) * phi, 1, _normalized=True)

    @classmethod
    def one(cls, m: int) -> CycloElem:
        return cls.from_rational(m, 1)

    @classmethod
    def from_rational(cls, m: int, q: Scalar) -> CycloElem:
        q = Fraction(q)
        phi = cyclo_field(m).phi
        num = (q.numerator,) + (0,) * (phi - 1)
        return cls(m, num, q.denominator, _normalized=True)

    @classmethod
    def root(cls, m: int, k: int = 1) -> CycloElem:
        fld = cyclo_field(m)
        return cls(m, fld.zpow[k % m], 1, _normalized=True)

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.den) for c in self.num)

    def is_zero(self) -> bool:
        return not any(self.num)

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def _coerced(self, other: CycloElem) -> tuple[CycloElem, CycloElem]:
        if self.m == other.m:
            return self, other
        m = lcm(self.m, other.m)
        return self.coerce(m), other.coerce(m)

    def coerce(self, m: int) -> CycloElem:
        if m == self.m:
            return self
        if m % self.m != 0:
            raise ValueError(f"cannot coerce Q(zeta_{self.m}) into Q(zeta_{m})")
        fld = cyclo_field(m)
        t = m // self.m
        out = [0] * fld.phi
        for j, c in enumerate(self.num):
            if c:
                row = fld.zpow[(j * t) % m]
                for i in range(fld.phi):
                    out[i] += c * row[i]
        return CycloElem(m, tuple(out), self.den)

    def descend(self, m: int) -> CycloElem:
        """Express this element in Q(zeta_m); raises if it does not lie there."""
        if m == self.m:
            return self
        if self.m % m != 0:
            raise ValueError(f"Q(zeta_{m}) is not a subfield of Q(zeta_{self.m})")
        big, small = cyclo_field(self.m), cyclo_field(m)
        t = self.m // m
        # columns: the Q(zeta_m) basis lifted into Q(zeta_M)
        cols = []
        for j in range(small.phi):
            lifted = CycloElem.root(m, j).coerce(self.m)
            cols.append(lifted.num)
        rows = big.phi
        aug = [[Fraction(cols[c][r]) for c in range(small.phi)] + [Fraction(self.num[r], self.den)]
               for r in range(rows)]
        piv_cols: list[int] = []
        rr = 0
        for c in range(small.phi):
            piv = next((i for i in range(rr, rows) if aug[i][c]), None)
            if piv is None:
                continue
            aug[rr], aug[piv] = aug[piv], aug[rr]
            inv = 1 / aug[rr][c]
            aug[rr] = [x * inv for x in aug[rr]]
            for i in range(rows):
                if i != rr and aug[i][c]:
                    f = aug[i][c]
                    aug[i] = [x - f * y for x, y in zip(aug[i], aug[rr])]
            piv_cols.append(c)
            rr += 1
        if any(row[-1] for row in aug[rr:]):
            raise ValueError(f"element does not lie in Q(zeta_{m}): {self!r}")
        sol = [Fraction(0)] * small.phi
        for i, c in enumerate(piv_cols):
            sol[c] = aug[i][-1]
        den = 1
        for x in sol:
            den = lcm(den, x.denominator)
        return CycloElem(m, tuple(int(x * den) for x in sol), den)

    def conjugate(self) -> CycloElem:
        fld = cyclo_field(self.m)
        out = [0] * fld.phi
        for j, c in enumerate(self.num):
            if c:
                row = fld.zpow[(self.m - j) % self.m]
                for i in range(fld.phi):
                    out[i] += c * row[i]
        return CycloElem(self.m, tuple(out), self.den)

    def __add__(self, other: CycloElem | Scalar) -> CycloElem:
        other = _as_elem(other, self.m)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._coerced(other)
        den = lcm(a.den, b.den)
        fa, fb = den // a.den, den // b.den
        num = [fa * x + fb * y for x, y in zip(a.num, b.num)]
        return CycloElem(a.m, tuple(num), den)

    __radd__ = __add__

    def __neg__(self) -> CycloElem:
        return CycloElem(self.m, tuple(-c for c in self.num), self.den, _normalized=True)

    def __sub__(self, other: CycloElem | Scalar) -> CycloElem:
        other = _as_elem(other, self.m)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: CycloElem | Scalar) -> CycloElem:
        return (-self) + other

    def __mul__(self, other: CycloElem | Scalar) -> CycloElem:
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return CycloElem(self.m, tuple(q.numerator * c for c in self.num), self.den * q.denominator)
        if not isinstance(other, CycloElem):
            return NotImplemented
        a, b = self._coerced(other)
        num = _mul_nums(a.num, b.num, cyclo_field(a.m))
        return CycloElem(a.m, tuple(num), a.den * b.den)

    __rmul__ = __mul__

    def __truediv__(self, other: CycloElem | Scalar) -> CycloElem:
        other = _as_elem(other, self.m)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other: Scalar) -> CycloElem:
        return self.inv() * other

    def __pow__(self, k: int) -> CycloElem:
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inv() ** (-k)
        result = CycloElem.one(self.m)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inv(self) -> CycloElem:
        if self.is_zero():
            raise ZeroDivisionError("division by zero in cyclotomic field")
        fld = cyclo_field(self.m)
        if self.is_rational():
            q = 1 / Fraction(self.num[0], self.den)
            return CycloElem.from_rational(self.m, q)
        # extended Euclid against Phi_m over Q
        a = [Fraction(c, self.den) for c in self.num]
        mod = [Fraction(c) for c in fld.phim]
        r0, r1 = mod, a
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while _deg(r1) > 0:
            q, rem = _pdivmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, _psub(s0, _pmul(q, s1))
        if _deg(r1) < 0:
            raise ZeroDivisionError("division by zero in cyclotomic field")
        c = r1[0]
        inv = [x / c for x in s1]
        inv = inv[: fld.phi] + [Fraction(0)] * max(0, fld.phi - len(inv))
        den = 1
        for x in inv:
            den = lcm(den, x.denominator)
        num = tuple(int(x * den) for x in inv)
        return CycloElem(self.m, num, den)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return self.is_rational() and Fraction(self.num[0], self.den) == q
        if not isinstance(other, CycloElem):
            return NotImplemented
        a, b = self._coerced(other)
        return a.num == b.num and a.den == b.den

    __hash__ = None  # type: ignore[assignment]

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __repr__(self) -> str:
        terms = []
        for j, c in enumerate(self.num):
            if not c:
                continue
            q = Fraction(c, self.den)
            if j == 0:
                terms.append(str(q))
            elif j == 1:
                terms.append(f"{q}*z" if abs(q) != 1 else ("z" if q > 0 else "-z"))
            else:
                terms.append(f"{q}*z^{j}" if abs(q) != 1 else (f"z^{j}" if q > 0 else f"-z^{j}"))
        body = " + ".join(terms).replace("+ -", "- ") if terms else "0"
        return f"CycloElem({body!s}; m={self.m})"


def _as_elem(x: CycloElem | Scalar, m: int) -> CycloElem:
    if isinstance(x, CycloElem):
        return x
    if isinstance(x, (int, Fraction)):
        return CycloElem.from_rational(m, x)
    return NotImplemented  # type: ignore[return-value]


def _deg(p: list[Fraction]) -> int:
    for i in range(len(p) - 1, -1, -1):
        if p[i]:
            return i
    return -1


def _pdivmod(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    da, db = _deg(a), _deg(b)
    if db < 0:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a)
    quo = [Fraction(0)] * max(da - db + 1, 1)
    lead = b[db]
    for k in range(da - db, -1, -1):
        c = rem[db + k] / lead
        quo[k] = c
        if c:
            for j in range(db + 1):
                rem[k + j] -= c * b[j]
    while len(rem) > 1 and not rem[-1]:
        rem.pop()
    return quo, rem


def _pmul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _psub(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    n = max(len(a), len(b))
    a = a + [Fraction(0)] * (n - len(a))
    b = b + [Fraction(0)] * (n - len(b))
    return [x - y for x, y in zip(a, b)]


# ---------------------------------------------------------------------------
# Functional API


def cyclo_root(m: int, k: int = 1) -> CycloElem:
    """zeta_m^k reduced modulo Phi_m; k is taken modulo m."""
    return CycloElem.root(m, k)


def cyclo_add(a: CycloElem, b: CycloElem | Scalar) -> CycloElem:
    return a + b


def cyclo_mul(a: CycloElem, b: CycloElem | Scalar) -> CycloElem:
    return a * b


def cyclo_pow(a: CycloElem, k: int) -> CycloElem:
    return a ** k


def cyclo_inv(a: CycloElem) -> CycloElem:
    return a.inv()


def cyclo_conjugate(a: CycloElem) -> CycloElem:
    return a.conjugate()


def cyclo_coerce(a: CycloElem, m: int) -> CycloElem:
    """Lift into Q(zeta_m); m must be a multiple of a's conductor."""
    return a.coerce(m)


def as_rational(a: CycloElem) -> Fraction:
    if not a.is_rational():
        raise ValueError(f"not a rational number: {a!r}")
    return Fraction(a.num[0], a.den)


def as_rational_integer(a: CycloElem) -> int:
    """Certify that a is a rational integer and return it.

    This is the mandatory final step of every invariant computation: a value
    that fails here signals a formula or calibration bug upstream.
    """
    if not a.is_rational():
        raise ValueError(f"not a rational integer: {a!r}")
    if a.den != 1:
        raise ValueError(f"rational but not integral: {Fraction(a.num[0], a.den)}")
    return a.num[0]
