"""First-order dual numbers, generic over their own scalar type.

A :class:`Dual` carries a value and a tuple of derivative parts, one per
seeded direction.  Parts (and the value itself) may again be ``Dual``,
which is how second derivatives are obtained: evaluating with
dual-of-dual inputs propagates exact mixed partials.

All arithmetic follows the product/quotient/chain rules exactly, so
results are exact up to floating-point rounding; constants lift with zero
derivative parts.
"""

from __future__ import annotations

import math

from .errors import DomainError


def _c_exp(x: float) -> float:
    # mirror C semantics: overflow to inf instead of raising
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _c_trig(fn, x: float) -> float:
    # C trig of inf is NaN; Python raises
    try:
        return fn(x)
    except ValueError:
        return math.nan


class Dual:
    __slots__ = ("value", "parts")

    def __init__(self, value, parts):
        self.value = value
        self.parts = tuple(parts)

    def __repr__(self):
        return f"Dual({self.value!r}, {self.parts!r})"

    # ring operations -----------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Dual):
            return Dual(self.value + other.value,
                        (a + b for a, b in zip(self.parts, other.parts)))
        return Dual(self.value + other, self.parts)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Dual):
            return Dual(self.value - other.value,
                        (a - b for a, b in zip(self.parts, other.parts)))
        return Dual(self.value - other, self.parts)

    def __rsub__(self, other):
        return Dual(other - self.value, (-a for a in self.parts))

    def __mul__(self, other):
        if isinstance(other, Dual):
            return Dual(self.value * other.value,
                        (a * other.value + self.value * b
                         for a, b in zip(self.parts, other.parts)))
        return Dual(self.value * other, (a * other for a in self.parts))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Dual):
            if real(other) == 0.0:
                raise DomainError("division by zero")
            den = other.value * other.value
            return Dual(self.value / other.value,
                        ((a * other.value - self.value * b) / den
                         for a, b in zip(self.parts, other.parts)))
        if real(other) == 0.0:
            raise DomainError("division by zero")
        return Dual(self.value / other, (a / other for a in self.parts))

    def __rtruediv__(self, other):
        if real(self) == 0.0:
            raise DomainError("division by zero")
        den = self.value * self.value
        return Dual(other / self.value,
                    ((0.0 - other * a) / den for a in self.parts))

    def __neg__(self):
        return Dual(-self.value, (-a for a in self.parts))


def real(x):
    """Underlying float of a possibly nested dual."""
    while isinstance(x, Dual):
        x = x.value
    return x


def is_constant(x):
    """True when x carries no derivative information at any level."""
    if not isinstance(x, Dual):
        return True
    return is_constant(x.value) and all(_is_zero(p) for p in x.parts)


def _is_zero(x):
    if isinstance(x, Dual):
        return _is_zero(x.value) and all(_is_zero(p) for p in x.parts)
    return x == 0.0


# generic elementary functions (chain rule: f(u) = (f(u0), f'(u0)*parts)) ---


def gsin(x):
    if isinstance(x, Dual):
        d1 = gcos(x.value)
        return Dual(gsin(x.value), (d1 * p for p in x.parts))
    return _c_trig(math.sin, x)


def gcos(x):
    if isinstance(x, Dual):
        d1 = -gsin(x.value)
        return Dual(gcos(x.value), (d1 * p for p in x.parts))
    return _c_trig(math.cos, x)


def gtan(x):
    if isinstance(x, Dual):
        f0 = gtan(x.value)
        d1 = 1.0 + f0 * f0
        return Dual(f0, (d1 * p for p in x.parts))
    return _c_trig(math.tan, x)


def gexp(x):
    if isinstance(x, Dual):
        f0 = gexp(x.value)
        return Dual(f0, (f0 * p for p in x.parts))
    return _c_exp(x)


def gln(x):
    if real(x) <= 0.0:
        raise DomainError("ln of a nonpositive argument")
    if isinstance(x, Dual):
        d1 = 1.0 / x.value
        return Dual(gln(x.value), (d1 * p for p in x.parts))
    return math.log(x)


def gsqrt(x):
    r = real(x)
    if r < 0.0:
        raise DomainError("sqrt of a negative argument")
    if isinstance(x, Dual):
        if r == 0.0:
            raise DomainError("derivative of sqrt at zero")
        f0 = gsqrt(x.value)
        d1 = 0.5 / f0
        return Dual(f0, (d1 * p for p in x.parts))
    return math.sqrt(x)


def gabs(x):
    if isinstance(x, Dual):
        r = real(x)
        # sign convention 0 at the kink, matching the symmetric-difference
        # value reported by the finite-difference oracle
        d1 = 1.0 if r > 0.0 else (-1.0 if r < 0.0 else 0.0)
        return Dual(gabs(x.value), (d1 * p for p in x.parts))
    return abs(x)


def gpow_int(x, m: int):
    """x**m by repeated multiplication; valid for any base, exact for duals."""
    if m == 0:
        return 1.0
    k = m if m > 0 else -m
    acc = x
    for _ in range(k - 1):
        acc = acc * x
    if m < 0:
        if real(acc) == 0.0:
            raise DomainError("zero raised to a negative power")
        return 1.0 / acc
    return acc


def gpow(base, exponent):
    """General power with the domain rules of the DSL.

    Constant integer exponents go through repeated multiplication (exact
    for duals, valid for negative bases); anything else requires a
    positive base and uses exp(e*ln b).
    """
    if is_constant(exponent):
        e = real(exponent)
        if math.isfinite(e) and e == math.floor(e) and abs(e) <= 2**31:
            return gpow_int(base, int(e))
    if real(base) > 0.0:
        return gexp(exponent * gln(base))
    if real(base) == 0.0:
        raise DomainError("zero base with a non-integer exponent")
    raise DomainError("negative base with a non-integer exponent")
