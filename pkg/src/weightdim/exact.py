"""Exact rationals and exact comparisons against rational powers.

Every real quantity handled by the package is either a :class:`~fractions.Fraction`
or a :class:`PowerProduct` -- a positive number ``c * b1**e1 * ... * bk**ek``
with rational ``c``, rational bases ``b_i > 0`` and rational exponents ``e_i``.
Quantities such as ``4**(m/d) / Q**(a-1)`` are PowerProducts.  Two such
numbers are compared by raising both sides to the least common multiple of the
exponent denominators, which turns the comparison into one between rationals.
"""

from __future__ import annotations

import math
import numbers
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterable, Tuple, Union

Rational = Union[int, Fraction]


def to_fraction(value) -> Fraction:
    """Coerce ``value`` to a Fraction without any rounding.

    Strings may be integers, decimals (``"0.125"``) or fractions
    (``"-3/5"``).  Floats are rejected: they would silently carry binary
    rounding error into exact comparisons.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, numbers.Integral):
        return Fraction(int(value))
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty rational string")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not an exact rational: {value!r}") from exc
    if isinstance(value, numbers.Rational):
        return Fraction(value.numerator, value.denominator)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational: {value!r}")


def format_fraction(value: Fraction) -> str:
    return str(Fraction(value))


def approx(value, digits: int = 12) -> str:
    """Decimal approximation with ``digits`` significant digits (advisory only)."""
    if isinstance(value, PowerProduct):
        exact = value.exact()
        if exact is None:
            return format(float(value), f".{digits}g")
        value = exact
    value = Fraction(value)
    with localcontext() as ctx:
        ctx.prec = digits
        dec = Decimal(value.numerator) / Decimal(value.denominator)
    return str(dec.normalize()) if dec != 0 else "0"


def _log(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


class PowerProduct:
    """Exact positive real ``coeff * prod(base ** exp)``."""

    __slots__ = ("coeff", "factors")

    def __init__(self, coeff: Rational = 1, factors: Iterable[Tuple[Rational, Rational]] = ()):
        coeff = to_fraction(coeff)
        if coeff <= 0:
            raise ValueError("PowerProduct coefficient must be positive")
        merged: dict[Fraction, Fraction] = {}
        for base, exp in factors:
            base, exp = to_fraction(base), to_fraction(exp)
            if base <= 0:
                raise ValueError("PowerProduct bases must be positive")
            if base == 1 or exp == 0:
                continue
            merged[base] = merged.get(base, Fraction(0)) + exp
        kept = []
        for base, exp in sorted(merged.items()):
            if exp.denominator == 1:
                coeff *= base ** int(exp)
            else:
                kept.append((base, exp))
        self.coeff = coeff
        self.factors = tuple(kept)

    @classmethod
    def power(cls, base: Rational, exp: Rational) -> "PowerProduct":
        return cls(1, [(base, exp)])

    def order(self) -> int:
        """Smallest N such that ``self**N`` is rational."""
        n = 1
        for _, exp in self.factors:
            n = math.lcm(n, exp.denominator)
        return n

    def raised(self, n: int) -> Fraction:
        """Exact value of ``self**n``; ``n`` must be a multiple of :meth:`order`."""
        if n % self.order():
            raise ValueError(f"{n} is not a multiple of the order {self.order()}")
        out = self.coeff ** n
        for base, exp in self.factors:
            out *= base ** int(exp * n)
        return out

    def exact(self) -> Fraction | None:
        return self.coeff if not self.factors else None

    def compare(self, other) -> int:
        """Sign of ``self - other``, decided exactly."""
        if isinstance(other, PowerProduct):
            return (self / other).compare(1)
        other = to_fraction(other)
        if other <= 0:
            return 1
        n = self.order()
        lhs, rhs = self.raised(n), other ** n
        return (lhs > rhs) - (lhs < rhs)

    def _coerce(self, other):
        if isinstance(other, PowerProduct):
            return other
        return PowerProduct(to_fraction(other))

    def __mul__(self, other):
        if not isinstance(other, (PowerProduct, numbers.Rational)):
            return NotImplemented
        other = self._coerce(other)
        return PowerProduct(self.coeff * other.coeff, self.factors + other.factors)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, (PowerProduct, numbers.Rational)):
            return NotImplemented
        other = self._coerce(other)
        inv = [(b, -e) for b, e in other.factors]
        return PowerProduct(self.coeff / other.coeff, self.factors + tuple(inv))

    def __rtruediv__(self, other):
        if not isinstance(other, numbers.Rational):
            return NotImplemented
        return self._coerce(other) / self

    def __pow__(self, exp):
        exp = to_fraction(exp)
        factors = [(self.coeff, exp)] + [(b, e * exp) for b, e in self.factors]
        return PowerProduct(1, factors)

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    def __eq__(self, other):
        if not isinstance(other, (PowerProduct, numbers.Rational)):
            return NotImplemented
        return self.compare(other) == 0

    __hash__ = None  # equal values can have different representations

    def __float__(self) -> float:
        logv = _log(self.coeff) + sum(float(e) * _log(b) for b, e in self.factors)
        return math.exp(logv)

    def __repr__(self) -> str:
        return f"PowerProduct({self})"

    def __str__(self) -> str:
        parts = [] if (self.coeff == 1 and self.factors) else [str(self.coeff)]
        parts += [f"{b}^({e})" for b, e in self.factors]
        return "*".join(parts)


def lt(lhs, rhs) -> bool:
    """Exact ``lhs < rhs`` where either side may be a PowerProduct."""
    if isinstance(lhs, PowerProduct):
        return lhs.compare(rhs) < 0
    if isinstance(rhs, PowerProduct):
        return rhs.compare(lhs) > 0
    return to_fraction(lhs) < to_fraction(rhs)


def rational_below(value: PowerProduct | Fraction, rel: float = 1e-9) -> Fraction:
    """A rational strictly below ``value`` and within ~``rel`` of it."""
    if not isinstance(value, PowerProduct):
        value = PowerProduct(value)
    guess = Fraction(float(value) * (1 - rel)).limit_denominator(10**15)
    while not value > guess:
        guess -= abs(guess) * Fraction(1, 10**6) + Fraction(1, 10**15)
    return guess


def rational_above(value: PowerProduct | Fraction, rel: float = 1e-9) -> Fraction:
    """A rational strictly above ``value`` and within ~``rel`` of it."""
    if not isinstance(value, PowerProduct):
        value = PowerProduct(value)
    guess = Fraction(float(value) * (1 + rel)).limit_denominator(10**15)
    while not value < guess:
        guess += abs(guess) * Fraction(1, 10**6) + Fraction(1, 10**15)
    return guess


def nearest_integer_distance(y: Fraction) -> Fraction:
    """``||y||``: distance from ``y`` to the closest integer."""
    r = y - math.floor(y)
    return min(r, 1 - r)


def nearest_integers(y: Fraction) -> list[int]:
    """The integer(s) closest to ``y``; two when ``y`` is a half-integer."""
    fl = math.floor(y)
    r = y - fl
    if r < Fraction(1, 2):
        return [fl]
    if r > Fraction(1, 2):
        return [fl + 1]
    return [fl, fl + 1]
