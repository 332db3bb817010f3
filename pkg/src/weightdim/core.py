"""Problem-instance types: weight vectors, rational boxes and polynomial manifolds.

A manifold is given in Monge form ``{(x, f(x)) : x in U}`` where ``U`` is a
closed rational box in ``R^d`` and ``f = (f_1, ..., f_m)`` is a tuple of
polynomials with rational coefficients.  All evaluation is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .exact import to_fraction
from .exceptions import (
    NonPositiveWeight,
    OrderingViolated,
    OutOfDomain,
    TailSumTooLarge,
    ValidationError,
)

Monomial = tuple[int, ...]


# --------------------------------------------------------------------------
# Weight vectors
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightVector:
    """Weights ``tau`` split into ``d`` manifold and ``m`` codimension coordinates.

    Construct through :func:`validate_weights`; the constructor itself does
    not check the ordering and tail-sum conditions.
    """

    d: int
    m: int
    taus: tuple[Fraction, ...]

    @property
    def n(self) -> int:
        return self.d + self.m

    @property
    def head(self) -> tuple[Fraction, ...]:
        return self.taus[: self.d]

    @property
    def tail(self) -> tuple[Fraction, ...]:
        return self.taus[self.d :]

    @property
    def tail_sum(self) -> Fraction:
        return sum(self.tail, Fraction(0))

    @property
    def total(self) -> Fraction:
        return sum(self.taus, Fraction(0))

    def tau(self, i: int) -> Fraction:
        """1-based access, matching the usual indexing of weights."""
        return self.taus[i - 1]


def validate_weights(taus: Sequence, d: int, m: int) -> WeightVector:
    """Check the admissibility conditions on ``taus`` and wrap them.

    Raises
    ------
    NonPositiveWeight
        Some weight is ``<= 0``.
    OrderingViolated
        The first ``d`` weights are not weakly decreasing, or ``tau_d`` is
        smaller than one of the codimension weights.
    TailSumTooLarge
        The codimension weights sum to 1 or more.
    """
    if d < 1 or m < 1:
        raise ValidationError(f"d and m must be positive, got d={d}, m={m}")
    values = tuple(to_fraction(t) for t in taus)
    if len(values) != d + m:
        raise ValidationError(f"expected {d + m} weights, got {len(values)}")
    for i, t in enumerate(values, 1):
        if t <= 0:
            raise NonPositiveWeight(f"tau_{i} = {t} is not positive")
    for i in range(1, d):
        if values[i - 1] < values[i]:
            raise OrderingViolated(f"tau_{i} = {values[i - 1]} < tau_{i + 1} = {values[i]}")
    tail = values[d:]
    if values[d - 1] < max(tail):
        raise OrderingViolated(f"tau_{d} = {values[d - 1]} is below the largest codimension weight {max(tail)}")
    if sum(tail) >= 1:
        raise TailSumTooLarge(f"codimension weights sum to {sum(tail)} >= 1")
    return WeightVector(d, m, values)


# --------------------------------------------------------------------------
# Boxes
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RationalBox:
    """Product of closed intervals ``[lo_i, hi_i]`` with rational endpoints."""

    lower: tuple[Fraction, ...]
    upper: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.lower) != len(self.upper):
            raise ValidationError("box endpoints have different lengths")
        for lo, hi in zip(self.lower, self.upper):
            if not lo < hi:
                raise ValidationError(f"degenerate box side [{lo}, {hi}]")

    @classmethod
    def from_intervals(cls, intervals: Iterable[Sequence]) -> "RationalBox":
        lows, highs = [], []
        for lo, hi in intervals:
            lows.append(to_fraction(lo))
            highs.append(to_fraction(hi))
        return cls(tuple(lows), tuple(highs))

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def sides(self) -> tuple[Fraction, ...]:
        return tuple(hi - lo for lo, hi in zip(self.lower, self.upper))

    def intervals(self) -> list[tuple[Fraction, Fraction]]:
        return list(zip(self.lower, self.upper))

    def contains(self, x: Sequence[Fraction]) -> bool:
        return len(x) == self.dim and all(lo <= xi <= hi for lo, xi, hi in zip(self.lower, x, self.upper))

    def boundary_distance(self, x: Sequence[Fraction]) -> Fraction:
        """Sup-norm distance from ``x`` to the boundary; 0 on the boundary."""
        if not self.contains(x):
            raise OutOfDomain(f"{tuple(map(str, x))} is outside the box")
        return min(min(xi - lo, hi - xi) for lo, xi, hi in zip(self.lower, x, self.upper))


# --------------------------------------------------------------------------
# Polynomials
# --------------------------------------------------------------------------


def _ipow(lo: Fraction, hi: Fraction, e: int) -> tuple[Fraction, Fraction]:
    if e == 0:
        return Fraction(1), Fraction(1)
    a, b = lo**e, hi**e
    if e % 2 == 0 and lo <= 0 <= hi:
        return Fraction(0), max(a, b)
    return min(a, b), max(a, b)


def _imul(x: tuple[Fraction, Fraction], y: tuple[Fraction, Fraction]) -> tuple[Fraction, Fraction]:
    products = [x[0] * y[0], x[0] * y[1], x[1] * y[0], x[1] * y[1]]
    return min(products), max(products)


class Polynomial:
    """Multivariate polynomial with Fraction coefficients.

    ``terms`` maps exponent tuples to coefficients; zero coefficients are
    dropped so the zero polynomial has no terms.
    """

    __slots__ = ("nvars", "terms", "_horner")

    def __init__(self, nvars: int, terms: Mapping[Monomial, object] | Iterable[tuple[object, Monomial]]):
        self.nvars = nvars
        items = terms.items() if isinstance(terms, Mapping) else ((tuple(e), c) for c, e in terms)
        clean: dict[Monomial, Fraction] = {}
        for expo, coeff in items:
            expo = tuple(int(e) for e in expo)
            if len(expo) != nvars or any(e < 0 for e in expo):
                raise ValidationError(f"bad exponent multi-index {expo} for {nvars} variables")
            coeff = to_fraction(coeff)
            clean[expo] = clean.get(expo, Fraction(0)) + coeff
        self.terms = {e: c for e, c in sorted(clean.items()) if c != 0}
        self._horner = None

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __repr__(self):
        return f"Polynomial({self.nvars}, {self.terms!r})"

    def diff(self, var: int) -> "Polynomial":
        """Partial derivative with respect to variable ``var`` (0-based)."""
        out = {}
        for expo, coeff in self.terms.items():
            k = expo[var]
            if k:
                new = expo[:var] + (k - 1,) + expo[var + 1 :]
                out[new] = out.get(new, Fraction(0)) + coeff * k
        return Polynomial(self.nvars, out)

    def _nested(self):
        # nested[e] holds the coefficient structure of x_0**e, recursively
        def build(terms: dict, depth: int):
            if depth == self.nvars:
                return sum(terms.values(), Fraction(0))
            groups: dict[int, dict] = {}
            for expo, c in terms.items():
                groups.setdefault(expo[depth], {})[expo] = c
            top = max(groups, default=0)
            return [build(groups[k], depth + 1) if k in groups else None for k in range(top + 1)]

        if self._horner is None:
            self._horner = build(self.terms, 0) if self.terms else None
        return self._horner

    def __call__(self, x: Sequence) -> Fraction:
        """Exact evaluation by nested Horner schemes."""
        if len(x) != self.nvars:
            raise ValidationError(f"expected {self.nvars} coordinates, got {len(x)}")
        nested = self._nested()
        if nested is None:
            return Fraction(0)

        def horner(node, depth):
            if depth == self.nvars:
                return node
            acc = Fraction(0)
            xi = x[depth]
            for child in reversed(node):
                acc = acc * xi + (horner(child, depth + 1) if child is not None else 0)
            return acc

        return horner(nested, 0)

    def interval(self, box: RationalBox) -> tuple[Fraction, Fraction]:
        """Enclosure of the range over ``box`` by the natural interval extension."""
        lo_sum, hi_sum = Fraction(0), Fraction(0)
        ivals = box.intervals()
        for expo, coeff in self.terms.items():
            acc = (coeff, coeff)
            for (a, b), e in zip(ivals, expo):
                if e:
                    acc = _imul(acc, _ipow(a, b, e))
            lo_sum += acc[0]
            hi_sum += acc[1]
        return lo_sum, hi_sum

    def abs_bound(self, box: RationalBox) -> Fraction:
        lo, hi = self.interval(box)
        return max(abs(lo), abs(hi))

    def integer_form(self) -> tuple[dict[Monomial, int], int, int]:
        """Integer data for exact ``q * f(p/q)`` at integer ``p, q``.

        Returns ``(coeffs, scale, deg)`` with ``deg >= 1`` such that
        ``q * f(p/q) = sum(c_e * p**e * q**(deg - |e|)) / (scale * q**(deg - 1))``.
        """
        deg = max(self.degree, 1)
        scale = 1
        for c in self.terms.values():
            scale = math.lcm(scale, c.denominator)
        return {e: int(c * scale) for e, c in self.terms.items()}, scale, deg


# --------------------------------------------------------------------------
# Manifolds
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DerivativeBounds:
    """Upper bounds over the domain: ``C`` for second partials, ``D`` for first partials."""

    C: Fraction
    D: Fraction


@dataclass(frozen=True, eq=False)
class ManifoldSpec:
    d: int
    m: int
    domain: RationalBox
    components: tuple[Polynomial, ...]

    def __post_init__(self):
        if self.d < 1 or self.m < 1:
            raise ValidationError("d and m must be positive")
        if self.domain.dim != self.d:
            raise ValidationError(f"domain has dimension {self.domain.dim}, expected {self.d}")
        if len(self.components) != self.m:
            raise ValidationError(f"expected {self.m} components, got {len(self.components)}")
        for f in self.components:
            if f.nvars != self.d:
                raise ValidationError("component polynomial has the wrong number of variables")

    @property
    def n(self) -> int:
        return self.d + self.m


def eval_f(spec: ManifoldSpec, x: Sequence) -> tuple[Fraction, ...]:
    x = tuple(to_fraction(v) for v in x)
    if not spec.domain.contains(x):
        raise OutOfDomain(f"{tuple(map(str, x))} is outside the domain")
    return tuple(f(x) for f in spec.components)


def partials(spec: ManifoldSpec, order: int):
    """Symbolic partial derivatives of every component.

    ``order=1`` gives ``grads[j][i] = d f_j / d x_i``; ``order=2`` gives
    ``hess[j][i][k] = d^2 f_j / d x_i d x_k``.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    grads = [[f.diff(i) for i in range(spec.d)] for f in spec.components]
    if order == 1:
        return grads
    return [[[g.diff(k) for k in range(spec.d)] for g in row] for row in grads]


def derivative_bounds(spec: ManifoldSpec) -> DerivativeBounds:
    box = spec.domain
    grads = partials(spec, 1)
    hess = partials(spec, 2)
    D = max(g.abs_bound(box) for row in grads for g in row)
    C = max(h.abs_bound(box) for mat in hess for row in mat for h in row)
    return DerivativeBounds(C=C, D=D)
