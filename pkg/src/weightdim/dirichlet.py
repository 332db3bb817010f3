"""Exact search for weighted Dirichlet-type approximations on a manifold.

For a point ``x`` of the domain, exponents ``a`` with ``min a_i > 1`` and
``sum(a_i - 1) + sum(tau_{d+j}) = 1``, and a horizon ``Q`` beyond the point's
threshold ``Q0``, there is ``1 <= q <= Q`` and integers ``p`` with

    |x_i - p_i/q| < 4^(m/d) / (q Q^(a_i - 1))          (i <= d)
    |f_j(p/q) - p_{d+j}/q| < 1 / (2 q^(tau_{d+j} + 1))  (j <= m)

and ``p/q`` in the domain.  The search is an exhaustive scan over ``q``; the
per-axis window has radius below 1 past the threshold, so only a handful of
``p_i`` need to be tried per denominator.  Every inequality is decided exactly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .core import ManifoldSpec, WeightVector, derivative_bounds, partials
from .exact import PowerProduct, to_fraction
from .exceptions import (
    InvariantViolation,
    OutOfDomain,
    PointOnBoundary,
    PreconditionViolated,
    ValidationError,
    WitnessNotFound,
)


@dataclass(frozen=True)
class DirichletWitness:
    """``p`` holds all ``n`` numerators; ``q >= 1`` is the common denominator."""

    p: tuple[int, ...]
    q: int

    def point(self, d: int) -> tuple[Fraction, ...]:
        return tuple(Fraction(pi, self.q) for pi in self.p[:d])


@dataclass(frozen=True)
class SearchBudget:
    Q: int
    q_max: int

    def __post_init__(self):
        if self.Q < 1 or self.q_max < 1:
            raise ValidationError("search horizons must be positive")


@dataclass(frozen=True)
class QSetCertificate:
    """Every integer ``Q >= Q0`` satisfies ``max_i 4^(m/d)/Q^(a_i-1) < threshold``.

    The threshold ``min{1, r, (2 C d^2)^(-1/2)}`` is kept squared so it stays rational.
    """

    Q0: int
    r: Fraction
    threshold_sq: Fraction
    C: Fraction

    @property
    def threshold(self) -> PowerProduct:
        return PowerProduct.power(self.threshold_sq, Fraction(1, 2))


def dirichlet_constant(d: int, m: int) -> PowerProduct:
    """``4^(m/d)``."""
    return PowerProduct.power(4, Fraction(m, d))


def _as_point(x: Sequence) -> tuple[Fraction, ...]:
    return tuple(to_fraction(v) for v in x)


def _check_exponents(w: WeightVector, a: Sequence[Fraction]) -> tuple[Fraction, ...]:
    a = tuple(to_fraction(v) for v in a)
    if len(a) != w.d:
        raise PreconditionViolated(f"expected {w.d} exponents, got {len(a)}")
    if min(a) <= 1:
        raise PreconditionViolated("every exponent a_i must exceed 1")
    if sum((ai - 1 for ai in a), Fraction(0)) + w.tail_sum != 1:
        raise PreconditionViolated("exponents violate sum(a_i - 1) + tail sum = 1")
    return a


def _in_qset(Q: int, c: PowerProduct, a_min: Fraction, threshold_sq: Fraction) -> bool:
    radius = c / PowerProduct.power(Q, a_min - 1)
    return radius**2 < threshold_sq


def q0_bound(spec: ManifoldSpec, x: Sequence, a: Sequence, C: Fraction | None = None) -> QSetCertificate:
    """Smallest ``Q0`` such that every ``Q >= Q0`` lies in the good set for ``x``.

    ``C`` defaults to the interval-arithmetic bound from
    :func:`~weightdim.core.derivative_bounds`.
    """
    x = _as_point(x)
    a = tuple(to_fraction(v) for v in a)
    if min(a) <= 1:
        raise PreconditionViolated("every exponent a_i must exceed 1")
    r = spec.domain.boundary_distance(x)
    if r == 0:
        raise PointOnBoundary(f"{tuple(map(str, x))} lies on the domain boundary")
    if C is None:
        C = derivative_bounds(spec).C
    threshold_sq = min(Fraction(1), r * r)
    if C > 0:
        threshold_sq = min(threshold_sq, 1 / (2 * C * spec.d**2))
    c = dirichlet_constant(spec.d, spec.m)
    a_min = min(a)
    # the condition is monotone in Q: gallop, then bisect
    hi = 1
    while not _in_qset(hi, c, a_min, threshold_sq):
        hi *= 2
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _in_qset(mid, c, a_min, threshold_sq):
            hi = mid
        else:
            lo = mid
    return QSetCertificate(Q0=hi, r=r, threshold_sq=threshold_sq, C=C)


# --------------------------------------------------------------------------
# exact inequality kernels
# --------------------------------------------------------------------------


class _PowerBound:
    """Tests ``value < bound`` for non-negative rational ``value`` and fixed PowerProduct ``bound``."""

    __slots__ = ("n", "num", "den", "approx")

    def __init__(self, bound: PowerProduct):
        self.n = bound.order()
        raised = bound.raised(self.n)
        self.num, self.den = raised.numerator, raised.denominator
        self.approx = float(bound)

    def holds(self, num: int, den: int) -> bool:
        # (num/den)^n < self.num/self.den
        return num**self.n * self.den < self.num * den**self.n


class _FiberCheck:
    """Exact ``||q f_j(p/q)|| < 1 / (2 q^tau_j)`` for every codimension coordinate."""

    def __init__(self, spec: ManifoldSpec, tail: Sequence[Fraction]):
        self.forms = [f.integer_form() for f in spec.components]
        self.tail = tuple(tail)

    def numerators(self, p: Sequence[int], q: int) -> list[tuple[int, int]]:
        """``(M, S)`` with ``q f_j(p/q) = M / S`` for each ``j``."""
        out = []
        for coeffs, scale, deg in self.forms:
            total = 0
            for expo, c in coeffs.items():
                term = c * q ** (deg - sum(expo))
                for pi, e in zip(p, expo):
                    if e:
                        term *= pi**e
                total += term
            out.append((total, scale * q ** (deg - 1)))
        return out

    def check(self, p: Sequence[int], q: int) -> tuple[int, ...] | None:
        """Nearest integers ``p_{d+j}`` when every inequality holds, else ``None``."""
        near = []
        for (M, S), tau in zip(self.numerators(p, q), self.tail):
            rem = M % S
            dist = min(rem, S - rem)
            # (2 dist / S)^N * q^(tau N) < 1 with N the denominator of tau
            N = tau.denominator
            if not (2 * dist) ** N * q**tau.numerator < S**N:
                return None
            near.append((M - rem) // S + (1 if 2 * rem > S else 0))
        return tuple(near)


def _axis_window(u: int, v: int, q: int, bound: _PowerBound) -> list[int]:
    """Integers ``p`` with ``|q u/v - p| < bound`` (exact)."""
    centre = q * u / v
    reach = bound.approx * (1 + 1e-9) + 1e-12
    lo, hi = math.floor(centre - reach), math.ceil(centre + reach)
    out = []
    for p in range(lo, hi + 1):
        if bound.holds(abs(q * u - p * v), v):
            out.append(p)
    return out


def _domain_range(spec: ManifoldSpec, i: int, q: int) -> tuple[int, int]:
    lo, hi = spec.domain.lower[i], spec.domain.upper[i]
    return math.ceil(lo * q), math.floor(hi * q)


def find_witness(spec: ManifoldSpec, x: Sequence, w: WeightVector, a: Sequence, Q: int) -> DirichletWitness:
    """First witness in ``(q, lexicographic p)`` order with ``q <= Q``.

    Raises
    ------
    WitnessNotFound
        No ``q <= Q`` works.  Past the threshold from :func:`q0_bound` this
        contradicts the existence theorem and should be treated as a fault.
    """
    x = _as_point(x)
    if not spec.domain.contains(x):
        raise OutOfDomain(f"{tuple(map(str, x))} is outside the domain")
    a = _check_exponents(w, a)
    if Q < 1:
        raise ValidationError("Q must be positive")
    c = dirichlet_constant(w.d, w.m)
    bounds = [_PowerBound(c / PowerProduct.power(Q, ai - 1)) for ai in a]
    fiber = _FiberCheck(spec, w.tail)
    for q in range(1, Q + 1):
        witness = _witness_at(spec, x, q, bounds, fiber)
        if witness is not None:
            return witness
    raise WitnessNotFound(f"no witness with q <= {Q}")


def _witness_at(spec, x, q, bounds, fiber) -> DirichletWitness | None:
    axes = []
    for i, (xi, bound) in enumerate(zip(x, bounds)):
        lo, hi = _domain_range(spec, i, q)
        window = [p for p in _axis_window(xi.numerator, xi.denominator, q, bound) if lo <= p <= hi]
        if not window:
            return None
        axes.append(window)
    for p in itertools.product(*axes):
        near = fiber.check(p, q)
        if near is not None:
            return DirichletWitness(tuple(p) + near, q)
    return None


def iter_witnesses(spec: ManifoldSpec, x: Sequence, w: WeightVector, a: Sequence, q_max: int) -> Iterator[DirichletWitness]:
    """Witnesses for the horizon-free system, ``1 <= q <= q_max``, ascending in ``q``.

    The first-coordinate inequalities are ``|x_i - p_i/q| < 4^(m/d) / q^(a_i)``.
    """
    x = _as_point(x)
    if not spec.domain.contains(x):
        raise OutOfDomain(f"{tuple(map(str, x))} is outside the domain")
    a = _check_exponents(w, a)
    c = dirichlet_constant(w.d, w.m)
    fiber = _FiberCheck(spec, w.tail)
    for q in range(1, q_max + 1):
        bounds = [_PowerBound(c * PowerProduct.power(q, 1 - ai)) for ai in a]
        axes = []
        for i, (xi, bound) in enumerate(zip(x, bounds)):
            lo, hi = _domain_range(spec, i, q)
            axes.append([p for p in _axis_window(xi.numerator, xi.denominator, q, bound) if lo <= p <= hi])
        for p in itertools.product(*axes):
            near = fiber.check(p, q)
            if near is not None:
                yield DirichletWitness(tuple(p) + near, q)


def enumerate_witnesses(spec: ManifoldSpec, x: Sequence, w: WeightVector, a: Sequence, q_max: int) -> list[DirichletWitness]:
    if q_max < 1:
        return []
    return list(iter_witnesses(spec, x, w, a, q_max))


# --------------------------------------------------------------------------
# certificates for the linear-forms step
# --------------------------------------------------------------------------


def minkowski_product(w: WeightVector, a: Sequence, Q: int) -> PowerProduct:
    """Product of the right-hand sides of the linear-forms system, kept symbolic.

    ``prod_j Q^(-tau_{d+j}) / 4 * prod_i 4^(m/d) / Q^(a_i - 1) * Q``; the powers of 4
    cancel identically, leaving ``Q^(1 - sum(a_i - 1) - tail)``.
    """
    a = tuple(to_fraction(v) for v in a)
    if len(a) != w.d:
        raise ValidationError(f"expected {w.d} exponents")
    four_exp = -w.m + w.d * Fraction(w.m, w.d)
    if four_exp != 0:
        raise InvariantViolation("powers of 4 failed to cancel")
    q_exp = 1 - w.tail_sum - sum((ai - 1 for ai in a), Fraction(0))
    return PowerProduct(1, [(4, four_exp), (Q, q_exp)])


def minkowski_matrix(spec: ManifoldSpec, x: Sequence) -> list[list[Fraction]]:
    """The ``(n+1) x (n+1)`` coefficient matrix of the linear forms at ``x``.

    Rows ``j <= m``: ``(g_j(x), grad f_j(x), -e_j)`` with ``g_j = f_j - sum x_i df_j/dx_i``;
    rows ``m+i``: ``(x_i, -e_i, 0)``; last row ``(1, 0, ..., 0)``.
    """
    x = _as_point(x)
    if not spec.domain.contains(x):
        raise OutOfDomain(f"{tuple(map(str, x))} is outside the domain")
    d, m, n = spec.d, spec.m, spec.n
    grads = partials(spec, 1)
    rows = []
    for j, f in enumerate(spec.components):
        grad = [g(x) for g in grads[j]]
        g_j = f(x) - sum((xi * gi for xi, gi in zip(x, grad)), Fraction(0))
        tail = [Fraction(-1) if k == j else Fraction(0) for k in range(m)]
        rows.append([g_j] + grad + tail)
    for i in range(d):
        rows.append([x[i]] + [Fraction(-1) if k == i else Fraction(0) for k in range(d)] + [Fraction(0)] * m)
    rows.append([Fraction(1)] + [Fraction(0)] * n)
    return rows


def determinant(matrix: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact determinant by fraction-preserving Gaussian elimination."""
    a = [list(map(Fraction, row)) for row in matrix]
    size = len(a)
    det = Fraction(1)
    for col in range(size):
        pivot = next((r for r in range(col, size) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, size):
            factor = a[r][col] / a[col][col]
            if factor:
                for k in range(col, size):
                    a[r][k] -= factor * a[col][k]
    return det


def minkowski_matrix_det(spec: ManifoldSpec, x: Sequence) -> int:
    det = determinant(minkowski_matrix(spec, x))
    if abs(det) != 1:
        raise InvariantViolation(f"|det A| = {abs(det)} != 1")
    return int(det)


def taylor_remainder_check(spec: ManifoldSpec, x: Sequence, x2: Sequence, C) -> bool:
    """Whether ``|f_j(x2) - f_j(x) - grad f_j(x).(x2 - x)| <= C d^2 |x2 - x|_inf^2 / 2`` for all ``j``."""
    x, x2 = _as_point(x), _as_point(x2)
    for pt in (x, x2):
        if not spec.domain.contains(pt):
            raise OutOfDomain(f"{tuple(map(str, pt))} is outside the domain")
    C = to_fraction(C)
    h = max(abs(b - a) for a, b in zip(x, x2))
    allowance = C * spec.d**2 * h * h / 2
    grads = partials(spec, 1)
    for f, grad in zip(spec.components, grads):
        linear = sum((g(x) * (b - a) for g, a, b in zip(grad, x, x2)), Fraction(0))
        if abs(f(x2) - f(x) - linear) > allowance:
            return False
    return True


# --------------------------------------------------------------------------
# reporting helpers
# --------------------------------------------------------------------------


def inequality_slacks(spec: ManifoldSpec, x: Sequence, w: WeightVector, a: Sequence, witness: DirichletWitness, Q: int | None = None):
    """Per-inequality ``(name, lhs, ratio_power, N)`` for a witness.

    ``ratio_power = (lhs / rhs)^N`` is rational; the inequality holds iff it is
    below 1.  With ``Q`` the horizon form is used for the first ``d``
    inequalities, otherwise the horizon-free one.
    """
    x = _as_point(x)
    a = tuple(to_fraction(v) for v in a)
    c = dirichlet_constant(w.d, w.m)
    q = witness.q
    rows = []
    for i in range(w.d):
        lhs = abs(x[i] - Fraction(witness.p[i], q))
        rhs = c / q / PowerProduct.power(Q, a[i] - 1) if Q is not None else c / PowerProduct.power(q, a[i])
        N = rhs.order()
        rows.append((f"x{i + 1}", lhs, lhs**N / rhs.raised(N), N))
    pt = witness.point(w.d)
    for j, f in enumerate(spec.components):
        lhs = abs(f(pt) - Fraction(witness.p[w.d + j], q))
        rhs = 1 / (2 * PowerProduct.power(q, w.tail[j] + 1))
        N = rhs.order()
        rows.append((f"f{j + 1}", lhs, lhs**N / rhs.raised(N), N))
    return rows
