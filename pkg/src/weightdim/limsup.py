"""Witness sets, rectangle families, coverage and box counting.

The witness set collects the rational points ``p/q`` of the domain whose image
under ``f`` is unusually close to a rational with the same denominator:
``||q f_j(p/q)|| < 1 / (2 q^tau_{d+j})`` for every ``j``.  Centred at these
points are two rectangle families:

* ``"dirichlet"``: half-sides ``4^(m/d) / q^(a_i)``; their limsup has full measure.
* ``"target"``: half-sides ``c' / q^(1 + tau_i)``; their limsup lifts into the
  set of weighted approximable points on the manifold.

Coverage and box counts are computed on a rational grid with exact cell
geometry.  Interval endpoints are irrational in general, so each decision uses
a float comparison only when it is decisive by a wide margin and otherwise
falls back to exact power comparison.
"""

from __future__ import annotations

import itertools
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import DerivativeBounds, ManifoldSpec, RationalBox, WeightVector, eval_f
from .dirichlet import _FiberCheck, dirichlet_constant
from .exact import PowerProduct, nearest_integer_distance, to_fraction
from .exceptions import (
    GridTooLarge,
    InsufficientData,
    MisalignedGrid,
    OutOfDomain,
    PreconditionViolated,
    ValidationError,
)

logger = logging.getLogger(__name__)

DEFAULT_CELL_BUDGET = 10**7
_INT64_SAFE = 2**62


# --------------------------------------------------------------------------
# witness set
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class WitnessSet:
    """Entries are the rows ``(p_1, ..., p_d, q)``, sorted by ``q`` then ``p``."""

    spec: ManifoldSpec
    weights: WeightVector
    Q: int
    p: np.ndarray
    q: np.ndarray

    def __len__(self) -> int:
        return len(self.q)

    @property
    def entries(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in row) + (int(qq),) for row, qq in zip(self.p, self.q)]

    def restrict(self, q_lo: int = 1, q_hi: int | None = None) -> "WitnessSet":
        q_hi = self.Q if q_hi is None else q_hi
        mask = (self.q >= q_lo) & (self.q <= q_hi)
        return WitnessSet(self.spec, self.weights, min(self.Q, q_hi), self.p[mask], self.q[mask])


def in_witness_set(spec: ManifoldSpec, w: WeightVector, p: Sequence[int], q: int) -> bool:
    """Direct membership test for a single ``(p, q)``."""
    if q < 1:
        return False
    pt = tuple(Fraction(pi, q) for pi in p)
    if not spec.domain.contains(pt):
        return False
    return _FiberCheck(spec, w.tail).check(p, q) is not None


def _grid(spec: ManifoldSpec, q: int) -> np.ndarray | None:
    ranges = []
    for lo, hi in spec.domain.intervals():
        a, b = math.ceil(lo * q), math.floor(hi * q)
        if a > b:
            return None
        ranges.append(np.arange(a, b + 1, dtype=np.int64))
    mesh = np.meshgrid(*ranges, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _witnesses_for_q(spec: ManifoldSpec, fiber: _FiberCheck, q: int) -> np.ndarray:
    """Rows ``p`` (shape ``(k, d)``) with ``(p, q)`` in the witness set."""
    grid = _grid(spec, q)
    if grid is None or len(grid) == 0:
        return np.empty((0, spec.d), dtype=np.int64)
    pmax = [max(abs(math.ceil(lo * q)), abs(math.floor(hi * q))) for lo, hi in spec.domain.intervals()]
    keep = np.ones(len(grid), dtype=bool)
    for (coeffs, scale, deg), tau in zip(fiber.forms, fiber.tail):
        S = scale * q ** (deg - 1)
        worst = sum(abs(c) * q ** (deg - sum(e)) * math.prod(pm**k for pm, k in zip(pmax, e)) for e, c in coeffs.items())
        if worst >= _INT64_SAFE or S >= _INT64_SAFE:
            continue  # no vector screen; the exact pass below decides
        M = np.zeros(len(grid), dtype=np.int64)
        for e, c in coeffs.items():
            term = np.full(len(grid), c * q ** (deg - sum(e)), dtype=np.int64)
            for i, k in enumerate(e):
                if k:
                    term *= grid[:, i] ** k
            M += term
        rem = np.mod(M, S)
        dist = np.minimum(rem, S - rem)
        # screen only rejects: dist/S >= q^-tau / 2 by a clear margin
        limit = S * 0.5 * float(q) ** (-float(tau)) * (1 + 1e-9) + 1e-9
        keep &= dist < limit
    rows = [row for row in grid[keep] if fiber.check(tuple(int(v) for v in row), q) is not None]
    if not rows:
        return np.empty((0, spec.d), dtype=np.int64)
    return np.array(rows, dtype=np.int64).reshape(-1, spec.d)


def _scan(args):
    spec, tail, q_lo, q_hi = args
    fiber = _FiberCheck(spec, tail)
    ps, qs = [], []
    for q in range(q_lo, q_hi + 1):
        rows = _witnesses_for_q(spec, fiber, q)
        if len(rows):
            ps.append(rows)
            qs.append(np.full(len(rows), q, dtype=np.int64))
    return ps, qs


def build_witness_set(spec: ManifoldSpec, w: WeightVector, Q: int, workers: int | None = None) -> WitnessSet:
    """All ``(p, q)`` with ``q <= Q``, ``p/q`` in the domain and the fibre inequalities.

    ``workers > 1`` splits the ``q`` range over processes; the merge is in
    ascending ``q`` so the result does not depend on the worker count.
    """
    if w.d != spec.d or w.m != spec.m:
        raise ValidationError("weights and manifold disagree on d or m")
    if workers is None:
        workers = int(os.environ.get("WEIGHTDIM_WORKERS", "1"))
    chunks = []
    if Q >= 1:
        step = max(1, math.ceil(Q / max(1, workers * 4)))
        chunks = [(spec, w.tail, lo, min(Q, lo + step - 1)) for lo in range(1, Q + 1, step)]
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_scan, chunks))
    else:
        results = [_scan(c) for c in chunks]
    ps = [arr for part, _ in results for arr in part]
    qs = [arr for _, part in results for arr in part]
    p = np.concatenate(ps) if ps else np.empty((0, spec.d), dtype=np.int64)
    q = np.concatenate(qs) if qs else np.empty(0, dtype=np.int64)
    return WitnessSet(spec, w, Q, p, q)


# --------------------------------------------------------------------------
# rectangle families
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RectangleFamily:
    """Open rectangles centred at ``p/q`` with half-sides ``coeff / q^exponents[i]``, clipped to ``domain``."""

    kind: str
    domain: RationalBox
    p: np.ndarray
    q: np.ndarray
    coeff: PowerProduct
    exponents: tuple[Fraction, ...]

    def __len__(self) -> int:
        return len(self.q)

    def half_width(self, k: int, axis: int) -> PowerProduct:
        return self.coeff / PowerProduct.power(int(self.q[k]), self.exponents[axis])

    def centre(self, k: int) -> tuple[Fraction, ...]:
        qq = int(self.q[k])
        return tuple(Fraction(int(v), qq) for v in self.p[k])

    def restrict(self, q_lo: int = 1, q_hi: int | None = None) -> "RectangleFamily":
        mask = self.q >= q_lo
        if q_hi is not None:
            mask &= self.q <= q_hi
        return RectangleFamily(self.kind, self.domain, self.p[mask], self.q[mask], self.coeff, self.exponents)


def dirichlet_family(ws: WitnessSet, a: Sequence) -> RectangleFamily:
    a = tuple(to_fraction(v) for v in a)
    if len(a) != ws.spec.d:
        raise ValidationError(f"expected {ws.spec.d} exponents")
    c = dirichlet_constant(ws.spec.d, ws.spec.m)
    return RectangleFamily("dirichlet", ws.spec.domain, ws.p, ws.q, c, a)


def target_family(ws: WitnessSet, c_prime) -> RectangleFamily:
    c_prime = to_fraction(c_prime)
    exps = tuple(1 + t for t in ws.weights.head)
    return RectangleFamily("target", ws.spec.domain, ws.p, ws.q, PowerProduct(c_prime), exps)


# --------------------------------------------------------------------------
# c' selection and the containment check
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CPrimeCertificate:
    c_prime: Fraction
    q_min: int
    C: Fraction
    D: Fraction
    d: int
    tau_d: Fraction

    def holds_at(self, q: int) -> bool:
        first = self.D * self.c_prime * self.d < Fraction(1, 4)
        lhs = self.C * self.c_prime**2 * self.d**2 / 2
        return first and (lhs == 0 or PowerProduct.power(q, 1 + self.tau_d) > 4 * lhs)


def choose_c_prime(bounds: DerivativeBounds, d: int, tau_d) -> CPrimeCertificate:
    """``c' = 1/(8 D d)`` (or 1 when ``D = 0``) and the least ``q`` past which the curvature term is small."""
    tau_d = to_fraction(tau_d)
    c_prime = 1 / (8 * bounds.D * d) if bounds.D > 0 else Fraction(1)
    need = 2 * bounds.C * c_prime**2 * d**2  # want q^(1 + tau_d) > need

    def ok(q):
        return need == 0 or PowerProduct.power(q, 1 + tau_d) > need

    hi = 1
    while not ok(hi):
        hi *= 2
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return CPrimeCertificate(c_prime, hi, bounds.C, bounds.D, d, tau_d)


def verify_containment_sample(spec: ManifoldSpec, w: WeightVector, cert: CPrimeCertificate, witness: Sequence[int], x: Sequence) -> bool:
    """Check ``||q f_j(x)|| < q^(-tau_{d+j})`` for ``x`` in the target rectangle of ``witness``.

    ``witness`` is a witness-set entry ``(p_1, ..., p_d, q)``.  A ``False``
    result on valid input contradicts the containment argument and is logged.
    """
    *p, q = (int(v) for v in witness)
    x = tuple(to_fraction(v) for v in x)
    if len(p) != spec.d:
        raise PreconditionViolated(f"witness must have {spec.d} numerators and a denominator")
    if q < cert.q_min:
        raise PreconditionViolated(f"q = {q} is below q_min = {cert.q_min}")
    if not spec.domain.contains(x):
        raise PreconditionViolated("x is outside the domain")
    if not in_witness_set(spec, w, p, q):
        raise PreconditionViolated(f"{tuple(p)}/{q} is not in the witness set")
    for i, (pi, xi) in enumerate(zip(p, x)):
        radius = cert.c_prime / PowerProduct.power(q, 1 + w.head[i])
        if not radius > abs(xi - Fraction(pi, q)):
            raise PreconditionViolated(f"x is outside the target rectangle on axis {i + 1}")
    for j, value in enumerate(eval_f(spec, x)):
        if not PowerProduct.power(q, -w.tail[j]) > nearest_integer_distance(q * value):
            logger.warning("containment falsified: witness=%s x=%s coordinate %d", witness, x, j + 1)
            return False
    return True


# --------------------------------------------------------------------------
# grids, coverage and box counting
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CoverageReport:
    delta: Fraction
    covered: int
    cells: int
    fraction: Fraction
    Q: int | None = None


def grid_shape(domain, delta: Fraction) -> tuple[int, ...]:
    delta = to_fraction(delta)
    if delta <= 0:
        raise MisalignedGrid("grid step must be positive")
    shape = []
    for side in domain.sides:
        count = side / delta
        if count.denominator != 1:
            raise MisalignedGrid(f"step {delta} does not divide side {side}")
        shape.append(int(count))
    return tuple(shape)


class _Below:
    """Decides ``v < bound`` exactly, using floats only when decisive."""

    __slots__ = ("bound", "approx")

    def __init__(self, bound: PowerProduct):
        self.bound = bound
        self.approx = float(bound)

    def __call__(self, v: Fraction) -> bool:
        fv = float(v)
        if fv < self.approx * (1 - 1e-9):
            return True
        if fv > self.approx * (1 + 1e-9):
            return False
        return self.bound > v


def _axis_cells(s: Fraction, eta: _Below, count: int) -> tuple[int, int]:
    """Cells ``k`` (``0 <= k < count``) with ``(k, k+1)`` meeting ``(s - eta, s + eta)``."""
    # need k - s < eta and s - k - 1 < eta
    hi = math.floor(float(s) + eta.approx)
    while not eta(hi - s):
        hi -= 1
    while eta(hi + 1 - s):
        hi += 1
    lo = math.ceil(float(s) - eta.approx - 1)
    while eta(s - lo):  # k = lo - 1 also qualifies
        lo -= 1
    while not eta(s - lo - 1):
        lo += 1
    return max(lo, 0), min(hi, count - 1)


def _loose_boxes(family: RectangleFamily, idx: np.ndarray, delta: Fraction, shape) -> tuple[np.ndarray, np.ndarray]:
    """Float cell ranges ``[lo, hi)`` per axis that contain the exact ranges with a safety pad."""
    q = family.q[idx].astype(float)
    los, his = [], []
    for axis, count in enumerate(shape):
        s = (family.p[idx, axis] / q - float(family.domain.lower[axis])) / float(delta)
        h = float(family.coeff) * q ** (-float(family.exponents[axis])) / float(delta)
        los.append(np.clip(np.floor(s - h) - 2, 0, count))
        his.append(np.clip(np.ceil(s + h) + 3, 0, count))
    return np.stack(los, 1).astype(np.int64), np.stack(his, 1).astype(np.int64)


def _box_sums(grid: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Number of marked cells in each box ``[lo, hi)`` via a summed-area table."""
    table = grid.astype(np.int64)
    for axis in range(grid.ndim):
        table = np.cumsum(table, axis=axis)
    table = np.pad(table, [(1, 0)] * grid.ndim)
    total = np.zeros(len(lo), dtype=np.int64)
    for corner in itertools.product((0, 1), repeat=grid.ndim):
        index = tuple(np.where(c, hi[:, a], lo[:, a]) for a, c in enumerate(corner))
        sign = (-1) ** (grid.ndim - sum(corner))
        total += sign * table[index]
    return total


def mark_cells(family: RectangleFamily, delta, budget: int = DEFAULT_CELL_BUDGET, batch: int = 4096) -> np.ndarray:
    """Boolean grid of the ``delta``-cells whose interior meets the union of rectangles."""
    delta = to_fraction(delta)
    shape = grid_shape(family.domain, delta)
    if math.prod(shape) > budget:
        raise GridTooLarge(f"{math.prod(shape)} cells exceed the budget of {budget}")
    grid = np.zeros(shape, dtype=bool)
    lows = family.domain.lower
    cache: dict[tuple[int, int], _Below] = {}
    for start in range(0, len(family), batch):
        idx = np.arange(start, min(start + batch, len(family)))
        lo, hi = _loose_boxes(family, idx, delta, shape)
        volume = np.prod(hi - lo, axis=1)
        # a rectangle whose padded range is already fully marked adds nothing
        pending = idx[(volume == 0) | (_box_sums(grid, lo, hi) < volume)]
        for k in pending:
            qq = int(family.q[k])
            exact = []
            for axis in range(len(shape)):
                key = (qq, axis)
                if key not in cache:
                    cache[key] = _Below(family.half_width(k, axis) / delta)
                s = (Fraction(int(family.p[k, axis]), qq) - lows[axis]) / delta
                a, b = _axis_cells(s, cache[key], shape[axis])
                if a > b:
                    break
                exact.append(slice(a, b + 1))
            else:
                grid[tuple(exact)] = True
    return grid


def box_count(family: RectangleFamily, delta, budget: int = DEFAULT_CELL_BUDGET) -> int:
    return int(mark_cells(family, delta, budget).sum())


def coverage_fraction(family: RectangleFamily, delta, budget: int = DEFAULT_CELL_BUDGET, Q: int | None = None) -> CoverageReport:
    delta = to_fraction(delta)
    grid = mark_cells(family, delta, budget)
    covered, cells = int(grid.sum()), grid.size
    return CoverageReport(delta, covered, cells, Fraction(covered, cells), Q)


@dataclass(frozen=True)
class DimensionEstimate:
    slope: float
    intercept: float
    residual: float
    points: int
    note: str = "heuristic - slow convergence expected"


def dimension_estimate(counts: Sequence[tuple]) -> DimensionEstimate:
    """Least-squares slope of ``log N`` against ``log(1/delta)``."""
    deltas = [float(to_fraction(d)) if not isinstance(d, float) else d for d, _ in counts]
    ns = [float(n) for _, n in counts]
    if len(set(deltas)) < 3:
        raise InsufficientData("need at least three distinct grid steps")
    if min(ns) <= 0:
        raise InsufficientData("box counts must be positive")
    x = -np.log(np.asarray(deltas))
    y = np.log(np.asarray(ns))
    design = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    residual = float(np.linalg.norm(design @ np.array([slope, intercept]) - y))
    return DimensionEstimate(float(slope), float(intercept), residual, len(counts))


# --------------------------------------------------------------------------
# projection onto the parameter domain
# --------------------------------------------------------------------------


def lift(spec: ManifoldSpec, x: Sequence) -> tuple[Fraction, ...]:
    x = tuple(to_fraction(v) for v in x)
    return x + eval_f(spec, x)


def project(spec: ManifoldSpec, point: Sequence) -> tuple[Fraction, ...]:
    point = tuple(to_fraction(v) for v in point)
    x = point[: spec.d]
    if eval_f(spec, x) != point[spec.d :]:
        raise OutOfDomain("point is not on the manifold")
    return x


def project_and_lift(spec: ManifoldSpec, point: Sequence) -> tuple[Fraction, ...]:
    """Lift a parameter point to the graph, or project a graph point back."""
    if len(point) == spec.d:
        return lift(spec, point)
    if len(point) == spec.n:
        return project(spec, point)
    raise OutOfDomain(f"expected {spec.d} or {spec.n} coordinates, got {len(point)}")
