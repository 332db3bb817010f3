"""Weighted dimension lower bound and the exponent choice behind it.

For admissible weights ``tau`` the lower bound for the Hausdorff dimension of
weighted tau-approximable points on a ``d``-dimensional manifold in ``R^n`` is

    min_{1 <= i <= d} (n + 1 + sum_{k=i}^{n} (tau_i - tau_k)) / (tau_i + 1) - m.

The bound is obtained by feeding suitably chosen exponents ``(a, t)`` to the
rectangles mass transference bound; :func:`select_exponents` reproduces that
choice and :func:`full_report` cross-checks the closed form against
:func:`weightdim.mtp.mtp_lower_bound`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import WeightVector
from .exceptions import IndexOutOfRange, InvariantViolation
from .mtp import ExponentPair, mtp_lower_bound

logger = logging.getLogger(__name__)

CASE1 = "case1"
CASE2 = "case2"
TRIVIAL = "trivial"


@dataclass(frozen=True)
class ExponentSelection:
    case: str
    a: tuple[Fraction, ...] = ()
    t: tuple[Fraction, ...] = ()
    quotient: Optional[Fraction] = None
    K: Optional[int] = None

    @property
    def trivial(self) -> bool:
        return self.case == TRIVIAL

    def exponent_pair(self) -> ExponentPair:
        if self.trivial:
            raise ValueError("the trivial regime has no exponents")
        return ExponentPair(self.a, self.t)


@dataclass(frozen=True)
class BoundReport:
    weights: WeightVector
    per_index_values: tuple[Fraction, ...]
    theorem_min: Fraction
    effective_bound: Fraction
    mtp_min: Fraction
    mtp_level: Optional[Fraction]
    active_min: Fraction
    selection: ExponentSelection
    blw_condition_holds: bool
    improvement_flag: bool
    trivial_regime: bool

    @property
    def minima_differ(self) -> bool:
        """True when the proof's index range gives a strictly larger value than the full minimum."""
        return self.active_min != min(Fraction(self.weights.d), self.theorem_min)


def theorem1_per_index(w: WeightVector, i: int) -> Fraction:
    if not 1 <= i <= w.d:
        raise IndexOutOfRange(f"index {i} outside 1..{w.d}")
    ti = w.tau(i)
    spread = sum((ti - w.tau(k) for k in range(i, w.n + 1)), Fraction(0))
    return (w.n + 1 + spread) / (ti + 1) - w.m


def per_index_values(w: WeightVector) -> tuple[Fraction, ...]:
    return tuple(theorem1_per_index(w, i) for i in range(1, w.d + 1))


def trivial_regime(w: WeightVector) -> bool:
    return w.total <= 1


def theorem1_bound(w: WeightVector) -> tuple[Fraction, Fraction]:
    """``(theorem_min, effective_bound)``; the latter is clamped at ``d``."""
    theorem_min = min(per_index_values(w))
    return theorem_min, min(Fraction(w.d), theorem_min)


def blw_condition_holds(w: WeightVector) -> bool:
    """The older, more restrictive admissibility condition on ``tau_d``."""
    return w.tau(w.d) >= max(max(w.tail), (1 - w.tail_sum) / w.d)


def _verify_selection(w: WeightVector, sel: ExponentSelection) -> None:
    d = w.d
    if len(sel.a) != d or len(sel.t) != d:
        raise InvariantViolation("exponent vectors have the wrong length")
    if sum((ai - 1 for ai in sel.a), Fraction(0)) + w.tail_sum != 1:
        raise InvariantViolation("sum(a_i - 1) + tail sum != 1")
    for i in range(d):
        if sel.a[i] + sel.t[i] != 1 + w.taus[i]:
            raise InvariantViolation(f"a_{i + 1} + t_{i + 1} != 1 + tau_{i + 1}")
        if sel.t[i] < 0:
            raise InvariantViolation(f"t_{i + 1} < 0")
    if min(sel.a) <= 1:
        raise InvariantViolation("min a_i <= 1")
    if sel.case == CASE2:
        if sel.quotient <= 0:
            raise InvariantViolation("case 2 quotient is not positive")
        if any(sel.t[i] != 0 for i in range(sel.K, d)):
            raise InvariantViolation("t_i != 0 for some i > K")


def select_exponents(w: WeightVector) -> ExponentSelection:
    """Choose ``(a, t)`` with ``a_i + t_i = 1 + tau_i`` and ``sum(a_i - 1) + tail = 1``.

    Case 1 (``tau_d >= (1 - tail) / d``) spreads the excess evenly.  Case 2
    takes the largest ``K`` with ``tau_K > (1 - tail - tau_{K+1} - ... - tau_d) / K``,
    sets ``a_i = tau_i + 1`` beyond ``K`` and equal ``a_i`` up to ``K``.
    When the weights sum to at most 1 the trivial regime is returned.
    """
    d = w.d
    if trivial_regime(w):
        return ExponentSelection(TRIVIAL)
    slack = 1 - w.tail_sum
    if w.tau(d) >= slack / d:
        q = slack / d
        a = tuple(1 + q for _ in range(d))
        sel = ExponentSelection(CASE1, a, tuple(1 + ti - ai for ti, ai in zip(w.head, a)), q)
    else:
        K, quotient = None, None
        for k in range(d, 0, -1):
            rest = sum(w.head[k:], Fraction(0))
            q = (slack - rest) / k
            if w.tau(k) > q:
                K, quotient = k, q
                break
        if K is None:
            # unreachable when the weights sum to more than 1
            raise InvariantViolation(f"no admissible K for {w.taus}")
        a = tuple(quotient + 1 if i < K else w.taus[i] + 1 for i in range(d))
        sel = ExponentSelection(CASE2, a, tuple(1 + ti - ai for ti, ai in zip(w.head, a)), quotient, K)
    _verify_selection(w, sel)
    return sel


def active_indices(w: WeightVector, sel: ExponentSelection) -> range:
    """Indices whose closed-form value arises as a dimension number in the proof."""
    if sel.case == CASE2:
        return range(1, sel.K + 1)
    return range(1, w.d + 1)


def full_report(w: WeightVector) -> BoundReport:
    values = per_index_values(w)
    theorem_min = min(values)
    effective = min(Fraction(w.d), theorem_min)
    sel = select_exponents(w)
    d = Fraction(w.d)
    if sel.trivial:
        mtp_min, level, active_min = d, None, d
    else:
        mtp_min, level = mtp_lower_bound(sel.exponent_pair())
        active_min = min([d] + [values[i - 1] for i in active_indices(w, sel)])
        if mtp_min != active_min:
            raise InvariantViolation(f"mtp minimum {mtp_min} differs from closed form {active_min} for {w.taus}")
    if mtp_min < effective:
        raise InvariantViolation(f"mtp minimum {mtp_min} below the effective bound {effective}")
    blw = blw_condition_holds(w)
    report = BoundReport(
        weights=w,
        per_index_values=values,
        theorem_min=theorem_min,
        effective_bound=effective,
        mtp_min=mtp_min,
        mtp_level=level,
        active_min=active_min,
        selection=sel,
        blw_condition_holds=blw,
        improvement_flag=not blw,
        trivial_regime=trivial_regime(w),
    )
    if report.minima_differ:
        logger.info("proof-range minimum %s exceeds full minimum %s for tau=%s", active_min, effective, w.taus)
    return report
