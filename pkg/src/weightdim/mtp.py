"""Rectangles-to-rectangles mass transference bound.

Given side exponents ``a`` of a full-measure limsup set of rectangles and
shrinking exponents ``t``, the Hausdorff dimension of the shrunken limsup set
is at least the minimum over candidate levels ``A in {a_i, a_i + t_i}`` of the
dimension number

    |K1| + |K2| + (sum_{K3} a_k - sum_{K2} t_k) / A

with ``K1 = {k : a_k >= A}``, ``K2 = {k : a_k + t_k <= A} minus K1`` and ``K3``
the rest.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact import to_fraction
from .exceptions import LevelNotInCandidateSet, ValidationError


@dataclass(frozen=True)
class ExponentPair:
    a: tuple[Fraction, ...]
    t: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.a) != len(self.t) or not self.a:
            raise ValidationError("a and t must be non-empty and of equal length")
        if any(ai <= 0 for ai in self.a):
            raise ValidationError("every a_i must be positive")
        if any(ti < 0 for ti in self.t):
            raise ValidationError("every t_i must be non-negative")

    @classmethod
    def of(cls, a: Sequence, t: Sequence) -> "ExponentPair":
        return cls(tuple(map(to_fraction, a)), tuple(map(to_fraction, t)))

    @property
    def kappa(self) -> int:
        return len(self.a)


@dataclass(frozen=True)
class LevelPartition:
    """Index sets are 1-based."""

    level: Fraction
    K1: frozenset[int]
    K2: frozenset[int]
    K3: frozenset[int]


def candidate_levels(ep: ExponentPair) -> list[Fraction]:
    """Distinct values of ``{a_i} U {a_i + t_i}`` in descending order."""
    levels = set(ep.a) | {ai + ti for ai, ti in zip(ep.a, ep.t)}
    return sorted(levels, reverse=True)


def _check_level(ep: ExponentPair, A) -> Fraction:
    A = to_fraction(A)
    if A not in candidate_levels(ep):
        raise LevelNotInCandidateSet(f"{A} is not a candidate level")
    return A


def partition(ep: ExponentPair, A) -> LevelPartition:
    A = _check_level(ep, A)
    K1, K2, K3 = set(), set(), set()
    for k, (ak, tk) in enumerate(zip(ep.a, ep.t), 1):
        if ak >= A:
            K1.add(k)
        elif ak + tk <= A:
            K2.add(k)
        else:
            K3.add(k)
    return LevelPartition(A, frozenset(K1), frozenset(K2), frozenset(K3))


def dimension_number(ep: ExponentPair, A) -> Fraction:
    part = partition(ep, A)
    num = sum((ep.a[k - 1] for k in part.K3), Fraction(0)) - sum((ep.t[k - 1] for k in part.K2), Fraction(0))
    return len(part.K1) + len(part.K2) + num / part.level


def mtp_lower_bound(ep: ExponentPair) -> tuple[Fraction, Fraction]:
    """Minimum dimension number and the level attaining it.

    Ties are broken towards the largest level; levels are scanned in
    descending order and only a strictly smaller value replaces the incumbent.
    """
    best_value, best_level = None, None
    for A in candidate_levels(ep):
        value = dimension_number(ep, A)
        if best_value is None or value < best_value:
            best_value, best_level = value, A
    return best_value, best_level
