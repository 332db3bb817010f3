"""Brute-force reference implementations shared by the unit and acceptance suites.

They avoid the package's search windows, float screens and summed-area
tables, and decide every comparison by integer powering.
"""

import itertools
from fractions import Fraction

import numpy as np

from weightdim.core import RationalBox
from weightdim.exact import PowerProduct
from weightdim.limsup import RectangleFamily

F = Fraction


def oracle_parabola_witness_set(Q):
    """``(p, q)`` with ``||q (p/q)^2|| < 1 / (2 q^(1/2))``, squared to stay rational."""
    out = []
    for q in range(1, Q + 1):
        for p in range(q + 1):
            v = F(p * p, q)
            dist = abs(v - round(v))
            if 4 * dist * dist * q < 1:
                out.append((p, q))
    return out


def radius_exceeds(coeff, q, e, t):
    """Exact ``coeff / q^e > t`` for rational ``coeff, e`` and ``t``, by integer powering."""
    if t < 0:
        return True
    N = e.denominator
    return coeff**N > t**N * F(q) ** (e * N)


def oracle_cells(family, delta):
    """Naive marking: per axis, scan every cell for overlap with each open rectangle."""
    lows = family.domain.lower
    shape = [int(s / delta) for s in family.domain.sides]
    marked = set()
    for k in range(len(family)):
        q = int(family.q[k])
        per_axis = []
        for axis, count in enumerate(shape):
            c = F(int(family.p[k, axis]), q)
            e = family.exponents[axis]
            hits = []
            for cell in range(count):
                left, right = lows[axis] + cell * delta, lows[axis] + (cell + 1) * delta
                # open interval (c - h, c + h) meets (left, right)
                if radius_exceeds(family.coeff.exact(), q, e, left - c) and radius_exceeds(family.coeff.exact(), q, e, c - right):
                    hits.append(cell)
            per_axis.append(hits)
        marked.update(itertools.product(*per_axis))
    return marked


def random_family(rng, d, max_cells_per_axis=60):
    """Random family of open rectangles with a grid step that divides the domain."""
    side = rng.randint(1, 3)
    den = rng.choice([k for k in (4, 8, 10, 16, 20, 50, 100, 250, 500) if side * k <= max_cells_per_axis] or [4])
    domain = RationalBox.from_intervals([(0, side)] * d)
    count = rng.randint(0, 25)
    q = np.array([rng.randint(1, 40) for _ in range(count)], dtype=np.int64)
    p = np.array([[rng.randint(0, side * int(qq)) for _ in range(d)] for qq in q], dtype=np.int64).reshape(count, d)
    coeff = PowerProduct(F(rng.randint(1, 12), rng.randint(1, 6)))
    exps = tuple(rng.choice([F(1), F(1, 2), F(3, 2), F(2), F(4, 3)]) for _ in range(d))
    return RectangleFamily("random", domain, p, q, coeff, exps), F(1, den)
