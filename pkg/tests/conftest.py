from fractions import Fraction

import pytest
from hypothesis import strategies as st

from weightdim.core import ManifoldSpec, Polynomial, RationalBox, validate_weights


def make_spec(d, m, intervals, components):
    """``components``: one ``{exponent tuple: coefficient}`` dict per f_j."""
    return ManifoldSpec(
        d, m, RationalBox.from_intervals(intervals), tuple(Polynomial(d, c) for c in components)
    )


@pytest.fixture
def parabola():
    return make_spec(1, 1, [(0, 1)], [{(2,): 1}])


@pytest.fixture
def parabola_weights():
    return validate_weights([1, Fraction(1, 2)], 1, 1)


@pytest.fixture
def saddle():
    # f(x, y) = x*y on [0, 1]^2
    return make_spec(2, 1, [(0, 1), (0, 1)], [{(1, 1): 1}])


def random_weights(rng, d=None, m=None, heavy=True):
    """Random admissible weight vector; with ``heavy`` the weights sum to more than 1."""
    while True:
        dd = d or rng.randint(1, 5)
        mm = m or rng.randint(1, 5)
        den = rng.choice([2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 15])
        tail = [Fraction(rng.randint(1, den), den * mm * rng.randint(1, 3)) for _ in range(mm)]
        if sum(tail) >= 1:
            continue
        floor = max(tail)
        head = []
        for _ in range(dd):
            bump = Fraction(rng.randint(0, 3 * den), den) if rng.random() < 0.7 else Fraction(0)
            head.append(floor + bump)
        head.sort(reverse=True)
        w = validate_weights(head + tail, dd, mm)
        if heavy and w.total <= 1:
            continue
        return w


small_fractions = st.fractions(min_value=Fraction(1, 50), max_value=3, max_denominator=30)


# -- acceptance reporting --------------------------------------------------

_ACCEPTANCE: dict[int, tuple[str, str, float]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        status = "PASS" if report.outcome == "passed" else "FAIL"
        _ACCEPTANCE[number] = (title, status, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, status, duration = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {status}  {title}  ({duration:.1f} s)")
