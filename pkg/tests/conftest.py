import itertools

import pytest
from hypothesis import HealthCheck, settings
from sympy import primerange

from padic_expsums.core import parse_polynomial

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# lines printed by the acceptance suite, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []

FIXTURES = {
    "x": ("x", 1),
    "x^2": ("x^2", 1),
    "x^4": ("x^4", 1),
    "cusp": ("x^2+y^3", 2),
    "cubic": ("x^3-3*x", 1),
    "x^2y^2": ("x^2*y^2", 2),
    "node": ("x^2-y^2", 2),
}


def poly(name):
    text, n = FIXTURES[name]
    return parse_polynomial(text, n)


def primes_upto(bound, start=2):
    return list(primerange(start, bound + 1))


def brute_values(f, p, m, box_kind="full", y=None):
    """Independent enumeration: list of f(x) mod p^m over the box, by plain Python ints."""
    M = p**m
    n = f.nvars
    if box_kind == "full":
        pts = itertools.product(range(M), repeat=n)
    else:
        y = y or (0,) * n
        pts = (
            tuple(yi + p * a for yi, a in zip(y, t))
            for t in itertools.product(range(p ** (m - 1)), repeat=n)
        )
    out = []
    for x in pts:
        total = 0
        for c, e in f.terms:
            term = c
            for xi, k in zip(x, e):
                term *= xi**k
            total += term
        out.append(total % M)
    return out


@pytest.fixture
def fixture_poly():
    return poly


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
