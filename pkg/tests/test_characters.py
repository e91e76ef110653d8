import cmath
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy import divisors, legendre_symbol, n_order

from conftest import primes_upto
from padic_expsums.characters import (
    MultChar,
    char_value,
    characters_of_order,
    discrete_log_table,
    gauss_sum,
    primitive_root,
    weil_power_sum_check,
)

ODD_PRIMES = primes_upto(97, start=3)


@pytest.mark.parametrize("p, g", [(5, 2), (7, 3), (2, 1), (23, 5), (41, 6)])
def test_primitive_root_examples(p, g):
    assert primitive_root(p) == g


@pytest.mark.parametrize("p", ODD_PRIMES)
def test_primitive_root_is_smallest_generator(p):
    g = primitive_root(p)
    assert n_order(g, p) == p - 1
    assert all(n_order(h, p) < p - 1 for h in range(2, g))


def test_primitive_root_rejects_composites():
    with pytest.raises(ValueError):
        primitive_root(9)


@pytest.mark.parametrize("p", ODD_PRIMES)
def test_discrete_log_inverts_powering(p):
    g, table = primitive_root(p), discrete_log_table(p)
    assert all(pow(g, table[u], p) == u for u in range(1, p))


def test_char_value_examples():
    assert char_value(MultChar.trivial(7), 3) == 1
    assert abs(char_value(MultChar(5, 2, 1), 2) + 1) <= 1e-15
    assert char_value(MultChar(13, 4, 1), 0) == 0


@pytest.mark.parametrize("p", ODD_PRIMES)
def test_quadratic_character_is_legendre_symbol(p):
    chi = MultChar(p, 2, 1)
    assert all(abs(chi(u) - legendre_symbol(u, p)) <= 1e-12 for u in range(1, p))


@given(st.sampled_from(ODD_PRIMES), st.data())
def test_multiplicativity(p, data):
    d = data.draw(st.sampled_from(divisors(p - 1)))
    chi = MultChar(p, d, data.draw(st.integers(0, d - 1)))
    u = data.draw(st.integers(1, p - 1))
    v = data.draw(st.integers(1, p - 1))
    assert abs(chi(u * v) - chi(u) * chi(v)) <= 1e-12


@pytest.mark.parametrize("p", ODD_PRIMES)
def test_orthogonality(p):
    for d in divisors(p - 1):
        for j in range(d):
            chi = MultChar(p, d, j)
            total = sum(chi(u) for u in range(1, p))
            expected = p - 1 if chi.canonical().is_trivial else 0
            assert abs(total - expected) <= 1e-9


@pytest.mark.parametrize("p", [7, 13, 31])
def test_characters_of_exact_order(p):
    for d in divisors(p - 1):
        chars = characters_of_order(p, d)
        assert len(chars) == sum(1 for j in range(d) if math.gcd(j, d) == 1)
        assert all(c.exact_order == d for c in chars)
    assert characters_of_order(p, p) == []


def test_character_labels_and_inverse():
    chi = MultChar(13, 6, 2)
    assert chi.canonical().label == (3, 1)
    assert chi.inverse().label == (6, 4)
    assert abs(chi(5) * chi.inverse()(5) - 1) <= 1e-12
    with pytest.raises(ValueError):
        MultChar(13, 5, 1)


def test_gauss_sum_examples():
    assert abs(gauss_sum(MultChar.trivial(11)) + 1 / 10) <= 1e-15
    assert abs(gauss_sum(MultChar(5, 2, 1)) - math.sqrt(5) / 4) <= 1e-12


@pytest.mark.parametrize("p", ODD_PRIMES)
def test_gauss_sum_magnitude(p):
    for d in divisors(p - 1)[1:]:
        for chi in characters_of_order(p, d):
            assert abs(abs(gauss_sum(chi)) - math.sqrt(p) / (p - 1)) <= 1e-9


@pytest.mark.parametrize("p", [5, 13, 29])
def test_gauss_sum_matches_definition(p):
    g = primitive_root(p)
    chi = MultChar(p, p - 1, 1)
    ref = 0
    for k in range(p - 1):
        ref += cmath.exp(2j * math.pi * k / (p - 1)) * cmath.exp(2j * math.pi * pow(g, k, p) / p)
    assert abs(gauss_sum(chi) - ref / (p - 1)) <= 1e-12


@pytest.mark.parametrize(
    "p, d, xi, magnitude",
    [(7, 1, 1, 1.0), (5, 2, 1, math.sqrt(5) - 1), (13, 4, 1, None)],
)
def test_weil_examples(p, d, xi, magnitude):
    w = weil_power_sum_check(p, d, xi)
    assert w.ok
    assert w.bound == pytest.approx((d - 1) * math.sqrt(p) + 1)
    if magnitude is not None:
        assert w.sum_magnitude == pytest.approx(magnitude, abs=1e-12)


@pytest.mark.parametrize("p, d, xi", [(7, 4, 1), (7, 2, 0), (7, 2, 7), (7, 0, 1)])
def test_weil_rejects_bad_input(p, d, xi):
    with pytest.raises(ValueError):
        weil_power_sum_check(p, d, xi)


@given(st.sampled_from(primes_upto(199, start=3)), st.data())
def test_weil_bound_property(p, data):
    d = data.draw(st.sampled_from([k for k in divisors(p - 1) if k <= 12]))
    xi = data.draw(st.integers(1, p - 1))
    assert weil_power_sum_check(p, d, xi).ok
