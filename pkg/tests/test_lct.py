import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import FIXTURES, brute_values, poly
from padic_expsums.core import ResidueBox, parse_polynomial
from padic_expsums.lct import (
    contact_count,
    fit_dimension,
    lct_from_resolution,
    lct_jet_estimate,
    sigma_of,
    stratum_dimension_check,
)
from padic_expsums.zeta import Component, ResolutionData, load_builtin, monomial_resolution_data


def test_lct_from_resolution_examples():
    assert lct_from_resolution(monomial_resolution_data(2)) == Fraction(1, 2)
    data = ResolutionData(2, (Component(1, 2, 1, True), Component(2, 3, 2, True), Component(3, 1, 1, True)), ())
    assert lct_from_resolution(data) == Fraction(1, 2)
    assert lct_from_resolution(monomial_resolution_data(1)) == 1
    # a filter that drops the minimizing component
    assert lct_from_resolution(data, lambda c: c.id != 1) == Fraction(2, 3)


@pytest.mark.parametrize("text, p, m, expected", [("x", 7, 4, 1), ("x^2", 5, 2, 5), ("x^2", 5, 3, 5)])
def test_contact_count_examples(text, p, m, expected):
    assert contact_count(parse_polynomial(text, 1), p, m) == expected


@given(st.integers(1, 6), st.sampled_from([2, 3, 5, 7, 11]), st.integers(1, 10))
def test_monomial_contact_count_formula(k, p, m):
    f = parse_polynomial(f"x^{k}", 1)
    assert contact_count(f, p, m) == p ** (m - math.ceil(m / k))


@pytest.mark.parametrize("name", sorted(FIXTURES))
@pytest.mark.parametrize("p", [3, 5, 7])
def test_contact_count_agrees_with_enumeration(name, p):
    f = poly(name)
    for m in range(1, 4):
        if p ** ((m - 1) * f.nvars) > 5000:
            continue
        expected = brute_values(f, p, m, "shifted", (0,) * f.nvars).count(0)
        for method in ("lift", "histogram"):
            assert contact_count(f, p, m, method=method) == expected


@pytest.mark.parametrize("name", sorted(FIXTURES))
@pytest.mark.parametrize("p", [5, 7, 11])
def test_contact_count_monotone(name, p):
    f = poly(name)
    for box in (ResidueBox.origin(f.nvars), ResidueBox.full()):
        counts = [contact_count(f, p, m, box) for m in range(1, 8)]
        assert all(b <= p**f.nvars * a for a, b in zip(counts, counts[1:]))


@pytest.mark.parametrize("p, slope", [((5, 7, 11), 2.0), ((3, 13), 0.0)])
def test_fit_dimension_recovers_power(p, slope):
    dim, resid = fit_dimension(p, [q ** int(slope) for q in p])
    assert dim == pytest.approx(slope)
    assert resid == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize(
    "text, n, primes, m_max, target, tol",
    [
        ("x", 1, (5, 7, 11, 13), 4, 1.0, 0.05),
        ("x^2", 1, (5, 7, 11, 13), 4, 0.5, 0.05),
        ("x^2+y^3", 2, (7, 11, 13), 6, 5 / 6, 0.1),
        ("x^4", 1, (7, 11, 13, 17), 6, 0.25, 0.1),
    ],
)
def test_jet_estimates(text, n, primes, m_max, target, tol):
    est = lct_jet_estimate(parse_polynomial(text, n), primes, m_max)
    assert abs(est.inf_value - target) <= tol
    assert 0 < est.inf_value <= 1 + 1e-9
    assert all(0 <= fit.codim <= m * n + 1e-9 for m, fit in est.per_m.items())


@pytest.mark.parametrize("name, text, n", [("x2_origin", "x^2", 1), ("x4_origin", "x^4", 1), ("cusp_origin", "x^2+y^3", 2)])
def test_resolution_and_jet_routes_agree(name, text, n):
    data = load_builtin(name)
    est = lct_jet_estimate(parse_polynomial(text, n), (7, 11, 13, 17), 6, resolution=data)
    assert est.resolution_value == lct_from_resolution(data)
    assert abs(est.inf_value - float(est.resolution_value)) <= 0.1


def test_truncation_flag_and_csv():
    est = lct_jet_estimate(parse_polynomial("x^2+y^3", 2), (7, 11, 13), 6)
    assert est.argmin_m == 6 and est.at_truncation
    lines = est.to_csv().splitlines()
    assert lines[0] == "m,p,count,log_p_count,dim_fit,codim,codim_over_m"
    assert len(lines) == 1 + 6 * 3
    est2 = lct_jet_estimate(parse_polynomial("x", 1), (5, 7), 3)
    assert est2.argmin_m == 1 and not est2.at_truncation


def test_methods_give_same_estimate():
    f = parse_polynomial("x^2-y^2", 2)
    a = lct_jet_estimate(f, (5, 7), 3, method="lift")
    b = lct_jet_estimate(f, (5, 7), 3, method="histogram")
    assert a.to_csv() == b.to_csv()


def test_jet_estimate_errors():
    with pytest.raises(ValueError, match="two primes"):
        lct_jet_estimate(parse_polynomial("x", 1), (5,), 3)
    with pytest.raises(ValueError, match="does not vanish"):
        lct_jet_estimate(parse_polynomial("x+1", 1), (5, 7), 3)


@pytest.mark.parametrize(
    "value, expected",
    [(Fraction(5, 6), Fraction(1, 2)), (Fraction(1, 4), Fraction(1, 4)), (Fraction(1, 2), Fraction(1, 2)), (0.8, 0.5)],
)
def test_sigma_of(value, expected):
    assert sigma_of(value) == expected


@pytest.mark.parametrize("name, text, n", [("x2_origin", "x^2", 1), ("cusp_origin", "x^2+y^3", 2), ("x4_origin", "x^4", 1)])
@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_stratum_dimension_inequality(name, text, n, m):
    c0 = lct_from_resolution(load_builtin(name))
    dim, bound, ok = stratum_dimension_check(parse_polynomial(text, n), (7, 11, 13), m, c0)
    assert ok, (dim, bound)
