import itertools
import json
from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from padic_expsums.core import PadicLevel, ResidueBox, parse_polynomial
from padic_expsums.expsum import build_histogram, contact_counts, exp_sum
from padic_expsums.zeta import (
    Component,
    CountSpec,
    RationalFunctionT,
    ResolutionData,
    ResolutionDataError,
    Stratum,
    builtin_names,
    coeff_lattice,
    coeff_series,
    coeff_truncated_cumulative,
    denef_zeta,
    lattice_points,
    lct_of,
    load_builtin,
    monomial_resolution_data,
    pole_ledger,
    reconstruct,
    reconstruct_exp_sum,
    required_characters,
)

PRIMES = [5, 7, 11, 13]
F = Fraction


def single(N, nu, c_empty, c_one, order=1, index=0):
    return ResolutionData(
        1,
        (Component(1, N, nu, True),),
        (Stratum((), (c_empty,)), Stratum((1,), (CountSpec(order, index, value=c_one),))),
    )


@pytest.mark.parametrize("k, num0", [(1, F(4, 5)), (2, F(4, 5))])
def test_denef_examples_full_box(k, num0):
    rf = denef_zeta(monomial_resolution_data(k, "full"), 5)
    for t in (F(0), F(1), F(1, 3), F(-2, 7)):
        assert rf.evaluate(t) == num0 / (1 - t**k / 5)


def test_order_two_character_for_x_squared_matches_trivial():
    data = monomial_resolution_data(2, "full")
    for t in (F(1, 2), F(3, 4)):
        assert denef_zeta(data, 5, (2, 1)).evaluate(t) == denef_zeta(data, 5).evaluate(t)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
@pytest.mark.parametrize("p", PRIMES)
def test_denef_matches_monomial_integral(k, p):
    # int_{Z_p} |x|^{ks} dx = (1 - 1/p) / (1 - p^{-1} t^k), origin box is p^{-1} t^k times that
    full = denef_zeta(monomial_resolution_data(k, "full"), p)
    origin = denef_zeta(monomial_resolution_data(k, "origin"), p)
    for t in (F(1, 2), F(2, 3)):
        closed = F(p - 1, p) / (1 - t**k / p)
        assert full.evaluate(t) == closed
        assert origin.evaluate(t) == closed * t**k / p


def test_geometric_series_coefficients():
    rf = RationalFunctionT(5, (F(1),), ((1, 2, 1),))
    assert [coeff_series(rf, k) for k in range(6)] == [F(1, 25) ** k for k in range(6)]
    rf2 = denef_zeta(monomial_resolution_data(2, "full"), 5)
    assert coeff_series(rf2, 4) == F(4, 5) * F(1, 25)
    assert coeff_series(rf2, 0) == rf2.evaluate(0)


@pytest.mark.parametrize("p", PRIMES)
def test_series_against_binomial_expansion(p):
    # 1/(1 - a t^N)^r = sum_j C(j+r-1, j) a^j t^(Nj), multiplied out with sympy polynomials
    data = load_builtin("cusp_origin")
    rf = denef_zeta(data, p)
    K = 30
    t = sympy.symbols("t")
    acc = sympy.Poly(
        sum(sympy.Rational(c.numerator, c.denominator) * t**i for i, c in enumerate(rf.numerator)), t
    )
    for N, nu, mult in rf.denominator:
        a = sympy.Rational(1, p**nu)
        geo = sympy.Poly(sum(sympy.binomial(j + mult - 1, j) * a**j * t ** (N * j) for j in range(K // N + 1)), t)
        acc = acc * geo
    acc = acc * sympy.Rational(rf.scalar.denominator, rf.scalar.numerator)
    for k in range(K + 1):
        c = sympy.Rational(acc.coeff_monomial(t**k))
        assert coeff_series(rf, k) == F(int(c.p), int(c.q))


@pytest.mark.parametrize("name", builtin_names())
@pytest.mark.parametrize("p", PRIMES)
def test_series_equals_lattice_to_60(name, p):
    data = load_builtin(name)
    for label in sorted(data.character_labels()):
        if (p - 1) % label[0]:
            continue
        series = denef_zeta(data, p, label).series(60)
        assert all(coeff_lattice(data, p, label, k) == series[k] for k in range(61))


@pytest.mark.parametrize("name", builtin_names())
def test_truncated_cumulative_is_partial_sum(name):
    data = load_builtin(name)
    series = denef_zeta(data, 7).series(25)
    running = F(0)
    for k in range(26):
        running += series[k]
        assert coeff_truncated_cumulative(data, 7, (1, 0), k) == running


def test_cumulative_geometric():
    rf = RationalFunctionT(3, (F(1),), ((1, 1, 1),))
    a = F(1, 3)
    s = rf.series(10)
    assert all(sum(s[: k + 1]) == (1 - a ** (k + 1)) / (1 - a) for k in range(11))


@pytest.mark.parametrize(
    "Ns, total, exact, expected",
    [
        ((2,), 4, True, [(1,)]),
        ((2,), 5, True, []),
        ((2, 3), 7, True, [(1, 0)]),
        ((), 0, True, [()]),
        ((2,), 5, False, [(0,), (1,)]),
    ],
)
def test_lattice_points_examples(Ns, total, exact, expected):
    assert sorted(lattice_points(Ns, total, exact)) == expected


@given(
    st.lists(st.integers(1, 5), min_size=1, max_size=3),
    st.integers(0, 25),
)
def test_lattice_points_against_brute_force(Ns, total):
    brute = [
        a for a in itertools.product(range(total + 1), repeat=len(Ns))
        if sum(N * (ai + 1) for N, ai in zip(Ns, a)) == total
    ]
    assert sorted(lattice_points(Ns, total)) == sorted(brute)


def test_k_zero_only_empty_stratum():
    data = load_builtin("cusp_origin")
    assert coeff_lattice(data, 7, (1, 0), 0) == F(0)
    full = monomial_resolution_data(2, "full")
    assert coeff_lattice(full, 7, (1, 0), 0) == F(6, 7)


@pytest.mark.parametrize("name", builtin_names())
@pytest.mark.parametrize("p", PRIMES)
def test_degree_bound(name, p):
    data = load_builtin(name)
    for label in data.character_labels():
        if (p - 1) % label[0] == 0:
            rf = denef_zeta(data, p, label)
            assert rf.numerator_degree <= rf.denominator_degree


@pytest.mark.parametrize("name", builtin_names())
@pytest.mark.parametrize("p", PRIMES)
def test_coefficient_decay_bound(name, p):
    # each lattice term is at most p^{-c k} with c = min nu/N, and #J_{I,k} <= (k+1)^{#I-1}
    data = load_builtin(name)
    c = min(comp.ratio for comp in data.components)
    const = sum(
        abs(cs.at(p)) * (p - 1) ** len(s.I) for s in data.strata for cs in s.counts if cs.label == (1, 0)
    ) / F(p**data.n)
    for k in range(1, 40):
        value = coeff_lattice(data, p, (1, 0), k)
        assert 0 <= value
        assert float(value) <= float(const) * (k + 1) ** (data.n - 1) * p ** (-float(c) * k) * (1 + 1e-12)


@pytest.mark.parametrize(
    "name, text, n, box",
    [
        ("x1_full", "x", 1, "full"),
        ("x2_full", "x^2", 1, "full"),
        ("x4_origin", "x^4", 1, "origin"),
        ("x2_origin", "x^2", 1, "origin"),
        ("cusp_origin", "x^2+y^3", 2, "origin"),
    ],
)
@pytest.mark.parametrize("p", PRIMES)
def test_measure_identity_against_contact_counts(name, text, n, box, p):
    data = load_builtin(name)
    f = parse_polynomial(text, n)
    rbox = ResidueBox.full() if box == "full" else ResidueBox.origin(n)
    vol = denef_zeta(data, p).evaluate(1)
    assert vol == (1 if box == "full" else F(1, p**n))
    for k in range(1, 9):
        count = contact_counts(f, PadicLevel(p, k), rbox, method="lift").b_count
        assert vol - coeff_truncated_cumulative(data, p, (1, 0), k - 1) == F(count, p ** (k * n))


@pytest.mark.parametrize("k", [1, 2, 3, 4, 6])
@pytest.mark.parametrize("box", ["full", "origin"])
@pytest.mark.parametrize("p", PRIMES)
def test_reconstruction_matches_direct(k, box, p):
    data = monomial_resolution_data(k, box)
    f = parse_polynomial(f"x^{k}", 1)
    rbox = ResidueBox.full() if box == "full" else ResidueBox.origin(1)
    for m in range(2, 6):
        hist = build_histogram(f, PadicLevel(p, m), rbox)
        for u in (1, 2, 3):
            assert abs(reconstruct_exp_sum(data, p, m, u) - exp_sum(hist, u).value) <= 1e-9


def test_reconstruction_examples():
    assert abs(reconstruct_exp_sum(monomial_resolution_data(1, "full"), 5, 3)) <= 1e-12
    assert abs(reconstruct_exp_sum(monomial_resolution_data(2, "full"), 5, 2) - 0.2) <= 1e-12
    assert abs(reconstruct_exp_sum(monomial_resolution_data(2, "origin"), 5, 2) - 0.2) <= 1e-12


def test_reconstruction_refusals():
    bad = ResolutionData.from_dict({**monomial_resolution_data(2).to_dict(), "good_reduction_regime": False})
    with pytest.raises(ResolutionDataError):
        reconstruct(bad, 5, 3)
    with pytest.raises(ResolutionDataError):
        reconstruct(monomial_resolution_data(2), 2, 3)
    with pytest.raises(ResolutionDataError, match="missing counts"):
        reconstruct(load_builtin("cusp_origin"), 7, 3)
    with pytest.raises(ValueError):
        reconstruct(monomial_resolution_data(2), 5, 1)


def test_required_characters():
    data = monomial_resolution_data(4)
    assert sorted(c.label for c in required_characters(data, 13)) == [(2, 1), (4, 1), (4, 3)]
    assert [c.label for c in required_characters(data, 7)] == [(2, 1)]


@pytest.mark.parametrize(
    "data, expected",
    [
        (monomial_resolution_data(1), [(F(-1), 1)]),
        (monomial_resolution_data(2), [(F(-1, 2), 1), (F(-1), 1)]),
        (ResolutionData(1, (Component(1, 2, 1),), (Stratum((), (CountSpec(1, 0, value=3),)),)), [(F(-1), 1)]),
    ],
)
def test_pole_ledger_examples(data, expected):
    assert pole_ledger(data) == expected


def test_pole_ledger_cusp():
    assert pole_ledger(load_builtin("cusp_origin")) == [(F(-5, 6), 1), (F(-1), 1)]


def test_lct_of_examples():
    assert lct_of(single(2, 1, CountSpec(1, 0, value=0), 1)) == F(1, 2)
    three = ResolutionData(
        2, (Component(1, 2, 1, True), Component(2, 3, 2, True), Component(3, 1, 1, True)), ()
    )
    assert lct_of(three) == F(1, 2)
    assert lct_of(monomial_resolution_data(1)) == 1
    with pytest.raises(ValueError):
        lct_of(ResolutionData(1, (Component(1, 2, 1, False),), ()))


@pytest.mark.parametrize(
    "mutate, path",
    [
        (lambda d: d["components"][0].update(N=0), "components[0].N"),
        (lambda d: d["components"][0].update(nu=0), "components[0].nu"),
        (lambda d: d["strata"][1].update(I=[9]), "strata[1].I"),
        (lambda d: d["strata"].append(dict(d["strata"][1])), "strata[2].I"),
        (lambda d: d["strata"][1]["counts"].append({"order": 3, "index": 1, "value": 1}), "strata[1].counts[2]"),
        (lambda d: d["strata"][1]["counts"][0].update(affine={"a": 1, "b": 0}), "strata[1].counts[0]"),
    ],
)
def test_invalid_data_reports_field(mutate, path):
    d = json.loads(monomial_resolution_data(2).to_json())
    mutate(d)
    with pytest.raises(ResolutionDataError) as info:
        ResolutionData.from_dict(d)
    assert info.value.field == path


def test_too_many_components_in_stratum():
    with pytest.raises(ResolutionDataError, match="exceeds n"):
        ResolutionData(
            1,
            (Component(1, 1, 1), Component(2, 1, 1)),
            (Stratum((1, 2), (CountSpec(1, 0, value=1),)),),
        )


def test_negative_trivial_count_rejected_at_p():
    data = single(1, 1, CountSpec(1, 0, affine=(1, -10)), 1)
    with pytest.raises(ResolutionDataError):
        denef_zeta(data, 5)


@pytest.mark.parametrize("name", builtin_names())
def test_json_round_trip_bit_exact(name):
    data = load_builtin(name)
    text = data.to_json()
    assert ResolutionData.from_json(text) == data
    assert ResolutionData.from_json(text).to_json() == text


@given(
    st.lists(st.tuples(st.integers(1, 6), st.integers(1, 8)), min_size=1, max_size=3),
    st.integers(-5, 5),
    st.integers(0, 5),
)
def test_json_round_trip_generated(comps, a, b):
    components = tuple(Component(i + 1, N, nu, i == 0) for i, (N, nu) in enumerate(comps))
    strata = [Stratum((), (CountSpec(1, 0, affine=(a, b)),))]
    strata += [Stratum((c.id,), (CountSpec(1, 0, value=b),)) for c in components]
    data = ResolutionData(len(components), components, tuple(strata), "generated", a > 0)
    assert ResolutionData.from_json(data.to_json()) == data
    assert ResolutionData.from_json(data.to_json()).to_json() == data.to_json()


def test_unknown_builtin():
    with pytest.raises(ValueError):
        load_builtin("nope")
