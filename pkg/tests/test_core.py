import re

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from padic_expsums.core import (
    ConstantPolynomialError,
    PadicLevel,
    Polynomial,
    PolynomialSyntaxError,
    ResidueBox,
    eval_mod,
    format_polynomial,
    ord_and_ac,
    parse_polynomial,
    require_nonconstant,
    valuation,
)


@pytest.mark.parametrize(
    "text, n, expected",
    [
        ("x^2 + y^3", 2, {(2, 0): 1, (0, 3): 1}),
        ("0", 1, {}),
        ("(x - 1)*(x + 1)", 1, {(2,): 1, (0,): -1}),
        ("x1*x3 - 2*x2^2", 3, {(1, 0, 1): 1, (0, 2, 0): -2}),
        ("-x + x", 1, {}),
        ("(x+y)^3", 2, {(3, 0): 1, (2, 1): 3, (1, 2): 3, (0, 3): 1}),
        ("  7 ", 2, {(0, 0): 7}),
    ],
)
def test_parse_examples(text, n, expected):
    assert parse_polynomial(text, n).as_dict() == expected


@pytest.mark.parametrize(
    "text, n",
    [("x^2+y^3", 2), ("(x-1)*(x+1)*(y+2)^2", 2), ("3*(x1-x2)^4 - x3", 3), ("(2*x+1)^5", 1)],
)
def test_parse_matches_sympy_expansion(text, n):
    syms = sympy.symbols(f"x1:{n + 1}")
    aliased = text.replace("^", "**")
    for alias, s in zip("xyz", ("x1", "x2", "x3")):
        aliased = re.sub(rf"\b{alias}\b", s, aliased)
    ref = sympy.Poly(sympy.sympify(aliased, locals={str(s): s for s in syms}), *syms)
    expected = {tuple(k): int(v) for k, v in ref.as_dict().items()}
    assert parse_polynomial(text, n).as_dict() == expected


@pytest.mark.parametrize(
    "text, n, position",
    [("x^", 1, 2), ("x + * y", 2, 4), ("x4", 3, None), ("x^-2", 1, None), ("(x", 1, None), ("x $ 1", 1, 2)],
)
def test_parse_errors(text, n, position):
    with pytest.raises(PolynomialSyntaxError) as info:
        parse_polynomial(text, n)
    if position is not None:
        assert info.value.position == position


def test_constant_polynomials_parse_but_are_rejected():
    f = parse_polynomial("5", 1)
    assert f.is_constant
    with pytest.raises(ConstantPolynomialError):
        require_nonconstant(f)


def test_term_invariants_enforced():
    with pytest.raises(ValueError):
        Polynomial(1, ((0, (1,)),))
    with pytest.raises(ValueError):
        Polynomial(1, ((1, (1,)), (2, (1,))))
    with pytest.raises(ValueError):
        Polynomial(2, ((1, (1,)),))


monomials = st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(0, 3))
polys = st.dictionaries(monomials, st.integers(-50, 50), max_size=6).map(
    lambda d: Polynomial.from_dict(3, d)
)


@given(polys)
def test_parse_print_parse_fixpoint(f):
    once = parse_polynomial(format_polynomial(f), 3)
    assert once == f
    assert parse_polynomial(format_polynomial(once), 3) == once


@given(polys, polys)
def test_ring_operations_agree_with_evaluation(f, g):
    x = (3, -2, 5)
    assert (f * g).evaluate(x) == f.evaluate(x) * g.evaluate(x)
    assert (f - g).evaluate(x) == f.evaluate(x) - g.evaluate(x)


@given(polys, st.lists(st.integers(-7, 7), min_size=3, max_size=3), st.integers(-3, 3))
def test_substitute_affine_matches_composition(f, shift, scale):
    h = f.substitute_affine(shift, scale)
    t = (2, -1, 4)
    assert h.evaluate(t) == f.evaluate([s + scale * ti for s, ti in zip(shift, t)])


@pytest.mark.parametrize(
    "text, n, x, p, m, expected",
    [("x^2+y^3", 2, (2, 3), 5, 2, 6), ("x", 1, (0,), 7, 3, 0), ("x^3-3*x", 1, (5,), 7, 2, 12)],
)
def test_eval_mod_examples(text, n, x, p, m, expected):
    assert eval_mod(parse_polynomial(text, n), x, PadicLevel(p, m)) == expected


def test_eval_mod_dimension_mismatch():
    with pytest.raises(ValueError):
        eval_mod(parse_polynomial("x+y", 2), (1,), PadicLevel(5, 1))


@given(
    polys,
    st.lists(st.integers(-10**30, 10**30), min_size=3, max_size=3),
    st.sampled_from([2, 3, 5, 7, 101]),
    st.integers(1, 8),
)
def test_eval_mod_reduction_compatible(f, x, p, m):
    full = eval_mod(f, x, PadicLevel(p, m))
    assert full == f.evaluate(x) % p**m
    for k in range(1, m + 1):
        assert full % p**k == eval_mod(f, x, PadicLevel(p, k))


@pytest.mark.parametrize(
    "z, p, m, expected", [(50, 5, 3, (2, 2)), (0, 5, 3, (3, None)), (12, 7, 2, (0, 5)), (8, 2, 4, (3, 1))]
)
def test_ord_and_ac_examples(z, p, m, expected):
    assert ord_and_ac(z, PadicLevel(p, m)) == expected


@given(st.sampled_from([2, 3, 5, 7, 13]), st.integers(1, 6), st.data())
def test_ord_and_ac_invariant(p, m, data):
    z = data.draw(st.integers(0, p**m - 1))
    v, ac = ord_and_ac(z, PadicLevel(p, m))
    if z == 0:
        assert (v, ac) == (m, None)
        return
    assert 0 <= v < m
    assert z % p**v == 0 and z % p ** (v + 1) != 0
    assert 1 <= ac < p and (z // p**v) % p == ac


def test_valuation_of_zero_is_none():
    assert valuation(0, 5) is None
    assert valuation(250, 5) == 3


def test_level_and_box_validation():
    assert PadicLevel(5, 3).modulus == 125
    with pytest.raises(ValueError):
        PadicLevel(6, 2)
    with pytest.raises(ValueError):
        PadicLevel(5, 0)
    assert ResidueBox.origin(2).size(PadicLevel(5, 3), 2) == 5**4
    assert ResidueBox.full().size(PadicLevel(5, 3), 2) == 5**6
    assert ResidueBox.shifted((1, 2)).label() == "shifted:1,2"
    with pytest.raises(ValueError):
        ResidueBox("diagonal")
