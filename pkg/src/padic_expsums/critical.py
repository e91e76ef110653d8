"""Critical points/values of f mod p, the per-prime genericity conditions on a
list of rational critical values, exact critical values over Q with the
minimum lct over them, and the split of E_{m,p}(f) into pieces supported
where f(x) is congruent to each critical value mod p.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
import sympy

from .core import PadicLevel, Polynomial, ResidueBox, require_nonconstant
from .expsum import (
    BudgetExceeded,
    ValueHistogram,
    _eval_chunk,
    build_histogram,
    default_budget,
    exp_sum,
)


@dataclass(frozen=True)
class CriticalReport:
    p: int
    crit_points_mod_p: list[tuple[int, ...]]
    crit_values_mod_p: list[int]
    rational_critical_values: list[int] | None = None
    condition_checks: dict[str, bool] = field(default_factory=dict)
    failures: dict[str, list] = field(default_factory=dict)


def _grid_values(g: Polynomial, p: int, n: int) -> np.ndarray:
    return _eval_chunk(g, p, 1, (1,) * n, 0, p**n)


def _decode(flat: int, p: int, n: int) -> tuple[int, ...]:
    out = []
    for _ in range(n):
        out.append(flat % p)
        flat //= p
    return tuple(reversed(out))


def critical_data_mod_p(
    f: Polynomial,
    p: int,
    rational_critical_values: Sequence[int] | None = None,
    *,
    budget: int | None = None,
) -> CriticalReport:
    """Enumerate ``F_p^n`` for common zeros of the partials and check the three
    genericity conditions against ``rational_critical_values`` (when given):

    1. every ``z_j`` is a unit mod p;
    2. the ``z_j`` are pairwise distinct mod p;
    3. every point whose value avoids all ``z_j mod p`` has a nonvanishing partial.
    """
    require_nonconstant(f)
    PadicLevel(p, 1)
    n = f.nvars
    budget = default_budget() if budget is None else budget
    if p**n > budget:
        raise BudgetExceeded(p**n, budget)
    vals = _grid_values(f, p, n)
    singular = np.ones(p**n, dtype=bool)
    for i in range(n):
        d = f.partial(i)
        if d.is_zero:
            continue
        singular &= _grid_values(d, p, n) == 0
    idx = np.nonzero(singular)[0].tolist()
    points = [_decode(k, p, n) for k in idx]
    values = sorted({int(vals[k]) for k in idx})
    checks: dict[str, bool] = {}
    failures: dict[str, list] = {}
    if rational_critical_values is not None:
        zs = [int(z) for z in rational_critical_values]
        bad1 = [z for z in zs if z % p == 0]
        bad2 = [(a, b) for a, b in itertools.combinations(zs, 2) if (a - b) % p == 0]
        allowed = {z % p for z in zs}
        bad3 = [pt for k, pt in zip(idx, points) if int(vals[k]) not in allowed]
        checks = {"units": not bad1, "distinct": not bad2, "regular_off_values": not bad3}
        failures = {"units": bad1, "distinct": bad2, "regular_off_values": bad3}
        rational_critical_values = zs
    return CriticalReport(p, points, values, rational_critical_values, checks, failures)


def find_rational_critical_values(f: Polynomial, bound: int) -> list[int]:
    """Critical values at integer points with ``|x_i| <= bound`` (a finite search only)."""
    require_nonconstant(f)
    partials = [f.partial(i) for i in range(f.nvars)]
    found = set()
    for x in itertools.product(range(-bound, bound + 1), repeat=f.nvars):
        if all(d.evaluate(x) == 0 for d in partials):
            found.add(f.evaluate(x))
    return sorted(found)


@dataclass(frozen=True)
class ExactCriticalValues:
    rational: list[Fraction]
    unsupported: list[str]

    @property
    def complete(self) -> bool:
        return not self.unsupported


def _to_sympy(f: Polynomial, xs) -> sympy.Expr:
    return sum(c * sympy.Mul(*(x**k for x, k in zip(xs, e))) for c, e in f.terms)


def exact_critical_values(f: Polynomial) -> ExactCriticalValues:
    """All critical values over C, by eliminating x from ``(grad f, t - f)``.

    The eliminant in ``t`` is factored over Q; linear factors give the rational
    values and every other factor is reported as unsupported (values outside Q).
    """
    require_nonconstant(f)
    xs = sympy.symbols(f"x1:{f.nvars + 1}")
    t = sympy.Symbol("t")
    expr = _to_sympy(f, xs)
    gens = [sympy.diff(expr, x) for x in xs] + [t - expr]
    basis = sympy.groebner(gens, *xs, t, order="lex")
    eliminant = [g for g in basis.exprs if not (g.free_symbols & set(xs))]
    if not eliminant or eliminant[0] == 1:
        return ExactCriticalValues([], [])
    rational, unsupported = [], []
    for factor, _ in sympy.factor_list(eliminant[0], t)[1]:
        poly = sympy.Poly(factor, t)
        if poly.degree() == 1:
            a, b = poly.all_coeffs()
            rational.append(Fraction(int(-b), int(a)) if a > 0 else Fraction(int(b), int(-a)))
        else:
            unsupported.append(str(poly.as_expr()))
    return ExactCriticalValues(sorted(rational), sorted(unsupported))


@dataclass(frozen=True)
class MinCriticalLct:
    values: ExactCriticalValues
    per_value: dict[Fraction, float]
    value: float | None


def min_critical_lct(f: Polynomial, primes: Sequence[int], m_max: int = 6) -> MinCriticalLct:
    """Minimum over b of the global lct of ``f - b``, estimated from jets on the full box.

    Only critical values can push the minimum below 1, so it is taken over
    them.  The result is ``None`` when some critical value is not rational.
    Counts at a singular point depend on how its tangent cone splits over
    F_p, so primes of mixed splitting behaviour blur the slope fit.
    """
    from .lct import lct_jet_estimate

    vals = exact_critical_values(f)
    per_value = {}
    for z in vals.rational:
        g = f.scale(z.denominator) - Polynomial.constant(f.nvars, z.numerator)
        per_value[z] = lct_jet_estimate(g, primes, m_max, ResidueBox.full()).inf_value
    value = min([1.0, *per_value.values()]) if vals.complete else None
    return MinCriticalLct(vals, per_value, value)


@dataclass(frozen=True)
class CriticalSplit:
    level: PadicLevel
    values: list[int]
    pieces: list[tuple[int, complex, complex]]
    remainder: complex
    total: complex

    @property
    def residual(self) -> float:
        return abs(sum(v for _, v, _ in self.pieces) + self.remainder - self.total)


def split_exp_sum_by_critical_values(
    f: Polynomial,
    level: PadicLevel,
    rational_critical_values: Sequence[int],
    *,
    hist: ValueHistogram | None = None,
    budget: int | None = None,
    workers: int = 1,
) -> CriticalSplit:
    """Partition the full box by which ``z_j`` the value ``f(x)`` is congruent to mod p.

    Each piece is reported twice: the partial sum of ``f`` over its support,
    and the same piece written for ``f - z_j`` (so that
    ``partial = exp(2 pi i z_j / p^m) * E_j(f - z_j)``).
    """
    if level.m < 2:
        raise ValueError("split needs m >= 2")
    zs = [int(z) for z in rational_critical_values]
    p, M = level.p, level.modulus
    for a, b in itertools.combinations(zs, 2):
        if (a - b) % p == 0:
            raise ValueError(f"critical values {a} and {b} are congruent mod {p}")
    if hist is None:
        hist = build_histogram(f, level, ResidueBox.full(), budget=budget, workers=workers)
    total = exp_sum(hist).value
    res = hist.residues
    N = hist.normalizer
    weights = np.array([int(c) / N for c in hist.counts], dtype=float)
    phase = np.exp(2j * math.pi * res.astype(float) / M)
    used = np.zeros(len(res), dtype=bool)
    pieces = []
    for z in zs:
        mask = (res - z) % p == 0
        used |= mask
        partial = complex(np.sum(weights[mask] * phase[mask]))
        shifted = partial * cmath.exp(-2j * math.pi * (z % M) / M)
        pieces.append((z, partial, shifted))
    rem = complex(np.sum(weights[~used] * phase[~used]))
    return CriticalSplit(level, zs, pieces, rem, total)
