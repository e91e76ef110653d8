"""Empirical checks of the decay bound ``|E| <= C m^(n-1) p^(-m sigma)`` over (p, m) grids,
plus least-squares fits of sums against ``sum a_i m^beta_i p^(-lambda_i m)``.

The constant C is existential in theory; here it is measured (``C_fit``) per grid
and reported together with how it behaves over the larger primes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import PadicLevel, Polynomial, ResidueBox, format_polynomial, require_nonconstant
from .expsum import build_histogram, exp_sum
from .zeta import ResolutionData, reconstruct_exp_sum

VARIANTS = ("full", "origin", "shifted")
STABILITY_TOLERANCE = 1.05


def variant_box(variant: str, nvars: int, y: Sequence[int] | None = None) -> ResidueBox:
    if variant == "full":
        return ResidueBox.full()
    if variant == "origin":
        return ResidueBox.origin(nvars)
    if variant == "shifted":
        if y is None:
            raise ValueError("variant 'shifted' needs a base point y")
        if len(y) != nvars:
            raise ValueError(f"y has {len(y)} coordinates, expected {nvars}")
        return ResidueBox.shifted(y)
    raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")


def bound_ratio(magnitude: float, p: int, m: int, n: int, sigma) -> float:
    """``|E| * m^(1-n) * p^(m sigma)``."""
    return magnitude * float(m) ** (1 - n) * float(p) ** (m * float(sigma))


@dataclass(frozen=True)
class GridEntry:
    p: int
    m: int
    magnitude: float
    ratio: float
    reconstruction_error: float | None = None


@dataclass(frozen=True)
class BoundReport:
    polynomial: str
    nvars: int
    variant: str
    y: tuple[int, ...] | None
    sigma: Fraction | float
    grid: list[GridEntry]
    c_fit: float
    declared_c: float | None
    violations: list[GridEntry]
    c_fit_top_half: float
    c_fit_largest_prime: float
    stable_from: int | None

    @property
    def primes(self) -> list[int]:
        return sorted({e.p for e in self.grid})

    @property
    def no_upward_trend(self) -> bool:
        return self.c_fit_top_half <= STABILITY_TOLERANCE * self.c_fit

    def reevaluate(self, entry: GridEntry) -> float:
        return bound_ratio(entry.magnitude, entry.p, entry.m, self.nvars, self.sigma)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["p", "m", "abs_E", "bound_ratio", "violation", "reconstruction_error"])
        bad = {(e.p, e.m) for e in self.violations}
        for e in self.grid:
            rec = "" if e.reconstruction_error is None else repr(e.reconstruction_error)
            w.writerow([e.p, e.m, repr(e.magnitude), repr(e.ratio), int((e.p, e.m) in bad), rec])
        return buf.getvalue()

    def summary(self) -> dict:
        sigma = self.sigma
        return {
            "polynomial": self.polynomial,
            "nvars": self.nvars,
            "variant": self.variant,
            "y": list(self.y) if self.y is not None else None,
            "sigma": f"{sigma.numerator}/{sigma.denominator}" if isinstance(sigma, Fraction) else sigma,
            "primes": self.primes,
            "m_values": sorted({e.m for e in self.grid}),
            "c_fit": self.c_fit,
            "c_fit_top_half": self.c_fit_top_half,
            "c_fit_largest_prime": self.c_fit_largest_prime,
            "no_upward_trend": self.no_upward_trend,
            "stable_from": self.stable_from,
            "declared_c": self.declared_c,
            "violations": [[e.p, e.m, e.ratio] for e in self.violations],
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2) + "\n"


def _max_ratio(entries) -> float:
    return max((e.ratio for e in entries), default=0.0)


def _stable_from(grid: list[GridEntry], primes: list[int]) -> int | None:
    # smallest p0 from which per-prime maxima never exceed the tail maximum of p0's suffix by more than the tolerance
    per_prime = [_max_ratio([e for e in grid if e.p == p]) for p in primes]
    for i, p0 in enumerate(primes):
        tail = per_prime[i:]
        if all(tail[j + 1] <= STABILITY_TOLERANCE * max(tail[: j + 1]) for j in range(len(tail) - 1)):
            return p0
    return None


def sweep_and_fit(
    f: Polynomial,
    variant: str,
    sigma,
    primes: Sequence[int],
    m_range: Sequence[int],
    y: Sequence[int] | None = None,
    *,
    declared_c: float | None = None,
    resolution: ResolutionData | None = None,
    budget: int | None = None,
    workers: int = 1,
) -> BoundReport:
    """Evaluate ``|E|`` on every grid point and report ``C_fit`` and violations of ``declared_c``.

    The full variant starts at ``m = 2``; ``m = 1`` entries are dropped for it.
    When ``resolution`` is given, each entry also records the gap to the
    reconstructed value (primes dividing some ``N_i`` are left blank).
    """
    require_nonconstant(f)
    box = variant_box(variant, f.nvars, y)
    primes = sorted(set(int(p) for p in primes))
    ms = sorted(set(int(m) for m in m_range))
    if variant == "full":
        ms = [m for m in ms if m >= 2]
    if not primes or not ms:
        raise ValueError("empty grid (the full variant needs some m >= 2)")
    if any(m < 1 for m in ms):
        raise ValueError("m must be positive")
    if float(sigma) < 0:
        raise ValueError("sigma must be nonnegative")
    points = [(p, m) for p in primes for m in ms]

    def evaluate(pm):
        p, m = pm
        level = PadicLevel(p, m)
        hist = build_histogram(f, level, box, budget=budget)
        value = exp_sum(hist).value
        mag = abs(value)
        rec = None
        if resolution is not None and all(p % c.N for c in resolution.components):
            rec = abs(reconstruct_exp_sum(resolution, p, m) - value)
        return GridEntry(p, m, mag, bound_ratio(mag, p, m, f.nvars, sigma), rec)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            grid = list(ex.map(evaluate, points))
    else:
        grid = [evaluate(pm) for pm in points]

    c_fit = _max_ratio(grid)
    top = primes[len(primes) // 2 :]
    violations = [e for e in grid if declared_c is not None and e.ratio > declared_c]
    return BoundReport(
        polynomial=format_polynomial(f),
        nvars=f.nvars,
        variant=variant,
        y=tuple(y) if y is not None and variant == "shifted" else None,
        sigma=sigma,
        grid=grid,
        c_fit=c_fit,
        declared_c=declared_c,
        violations=violations,
        c_fit_top_half=_max_ratio([e for e in grid if e.p in top]),
        c_fit_largest_prime=_max_ratio([e for e in grid if e.p == primes[-1]]),
        stable_from=_stable_from(grid, primes),
    )


@dataclass(frozen=True)
class ModelTerm:
    residue_class: int
    lam: Fraction | float
    beta: int
    coefficient: complex


@dataclass(frozen=True)
class ModelFit:
    p: int
    period: int
    terms: list[ModelTerm]
    residuals: dict[int, float]
    relative_residual: float
    flagged: bool
    values: dict[int, complex] = field(default_factory=dict)

    def predict(self, m: int) -> complex:
        cls = m % self.period
        return sum(
            t.coefficient * m**t.beta * float(self.p) ** (-float(t.lam) * m)
            for t in self.terms
            if t.residue_class == cls
        )


def fit_decay_model(
    f: Polynomial,
    variant: str,
    p: int,
    m_range: Sequence[int],
    candidates: Sequence,
    *,
    betas: Sequence[int] | None = None,
    period: int = 1,
    y: Sequence[int] | None = None,
    budget: int | None = None,
    tolerance: float = 1e-6,
) -> ModelFit:
    """Least-squares fit of ``E(m)`` on the basis ``m^beta p^(-lambda m)``.

    ``betas`` defaults to ``0..n-1``.  With ``period > 1`` each residue class of
    ``m`` gets its own coefficients; every class needs at least as many ``m``
    values as basis functions.
    """
    require_nonconstant(f)
    box = variant_box(variant, f.nvars, y)
    if period < 1:
        raise ValueError("period must be positive")
    betas = list(range(f.nvars)) if betas is None else list(betas)
    if any(b < 0 or b > f.nvars - 1 for b in betas):
        raise ValueError(f"beta must lie in [0, {f.nvars - 1}]")
    basis = [(lam, b) for lam in candidates for b in betas]
    if not basis:
        raise ValueError("empty basis")
    ms = sorted(set(int(m) for m in m_range))
    if variant == "full":
        ms = [m for m in ms if m >= 2]
    classes: dict[int, list[int]] = {}
    for m in ms:
        classes.setdefault(m % period, []).append(m)
    for c in range(period):
        if len(classes.get(c, [])) < len(basis):
            raise ValueError(
                f"underdetermined: residue class {c} mod {period} has "
                f"{len(classes.get(c, []))} values of m for {len(basis)} basis functions"
            )
    values = {m: exp_sum(build_histogram(f, PadicLevel(p, m), box, budget=budget)).value for m in ms}

    terms: list[ModelTerm] = []
    residuals: dict[int, float] = {}
    sq_res = sq_norm = 0.0
    for c in sorted(classes):
        rows = classes[c]
        A = np.array(
            [[float(m) ** b * float(p) ** (-float(lam) * m) for lam, b in basis] for m in rows],
            dtype=complex,
        )
        rhs = np.array([values[m] for m in rows], dtype=complex)
        scale = np.linalg.norm(A, axis=0)
        scale[scale == 0] = 1.0
        coef, *_ = np.linalg.lstsq(A / scale, rhs, rcond=None)
        coef = coef / scale
        r = float(np.linalg.norm(A @ coef - rhs))
        residuals[c] = r
        sq_res += r * r
        sq_norm += float(np.linalg.norm(rhs)) ** 2
        terms.extend(ModelTerm(c, lam, b, complex(a)) for (lam, b), a in zip(basis, coef))
    rel = math.sqrt(sq_res) / math.sqrt(sq_norm) if sq_norm > 0 else math.sqrt(sq_res)
    return ModelFit(p, period, terms, residuals, rel, rel > tolerance, values)
