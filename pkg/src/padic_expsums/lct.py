"""Log-canonical thresholds: exact from resolution data, estimated from contact-locus counts.

The jet route counts ``#{x in box mod p^m : f(x) = 0 mod p^m}`` for several
primes, reads a dimension off the log-log slope against ``p``, and takes
``min_m (mn - dim_m) / m``.  Codimension is always measured in the full jet
space of dimension ``mn``, also for the origin box.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .core import PadicLevel, Polynomial, ResidueBox, require_nonconstant
from .expsum import contact_counts
from .zeta import Component, ResolutionData, lct_of


def lct_from_resolution(
    data: ResolutionData, fiber_filter: Callable[[Component], bool] | None = None
) -> Fraction:
    """``min nu_i/N_i`` over components meeting the fiber (``meets_origin`` by default)."""
    return lct_of(data, fiber_filter)


def contact_count(
    f: Polynomial, p: int, m: int, box: ResidueBox | None = None, *, method: str = "lift", **kw
) -> int:
    box = box or ResidueBox.origin(f.nvars)
    return contact_counts(f, PadicLevel(p, m), box, method=method, **kw).b_count


def sigma_of(lct_value) -> float | Fraction:
    if isinstance(lct_value, Fraction):
        return min(lct_value, Fraction(1, 2))
    return min(float(lct_value), 0.5)


@dataclass(frozen=True)
class LevelFit:
    m: int
    counts: dict[int, int]
    dim: float
    codim: float
    residual: float

    @property
    def ratio(self) -> float:
        return self.codim / self.m


@dataclass(frozen=True)
class LctEstimate:
    nvars: int
    box: ResidueBox
    primes: tuple[int, ...]
    per_m: dict[int, LevelFit]
    inf_value: float
    argmin_m: int
    resolution_value: Fraction | None = None
    at_truncation: bool = field(default=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "p", "count", "log_p_count", "dim_fit", "codim", "codim_over_m"])
        for m, fit in sorted(self.per_m.items()):
            for p in self.primes:
                c = fit.counts[p]
                w.writerow([m, p, c, repr(math.log(c) / math.log(p)), repr(fit.dim), repr(fit.codim), repr(fit.ratio)])
        return buf.getvalue()


def fit_dimension(primes: Sequence[int], counts: Sequence[int]) -> tuple[float, float]:
    """Least-squares slope of ``log count`` against ``log p`` and the RMS residual."""
    x = np.log(np.asarray(primes, dtype=float))
    y = np.log(np.asarray(counts, dtype=float))
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    return float(coef[0]), float(np.sqrt(np.mean(resid**2)))


def lct_jet_estimate(
    f: Polynomial,
    primes: Sequence[int],
    m_max: int = 6,
    box: ResidueBox | None = None,
    *,
    resolution: ResolutionData | None = None,
    method: str = "lift",
    budget: int | None = None,
) -> LctEstimate:
    """Jet-route lct estimate.  The default ``method="lift"`` counts contact loci
    by Hensel lifting, which is exact and independent of ``p^(mn)``."""
    require_nonconstant(f)
    primes = tuple(sorted(set(primes)))
    if len(primes) < 2:
        raise ValueError("need at least two primes to fit a slope")
    box = box or ResidueBox.origin(f.nvars)
    n = f.nvars
    per_m = {}
    for m in range(1, m_max + 1):
        counts = {p: contact_count(f, p, m, box, method=method, budget=budget) for p in primes}
        if any(c == 0 for c in counts.values()):
            raise ValueError(f"f does not vanish on the box at level m={m}: counts {counts}")
        dim, resid = fit_dimension(primes, [counts[p] for p in primes])
        per_m[m] = LevelFit(m, counts, dim, m * n - dim, resid)
    argmin = min(per_m, key=lambda m: (per_m[m].ratio, m))
    res_val = lct_from_resolution(resolution) if resolution is not None else None
    return LctEstimate(
        n, box, primes, per_m, per_m[argmin].ratio, argmin, res_val, at_truncation=argmin == m_max
    )


def stratum_dimension_check(
    f: Polynomial, primes: Sequence[int], m: int, lct_value, slack: float = 0.25, box=None
) -> tuple[float, float, bool]:
    """Fitted ``dim A_{p,m}`` (``ord f = m-1`` stratum) against ``mn - (m-1) lct``.

    Returns ``(dim_fit, bound, ok)`` with ``ok = dim_fit <= bound + slack``.
    """
    box = box or ResidueBox.origin(f.nvars)
    counts = [contact_counts(f, PadicLevel(p, m), box).a_count for p in primes]
    if any(c == 0 for c in counts):
        return float("-inf"), m * f.nvars - (m - 1) * float(lct_value), True
    dim, _ = fit_dimension(primes, counts)
    bound = m * f.nvars - (m - 1) * float(lct_value)
    return dim, bound, dim <= bound + slack
