"""Value histograms of f over residue boxes and the exponential sums read off them.

Every sum here is computed from a :class:`ValueHistogram`, the exact integer
counts ``#{x in box : f(x) = r mod p^m}``.  Enumeration is exact and
deterministic; before enumerating, the box is reduced using the p-adic
content of ``f(y + p a)`` so that only the digits of each coordinate that can
influence ``f mod p^m`` are walked, and the remaining digits enter as an
exact multiplicity.
"""

from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core import (
    PadicLevel,
    Polynomial,
    ResidueBox,
    eval_mod,
    require_nonconstant,
    valuation,
)

BUDGET_ENV = "PADIC_EXPSUMS_BUDGET"
DEFAULT_BUDGET = 10**8
CHUNK = 1 << 20
DENSE_LIMIT = 1 << 23
_INT64_SAFE = 1 << 31
TWO_PI = 2.0 * math.pi


class BudgetExceeded(RuntimeError):
    def __init__(self, required: int, allowed: int):
        super().__init__(f"enumeration needs {required} points, budget allows {allowed}")
        self.required = required
        self.allowed = allowed


def default_budget() -> int:
    return int(os.environ.get(BUDGET_ENV, DEFAULT_BUDGET))


@dataclass(frozen=True)
class EnumerationPlan:
    """``f(x) mod p^m == p^shift * (g(a) mod p^r)`` for ``a`` walking ``digits``.

    Coordinate ``i`` of ``a`` is enumerated mod ``p^digits[i]``; every
    enumerated point stands for ``multiplicity`` points of the box.
    """

    g: Polynomial | None
    p: int
    shift: int
    r: int
    digits: tuple[int, ...]
    multiplicity: int
    box_size: int

    @property
    def points(self) -> int:
        return math.prod(self.p**d for d in self.digits)


def plan_enumeration(f: Polynomial, level: PadicLevel, box: ResidueBox) -> EnumerationPlan:
    p, m, n = level.p, level.m, f.nvars
    base = box.base(n)
    if box.kind == "full":
        h, span = f, m
    else:
        h, span = f.substitute_affine(base, p), m - 1
    size = box.size(level, n)
    c = min((valuation(a, p) for a, _ in h.terms), default=None)
    if c is None or c >= m:
        return EnumerationPlan(None, p, m, 0, (0,) * n, size, size)
    g = Polynomial.from_dict(n, {e: a // p**c for a, e in h.terms})
    r = m - c
    digits = []
    for i in range(n):
        vals = [valuation(a, p) for a, e in g.terms if e[i] > 0]
        e_i = min(vals) if vals else r
        digits.append(min(span, max(0, r - e_i)))
    mult = p ** (span * n - sum(digits))
    return EnumerationPlan(g, p, c, r, tuple(digits), mult, size)


def _eval_chunk(g: Polynomial, p: int, r: int, digits: Sequence[int], lo: int, hi: int) -> np.ndarray:
    """Values of ``g(a) mod p^r`` for flat (row-major) indices ``lo..hi-1``."""
    M = p**r
    dtype = np.int64 if M < _INT64_SAFE else object
    idx = np.arange(lo, hi, dtype=np.int64)
    radices = [p**d for d in digits]
    coords = []
    stride = 1
    for R in reversed(radices):
        coords.append((idx // stride) % R)
        stride *= R
    coords.reverse()
    if dtype is object:
        coords = [c.astype(object) for c in coords]
    powers: list[dict[int, np.ndarray]] = [dict() for _ in digits]

    def power(i: int, k: int) -> np.ndarray:
        cache = powers[i]
        if k not in cache:
            if k == 1:
                cache[k] = coords[i] % M
            else:
                half = power(i, k // 2)
                sq = half * half % M
                cache[k] = sq if k % 2 == 0 else sq * power(i, 1) % M
        return cache[k]

    total = np.zeros(hi - lo, dtype=dtype)
    for a, e in g.terms:
        term = np.full(hi - lo, a % M, dtype=dtype)
        for i, k in enumerate(e):
            if k:
                term = term * power(i, k) % M
        total = (total + term) % M
    return total


def _count_range(plan: EnumerationPlan, modulus: int, lo: int, hi: int):
    p = plan.p
    dense = modulus <= DENSE_LIMIT
    acc = np.zeros(modulus, dtype=np.int64) if dense else {}
    scale = p**plan.shift
    for start in range(lo, hi, CHUNK):
        stop = min(hi, start + CHUNK)
        vals = _eval_chunk(plan.g, p, plan.r, plan.digits, start, stop)
        if scale != 1:
            vals = vals * scale
        if dense:
            acc += np.bincount(vals.astype(np.int64), minlength=modulus)
        else:
            u, c = np.unique(vals, return_counts=True)
            for key, cnt in zip(u.tolist(), c.tolist()):
                acc[key] = acc.get(key, 0) + cnt
    return acc


def _split_ranges(total: int, lead: int, workers: int) -> list[tuple[int, int]]:
    """Contiguous index ranges; aligned to leading-coordinate blocks when possible."""
    workers = max(1, min(workers, total))
    if lead >= workers:
        block = total // lead
        cuts = [lead * k // workers * block for k in range(workers + 1)]
    else:
        cuts = [total * k // workers for k in range(workers + 1)]
    return [(a, b) for a, b in zip(cuts, cuts[1:]) if b > a]


@dataclass(frozen=True, eq=False)
class ValueHistogram:
    """Exact counts of ``f(x) mod p^m`` over a residue box (sparse, sorted by residue)."""

    level: PadicLevel
    box: ResidueBox
    nvars: int
    residues: np.ndarray
    counts: np.ndarray
    polynomial: Polynomial | None = field(default=None, compare=False)

    @property
    def total(self) -> int:
        return int(sum(int(c) for c in self.counts))

    @property
    def normalizer(self) -> int:
        return self.level.p ** (self.level.m * self.nvars)

    def as_dict(self) -> dict[int, int]:
        return {int(r): int(c) for r, c in zip(self.residues, self.counts)}

    def count(self, r: int) -> int:
        i = np.searchsorted(self.residues, r)
        if i < len(self.residues) and self.residues[i] == r:
            return int(self.counts[i])
        return 0

    def __eq__(self, other):
        if not isinstance(other, ValueHistogram):
            return NotImplemented
        return (
            self.level == other.level
            and self.box == other.box
            and self.nvars == other.nvars
            and self.as_dict() == other.as_dict()
        )

    def to_text(self) -> str:
        lines = [f"# p={self.level.p} m={self.level.m} n={self.nvars} box={self.box.label()}"]
        lines += [f"{r},{c}" for r, c in self.as_dict().items()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ValueHistogram":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        header = dict(tok.split("=", 1) for tok in lines[0].lstrip("#").split())
        level = PadicLevel(int(header["p"]), int(header["m"]))
        n = int(header["n"])
        label = header["box"]
        if label == "full":
            box = ResidueBox.full()
        elif label == "origin":
            box = ResidueBox.origin(n)
        else:
            box = ResidueBox.shifted(int(v) for v in label.split(":", 1)[1].split(","))
        pairs = [tuple(int(v) for v in ln.split(",")) for ln in lines[1:]]
        return _from_pairs(level, box, n, pairs)


def _from_pairs(level, box, n, pairs, polynomial=None) -> ValueHistogram:
    pairs = sorted((r, c) for r, c in pairs if c)
    big = any(c >= 1 << 62 for _, c in pairs)
    residues = np.array([r for r, _ in pairs], dtype=np.int64)
    counts = np.array([c for _, c in pairs], dtype=object if big else np.int64)
    return ValueHistogram(level, box, n, residues, counts, polynomial)


def build_histogram(
    f: Polynomial,
    level: PadicLevel,
    box: ResidueBox | None = None,
    *,
    budget: int | None = None,
    workers: int = 1,
) -> ValueHistogram:
    """Exact histogram of ``f mod p^m`` over ``box`` (default: full box).

    The work is split over ``workers`` threads along the leading coordinate;
    integer merging makes the result identical for every split.
    """
    require_nonconstant(f)
    box = box or ResidueBox.full()
    budget = default_budget() if budget is None else budget
    plan = plan_enumeration(f, level, box)
    M = level.modulus
    if plan.g is None:
        return _from_pairs(level, box, f.nvars, [(0, plan.box_size)], f)
    total = plan.points
    if total > budget:
        raise BudgetExceeded(total, budget)
    lead = plan.p ** plan.digits[0]
    ranges = _split_ranges(total, lead, workers)
    if len(ranges) == 1:
        parts = [_count_range(plan, M, *ranges[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(ranges)) as ex:
            parts = list(ex.map(lambda rg: _count_range(plan, M, *rg), ranges))
    if isinstance(parts[0], np.ndarray):
        acc = parts[0]
        for part in parts[1:]:
            acc = acc + part
        nz = np.nonzero(acc)[0]
        pairs = [(int(r), int(acc[r]) * plan.multiplicity) for r in nz]
    else:
        merged: dict[int, int] = {}
        for part in parts:
            for k, v in part.items():
                merged[k] = merged.get(k, 0) + v
        pairs = [(k, v * plan.multiplicity) for k, v in merged.items()]
    return _from_pairs(level, box, f.nvars, pairs, f)


def iter_box(f: Polynomial, level: PadicLevel, box: ResidueBox):
    """Plain row-major walk of every point of the box (no reduction)."""
    import itertools

    p, m, n = level.p, level.m, f.nvars
    base = box.base(n)
    if box.kind == "full":
        ranges = [range(p**m)] * n
        for x in itertools.product(*ranges):
            yield x
    else:
        ranges = [range(p ** (m - 1))] * n
        for a in itertools.product(*ranges):
            yield tuple(b + p * ai for b, ai in zip(base, a))


def naive_histogram(f: Polynomial, level: PadicLevel, box: ResidueBox) -> dict[int, int]:
    counts: dict[int, int] = {}
    for x in iter_box(f, level, box):
        r = eval_mod(f, x, level)
        counts[r] = counts.get(r, 0) + 1
    return dict(sorted(counts.items()))


def naive_exp_sum(f: Polynomial, level: PadicLevel, box: ResidueBox, u: int = 1) -> complex:
    """Direct ``p^{-mn} sum_x exp(2 pi i u f(x)/p^m)``; an oracle for small boxes."""
    M = level.modulus
    total = 0j
    for x in iter_box(f, level, box):
        total += cmath.exp(2j * math.pi * (u * f.evaluate(x) % M) / M)
    return total / level.p ** (level.m * f.nvars)


@dataclass(frozen=True)
class ExpSumValue:
    value: complex
    magnitude: float
    histogram: ValueHistogram | None = field(default=None, repr=False, compare=False)


def _weighted_sum(hist: ValueHistogram, mask: np.ndarray | None, u: int) -> complex:
    M = hist.level.modulus
    res = hist.residues if mask is None else hist.residues[mask]
    cnt = hist.counts if mask is None else hist.counts[mask]
    if len(res) == 0:
        return 0j
    N = hist.normalizer
    weights = np.array([int(c) / N for c in cnt], dtype=float)
    angles = np.array([(u * int(r)) % M for r in res], dtype=float) * (TWO_PI / M)
    return complex(np.sum(weights * np.cos(angles)) + 1j * np.sum(weights * np.sin(angles)))


def _as_value(z: complex, hist) -> ExpSumValue:
    return ExpSumValue(z, abs(z), hist)


def exp_sum(hist: ValueHistogram, u: int = 1) -> ExpSumValue:
    """``p^{-mn} sum_r count(r) exp(2 pi i u r / p^m)``.

    The normalizer is ``p^{mn}`` for shifted boxes too, so for ``m = 1`` and
    ``f(0) = 0`` the origin sum is exactly ``p^{-n}``.
    """
    return _as_value(_weighted_sum(hist, None, u), hist)


def exact_value_if_trivial(hist: ValueHistogram) -> Fraction | None:
    """Exact rational value when every count sits on residue 0, else ``None``."""
    if len(hist.residues) == 1 and int(hist.residues[0]) == 0:
        return Fraction(int(hist.counts[0]), hist.normalizer)
    if len(hist.residues) == 0:
        return Fraction(0)
    return None


def residue_valuations(residues: np.ndarray, level: PadicLevel) -> np.ndarray:
    """ord_p of each residue, with 0 mapped to ``m`` (meaning ">= m")."""
    p, m = level.p, level.m
    v = np.zeros(len(residues), dtype=np.int64)
    r = residues.astype(np.int64).copy()
    zero = r == 0
    v[zero] = m
    live = ~zero
    while live.any():
        div = live & (r % p == 0)
        if not div.any():
            break
        v[div] += 1
        r[div] //= p
        live = div
    return v


@dataclass(frozen=True)
class SubsumTriple:
    low: ExpSumValue
    mid: ExpSumValue
    high: ExpSumValue

    @property
    def total(self) -> complex:
        return self.low.value + self.mid.value + self.high.value


def _histogram_for(f, level, box, hist, budget=None, workers=1):
    if hist is not None:
        return hist
    return build_histogram(f, level, box, budget=budget, workers=workers)


def subsum_decomposition(
    f: Polynomial | None,
    level: PadicLevel,
    box: ResidueBox | None = None,
    *,
    hist: ValueHistogram | None = None,
    u: int = 1,
    budget: int | None = None,
    workers: int = 1,
) -> SubsumTriple:
    """Split the sum by ord_p f(x) into ``<= m-2``, ``= m-1`` and ``>= m``."""
    if level.m < 2:
        raise ValueError("subsum decomposition needs m >= 2")
    hist = _histogram_for(f, level, box, hist, budget, workers)
    v = residue_valuations(hist.residues, level)
    m = level.m
    parts = [v <= m - 2, v == m - 1, v >= m]
    low, mid, high = (_as_value(_weighted_sum(hist, mask, u), hist) for mask in parts)
    return SubsumTriple(low, mid, high)


@dataclass(frozen=True)
class LiftConstancyReport:
    level: PadicLevel
    holds: bool
    witnesses: list[tuple[int, list[int]]]
    low: complex
    classes_checked: int


def lift_constancy_check(
    f: Polynomial | None,
    level: PadicLevel,
    box: ResidueBox | None = None,
    *,
    hist: ValueHistogram | None = None,
    budget: int | None = None,
    workers: int = 1,
) -> LiftConstancyReport:
    """Lift-count constancy for residues of valuation <= m-2.

    For every class ``z mod p^{m-1}`` with ``ord_p z <= m-2``, the counts of
    the ``p`` lifts ``z + k p^{m-1}`` must coincide.  This is an exact integer
    test and forces the low subsum to vanish.
    """
    p, m = level.p, level.m
    if m < 3:
        raise ValueError("lift_constancy_check needs m >= 3")
    hist = _histogram_for(f, level, box, hist, budget, workers)
    P1 = p ** (m - 1)
    res = hist.residues
    z = res % P1
    sel = z != 0
    zs, ks, cs = z[sel], (res[sel] // P1), hist.counts[sel]
    order = np.lexsort((ks, zs))
    zs, ks, cs = zs[order], ks[order], cs[order]
    witnesses = []
    uniq, starts = np.unique(zs, return_index=True)
    bounds = list(starts) + [len(zs)]
    for j, zval in enumerate(uniq):
        lo, hi = bounds[j], bounds[j + 1]
        group = [int(c) for c in cs[lo:hi]]
        if hi - lo != p or min(group) != max(group):
            lifts = [0] * p
            for k, c in zip(ks[lo:hi], cs[lo:hi]):
                lifts[int(k)] = int(c)
            witnesses.append((int(zval), lifts))
    low = subsum_decomposition(None, level, hist=hist).low.value
    return LiftConstancyReport(level, not witnesses, witnesses, low, len(uniq))


@dataclass(frozen=True)
class OrbitReport:
    level: PadicLevel
    d: int
    holds: bool
    orbits: list[list[int]]
    constants: list[Fraction | None]
    violations: list[tuple[int, list[int]]]
    mid_direct: complex
    mid_from_orbits: complex | None


def orbit_classes(p: int, d: int) -> list[list[int]]:
    """Partition of ``F_p^*`` by the value of ``xi^((p-1)/d)``, ordered by least member."""
    e = (p - 1) // d
    groups: dict[int, list[int]] = {}
    for xi in range(1, p):
        groups.setdefault(pow(xi, e, p), []).append(xi)
    return sorted(groups.values(), key=lambda g: g[0])


def orbit_constancy_check(
    f: Polynomial | None,
    level: PadicLevel,
    box: ResidueBox | None = None,
    *,
    hist: ValueHistogram | None = None,
    budget: int | None = None,
    workers: int = 1,
) -> OrbitReport:
    """Constancy of the counts over residues of valuation exactly ``m-1`` on each
    class ``{xi : xi^((p-1)/d)`` fixed``}``, ``d = gcd(m-1, p-1)``.

    When the counts are constant the middle subsum equals
    ``sum_i G_i * sum_{xi in Y_i} exp(2 pi i xi / p)`` with ``G_i`` the
    normalized per-class count.
    """
    p, m = level.p, level.m
    if m < 2:
        raise ValueError("orbit_constancy_check needs m >= 2")
    if box is None and hist is None:
        box = ResidueBox.origin(f.nvars)
    hist = _histogram_for(f, level, box, hist, budget, workers)
    d = math.gcd(m - 1, p - 1)
    P1 = p ** (m - 1)
    by_xi = {r // P1: c for r, c in hist.as_dict().items() if r and r % P1 == 0}
    orbits = orbit_classes(p, d)
    constants: list[Fraction | None] = []
    violations = []
    N = hist.normalizer
    for orbit in orbits:
        vals = [by_xi.get(xi, 0) for xi in orbit]
        if min(vals) == max(vals):
            constants.append(Fraction(vals[0], N))
        else:
            constants.append(None)
            violations.append((orbit[0], vals))
    mid = subsum_decomposition(None, level, hist=hist).mid.value
    recon = None
    if not violations:
        recon = 0j
        for G, orbit in zip(constants, orbits):
            recon += float(G) * sum(cmath.exp(2j * math.pi * xi / p) for xi in orbit)
    return OrbitReport(level, d, not violations, orbits, constants, violations, mid, recon)


@dataclass(frozen=True)
class ContactCounts:
    level: PadicLevel
    box: ResidueBox
    a_count: int
    b_count: int
    method: str


def _count_zeros(g: Polynomial, p: int, r: int) -> int:
    """``#{T in (Z/p^r)^n : g(T) = 0 mod p^r}`` by digit-wise lifting."""
    n = g.nvars
    if r <= 0:
        return 1
    M = p**r
    g = Polynomial.from_dict(n, {e: a % M for a, e in g.terms})
    c = min((valuation(a, p) for a, _ in g.terms), default=None)
    if c is None or c >= r:
        return p ** (r * n)
    if c > 0:
        g = Polynomial.from_dict(n, {e: a // p**c for a, e in g.terms})
        return p ** (c * n) * _count_zeros(g, p, r - c)
    npts = p**n
    vals = _eval_chunk(g, p, 1, (1,) * n, 0, npts)
    zero_idx = np.nonzero(vals == 0)[0]
    if len(zero_idx) == 0:
        return 0
    smooth = np.zeros(len(zero_idx), dtype=bool)
    for i in range(n):
        di = g.partial(i)
        if di.is_zero:
            continue
        dv = _eval_chunk(di, p, 1, (1,) * n, 0, npts)[zero_idx]
        smooth |= dv != 0
    total = int(smooth.sum()) * p ** ((r - 1) * (n - 1))
    for flat in zero_idx[~smooth].tolist():
        t0 = []
        for _ in range(n):
            t0.append(flat % p)
            flat //= p
        t0.reverse()
        h = g.substitute_affine(t0, p)
        h = Polynomial.from_dict(n, {e: a % M for a, e in h.terms})
        c2 = min((valuation(a, p) for a, _ in h.terms), default=None)
        if c2 is None or c2 >= r:
            total += p ** ((r - 1) * n)
        else:
            h = Polynomial.from_dict(n, {e: a // p**c2 for a, e in h.terms})
            total += p ** ((c2 - 1) * n) * _count_zeros(h, p, r - c2)
    return total


def count_vanishing(f: Polynomial, p: int, k: int, m: int, box: ResidueBox) -> int:
    """``#{x in box mod p^m : f(x) = 0 mod p^k}`` for ``k <= m``, without enumerating the box."""
    n = f.nvars
    if k > m:
        raise ValueError("k must not exceed m")
    base = box.base(n)
    if box.kind == "full":
        h, span = f, m
    else:
        h, span = f.substitute_affine(base, p), m - 1
    if k <= 0:
        return p ** (span * n)
    c = min((valuation(a, p) for a, _ in h.terms), default=None)
    if c is None or c >= k:
        return p ** (span * n)
    if box.kind == "shifted" and c == 0:
        return 0
    g = Polynomial.from_dict(n, {e: a // p**c for a, e in h.terms})
    rr = k - c
    return p ** ((span - rr) * n) * _count_zeros(g, p, rr)


def contact_counts(
    f: Polynomial,
    level: PadicLevel,
    box: ResidueBox | None = None,
    *,
    hist: ValueHistogram | None = None,
    method: str = "auto",
    budget: int | None = None,
    workers: int = 1,
) -> ContactCounts:
    """Counts of the strata ``ord_p f = m-1`` (``a_count``) and ``ord_p f >= m`` (``b_count``).

    ``method`` is ``"histogram"``, ``"lift"`` (digit-wise Hensel counting,
    exact and independent of the box size) or ``"auto"`` (histogram when it
    fits the budget).
    """
    require_nonconstant(f)
    box = box or ResidueBox.full()
    p, m = level.p, level.m
    if method == "auto":
        if hist is not None:
            method = "histogram"
        else:
            budget_ = default_budget() if budget is None else budget
            method = "histogram" if plan_enumeration(f, level, box).points <= budget_ else "lift"
    if method == "histogram":
        hist = _histogram_for(f, level, box, hist, budget, workers)
        v = residue_valuations(hist.residues, level)
        a = sum(int(c) for c, vv in zip(hist.counts, v) if vv == m - 1)
        b = sum(int(c) for c, vv in zip(hist.counts, v) if vv >= m)
    elif method == "lift":
        b = count_vanishing(f, p, m, m, box)
        a = count_vanishing(f, p, m - 1, m, box) - b
    else:
        raise ValueError(f"unknown method {method!r}")
    return ContactCounts(level, box, a, b, method)
