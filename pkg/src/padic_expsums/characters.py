"""Multiplicative characters of F_p^* (conductor 1 on Z_p^*), Gauss sums, and a
Weil-bound checker for one-variable power sums.

Characters are labelled ``(order d, index)`` against the smallest primitive
root ``g``: ``chi(g) = exp(2 pi i index / d)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

from sympy import isprime
from sympy.ntheory import primitive_root as _sympy_primitive_root


def primitive_root(p: int) -> int:
    """Smallest positive primitive root mod ``p`` (``1`` for ``p = 2``)."""
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if p == 2:
        return 1
    return int(_sympy_primitive_root(p))


@lru_cache(maxsize=None)
def discrete_log_table(p: int) -> tuple[int, ...]:
    """``table[u] = log_g(u)`` for ``u`` in ``1..p-1`` (entry 0 unused, set to -1)."""
    g = primitive_root(p)
    table = [-1] * p
    x = 1
    for k in range(p - 1):
        table[x] = k
        x = x * g % p
    return tuple(table)


def _e(x: float) -> complex:
    return cmath.exp(2j * math.pi * x)


@dataclass(frozen=True)
class MultChar:
    p: int
    order: int
    index: int

    def __post_init__(self):
        if self.order < 1 or (self.p - 1) % self.order:
            raise ValueError(f"order {self.order} does not divide p-1 = {self.p - 1}")
        object.__setattr__(self, "index", self.index % self.order)

    @classmethod
    def trivial(cls, p: int) -> "MultChar":
        return cls(p, 1, 0)

    @property
    def label(self) -> tuple[int, int]:
        return (self.order, self.index)

    @property
    def is_trivial(self) -> bool:
        return self.index == 0

    @property
    def exact_order(self) -> int:
        return self.order // math.gcd(self.order, self.index)

    def canonical(self) -> "MultChar":
        """Same character relabelled by its exact order."""
        g = math.gcd(self.order, self.index)
        return MultChar(self.p, self.order // g, self.index // g)

    def inverse(self) -> "MultChar":
        return MultChar(self.p, self.order, -self.index)

    def __call__(self, u: int) -> complex:
        return char_value(self, u)


def char_value(chi: MultChar, u: int) -> complex:
    u %= chi.p
    if u == 0:
        return 0j
    k = discrete_log_table(chi.p)[u]
    return _e(chi.index * k / chi.order)


def characters_of_order(p: int, d: int) -> list[MultChar]:
    """All characters of exact order ``d`` (empty if ``d`` does not divide ``p-1``)."""
    if (p - 1) % d:
        return []
    return [MultChar(p, d, j) for j in range(d) if math.gcd(j, d) == 1]


def gauss_sum(chi: MultChar) -> complex:
    """Normalized conductor-1 Gauss sum ``(1/(p-1)) sum_v chi(v) exp(2 pi i v / p)``."""
    p = chi.p
    return sum(char_value(chi, v) * _e(v / p) for v in range(1, p)) / (p - 1)


@dataclass(frozen=True)
class WeilCheck:
    p: int
    d: int
    xi: int
    sum_magnitude: float
    bound: float
    ok: bool


def weil_power_sum_check(p: int, d: int, xi: int, tol: float = 1e-9) -> WeilCheck:
    """``|sum_{u in F_p^*} e(u^d xi / p)| <= (d-1) sqrt(p) + 1``."""
    if d < 1 or (p - 1) % d:
        raise ValueError(f"d = {d} must divide p - 1 = {p - 1}")
    if not 1 <= xi < p:
        raise ValueError(f"xi = {xi} must lie in [1, p)")
    s = sum(_e(pow(u, d, p) * xi % p / p) for u in range(1, p))
    mag = abs(s)
    bound = (d - 1) * math.sqrt(p) + 1
    return WeilCheck(p, d, xi, mag, bound, mag <= bound + tol)
