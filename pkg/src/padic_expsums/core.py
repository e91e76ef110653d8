"""Exact integer arithmetic on sparse polynomials over Z and on residues mod p^m.

Polynomials are immutable and kept in canonical form: a tuple of
``(coefficient, exponents)`` pairs with distinct exponent vectors, no zero
coefficients, sorted by (total degree, exponents) descending.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from sympy import isprime

Exponents = tuple[int, ...]


class PolynomialSyntaxError(ValueError):
    """Raised by :func:`parse_polynomial`; ``position`` is a 0-based column."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class ConstantPolynomialError(ValueError):
    pass


def _canonical(nvars: int, coeffs: Mapping[Exponents, int]) -> tuple[tuple[int, Exponents], ...]:
    items = [(c, e) for e, c in coeffs.items() if c != 0]
    items.sort(key=lambda t: (sum(t[1]), t[1]), reverse=True)
    return tuple(items)


@dataclass(frozen=True)
class Polynomial:
    nvars: int
    terms: tuple[tuple[int, Exponents], ...]

    def __post_init__(self):
        if self.nvars < 1:
            raise ValueError("nvars must be >= 1")
        seen = set()
        for c, e in self.terms:
            if c == 0:
                raise ValueError("zero coefficient in term list")
            if len(e) != self.nvars or any(k < 0 for k in e):
                raise ValueError(f"bad exponent vector {e!r} for {self.nvars} variables")
            if e in seen:
                raise ValueError(f"duplicate exponent vector {e!r}")
            seen.add(e)

    @classmethod
    def from_dict(cls, nvars: int, coeffs: Mapping[Sequence[int], int]) -> "Polynomial":
        merged: dict[Exponents, int] = {}
        for e, c in coeffs.items():
            e = tuple(int(k) for k in e)
            merged[e] = merged.get(e, 0) + int(c)
        return cls(nvars, _canonical(nvars, merged))

    @classmethod
    def constant(cls, nvars: int, c: int) -> "Polynomial":
        return cls.from_dict(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "Polynomial":
        e = [0] * nvars
        e[i] = 1
        return cls.from_dict(nvars, {tuple(e): 1})

    def as_dict(self) -> dict[Exponents, int]:
        return {e: c for c, e in self.terms}

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return all(sum(e) == 0 for _, e in self.terms)

    @cached_property
    def degree(self) -> int:
        return max((sum(e) for _, e in self.terms), default=0)

    @property
    def min_degree(self) -> int:
        return min((sum(e) for _, e in self.terms), default=0)

    def constant_term(self) -> int:
        return self.as_dict().get((0,) * self.nvars, 0)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        d = self.as_dict()
        for c, e in other.terms:
            d[e] = d.get(e, 0) + c
        return Polynomial(self.nvars, _canonical(self.nvars, d))

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.nvars, tuple((-c, e) for c, e in self.terms))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        d: dict[Exponents, int] = {}
        for c1, e1 in self.terms:
            for c2, e2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                d[e] = d.get(e, 0) + c1 * c2
        return Polynomial(self.nvars, _canonical(self.nvars, d))

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative exponent")
        result = Polynomial.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c: int) -> "Polynomial":
        return Polynomial.from_dict(self.nvars, {e: c * a for a, e in self.terms})

    def partial(self, i: int) -> "Polynomial":
        d = {}
        for c, e in self.terms:
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                d[tuple(e2)] = c * e[i]
        return Polynomial.from_dict(self.nvars, d)

    def substitute_affine(self, shift: Sequence[int], scale: int) -> "Polynomial":
        """Return ``f(shift + scale * x)`` expanded exactly."""
        if len(shift) != self.nvars:
            raise ValueError("dimension mismatch")
        result: dict[Exponents, int] = {}
        # binomial expansion of each factor (shift_i + scale*x_i)^k
        cache: dict[tuple[int, int], list[int]] = {}

        def expansion(i: int, k: int) -> list[int]:
            key = (i, k)
            if key not in cache:
                a = shift[i]
                cache[key] = [math.comb(k, j) * a ** (k - j) * scale**j for j in range(k + 1)]
            return cache[key]

        for c, e in self.terms:
            partial: dict[Exponents, int] = {(): c}
            for i, k in enumerate(e):
                coeffs = expansion(i, k)
                nxt: dict[Exponents, int] = {}
                for pe, pc in partial.items():
                    for j, bc in enumerate(coeffs):
                        if bc:
                            key = pe + (j,)
                            nxt[key] = nxt.get(key, 0) + pc * bc
                partial = nxt
            for pe, pc in partial.items():
                result[pe] = result.get(pe, 0) + pc
        return Polynomial(self.nvars, _canonical(self.nvars, result))

    def evaluate(self, x: Sequence[int]) -> int:
        if len(x) != self.nvars:
            raise ValueError(f"expected {self.nvars} coordinates, got {len(x)}")
        total = 0
        for c, e in self.terms:
            term = c
            for xi, k in zip(x, e):
                if k:
                    term *= xi**k
            total += term
        return total

    def __str__(self) -> str:
        return format_polynomial(self)


def format_polynomial(f: Polynomial) -> str:
    """Canonical text form using variables ``x1 .. xn``; parses back to ``f``."""
    if f.is_zero:
        return "0"
    out = []
    for idx, (c, e) in enumerate(f.terms):
        mono = "*".join(
            f"x{i + 1}" if k == 1 else f"x{i + 1}^{k}" for i, k in enumerate(e) if k
        )
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if idx == 0:
            out.append(body if c > 0 else f"-{body}")
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


_ALIASES = {"x": 0, "y": 1, "z": 2}


class _Parser:
    def __init__(self, text: str, nvars: int):
        self.text = text
        self.nvars = nvars
        self.pos = 0

    def error(self, msg: str, pos: int | None = None):
        raise PolynomialSyntaxError(msg, self.pos if pos is None else pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def uint(self) -> int:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            self.error("expected unsigned integer")
        return int(self.text[start:self.pos])

    def parse(self) -> Polynomial:
        f = self.expr()
        if self.peek():
            self.error(f"unexpected character {self.peek()!r}")
        return f

    def expr(self) -> Polynomial:
        # a leading sign is accepted: "-x^2" reads as (-1)*x^2
        sign = None
        if self.peek() in "+-" and self.peek():
            sign = self.text[self.pos]
            self.pos += 1
        f = self.term()
        if sign == "-":
            f = -f
        while self.peek() in ("+", "-") and self.peek():
            op = self.text[self.pos]
            self.pos += 1
            g = self.term()
            f = f + g if op == "+" else f - g
        return f

    def term(self) -> Polynomial:
        f = self.factor()
        while self.peek() == "*":
            self.pos += 1
            f = f * self.factor()
        return f

    def factor(self) -> Polynomial:
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            if self.peek() == "-":
                self.error("negative exponent")
            base = base ** self.uint()
        return base

    def atom(self) -> Polynomial:
        ch = self.peek()
        start = self.pos
        if ch == "(":
            self.pos += 1
            f = self.expr()
            if self.peek() != ")":
                self.error("expected ')'")
            self.pos += 1
            return f
        if ch.isdigit():
            return Polynomial.constant(self.nvars, self.uint())
        if ch in _ALIASES:
            self.pos += 1
            if ch == "x" and self.pos < len(self.text) and self.text[self.pos].isdigit():
                idx = self.uint() - 1
            else:
                idx = _ALIASES[ch]
            if not 0 <= idx < self.nvars:
                self.error(f"variable index out of range (nvars={self.nvars})", start)
            return Polynomial.variable(self.nvars, idx)
        if not ch:
            self.error("unexpected end of input")
        self.error(f"unexpected character {ch!r}")


def parse_polynomial(text: str, nvars: int) -> Polynomial:
    """Parse integer-coefficient polynomial text in ``x1..xn`` (``x, y, z`` alias ``x1, x2, x3``).

    >>> parse_polynomial("(x - 1)*(x + 1)", 1).terms
    ((1, (2,)), (-1, (0,)))
    """
    if nvars < 1:
        raise ValueError("nvars must be >= 1")
    return _Parser(text, nvars).parse()


def require_nonconstant(f: Polynomial) -> None:
    if f.is_constant:
        raise ConstantPolynomialError(f"polynomial {format_polynomial(f)!r} is constant")


@dataclass(frozen=True)
class PadicLevel:
    p: int
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if not isprime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @property
    def modulus(self) -> int:
        return self.p**self.m


@dataclass(frozen=True)
class ResidueBox:
    """``Full`` is (Z/p^m)^n; ``Shifted`` is y + (pZ/p^m)^n."""

    kind: str = "full"
    y: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in ("full", "shifted"):
            raise ValueError(f"unknown box kind {self.kind!r}")
        object.__setattr__(self, "y", tuple(int(v) for v in self.y))

    @classmethod
    def full(cls) -> "ResidueBox":
        return cls("full")

    @classmethod
    def shifted(cls, y: Iterable[int]) -> "ResidueBox":
        return cls("shifted", tuple(y))

    @classmethod
    def origin(cls, n: int) -> "ResidueBox":
        return cls("shifted", (0,) * n)

    def size(self, level: PadicLevel, n: int) -> int:
        if self.kind == "full":
            return level.p ** (level.m * n)
        return level.p ** ((level.m - 1) * n)

    def base(self, n: int) -> tuple[int, ...]:
        if self.kind == "full":
            return (0,) * n
        if len(self.y) != n:
            raise ValueError(f"base point has {len(self.y)} coordinates, expected {n}")
        return self.y

    def label(self) -> str:
        if self.kind == "full":
            return "full"
        if not any(self.y):
            return "origin"
        return "shifted:" + ",".join(map(str, self.y))


def eval_mod(f: Polynomial, x: Sequence[int], level: PadicLevel) -> int:
    M = level.modulus
    if len(x) != f.nvars:
        raise ValueError(f"expected {f.nvars} coordinates, got {len(x)}")
    total = 0
    for c, e in f.terms:
        term = c % M
        for xi, k in zip(x, e):
            if k:
                term = term * pow(xi, k, M) % M
        total += term
    return total % M


def valuation(z: int, p: int) -> int | None:
    """p-adic valuation of an integer; ``None`` for zero."""
    if z == 0:
        return None
    v = 0
    while z % p == 0:
        z //= p
        v += 1
    return v


def ord_and_ac(z: int, level: PadicLevel) -> tuple[int, int | None]:
    """Valuation and angular component of a residue mod p^m.

    Zero reports valuation ``m`` (meaning ">= m") and angular ``None``.
    """
    p, m = level.p, level.m
    z %= level.modulus
    if z == 0:
        return m, None
    v = valuation(z, p)
    return v, (z // p**v) % p


def poly_content_valuation(f: Polynomial, p: int) -> int | None:
    vals = [valuation(c, p) for c, _ in f.terms]
    return min(vals) if vals else None
