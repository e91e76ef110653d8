"""Igusa local zeta functions from resolution numerical data (Denef's formula),
exact coefficient extraction, candidate poles, and reconstruction of
exponential sums from zeta coefficients.

All arithmetic is exact (:class:`fractions.Fraction`).  The data describing a
resolution -- numerical data ``(N_i, nu_i)`` and the stratum constants
``c_{I,Phi,chi}`` -- are inputs; nothing here computes a resolution.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Callable, Iterator, Sequence

from .characters import MultChar, char_value, characters_of_order, gauss_sum

TRIVIAL = (1, 0)


class ResolutionDataError(ValueError):
    """Invalid resolution data; ``field`` names the offending entry."""

    def __init__(self, field_path: str, message: str):
        super().__init__(f"{field_path}: {message}")
        self.field = field_path


def canonical_label(order: int, index: int) -> tuple[int, int]:
    index %= order
    g = math.gcd(order, index)
    return (order // g, index // g)


@dataclass(frozen=True)
class Component:
    id: int
    N: int
    nu: int
    meets_origin: bool | None = None

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.nu, self.N)


@dataclass(frozen=True)
class CountSpec:
    """A stratum constant for one character: a fixed integer or ``a*p + b``."""

    order: int
    index: int
    value: int | None = None
    affine: tuple[int, int] | None = None

    def at(self, p: int) -> int:
        if self.affine is not None:
            a, b = self.affine
            return a * p + b
        return self.value

    @property
    def label(self) -> tuple[int, int]:
        return canonical_label(self.order, self.index)

    def identically_zero(self) -> bool:
        if self.affine is not None:
            return self.affine == (0, 0)
        return self.value == 0


@dataclass(frozen=True)
class Stratum:
    I: tuple[int, ...]
    counts: tuple[CountSpec, ...]


@dataclass(frozen=True)
class ResolutionData:
    n: int
    components: tuple[Component, ...]
    strata: tuple[Stratum, ...]
    phi_label: str = ""
    good_reduction_regime: bool = True

    def __post_init__(self):
        self.validate_structure()

    def component(self, cid: int) -> Component:
        return self._by_id[cid]

    @property
    def _by_id(self) -> dict[int, Component]:
        return {c.id: c for c in self.components}

    def validate_structure(self) -> None:
        if self.n < 1:
            raise ResolutionDataError("n", "ambient dimension must be >= 1")
        ids = set()
        for k, c in enumerate(self.components):
            if c.id in ids:
                raise ResolutionDataError(f"components[{k}].id", f"duplicate id {c.id}")
            ids.add(c.id)
            if c.N < 1:
                raise ResolutionDataError(f"components[{k}].N", f"must be >= 1, got {c.N}")
            if c.nu < 1:
                raise ResolutionDataError(f"components[{k}].nu", f"must be >= 1, got {c.nu}")
        seen = set()
        for k, s in enumerate(self.strata):
            key = tuple(sorted(s.I))
            if key in seen:
                raise ResolutionDataError(f"strata[{k}].I", f"duplicate subset {list(key)}")
            if len(set(s.I)) != len(s.I):
                raise ResolutionDataError(f"strata[{k}].I", "repeated component id")
            seen.add(key)
            for i in s.I:
                if i not in ids:
                    raise ResolutionDataError(f"strata[{k}].I", f"unknown component id {i}")
            labels = set()
            for j, cs in enumerate(s.counts):
                if cs.order < 1:
                    raise ResolutionDataError(f"strata[{k}].counts[{j}].order", "must be >= 1")
                if (cs.value is None) == (cs.affine is None):
                    raise ResolutionDataError(
                        f"strata[{k}].counts[{j}]", "exactly one of value / affine is required"
                    )
                if cs.label in labels:
                    raise ResolutionDataError(
                        f"strata[{k}].counts[{j}]", f"duplicate character {cs.label}"
                    )
                labels.add(cs.label)
                d = cs.label[0]
                if not cs.identically_zero():
                    bad = [i for i in s.I if self._by_id[i].N % d]
                    if bad:
                        raise ResolutionDataError(
                            f"strata[{k}].counts[{j}]",
                            f"character of order {d} has nonzero count but {d} does not divide "
                            f"N_{bad[0]} = {self._by_id[bad[0]].N}",
                        )
                    if len(s.I) > self.n:
                        raise ResolutionDataError(
                            f"strata[{k}].I", f"#I = {len(s.I)} exceeds n = {self.n} with nonzero count"
                        )

    def validate_at(self, p: int) -> None:
        for k, s in enumerate(self.strata):
            for j, cs in enumerate(s.counts):
                if cs.label == TRIVIAL and cs.at(p) < 0:
                    raise ResolutionDataError(
                        f"strata[{k}].counts[{j}]", f"trivial-character count is negative at p={p}"
                    )

    def character_labels(self) -> set[tuple[int, int]]:
        return {cs.label for s in self.strata for cs in s.counts}

    def counts_for(self, label: tuple[int, int], p: int) -> list[tuple[tuple[int, ...], int]]:
        label = canonical_label(*label)
        out = []
        for s in self.strata:
            for cs in s.counts:
                if cs.label == label:
                    c = cs.at(p)
                    if c:
                        out.append((tuple(s.I), c))
        return out

    # JSON ------------------------------------------------------------------

    def to_dict(self) -> dict:
        comps = []
        for c in self.components:
            d = {"id": c.id, "N": c.N, "nu": c.nu}
            if c.meets_origin is not None:
                d["meets_origin"] = c.meets_origin
            comps.append(d)
        strata = []
        for s in self.strata:
            counts = []
            for cs in s.counts:
                d = {"order": cs.order, "index": cs.index}
                if cs.affine is not None:
                    d["affine"] = {"a": cs.affine[0], "b": cs.affine[1]}
                else:
                    d["value"] = cs.value
                counts.append(d)
            strata.append({"I": list(s.I), "counts": counts})
        return {
            "n": self.n,
            "components": comps,
            "strata": strata,
            "phi_label": self.phi_label,
            "good_reduction_regime": self.good_reduction_regime,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "ResolutionData":
        try:
            comps = tuple(
                Component(int(c["id"]), int(c["N"]), int(c["nu"]), c.get("meets_origin"))
                for c in d["components"]
            )
            strata = []
            for s in d["strata"]:
                counts = []
                for cs in s["counts"]:
                    aff = cs.get("affine")
                    counts.append(
                        CountSpec(
                            int(cs["order"]),
                            int(cs["index"]),
                            None if "value" not in cs else int(cs["value"]),
                            None if aff is None else (int(aff["a"]), int(aff["b"])),
                        )
                    )
                strata.append(Stratum(tuple(int(i) for i in s["I"]), tuple(counts)))
            return cls(
                int(d["n"]),
                comps,
                tuple(strata),
                d.get("phi_label", ""),
                bool(d.get("good_reduction_regime", True)),
            )
        except KeyError as exc:
            raise ResolutionDataError(str(exc.args[0]), "missing field") from None

    @classmethod
    def from_json(cls, text: str) -> "ResolutionData":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path: str | Path) -> "ResolutionData":
        return cls.from_json(Path(path).read_text())

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())


def builtin_names() -> list[str]:
    """Names of the resolution data files shipped with the package."""
    return sorted(p.name[:-5] for p in resources.files(__package__).joinpath("data").iterdir() if p.name.endswith(".json"))


def load_builtin(name: str) -> ResolutionData:
    """Load a shipped fixture such as ``"x2_origin"`` or ``"cusp_origin"``."""
    if name not in builtin_names():
        raise ValueError(f"unknown builtin resolution data {name!r}; available: {builtin_names()}")
    return ResolutionData.from_json(resources.files(__package__).joinpath("data", f"{name}.json").read_text())


def monomial_resolution_data(k: int, box: str = "full") -> ResolutionData:
    """Resolution data of ``x^k`` (n = 1): the identity already resolves it.

    ``box`` is ``"full"`` (Phi = 1 on Z_p) or ``"origin"`` (Phi = 1 on pZ_p).
    Off the divisor the unit is ``a^k`` itself, so the empty stratum carries
    ``p - 1`` exactly for the characters with ``chi^k`` trivial; at the origin
    the unit is 1.
    """
    if box not in ("full", "origin"):
        raise ValueError(f"unknown box {box!r}")
    labels = [(d, j) for d in range(1, k + 1) if k % d == 0 for j in range(d) if math.gcd(j, d) == 1]
    strata = []
    if box == "full":
        strata.append(Stratum((), tuple(CountSpec(d, j, affine=(1, -1)) for d, j in labels)))
    strata.append(Stratum((1,), tuple(CountSpec(d, j, value=1) for d, j in labels)))
    return ResolutionData(
        1,
        (Component(1, k, 1, True),),
        tuple(strata),
        phi_label=f"x^{k}, {box} box",
        good_reduction_regime=True,
    )


# Rational functions in t -----------------------------------------------------

def _poly_mul(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_add(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] += x
    for i, x in enumerate(b):
        out[i] += x
    return out


def _trim(a: list[Fraction]) -> list[Fraction]:
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return a


def _factor_poly(p: int, N: int, nu: int) -> list[Fraction]:
    f = [Fraction(0)] * (N + 1)
    f[0] = Fraction(1)
    f[N] = -Fraction(1, p**nu)
    return f


@dataclass(frozen=True)
class RationalFunctionT:
    """``numerator(t) / (scalar * prod (1 - p^{-nu} t^N)^mult)``, kept in factored form."""

    p: int
    numerator: tuple[Fraction, ...]
    denominator: tuple[tuple[int, int, int], ...]
    scalar: Fraction = Fraction(1)

    def denominator_poly(self) -> list[Fraction]:
        out = [Fraction(self.scalar)]
        for N, nu, mult in self.denominator:
            for _ in range(mult):
                out = _poly_mul(out, _factor_poly(self.p, N, nu))
        return out

    @property
    def numerator_degree(self) -> int:
        nz = [i for i, c in enumerate(self.numerator) if c]
        return nz[-1] if nz else -1

    @property
    def denominator_degree(self) -> int:
        return sum(N * mult for N, _, mult in self.denominator)

    def evaluate(self, t: Fraction | int) -> Fraction:
        t = Fraction(t)
        num = sum((c * t**i for i, c in enumerate(self.numerator)), Fraction(0))
        den = Fraction(self.scalar)
        for N, nu, mult in self.denominator:
            den *= (1 - t**N / Fraction(self.p**nu)) ** mult
        if den == 0:
            raise ZeroDivisionError("t is a pole")
        return num / den

    def series(self, k: int) -> list[Fraction]:
        """Taylor coefficients at t = 0 up to ``t^k``."""
        D = self.denominator_poly()
        inv = [Fraction(0)] * (k + 1)
        inv[0] = 1 / D[0]
        for j in range(1, k + 1):
            acc = Fraction(0)
            for i in range(1, min(j, len(D) - 1) + 1):
                if D[i]:
                    acc += D[i] * inv[j - i]
            inv[j] = -acc / D[0]
        out = [Fraction(0)] * (k + 1)
        for i, a in enumerate(self.numerator):
            if a and i <= k:
                for j in range(k + 1 - i):
                    out[i + j] += a * inv[j]
        return out


def coeff_series(rf: RationalFunctionT, k: int) -> Fraction:
    if k < 0:
        raise ValueError("k must be >= 0")
    return rf.series(k)[k]


def _character_or_error(label: tuple[int, int], p: int) -> tuple[int, int]:
    d, j = canonical_label(*label)
    if (p - 1) % d:
        raise ValueError(f"no character of order {d} mod p={p}")
    return d, j


def denef_zeta(data: ResolutionData, p: int, chi: tuple[int, int] = TRIVIAL) -> RationalFunctionT:
    """``p^{-n} sum_I c_{I,chi} prod_{i in I} (p-1) p^{-nu_i} t^{N_i} / (1 - p^{-nu_i} t^{N_i})``.

    Only subsets with ``d | N_i`` for every member contribute; the result is
    combined over the least common factored denominator.
    """
    data.validate_at(p)
    d, _ = label = _character_or_error(chi, p)
    comps = data._by_id
    terms = []
    for I, c in data.counts_for(label, p):
        if all(comps[i].N % d == 0 for i in I):
            terms.append((I, c))
    mult: dict[tuple[int, int], int] = {}
    for I, _ in terms:
        local: dict[tuple[int, int], int] = {}
        for i in I:
            key = (comps[i].N, comps[i].nu)
            local[key] = local.get(key, 0) + 1
        for key, v in local.items():
            mult[key] = max(mult.get(key, 0), v)
    numerator: list[Fraction] = [Fraction(0)]
    pn = Fraction(1, p**data.n)
    for I, c in terms:
        coeff = pn * c * (p - 1) ** len(I)
        deg = 0
        missing = dict(mult)
        for i in I:
            comp = comps[i]
            coeff /= p**comp.nu
            deg += comp.N
            missing[(comp.N, comp.nu)] -= 1
        poly = [Fraction(0)] * deg + [coeff]
        for (N, nu), k in missing.items():
            for _ in range(k):
                poly = _poly_mul(poly, _factor_poly(p, N, nu))
        numerator = _poly_add(numerator, poly)
    den = tuple(sorted((N, nu, k) for (N, nu), k in mult.items() if k))
    return RationalFunctionT(p, tuple(_trim(numerator)), den)


def lattice_points(Ns: Sequence[int], total: int, exact: bool = True) -> Iterator[tuple[int, ...]]:
    """``(a_i) in N^{#I}`` with ``sum N_i (a_i + 1) == total`` (or ``<= total``)."""
    if not Ns:
        if total == 0 or (not exact and total >= 0):
            yield ()
        return
    N0, rest = Ns[0], Ns[1:]
    min_rest = sum(rest)
    a = 0
    while N0 * (a + 1) + min_rest <= total:
        for tail in lattice_points(rest, total - N0 * (a + 1), exact):
            yield (a,) + tail
        a += 1


def _lattice_coeff(data: ResolutionData, p: int, chi, k: int, exact: bool) -> Fraction:
    data.validate_at(p)
    d, _ = label = _character_or_error(chi, p)
    comps = data._by_id
    total = Fraction(0)
    for I, c in data.counts_for(label, p):
        if not all(comps[i].N % d == 0 for i in I):
            continue
        Ns = [comps[i].N for i in I]
        nus = [comps[i].nu for i in I]
        inner = Fraction(0)
        for a in lattice_points(Ns, k, exact):
            inner += Fraction(1, p ** sum(nu * (ai + 1) for nu, ai in zip(nus, a)))
        total += c * (p - 1) ** len(I) * inner
    return total / p**data.n


def coeff_lattice(data: ResolutionData, p: int, chi=TRIVIAL, k: int = 0) -> Fraction:
    """Coefficient of ``t^k`` by summing over lattice points ``sum N_i (a_i+1) = k``."""
    return _lattice_coeff(data, p, chi, k, exact=True)


def coeff_truncated_cumulative(data: ResolutionData, p: int, chi=TRIVIAL, k: int = 0) -> Fraction:
    """Coefficient of ``t^k`` in ``Z / (1 - t)``: lattice points with ``sum N_i (a_i+1) <= k``."""
    return _lattice_coeff(data, p, chi, k, exact=False)


@dataclass(frozen=True)
class Reconstruction:
    p: int
    m: int
    u: int
    trivial_part: Fraction
    character_parts: dict[tuple[int, int], complex] = field(default_factory=dict)

    @property
    def value(self) -> complex:
        return complex(float(self.trivial_part)) + sum(self.character_parts.values(), 0j)


def required_characters(data: ResolutionData, p: int) -> list[MultChar]:
    """Nontrivial conductor-1 characters whose order divides some ``N_i`` (and ``p - 1``)."""
    orders = set()
    for c in data.components:
        for d in range(2, c.N + 1):
            if c.N % d == 0 and (p - 1) % d == 0:
                orders.add(d)
    return [chi for d in sorted(orders) for chi in characters_of_order(p, d)]


def reconstruct(data: ResolutionData, p: int, m: int, u: int = 1) -> Reconstruction:
    if m < 2:
        raise ValueError("reconstruction needs m >= 2")
    if not data.good_reduction_regime:
        raise ResolutionDataError("good_reduction_regime", "data is not flagged as good reduction")
    for c in data.components:
        if c.N % p == 0:
            raise ResolutionDataError("components", f"p={p} divides N_{c.id} = {c.N}")
    if u % p == 0:
        raise ValueError("u must be a unit")
    data.validate_at(p)
    triv_rf = denef_zeta(data, p, TRIVIAL)
    z0 = triv_rf.evaluate(1)
    kernel = -coeff_lattice(data, p, TRIVIAL, m - 1) / (p - 1) - coeff_truncated_cumulative(
        data, p, TRIVIAL, m - 1
    )
    present = data.character_labels()
    parts = {}
    for chi in required_characters(data, p):
        label = canonical_label(*chi.label)
        if label not in present:
            raise ResolutionDataError(
                "strata", f"missing counts for character {label} (order {label[0]}) at p={p}"
            )
        coeff = coeff_lattice(data, p, label, m - 1)
        if coeff:
            parts[label] = gauss_sum(chi.inverse()) * char_value(chi, u) * float(coeff)
    return Reconstruction(p, m, u, z0 + kernel, parts)


def reconstruct_exp_sum(data: ResolutionData, p: int, m: int, u: int = 1) -> complex:
    """Exponential sum ``E_Phi(u p^{-m})`` from the zeta data.

    Uses the kernel identity ``(t-p)/((p-1)(1-t)) = -1/(p-1) - 1/(1-t)`` for
    the trivial character and conductor-1 Gauss sums for the rest.
    """
    return reconstruct(data, p, m, u).value


def pole_ledger(data: ResolutionData, p: int | None = None) -> list[tuple[Fraction, int]]:
    """Candidate real parts ``-nu/N`` with multiplicities, plus ``-1`` from the kernel."""
    comps = data._by_id
    mult: dict[Fraction, int] = {}
    for s in data.strata:
        if not s.I:
            continue
        nonzero = any((cs.at(p) != 0) if p is not None else not cs.identically_zero() for cs in s.counts)
        if not nonzero:
            continue
        local: dict[Fraction, int] = {}
        for i in s.I:
            r = -comps[i].ratio
            local[r] = local.get(r, 0) + 1
        for r, k in local.items():
            mult[r] = max(mult.get(r, 0), k)
    mult[Fraction(-1)] = max(mult.get(Fraction(-1), 0), 1)
    return sorted(mult.items(), key=lambda t: t[0], reverse=True)


def lct_of(data: ResolutionData, fiber_filter: Callable[[Component], bool] | None = None) -> Fraction:
    """``min nu_i / N_i`` over the components passing ``fiber_filter``
    (default: those flagged ``meets_origin``)."""
    if fiber_filter is None:
        fiber_filter = lambda c: bool(c.meets_origin)  # noqa: E731
    ratios = [c.ratio for c in data.components if fiber_filter(c)]
    if not ratios:
        raise ValueError("no component passes the fiber filter")
    return min(ratios)
