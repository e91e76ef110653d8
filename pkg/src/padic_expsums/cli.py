"""Command-line front end.

Every subcommand resolves its options (flags override ``--config`` JSON, which
overrides defaults), echoes the resolved configuration into the report header,
and writes JSON, CSV or plain text.  Exit codes: 0 success, 1 a check failed,
2 usage or input error, 3 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Sequence

from sympy import isprime, primerange

from .characters import weil_power_sum_check
from .core import (
    ConstantPolynomialError,
    PadicLevel,
    PolynomialSyntaxError,
    ResidueBox,
    format_polynomial,
    parse_polynomial,
    require_nonconstant,
)
from .critical import (
    critical_data_mod_p,
    exact_critical_values,
    find_rational_critical_values,
    min_critical_lct,
    split_exp_sum_by_critical_values,
)
from .expsum import (
    BudgetExceeded,
    build_histogram,
    default_budget,
    exact_value_if_trivial,
    exp_sum,
    lift_constancy_check,
    orbit_constancy_check,
    subsum_decomposition,
)
from .harness import fit_decay_model, sweep_and_fit, variant_box
from .lct import lct_jet_estimate, sigma_of
from .zeta import (
    ResolutionData,
    ResolutionDataError,
    coeff_lattice,
    coeff_series,
    denef_zeta,
    lct_of,
    load_builtin,
    pole_ledger,
    reconstruct,
)

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
TOLERANCE = 1e-9

SCHEMA = {
    "integer": "exact",
    "rational": "string 'num/den', exact",
    "float": f"IEEE double, absolute tolerance {TOLERANCE} unless listed in float_tolerance",
    "complex": "object {re, im} of floats",
    "float_tolerance": {"inf_value": 0.1, "dim_fit": 0.1, "codim": 0.1, "codim_over_m": 0.1},
}


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------- value parsing


def _split(text) -> list[str]:
    return [t.strip() for t in str(text).split(",") if t.strip()]


def parse_int_list(value) -> list[int]:
    """``"2..6"``, ``"2,3,5"`` or a JSON list."""
    if isinstance(value, int):
        return [value]
    if isinstance(value, (list, tuple)):
        return [int(v) for v in value]
    out = []
    for tok in _split(value):
        if ".." in tok:
            a, b = tok.split("..")
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(tok))
    return out


def parse_primes(value) -> list[int]:
    """Like :func:`parse_int_list`, but a range ``a..b`` keeps only its primes."""
    if isinstance(value, str) and ".." in value:
        out = []
        for tok in _split(value):
            if ".." in tok:
                a, b = tok.split("..")
                out.extend(int(q) for q in primerange(int(a), int(b) + 1))
            else:
                out.append(int(tok))
    else:
        out = parse_int_list(value)
    bad = [q for q in out if not isprime(q)]
    if bad:
        raise UsageError(f"not prime: {bad}")
    return sorted(set(out))


def parse_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**6)
    return Fraction(str(value))


def infer_nvars(text: str) -> int:
    n = 1
    for tok in re.findall(r"x(\d+)|\b([xyz])\b|([yz])", text):
        if tok[0]:
            n = max(n, int(tok[0]))
        else:
            n = max(n, "xyz".index(tok[1] or tok[2]) + 1)
    return n


def load_resolution(ref: str) -> ResolutionData:
    if ref.startswith("builtin:"):
        return load_builtin(ref.split(":", 1)[1])
    return ResolutionData.load(ref)


def fraction_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def jsonable(x: Any) -> Any:
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, Fraction):
        return fraction_str(x)
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, float):
        return x
    if isinstance(x, int):
        return int(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "item"):
        return jsonable(x.item())
    raise TypeError(f"cannot serialize {type(x).__name__}")


# ---------------------------------------------------------------- options

# name -> (flag help, default); default None means required unless noted
COMMON = {
    "format": ("output format: json, csv or plain", "json"),
    "budget": ("enumeration budget in points (default from environment)", None),
}

OPTIONS: dict[str, dict[str, tuple[str, Any]]] = {
    "expsum": {
        "poly": ("polynomial, e.g. 'x^2+y^3'", None),
        "nvars": ("number of variables (inferred from the text if omitted)", None),
        "p": ("prime", None),
        "m": ("level m >= 1", None),
        "variant": ("full, origin or shifted", "full"),
        "y": ("base point for the shifted variant, e.g. '1,2'", None),
        "u": ("additive twist u", 1),
        "histogram": ("include the value histogram", False),
    },
    "lemma-check": {
        "poly": ("polynomial (omit to run only the Weil check)", None),
        "nvars": ("number of variables", None),
        "primes": ("primes, e.g. '5..37' or '5,7'", "5..37"),
        "m": ("levels, e.g. '3,4'", "3,4"),
        "variant": ("full, origin or shifted", "origin"),
        "y": ("base point for the shifted variant", None),
        "weil_d": ("exponents d for the power-sum check, e.g. '1..12'", None),
    },
    "zeta": {
        "resolution": ("resolution data JSON path or builtin:<name>", None),
        "p": ("prime", None),
        "chi": ("character as 'order,index'", "1,0"),
        "kmax": ("largest coefficient index", 10),
    },
    "reconstruct": {
        "resolution": ("resolution data JSON path or builtin:<name>", None),
        "poly": ("polynomial", None),
        "nvars": ("number of variables", None),
        "primes": ("primes", "5,7,11,13"),
        "m": ("levels", "2..6"),
        "variant": ("full or origin (must match the resolution data)", "origin"),
        "u": ("additive twist u", 1),
    },
    "lct": {
        "poly": ("polynomial", None),
        "nvars": ("number of variables", None),
        "primes": ("primes for the slope fit", "7,11,13,17"),
        "mmax": ("largest jet level", 6),
        "box": ("origin or full", "origin"),
        "resolution": ("optional resolution data for the exact value", None),
    },
    "critical": {
        "poly": ("polynomial", None),
        "nvars": ("number of variables", None),
        "primes": ("primes", "7"),
        "values": ("rational critical values, e.g. '-2,2'", None),
        "search_bound": ("find critical values over integer points with |x_i| <= bound", None),
        "exact": ("compute all critical values exactly over Q", False),
        "lct_primes": ("primes for the minimum lct over critical values (skipped if unset)", None),
        "m": ("levels for the split (empty to skip)", "2"),
    },
    "verify": {
        "poly": ("polynomial", None),
        "nvars": ("number of variables", None),
        "variant": ("full, origin or shifted", "origin"),
        "y": ("base point for the shifted variant", None),
        "sigma": ("decay exponent, e.g. '1/4'", None),
        "sigma_source": ("explicit, resolution or jet", "explicit"),
        "resolution": ("resolution data (sigma source and reconstruction cross-check)", None),
        "primes": ("primes", "5..37"),
        "m": ("levels", "1..5"),
        "declared_c": ("constant C to test for violations", None),
        "fit_p": ("prime for the model fit (omit to skip)", None),
        "candidates": ("exponents lambda for the model fit, e.g. '1/2,1'", None),
        "betas": ("log-power exponents for the model fit", None),
        "period": ("fit each residue class of m mod period separately (default: lcm of N_i with --resolution, else 1)", None),
    },
}

def _rational_str(v) -> str:
    return fraction_str(parse_rational(v))


def _rational_list(v) -> list[str]:
    items = _split(v) if isinstance(v, str) else list(v)
    return [_rational_str(c) for c in items]


CONVERTERS: dict[str, Callable[[Any], Any]] = {
    "p": int,
    "u": int,
    "kmax": int,
    "mmax": int,
    "period": int,
    "search_bound": int,
    "lct_primes": parse_primes,
    "fit_p": int,
    "primes": parse_primes,
    "m": parse_int_list,
    "values": parse_int_list,
    "weil_d": parse_int_list,
    "y": parse_int_list,
    "betas": parse_int_list,
    "sigma": _rational_str,
    "declared_c": _rational_str,
    "candidates": _rational_list,
    "chi": lambda v: list(parse_int_list(v)),
    "poly": str,
    "resolution": str,
}
SCALAR_M = {"expsum"}

# keys that never reach the echoed config; they do not affect results
UNECHOED = {"config", "output", "workers"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="padic-expsums", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="command")
    for name, opts in OPTIONS.items():
        sp = sub.add_parser(name, help=HANDLERS[name].__doc__.strip().splitlines()[0])
        sp.add_argument("--config", help="RunConfig JSON file; flags override its entries")
        sp.add_argument("--output", help="write the report here instead of stdout")
        sp.add_argument("--workers", type=int, default=1, help="worker threads")
        for key, (help_text, default) in {**opts, **COMMON}.items():
            flag = "--" + key.replace("_", "-")
            if default is False:
                sp.add_argument(flag, action="store_true", default=None, help=help_text)
            else:
                sp.add_argument(flag, dest=key, default=None, help=f"{help_text} [default: {default}]")
    return parser


def resolve_config(command: str, args: argparse.Namespace) -> dict:
    opts = {**OPTIONS[command], **COMMON}
    file_cfg: dict = {}
    if args.config:
        try:
            file_cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(file_cfg, dict):
            raise UsageError("config must be a JSON object")
        file_cfg = {k.replace("-", "_"): v for k, v in file_cfg.items()}
        named = file_cfg.pop("command", command)
        if named != command:
            raise UsageError(f"config is for command {named!r}, not {command!r}")
        unknown = set(file_cfg) - set(opts) - UNECHOED
        if unknown:
            raise UsageError(f"unknown config keys for {command}: {sorted(unknown)}")
    cfg = {"command": command}
    for key, (_, default) in opts.items():
        val = getattr(args, key, None)
        if val is None:
            val = file_cfg.get(key, default)
        if val is not None and val != "":
            conv = int if key == "m" and command in SCALAR_M else CONVERTERS.get(key)
            if conv is not None:
                try:
                    val = conv(val)
                except (TypeError, ValueError, ZeroDivisionError) as exc:
                    raise UsageError(f"bad value for {key}: {val!r} ({exc})") from exc
        cfg[key] = val
    if cfg["format"] not in ("json", "csv", "plain"):
        raise UsageError(f"unknown format {cfg['format']!r}")
    cfg["budget"] = int(cfg["budget"]) if cfg["budget"] is not None else default_budget()
    if "poly" in cfg and cfg["poly"] is not None:
        cfg["nvars"] = int(cfg["nvars"]) if cfg["nvars"] is not None else infer_nvars(str(cfg["poly"]))
    cfg["workers"] = int(file_cfg.get("workers", 1)) if args.workers == 1 else args.workers
    cfg["output"] = args.output or file_cfg.get("output")
    return cfg


def _need(cfg: dict, *keys: str) -> None:
    missing = [k for k in keys if cfg.get(k) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + k.replace("_", "-") for k in missing))


def _poly(cfg: dict):
    _need(cfg, "poly")
    f = parse_polynomial(str(cfg["poly"]), cfg["nvars"])
    require_nonconstant(f)
    return f


def _y(cfg: dict):
    return parse_int_list(cfg["y"]) if cfg.get("y") is not None else None


def _box(cfg: dict, f, key: str = "variant") -> ResidueBox:
    try:
        return variant_box(cfg[key], f.nvars, _y(cfg))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _complex(z: complex) -> dict:
    return {"re": z.real, "im": z.imag}


Result = tuple[dict, tuple[list[str], list[list]] | None, bool]

# ---------------------------------------------------------------- commands


def cmd_expsum(cfg: dict) -> Result:
    """Direct exponential sum with its valuation subsums."""
    f = _poly(cfg)
    _need(cfg, "p", "m")
    level = PadicLevel(int(cfg["p"]), int(cfg["m"]))
    box = _box(cfg, f)
    u = int(cfg["u"])
    hist = build_histogram(f, level, box, budget=cfg["budget"], workers=cfg["workers"])
    val = exp_sum(hist, u)
    exact = exact_value_if_trivial(hist)
    res: dict = {
        "polynomial": format_polynomial(f),
        "box": box.label(),
        "value": _complex(val.value),
        "abs": val.magnitude,
        "exact": exact,
        "support_size": len(hist.residues),
        "points": hist.total,
    }
    if level.m >= 2:
        tri = subsum_decomposition(None, level, hist=hist, u=u)
        res["subsums"] = {
            "low": _complex(tri.low.value),
            "mid": _complex(tri.mid.value),
            "high": _complex(tri.high.value),
        }
    if cfg["histogram"]:
        res["histogram"] = [[int(r), int(c)] for r, c in zip(hist.residues, hist.counts)]
    row = [level.p, level.m, box.label(), val.value.real, val.value.imag, val.magnitude, exact]
    return res, (["p", "m", "box", "re", "im", "abs", "exact"], [row]), True


def cmd_lemma_check(cfg: dict) -> Result:
    """Lift-count constancy, orbit constancy and the Weil power-sum bound."""
    primes = parse_primes(cfg["primes"])
    rows, failures = [], []
    res: dict = {}
    if cfg["poly"] is not None:
        f = _poly(cfg)
        box = _box(cfg, f)
        ms = parse_int_list(cfg["m"])
        if any(m < 2 for m in ms):
            raise UsageError("lemma-check needs m >= 2")
        for p in primes:
            for m in ms:
                level = PadicLevel(p, m)
                hist = build_histogram(f, level, box, budget=cfg["budget"], workers=cfg["workers"])
                lift = lift_constancy_check(None, level, hist=hist) if m >= 3 else None
                orb = orbit_constancy_check(None, level, hist=hist)
                gap = abs(orb.mid_from_orbits - orb.mid_direct) if orb.holds else None
                lift_ok = lift is None or (lift.holds and abs(lift.low) <= TOLERANCE)
                orbit_ok = orb.holds and gap <= TOLERANCE
                if not (lift_ok and orbit_ok):
                    failures.append(p)
                rows.append([
                    p, m,
                    None if lift is None else lift.holds,
                    None if lift is None else abs(lift.low),
                    orb.d, orb.holds, gap,
                ])
        res["polynomial"] = format_polynomial(f)
        res["box"] = box.label()
        res["failing_primes"] = sorted(set(failures))
        res["threshold"] = max(failures) + 1 if failures else min(primes)
    if cfg["weil_d"] is not None:
        ds = parse_int_list(cfg["weil_d"])
        checked, weil_fail, worst = 0, [], 0.0
        for p in primes:
            for d in ds:
                if (p - 1) % d:
                    continue
                for xi in range(1, p):
                    w = weil_power_sum_check(p, d, xi, TOLERANCE)
                    checked += 1
                    worst = max(worst, w.sum_magnitude / w.bound)
                    if not w.ok:
                        weil_fail.append([p, d, xi, w.sum_magnitude, w.bound])
        res["weil"] = {"checked": checked, "worst_ratio": worst, "failures": weil_fail}
        failures.extend(x[0] for x in weil_fail)
    if cfg["poly"] is None and cfg["weil_d"] is None:
        raise UsageError("lemma-check needs --poly, --weil-d, or both")
    cols = ["p", "m", "lift_constancy", "abs_low", "d", "orbit_constancy", "mid_gap"]
    return res, (cols, rows), not failures


def _chi(text) -> tuple[int, int]:
    parts = parse_int_list(text)
    if len(parts) != 2:
        raise UsageError("--chi takes 'order,index'")
    return parts[0], parts[1]


def cmd_zeta(cfg: dict) -> Result:
    """Denef formula, coefficients by series and by lattice sums, candidate poles."""
    _need(cfg, "resolution", "p")
    data = load_resolution(str(cfg["resolution"]))
    p = int(cfg["p"])
    chi = _chi(cfg["chi"])
    kmax = int(cfg["kmax"])
    rf = denef_zeta(data, p, chi)
    rows, ok = [], True
    series = rf.series(kmax)
    for k in range(kmax + 1):
        lat = coeff_lattice(data, p, chi, k)
        ok &= lat == series[k]
        rows.append([k, series[k], lat, lat == series[k]])
    res = {
        "phi_label": data.phi_label,
        "p": p,
        "chi": list(chi),
        "scalar": rf.scalar,
        "numerator": list(rf.numerator),
        "denominator": [list(t) for t in rf.denominator],
        "poles": [[s, mult] for s, mult in pole_ledger(data, p)],
        "lct": lct_of(data),
    }
    return res, (["k", "coeff_series", "coeff_lattice", "equal"], rows), ok


def cmd_reconstruct(cfg: dict) -> Result:
    """Sums rebuilt from zeta coefficients against direct enumeration."""
    _need(cfg, "resolution")
    data = load_resolution(str(cfg["resolution"]))
    f = _poly(cfg)
    box = _box(cfg, f)
    u = int(cfg["u"])
    rows, worst = [], 0.0
    for p in parse_primes(cfg["primes"]):
        for m in parse_int_list(cfg["m"]):
            level = PadicLevel(p, m)
            direct = exp_sum(build_histogram(f, level, box, budget=cfg["budget"], workers=cfg["workers"]), u).value
            rec = reconstruct(data, p, m, u).value
            err = abs(rec - direct)
            worst = max(worst, err)
            rows.append([p, m, direct.real, direct.imag, rec.real, rec.imag, err])
    res = {"polynomial": format_polynomial(f), "box": box.label(), "max_error": worst}
    cols = ["p", "m", "direct_re", "direct_im", "reconstructed_re", "reconstructed_im", "error"]
    return res, (cols, rows), worst <= TOLERANCE


def cmd_lct(cfg: dict) -> Result:
    """Log-canonical threshold from jet counts (and from resolution data if given)."""
    f = _poly(cfg)
    if cfg["box"] not in ("origin", "full"):
        raise UsageError("--box must be origin or full")
    box = ResidueBox.origin(f.nvars) if cfg["box"] == "origin" else ResidueBox.full()
    data = load_resolution(str(cfg["resolution"])) if cfg["resolution"] is not None else None
    est = lct_jet_estimate(
        f, parse_primes(cfg["primes"]), int(cfg["mmax"]), box, resolution=data, budget=cfg["budget"]
    )
    exact = est.resolution_value
    res = {
        "polynomial": format_polynomial(f),
        "box": box.label(),
        "inf_value": est.inf_value,
        "argmin_m": est.argmin_m,
        "at_truncation": est.at_truncation,
        "resolution_lct": exact,
        "sigma": sigma_of(exact) if exact is not None else sigma_of(est.inf_value),
        "sigma_source": "resolution" if exact is not None else "jet",
    }
    rows = []
    for m, fit in sorted(est.per_m.items()):
        for p in est.primes:
            rows.append([m, p, fit.counts[p], fit.dim, fit.codim, fit.ratio])
    return res, (["m", "p", "count", "dim_fit", "codim", "codim_over_m"], rows), True


def cmd_critical(cfg: dict) -> Result:
    """Critical data mod p, genericity conditions, and the split by critical values."""
    f = _poly(cfg)
    if cfg["values"] is not None:
        values = parse_int_list(cfg["values"])
        source = "supplied"
    elif cfg["search_bound"] is not None:
        values = find_rational_critical_values(f, int(cfg["search_bound"]))
        source = "search"
    elif cfg["exact"]:
        exact = exact_critical_values(f)
        # only integral values can be reduced mod every p
        values = [int(z) for z in exact.rational if z.denominator == 1]
        source = "exact"
    else:
        values, source = None, "none"
    ms = parse_int_list(cfg["m"]) if cfg["m"] not in (None, "") else []
    reports, rows, ok = [], [], True
    for p in parse_primes(cfg["primes"]):
        rep = critical_data_mod_p(f, p, values, budget=cfg["budget"])
        reports.append({
            "p": p,
            "crit_points": rep.crit_points_mod_p,
            "crit_values": rep.crit_values_mod_p,
            "checks": rep.condition_checks,
            "failures": rep.failures,
        })
        for m in ms:
            try:
                split = split_exp_sum_by_critical_values(
                    f, PadicLevel(p, m), values or [], budget=cfg["budget"], workers=cfg["workers"]
                )
            except ValueError as exc:
                rows.append([p, m, None, None, None, str(exc)])
                continue
            ok &= split.residual <= TOLERANCE
            pieces = sum(v for _, v, _ in split.pieces)
            rows.append([p, m, abs(split.total), abs(split.remainder), split.residual, ""])
            reports[-1].setdefault("splits", []).append({
                "m": m,
                "total": split.total,
                "pieces": [{"z": z, "partial": v, "shifted": s} for z, v, s in split.pieces],
                "pieces_sum": pieces,
                "remainder": split.remainder,
                "residual": split.residual,
            })
    res = {"polynomial": format_polynomial(f), "values": values, "values_source": source, "per_prime": reports}
    if cfg["exact"] or cfg["lct_primes"] is not None:
        exact = exact_critical_values(f)
        res["exact_values"] = {"rational": exact.rational, "unsupported": exact.unsupported}
    if cfg["lct_primes"] is not None:
        mins = min_critical_lct(f, cfg["lct_primes"])
        res["min_lct"] = {
            "value": mins.value,
            "per_value": [[z, v] for z, v in mins.per_value.items()],
            "note": "" if mins.values.complete else "critical values outside Q are unsupported; supply sigma explicitly",
        }
    return res, (["p", "m", "abs_total", "abs_remainder", "identity_residual", "note"], rows), ok


def cmd_verify(cfg: dict) -> Result:
    """Bound sweep over a (p, m) grid with an optional decay-model fit."""
    f = _poly(cfg)
    data = load_resolution(str(cfg["resolution"])) if cfg["resolution"] is not None else None
    primes = parse_primes(cfg["primes"])
    ms = parse_int_list(cfg["m"])
    src = cfg["sigma_source"]
    if src == "explicit":
        _need(cfg, "sigma")
        sigma = parse_rational(cfg["sigma"])
    elif src == "resolution":
        if data is None:
            raise UsageError("sigma_source 'resolution' needs --resolution")
        sigma = sigma_of(lct_of(data))
    elif src == "jet":
        origin = ResidueBox.origin(f.nvars)
        sigma = sigma_of(lct_jet_estimate(f, primes, max(ms), origin, budget=cfg["budget"]).inf_value)
    else:
        raise UsageError(f"unknown sigma source {src!r}")
    declared = float(parse_rational(cfg["declared_c"])) if cfg["declared_c"] is not None else None
    try:
        rep = sweep_and_fit(
            f, cfg["variant"], sigma, primes, ms, _y(cfg),
            declared_c=declared, resolution=data, budget=cfg["budget"], workers=cfg["workers"],
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    res = rep.summary()
    if cfg["fit_p"] is not None:
        if cfg["candidates"] is not None:
            cands = [parse_rational(c) for c in cfg["candidates"]]
        elif data is not None:
            # a pole at s = -nu/N contributes p^(-m nu/N)
            cands = [-s for s, _ in pole_ledger(data)]
        else:
            raise UsageError("the model fit needs --candidates or --resolution")
        if cfg["period"] is not None:
            period = int(cfg["period"])
        elif data is not None:
            period = math.lcm(*(c.N for c in data.components))
        else:
            period = 1
        betas = parse_int_list(cfg["betas"]) if cfg["betas"] is not None else None
        fit = fit_decay_model(
            f, cfg["variant"], int(cfg["fit_p"]), ms, cands,
            betas=betas, period=period, y=_y(cfg), budget=cfg["budget"],
        )
        res["model_fit"] = {
            "p": fit.p,
            "period": fit.period,
            "terms": [
                {"residue_class": t.residue_class, "lambda": t.lam, "beta": t.beta, "coefficient": t.coefficient}
                for t in fit.terms
            ],
            "relative_residual": fit.relative_residual,
            "flagged": fit.flagged,
        }
    bad = {(e.p, e.m) for e in rep.violations}
    rows = [[e.p, e.m, e.magnitude, e.ratio, (e.p, e.m) in bad, e.reconstruction_error] for e in rep.grid]
    cols = ["p", "m", "abs_E", "bound_ratio", "violation", "reconstruction_error"]
    return res, (cols, rows), not rep.violations


HANDLERS: dict[str, Callable[[dict], Result]] = {
    "expsum": cmd_expsum,
    "lemma-check": cmd_lemma_check,
    "zeta": cmd_zeta,
    "reconstruct": cmd_reconstruct,
    "lct": cmd_lct,
    "critical": cmd_critical,
    "verify": cmd_verify,
}

# ---------------------------------------------------------------- rendering


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return fraction_str(v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(cfg: dict, result: dict, table, ok: bool) -> str:
    echo = {k: v for k, v in cfg.items() if k not in UNECHOED}
    fmt = cfg["format"]
    if fmt == "json":
        doc = {"config": echo, "schema": SCHEMA, "status": "ok" if ok else "check_failed", "result": result}
        if table is not None:
            doc["table"] = {"columns": table[0], "rows": table[1]}
        return json.dumps(jsonable(doc), indent=2) + "\n"
    header = ["# config: " + json.dumps(jsonable(echo), sort_keys=True), "# status: " + ("ok" if ok else "check_failed")]
    if fmt == "csv":
        for k, v in result.items():
            if not isinstance(v, (list, dict)):
                header.append(f"# {k}: {_cell(v)}")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if table is not None:
            w.writerow(table[0])
            w.writerows([[_cell(c) for c in r] for r in table[1]])
        return "\n".join(header) + "\n" + buf.getvalue()
    lines = header + [f"{k}: {json.dumps(jsonable(v))}" for k, v in result.items()]
    if table is not None:
        cells = [table[0]] + [[_cell(c) for c in r] for r in table[1]]
        widths = [max(len(r[i]) for r in cells) for i in range(len(table[0]))]
        lines += ["  ".join(c.rjust(wd) for c, wd in zip(r, widths)) for r in cells]
    return "\n".join(lines) + "\n"


def _error(code: int, kind: str, message: str) -> int:
    print(json.dumps({"error": {"code": code, "kind": kind, "message": message}}), file=sys.stderr)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    if argv and argv[0] not in HANDLERS and "--config" in argv:
        # a config naming its own command may be passed without a subcommand
        try:
            path = argv[argv.index("--config") + 1]
            named = json.loads(Path(path).read_text()).get("command")
        except (IndexError, OSError, json.JSONDecodeError, AttributeError) as exc:
            return _error(EXIT_USAGE, "usage", f"cannot read config: {exc}")
        if named not in HANDLERS:
            return _error(EXIT_USAGE, "usage", f"config names no known command: {named!r}")
        argv = [named] + argv
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else _error(EXIT_USAGE, "usage", "invalid arguments")
    if args.command is None:
        parser.print_help(sys.stderr)
        return _error(EXIT_USAGE, "usage", "no command given")
    try:
        cfg = resolve_config(args.command, args)
        result, table, ok = HANDLERS[args.command](cfg)
        text = render(cfg, result, table, ok)
    except BudgetExceeded as exc:
        return _error(EXIT_BUDGET, "budget", str(exc))
    except ConstantPolynomialError as exc:
        return _error(EXIT_USAGE, "constant_polynomial", str(exc))
    except PolynomialSyntaxError as exc:
        return _error(EXIT_USAGE, "syntax", str(exc))
    except ResolutionDataError as exc:
        return _error(EXIT_USAGE, "resolution_data", str(exc))
    except (UsageError, ValueError, TypeError, OSError) as exc:
        return _error(EXIT_USAGE, "usage", str(exc))
    if cfg["output"]:
        Path(cfg["output"]).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
