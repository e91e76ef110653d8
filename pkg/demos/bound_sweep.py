"""Sweeping |E| * m^(1-n) * p^(m sigma) over a grid of primes and levels to fit the implied constant.

Run with ``python3 demos/bound_sweep.py``.
"""

from fractions import Fraction

from sympy import primerange

from padic_expsums import fit_decay_model, parse_polynomial, sweep_and_fit

primes = list(primerange(5, 38))

for text, n, sigma in [("x^4", 1, Fraction(1, 4)), ("x^2*y^2", 2, Fraction(1, 2))]:
    f = parse_polynomial(text, n)
    rep = sweep_and_fit(f, "origin", sigma, primes, range(1, 6))
    check = sweep_and_fit(f, "origin", sigma, primes, range(1, 6), declared_c=2 * rep.c_fit)
    print(
        f"{text:8s} sigma={sigma}  C_fit={rep.c_fit:.4f}  top half={rep.c_fit_top_half:.4f}"
        f"  stable from p={rep.stable_from}  violations at 2*C_fit: {len(check.violations)}"
    )

# A closer look at one prime: E is a short combination of m^beta p^(-lambda m) terms.
fit = fit_decay_model(parse_polynomial("x^4", 1), "origin", 5, range(2, 14), [Fraction(1, 4)], period=4)
print(f"\nx^4 at p=5 with period 4: relative residual {fit.relative_residual:.1e}")
for t in fit.terms:
    print(f"  m = {t.residue_class} mod 4  lambda={t.lam}  beta={t.beta}  coefficient {t.coefficient:+.6f}")
