"""Log-canonical thresholds estimated by counting jets, next to the exact values from resolution data.

Run with ``python3 demos/lct_from_jets.py``.
"""

from padic_expsums import lct_from_resolution, lct_jet_estimate, load_builtin, parse_polynomial, sigma_of

cases = [("x", 1, "x1_origin"), ("x^2", 1, "x2_origin"), ("x^4", 1, "x4_origin"), ("x^2+y^3", 2, "cusp_origin")]
primes = (7, 11, 13, 17)

for text, n, builtin in cases:
    est = lct_jet_estimate(parse_polynomial(text, n), primes, 6)
    exact = lct_from_resolution(load_builtin(builtin))
    flag = " (minimum at the largest m tried)" if est.at_truncation else ""
    print(f"{text:8s} jets {est.inf_value:.4f} at m={est.argmin_m}{flag}  exact {exact}  sigma {sigma_of(exact)}")

# The per-level fits behind one estimate.
print()
print(lct_jet_estimate(parse_polynomial("x^2+y^3", 2), primes, 4).to_csv())
