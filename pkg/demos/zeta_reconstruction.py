"""Rebuilding exponential sums from zeta-function data and checking them against enumeration.

Run with ``python3 demos/zeta_reconstruction.py``.
"""

from padic_expsums import (
    PadicLevel,
    ResidueBox,
    build_histogram,
    coeff_lattice,
    denef_zeta,
    exp_sum,
    load_builtin,
    parse_polynomial,
    pole_ledger,
    reconstruct,
)

data = load_builtin("x2_full")
p = 7
zeta = denef_zeta(data, p)
print("zeta of x^2 at p=7, first coefficients:", [str(c) for c in zeta.series(6)])
print("same coefficients by lattice sums:    ", [str(coeff_lattice(data, p, k=k)) for k in range(7)])
print("candidate poles:", [(str(s), mult) for s, mult in pole_ledger(data, p)])

f = parse_polynomial("x^2", 1)
for m in range(2, 6):
    rec = reconstruct(data, p, m)
    direct = exp_sum(build_histogram(f, PadicLevel(p, m), ResidueBox.full())).value
    print(
        f"m={m}  trivial part {str(rec.trivial_part):>10}  characters {len(rec.character_parts)}"
        f"  |reconstructed - direct| = {abs(rec.value - direct):.1e}"
    )

# The cusp data carries only the trivial character. Where an order-2 character is required, reconstruction refuses.
cusp = load_builtin("cusp_origin")
try:
    reconstruct(cusp, 5, 3)
except ValueError as err:
    print("cusp at p=5:", err)
