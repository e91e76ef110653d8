"""Exponential sums of small polynomials, computed exactly from value histograms.

Run with ``python3 demos/exact_sums.py``.
"""

from padic_expsums import (
    PadicLevel,
    ResidueBox,
    build_histogram,
    exact_value_if_trivial,
    exp_sum,
    lift_constancy_check,
    orbit_constancy_check,
    parse_polynomial,
)

f = parse_polynomial("x^2+y^3", 2)
print("polynomial:", f)

# On the origin box at level one every point maps to 0, so the sum is p^-n exactly.
for p in (5, 7, 11):
    hist = build_histogram(f, PadicLevel(p, 1), ResidueBox.origin(2))
    print(f"p={p:2d} m=1  origin sum = {exact_value_if_trivial(hist)}")

# Higher levels: the histogram holds counts of every residue of f mod p^m.
p = 7
for m in range(2, 6):
    level = PadicLevel(p, m)
    hist = build_histogram(f, level, ResidueBox.origin(2))
    value = exp_sum(hist)
    print(f"p={p} m={m}  |E| = {value.magnitude:.6e}  distinct residues = {len(hist.as_dict())}")

# The lift counts of nonzero low-valuation residues are constant, so their part of the sum cancels.
level = PadicLevel(p, 4)
lift = lift_constancy_check(f, level, ResidueBox.origin(2))
print(f"lift constancy at p={p} m=4: {lift.holds}, low subsum = {abs(lift.low):.2e}")

orbit = orbit_constancy_check(f, level, ResidueBox.origin(2))
gap = abs(orbit.mid_from_orbits - orbit.mid_direct)
print(f"orbit constancy with d={orbit.d}: {orbit.holds}, middle subsum gap = {gap:.2e}")
