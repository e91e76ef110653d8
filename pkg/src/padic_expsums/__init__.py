"""Exact enumeration of p-adic exponential sums and the tools around them.

Histograms of ``f mod p^m`` over residue boxes are the source of truth; sums,
subsums, contact counts and lemma checks are all read off them.  Igusa zeta
functions are built exactly from supplied resolution data and used to rebuild
the sums independently.
"""

from .characters import (
    MultChar,
    char_value,
    characters_of_order,
    gauss_sum,
    primitive_root,
    weil_power_sum_check,
)
from .core import (
    ConstantPolynomialError,
    PadicLevel,
    Polynomial,
    PolynomialSyntaxError,
    ResidueBox,
    eval_mod,
    format_polynomial,
    ord_and_ac,
    parse_polynomial,
    valuation,
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
    ValueHistogram,
    build_histogram,
    contact_counts,
    exact_value_if_trivial,
    exp_sum,
    lift_constancy_check,
    naive_exp_sum,
    naive_histogram,
    orbit_constancy_check,
    subsum_decomposition,
)
from .harness import BoundReport, fit_decay_model, sweep_and_fit
from .lct import lct_from_resolution, lct_jet_estimate, sigma_of
from .zeta import (
    ResolutionData,
    ResolutionDataError,
    coeff_lattice,
    coeff_series,
    denef_zeta,
    load_builtin,
    monomial_resolution_data,
    pole_ledger,
    reconstruct,
    reconstruct_exp_sum,
)

__all__ = [name for name in dir() if not name.startswith("_")]
