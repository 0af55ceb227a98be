"""Values of indefinite quadratic forms at integral and S-integral points,
flows on spaces of unimodular lattices, and exact symmetric-pair checks.

Exact inputs stay exact: pass strings ("1e-3", "2/3", "1/2+3/4*sqrt(2)") or
ints where the comparison semantics matter; Python floats become 53-bit
float scalars.
"""

from ._core import (
    ContinuedFraction,
    Error,
    Form,
    Lattice,
    OrbitSeries,
    ParseError,
    QuadraticIrrational,
    Scalar,
    ViolationError,
    __version__,
    approx_value,
    cf_expand,
    complete_to_unimodular,
    convergents,
    counterexample_min,
    enumerate_band,
    equidistribution_gap,
    find_small_value,
    flow_orbit,
    haar_sample,
    is_isotropic_padic,
    is_primitive_tuple,
    liouville_constant_estimate,
    pair_difference_search,
    poly_divergence_eta,
    primitive_tuple_approx,
    rationality,
    s_integer_small_value,
    sign_profile,
    sl2_counterexample,
    so_orbit_scan,
    symmetric_pair_report,
)

__all__ = [
    "ContinuedFraction",
    "Error",
    "Form",
    "Lattice",
    "OrbitSeries",
    "ParseError",
    "QuadraticIrrational",
    "Scalar",
    "ViolationError",
    "__version__",
    "approx_value",
    "band_sign_profile",
    "cf_expand",
    "complete_to_unimodular",
    "convergents",
    "counterexample_min",
    "diag",
    "enumerate_band",
    "equidistribution_gap",
    "find_small_value",
    "flow_orbit",
    "haar_sample",
    "is_isotropic_padic",
    "is_primitive_tuple",
    "liouville_constant_estimate",
    "pair_difference_search",
    "poly_divergence_eta",
    "primitive_tuple_approx",
    "rationality",
    "s_integer_small_value",
    "sign_profile",
    "sl2_counterexample",
    "so_orbit_scan",
    "symmetric_pair_report",
]


def diag(*entries):
    """Diagonal form from scalar-like entries: diag(1, 1, "-sqrt(2)")."""
    return Form.diagonal(list(entries))


def band_sign_profile(form, eps, radius, *, max_evals=50_000_000, seed=1,
                      sample_cap=100_000):
    """Counts of band values in (0, eps) and (-eps, 0) over the sup-norm box.

    Returns {"plus", "minus", "partial"}; with partial True the counts are
    lower bounds.
    """
    band = enumerate_band(form, 0, eps, radius, max_evals=max_evals,
                          seed=seed, sample_cap=sample_cap)
    values = [form.evaluate(x) for x in band["samples"]]
    plus, minus = sign_profile(values, eps)
    return {"plus": plus, "minus": minus, "partial": band["partial"]}
