#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "formlab/forms.hpp"
#include "formlab/intmat.hpp"
#include "formlab/padic.hpp"

namespace formlab {

// Deterministic resource limits for box / shell enumeration.  Identical
// budgets (and seeds, where randomness is involved) reproduce identical
// traces; the evaluation counter includes per-prefix interval solves as well
// as individual point tests.
struct SearchBudget {
    long long max_radius = 1024;
    long long max_evals = 50'000'000;
    std::uint64_t seed = 1;
};

// Count |F(x)| in [a, b] over the sup-norm box ||x||_inf <= r.  The origin is
// never counted.  Degenerate queries (a == b, or r == 0) are allowed; a > b
// or a < 0 is rejected.  `euclidean` restricts to the Euclidean ball of
// radius r inside the box.
struct BandQuery {
    Scalar a;
    Scalar b;
    long long r = 1;
    bool primitive_only = false;
    bool euclidean = false;
};

struct BandResult {
    long long count = 0;
    std::vector<IntVector> samples;  // first hits in traversal order
    bool partial = false;            // budget ran out; count is a lower bound
    long long evals = 0;
};

struct SmallValueHit {
    IntVector x;   // primitive (content 1)
    Scalar value;  // F(x), re-verified with exact arithmetic
    long long radius = 0;
    long long evals = 0;
};

// x and -x are both counted (points, not antipodal classes).  Comparisons
// against the band ends are exact for exact coefficients and carried out at
// the coefficients' own precision for float ones; a certified double
// fast-path only short-circuits decisions that cannot flip.
BandResult enumerate_band(const QuadraticForm& f, const BandQuery& q,
                          const SearchBudget& budget = {},
                          std::size_t sample_cap = 16);

// Smallest-box witness of 0 < |F(x)| < eps (strict_nonzero) or |F(x)| < eps.
// Expanding sup-norm shells; the returned vector is primitive, and any
// non-primitive witness implies a primitive one in a smaller shell, so the
// filter loses nothing.  None means the budget ran out, not a proof.
std::optional<SmallValueHit> find_small_value(const QuadraticForm& f,
                                              const Scalar& eps,
                                              const SearchBudget& budget = {},
                                              bool strict_nonzero = true);

// Counts of sweep values in (0, eps) and (-eps, 0).
std::pair<long long, long long> sign_profile(const std::vector<Scalar>& values,
                                             const Scalar& eps);

// m <= n integer vectors, claimed linearly independent when primitive.
using IntTuple = std::vector<IntVector>;

// gcd of all m x m minors equals 1 (|det| = 1 when m = n).  Dependent rows
// and the zero tuple give false.
bool is_primitive_tuple(const IntTuple& t);

// Unimodular matrix whose first m columns are the tuple.  For m < n the
// determinant is forced to +1 by flipping the last (appended) column; for
// m = n the matrix is the tuple itself and only |det| = 1 is guaranteed.
// Throws PrimitivityViolation otherwise.
IMatrix complete_to_unimodular(const IntTuple& t);

// Primitive (x_1, .., x_m), m <= n-1, with |F(x_i) - c_i| < eps for all i.
// Per-target shell collection followed by minor-gcd assembly; if that fails,
// a seeded elementary-matrix walk over SL_n(Z) scores candidate columns.
std::optional<IntTuple> primitive_tuple_approx(const QuadraticForm& f,
                                               const std::vector<Scalar>& targets,
                                               const Scalar& eps,
                                               const SearchBudget& budget = {});

// Primitive x with |F(x) - c| < eps; c = 0 delegates to find_small_value
// with the strict flag on.
std::optional<SmallValueHit> approx_value(const QuadraticForm& f,
                                          const Scalar& c, const Scalar& eps,
                                          const SearchBudget& budget = {});

struct PairDifferenceHit {
    IntVector x;
    IntVector y;
    Scalar difference;  // E(x) - E(y), nonzero
    long long radius = 0;
};

// 0 < |E(x) - E(y)| < eps via a small-value search on E + (-E) in 2n
// variables; the x = y diagonal only produces zero differences and is
// excluded by the strict window.
std::optional<PairDifferenceHit> pair_difference_search(
    const QuadraticForm& e, const Scalar& eps, const SearchBudget& budget = {});

// Search domain p^{-e} Z^n with a real and a p-adic smallness requirement.
struct SIntegerContext {
    long p = 0;
    int e = 0;           // denominators divide p^e
    Scalar eps_real;     // |F_inf(x)| < eps_real, in (0, 1)
    Rational eps_padic;  // |F_p(x)|_p < eps_padic, in (0, 1)
};

struct SIntegerHit {
    std::vector<Rational> x;  // entries of p^{-e} v
    IntVector numerator;      // v
    Scalar real_abs;          // |F_inf(x)|, exact when coefficients are
    Rational padic_abs;       // |F_p(x)|_p = p^(2e - v_p(g(v))), exact
    long long radius = 0;
};

// Nonzero-value witness for the pair (real form, p-adic model) at S-integral
// points: x = v / p^e with 0 < |F_inf(x)| < eps_real and 0 < |F_p(x)|_p <
// eps_padic.  Realized as a shell search for |F_inf(v)| < eps_real * p^{2e}
// filtered by an exact valuation test on g(v).  Throws IsotropyViolation
// when either component has no nontrivial zero over its field.
std::optional<SIntegerHit> s_integer_small_value(const QuadraticForm& f_real,
                                                 const PadicModel& f_padic,
                                                 const SIntegerContext& ctx,
                                                 const SearchBudget& budget = {});

}  // namespace formlab
