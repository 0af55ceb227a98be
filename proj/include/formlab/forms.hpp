#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "formlab/smatrix.hpp"

namespace formlab {

using IntVector = std::vector<long long>;

struct Signature {
    int positive = 0;
    int negative = 0;
    bool operator==(const Signature&) const = default;
};

// Non-degenerate symmetric bilinear form x^t F x with entries from the
// scalar tower.  The matrix is checked to be exactly symmetric; degeneracy
// is an exact determinant test for exact entries and a tolerance test
// (relative to the largest entry) for float entries.
class QuadraticForm {
  public:
    explicit QuadraticForm(SMatrix entries, Rational degeneracy_tol = default_tolerance());
    static QuadraticForm diagonal(const std::vector<Scalar>& diag);
    static Rational default_tolerance() { return Rational(1, pow(Integer(10), 30)); }

    int n() const { return m_.rows(); }
    const SMatrix& matrix() const { return m_; }
    const Scalar& at(int i, int j) const { return m_.at(i, j); }
    bool is_exact() const { return exact_; }
    // Field tag shared by all entries (0 when every entry is rational/float).
    long quad_d() const { return d_; }
    const Scalar& det() const { return det_; }

    Scalar evaluate(const IntVector& x) const;
    Scalar evaluate(const std::vector<Rational>& x) const;

    // Congruent form U^t F U; `cols` are the columns of U (m of them, each of
    // length n).  Throws NonDegenerateViolation if the result is singular.
    QuadraticForm transform(const std::vector<IntVector>& cols) const;

    // Index of the coefficient used to normalise ratios: the entry of largest
    // absolute value, row-major-first on ties.
    std::pair<int, int> reference_entry() const;

  private:
    SMatrix m_;
    Scalar det_;
    bool exact_ = true;
    long d_ = 0;
};

// Inertia (p, q) of the form: exact symmetric Gaussian diagonalisation for
// exact entries, Jacobi eigenvalues at 256 bits for float entries.
Signature signature(const QuadraticForm& f);
bool is_indefinite(const QuadraticForm& f);
// Existence of a nontrivial real zero: indefinite <=> isotropic over R
// (the form is non-degenerate by construction).
bool is_isotropic_real(const QuadraticForm& f);

struct RationalityResult {
    enum class Verdict { RationalMultiple, Irrational, Undecided };
    Verdict verdict;
    // For RationalMultiple: F = c * normal_form, where normal_form has
    // coprime integer entries and a positive reference coefficient.
    std::optional<Scalar> c;
    std::optional<QuadraticForm> normal_form;
    // For Irrational: (i, j, k, l) with f_ij / f_kl irrational.
    std::array<int, 4> witness{-1, -1, -1, -1};
    std::string detail;
};

// Decide whether F is a real multiple of a rational form.  Exact entries are
// decided exactly; float entries are screened by bounded-denominator
// continued-fraction reconstruction and can only return RationalMultiple or
// Undecided.
RationalityResult rationality_test(const QuadraticForm& f,
                                   const Integer& denominator_bound = Integer(1000000),
                                   const Rational& tolerance = QuadraticForm::default_tolerance(),
                                   unsigned bits = kDefaultFloatBits);

// Best rational approximation p/q of x with q <= bound, by convergents of the
// continued fraction of x.  Returns (p, q, |x - p/q|).
struct RationalApprox {
    Integer p, q;
    BigFloat residual;
};
RationalApprox best_rational_approx(const BigFloat& x, const Integer& bound);

}  // namespace formlab
