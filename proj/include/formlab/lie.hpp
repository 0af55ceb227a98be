#pragma once

#include <cstdint>
#include <vector>

#include "formlab/forms.hpp"
#include "formlab/smatrix.hpp"

namespace formlab {

// sl_n over exact scalars.  Basis order: E_ij for i != j in row-major order,
// then the n-1 diagonal generators E_ii - E_{i+1,i+1}.
struct LieAlgebraSLn {
    int n = 0;
    std::vector<SMatrix> basis;
};

LieAlgebraSLn sl_algebra(int n);

// Coordinates of a traceless matrix in the basis above (exact; throws
// PreconditionViolation if the trace is nonzero).
std::vector<Scalar> sl_coordinates(const LieAlgebraSLn& alg, const SMatrix& x);

// Killing form computed by definition, trace(ad x . ad y) over the basis.
// (For sl_n this equals 2n tr(xy); the tests pin that identity.)
Scalar killing_form(const LieAlgebraSLn& alg, const SMatrix& x, const SMatrix& y);

// Exactly-echelonized span of flattened n x n matrices.
class Subspace {
  public:
    explicit Subspace(int n) : n_(n) {}
    // true if x was outside the span (rank grew)
    bool add(const SMatrix& x);
    bool contains(const SMatrix& x) const;
    int dim() const { return static_cast<int>(rows_.size()); }
    int matrix_size() const { return n_; }
    // echelon basis, back in matrix form
    std::vector<SMatrix> basis() const;

  private:
    void reduce(std::vector<Scalar>& v) const;
    int n_;
    std::vector<std::vector<Scalar>> rows_;  // reduced echelon rows, length n^2
    std::vector<int> pivots_;
};

// g = k + p for the involution X -> -F^{-1} X^T F of sl_n attached to a
// non-degenerate exact form F.  k (+1 eigenspace) is so(F); p is the -1
// eigenspace.  Construction verifies, exactly: the map is an involutive
// automorphism, the eigenspace dimensions, the bracket relations
// [k,k] c k, [k,p] c p, [p,p] c k, and k = so(F).
struct SymmetricPair {
    LieAlgebraSLn algebra;
    SMatrix f;       // the form's matrix
    SMatrix f_inv;
    std::vector<SMatrix> k_basis;
    std::vector<SMatrix> p_basis;
};

SymmetricPair build_pair(const QuadraticForm& f);
SMatrix involution(const SymmetricPair& pair, const SMatrix& x);

// Exact check that span{[p_i, p_j]} equals k.
bool verify_step_b(const SymmetricPair& pair);
// Exact check that B(k, p) = 0 and that B restricted to k and to p is
// non-degenerate (nonzero Gram determinants).
bool verify_orthogonality(const SymmetricPair& pair);

// Smallest ad(k)-invariant subspace containing the seeds (exact fixpoint).
Subspace invariant_span(const SymmetricPair& pair,
                        const std::vector<SMatrix>& seeds);

// Randomized-witness maximality evidence: for `trials` random nonzero
// p-elements w, the ad(k)-closure of k + {w} is all of g, and the closure
// of {w} alone is all of p (irreducibility; this part upgrades the evidence
// to a proof for the given pair).  n = 2 is refused: k is not semisimple.
bool maximality_check(const SymmetricPair& pair, int trials, std::uint64_t seed);

// The n = 2 failure of maximality: with F = antidiag(1,1) the fixed space k
// is the diagonal line, and k + span{E_12} is a proper ad(k)-invariant
// subspace strictly between k and sl_2.
struct Sl2Report {
    int dim_k = 0, dim_intermediate = 0, dim_g = 0;
    bool intermediate_invariant = false;  // ad(k)-stable, contains k, proper
    bool upper_lower_weights = false;     // [k,n] c n and [k,m] c m
    bool nil_lines_abelian = false;       // [n,n] = [m,m] = 0
    bool killing_null_on_n = false;       // B(n,n) = 0
    bool k_from_bracket = false;          // [m,n] spans k
};

Sl2Report counterexample_sl2();

}  // namespace formlab
