#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "formlab/forms.hpp"
#include "formlab/intmat.hpp"
#include "formlab/smatrix.hpp"

namespace formlab {

// Dense double matrix, row-major.  A lattice is the set of integer
// combinations of the columns; the group acts by left multiplication.
struct RMatrix {
    int n = 0;
    std::vector<double> a;

    RMatrix() = default;
    explicit RMatrix(int n_) : n(n_), a(std::size_t(n_) * n_, 0.0) {}
    double& at(int i, int j) { return a[std::size_t(i) * n + j]; }
    double at(int i, int j) const { return a[std::size_t(i) * n + j]; }
    static RMatrix identity(int n_);
    RMatrix operator*(const RMatrix& o) const;
    double det() const;
};

// Unimodular lattice with a canonical reduced representative of its basis
// coset.  reduced_basis = basis * reduction_transform (columns attain the
// successive minima, deterministically ordered and sign-normalized), and
// reduction_transform has determinant +1 exactly.  Dimensions 2 and 3.
struct LatticePoint {
    int n = 0;
    RMatrix basis;
    RMatrix reduced_basis;
    IMatrix reduction_transform;
};

LatticePoint make_lattice(RMatrix basis);
LatticePoint reduce(const LatticePoint& x);

// Euclidean length of a shortest nonzero vector / of a shortest vector
// independent from it, certified by enumeration over the reduced basis.
double shortest_vector_length(const LatticePoint& x);
double second_minimum_length(const LatticePoint& x);

// Lattice functions: the value only depends on the basis coset.
struct Observable {
    std::string name;
    std::function<double(const LatticePoint&)> eval;
};
Observable length_observable();       // l1
Observable soft_length_observable();  // exp(-1/l1), bounded and continuous

// Exact polynomial exponential of a nilpotent matrix (throws KindViolation
// when y^n != 0; exact scalars required).
SMatrix unipotent_exp(const SMatrix& y, const Scalar& t);

struct OneParamSubgroup {
    enum class Kind { Unipotent, Diagonal };
    Kind kind = Kind::Unipotent;
    int n = 0;
    std::vector<double> gen;  // row-major generator (diagonal: the entries)
    RMatrix at(double t) const;
};

OneParamSubgroup unipotent_subgroup(const SMatrix& y);
OneParamSubgroup diagonal_subgroup(const std::vector<double>& diag);

// Sampled orbit t_k = k dt with running trapezoidal time-averages.
struct OrbitSeries {
    std::vector<double> times;
    std::vector<std::string> names;
    std::vector<std::vector<double>> values;       // [observable][k]
    std::vector<std::vector<double>> running_avg;  // [observable][k]
    bool unipotent = false;
};

OrbitSeries flow_orbit(const LatticePoint& x0, const OneParamSubgroup& u,
                       double T, double dt,
                       const std::vector<Observable>& observables);

// Haar-distributed unimodular planar lattices (fundamental domain with
// density 1/y^2, uniform frame rotation).
std::vector<LatticePoint> haar_sample_sl2(int count, std::uint64_t seed);

struct GapReport {
    double time_average = 0;
    double space_average = 0;
    double gap = 0;
    double bootstrap_err = 0;  // bootstrap standard error of space_average
};

GapReport equidistribution_gap(const OrbitSeries& series,
                               const std::vector<LatticePoint>& haar,
                               const Observable& f);

// Heuristic closed-vs-dense diagnostic for the orthogonal-group orbit of a
// ternary indefinite form: alternates the two nilpotent generators in
// seeded blocks and histograms (l1, second minimum) over a frozen binning.
// For rational forms the scan keeps the exact integer Gram of the reduced
// basis as a shadow state and re-anchors the floating basis to it each step,
// so the trajectory cannot drift off a closed orbit.  The verdict compares
// coverage against a reachable-bin count frozen at calibration time.
struct OrbitScan {
    double start_l1 = 0;
    double min_l1 = 0;
    int occupied_bins = 0;
    int reachable_bins = 0;
    double occupancy = 0;
    std::string verdict;  // closed-like | dense-like | inconclusive | withheld
};

OrbitScan so_orbit_scan(const QuadraticForm& f, const LatticePoint& x0,
                        double T, double dt, std::uint64_t seed = 0);

// Divergence exponent: largest eta such that normalized degree-<=n
// polynomials with max_{[0,1]}|P| = |P(1)| = 1 stay above 1/2 on [1-eta, 1],
// estimated over random samples and the rescaled Chebyshev candidates.
double poly_divergence_eta(int n, int trials, std::uint64_t seed);

}  // namespace formlab
