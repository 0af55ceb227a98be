#pragma once

#include <string>
#include <vector>

#include "formlab/scalar.hpp"

namespace formlab {

// theta = (a + b*sqrt(d)) / c with d squarefree >= 2 and b != 0, so the
// value is irrational.  Normalized: gcd(a, b, c) = 1 and c > 0.
struct QuadraticIrrational {
    Integer a, b, c;
    long d = 0;
};

// Normalizes and validates; throws PreconditionViolation on b = 0, c = 0,
// or d not squarefree / < 2.
QuadraticIrrational make_quadratic_irrational(Integer a, Integer b, Integer c,
                                              long d);
// From an exact Scalar of quadratic kind (rational scalars are rejected —
// their expansions terminate).
QuadraticIrrational make_quadratic_irrational(const Scalar& s);
Scalar qi_value(const QuadraticIrrational& th);

// Partial quotients a_0, a_1, ..., a_{depth-1}.  The expansion of a
// quadratic irrational is eventually periodic; once the integer recurrence
// state (P, Q) repeats, preperiod/period record the exact cycle.  period = 0
// means the cycle did not close within the requested depth.
struct ContinuedFraction {
    std::vector<Integer> quotients;
    int preperiod = -1;
    int period = 0;
};

ContinuedFraction cf_expand(const QuadraticIrrational& th, int depth);

// p_k / q_k in lowest terms, one per partial quotient.
struct Convergent {
    Integer p, q;
};
std::vector<Convergent> convergents(const ContinuedFraction& cf);

// Badly-approximable certificate data for theta: the exact minimum of
// q^2 |theta - p/q| over convergents with q <= bound, the convergent
// attaining it, and the exact liminf of the same quantity (computed over
// one period of complete quotients).  The empirical minimum can sit
// strictly below the liminf; the two are reported separately.
struct LiouvilleEstimate {
    Scalar minimum;
    Convergent argmin;
    Scalar classical_limit;
};

LiouvilleEstimate liouville_constant_estimate(const QuadraticIrrational& th,
                                              const Integer& bound);

// Exact minimum of |y^2 - theta^2 x^2| over 0 < max(|x|, |y|) <= box,
// axes included.  Requires theta^2 irrational (a != 0); together with
// Liouville's inequality this keeps the minimum bounded away from zero,
// which is the two-variable obstruction the search modules escape at n >= 3.
struct CounterexampleScan {
    Scalar minimum;
    long long x = 0, y = 0;  // argmin, canonical non-negative representative
    Scalar bound;            // liouville minimum * |theta|
    LiouvilleEstimate liouville;
};

CounterexampleScan counterexample_min(const QuadraticIrrational& th,
                                      long long box);

}  // namespace formlab
