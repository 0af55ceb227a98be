#pragma once

#include <cstdint>
#include <vector>

#include "formlab/scalar.hpp"

namespace formlab {

// Row-major integer matrix; kept as arbitrary precision because Euclidean
// row reduction grows entries past 64 bits even for small inputs.
using IMatrix = std::vector<std::vector<Integer>>;

IMatrix imat_identity(int n);
IMatrix imat_mul(const IMatrix& a, const IMatrix& b);
IMatrix imat_transpose(const IMatrix& a);
Integer imat_det(IMatrix m);  // fraction-free (Bareiss) elimination

// Diagonal of the Smith normal form (non-negative, each dividing the next).
// Used as an independent oracle for primitivity tests.
std::vector<Integer> smith_diagonal(IMatrix m);

// Product of `steps` seeded elementary operations E_ij(+-1) (det stays +1).
IMatrix random_unimodular(int n, int steps, std::uint64_t seed);

}  // namespace formlab
