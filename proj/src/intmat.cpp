#include "formlab/intmat.hpp"

#include <random>

namespace formlab {

IMatrix imat_identity(int n) {
    IMatrix m(n, std::vector<Integer>(n));
    for (int i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

IMatrix imat_mul(const IMatrix& a, const IMatrix& b) {
    const int rows = static_cast<int>(a.size());
    const int inner = static_cast<int>(b.size());
    const int cols = static_cast<int>(b[0].size());
    IMatrix r(rows, std::vector<Integer>(cols));
    for (int i = 0; i < rows; ++i)
        for (int k = 0; k < inner; ++k) {
            if (a[i][k] == 0) continue;
            for (int j = 0; j < cols; ++j) r[i][j] += a[i][k] * b[k][j];
        }
    return r;
}

IMatrix imat_transpose(const IMatrix& a) {
    const int rows = static_cast<int>(a.size());
    const int cols = static_cast<int>(a[0].size());
    IMatrix r(cols, std::vector<Integer>(rows));
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) r[j][i] = a[i][j];
    return r;
}

Integer imat_det(IMatrix m) {
    const int n = static_cast<int>(m.size());
    // Bareiss: division-free apart from exact divisions by the previous pivot.
    Integer prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (m[k][k] == 0) {
            int piv = -1;
            for (int i = k + 1; i < n; ++i)
                if (m[i][k] != 0) {
                    piv = i;
                    break;
                }
            if (piv < 0) return 0;
            std::swap(m[k], m[piv]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j)
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
        prev = m[k][k];
    }
    return sign > 0 ? m[n - 1][n - 1] : Integer(-m[n - 1][n - 1]);
}

std::vector<Integer> smith_diagonal(IMatrix m) {
    int rows = static_cast<int>(m.size());
    int cols = static_cast<int>(m[0].size());
    std::vector<Integer> diag;
    int r0 = 0, c0 = 0;
    while (r0 < rows && c0 < cols) {
        // find smallest nonzero entry in the remaining block
        int pi = -1, pj = -1;
        for (int i = r0; i < rows; ++i)
            for (int j = c0; j < cols; ++j)
                if (m[i][j] != 0 && (pi < 0 || abs(m[i][j]) < abs(m[pi][pj]))) {
                    pi = i;
                    pj = j;
                }
        if (pi < 0) break;
        std::swap(m[r0], m[pi]);
        for (int i = r0; i < rows; ++i) std::swap(m[i][c0], m[i][pj]);
        bool clean = true;
        for (int i = r0 + 1; i < rows; ++i) {
            const Integer q = m[i][c0] / m[r0][c0];
            if (q != 0)
                for (int j = c0; j < cols; ++j) m[i][j] -= q * m[r0][j];
            if (m[i][c0] != 0) clean = false;
        }
        for (int j = c0 + 1; j < cols; ++j) {
            const Integer q = m[r0][j] / m[r0][c0];
            if (q != 0)
                for (int i = r0; i < rows; ++i) m[i][j] -= q * m[i][c0];
            if (m[r0][j] != 0) clean = false;
        }
        if (!clean) continue;  // entries shrank; repeat with a smaller pivot
        // pivot must divide every remaining entry for the SNF chain condition
        bool divides_all = true;
        for (int i = r0 + 1; i < rows && divides_all; ++i)
            for (int j = c0 + 1; j < cols; ++j)
                if (m[i][j] % m[r0][c0] != 0) {
                    for (int t = c0; t < cols; ++t) m[r0][t] += m[i][t];
                    divides_all = false;
                    break;
                }
        if (!divides_all) continue;
        diag.push_back(abs(m[r0][c0]));
        ++r0;
        ++c0;
    }
    return diag;
}

IMatrix random_unimodular(int n, int steps, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> idx(0, n - 1);
    std::uniform_int_distribution<int> coin(0, 1);
    IMatrix u = imat_identity(n);
    for (int s = 0; s < steps; ++s) {
        int i = idx(rng), j = idx(rng);
        if (i == j) continue;
        const Integer c = coin(rng) ? 1 : -1;
        // row_i += c * row_j keeps det = +1
        for (int t = 0; t < n; ++t) u[i][t] += c * u[j][t];
    }
    return u;
}

}  // namespace formlab
