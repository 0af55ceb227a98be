#include "formlab/smatrix.hpp"

namespace formlab {

Scalar SMatrix::det() const {
    if (rows_ != cols_) throw Error("determinant of a non-square matrix");
    const int n = rows_;
    SMatrix m = *this;
    Scalar d(1);
    for (int k = 0; k < n; ++k) {
        int piv = -1;
        for (int i = k; i < n; ++i)
            if (m.at(i, k).sign() != 0) {
                piv = i;
                break;
            }
        if (piv < 0) return Scalar(0);
        if (piv != k) {
            for (int j = k; j < n; ++j) std::swap(m.at(piv, j), m.at(k, j));
            d = -d;
        }
        const Scalar p = m.at(k, k);
        d *= p;
        for (int i = k + 1; i < n; ++i) {
            if (m.at(i, k).sign() == 0) continue;
            const Scalar f = m.at(i, k) / p;
            for (int j = k; j < n; ++j) m.at(i, j) -= f * m.at(k, j);
        }
    }
    return d;
}

SMatrix SMatrix::inverse() const {
    if (rows_ != cols_) throw Error("inverse of a non-square matrix");
    const int n = rows_;
    SMatrix m = *this;
    SMatrix inv = identity(n);
    for (int k = 0; k < n; ++k) {
        int piv = -1;
        for (int i = k; i < n; ++i)
            if (m.at(i, k).sign() != 0) {
                piv = i;
                break;
            }
        if (piv < 0) throw NonDegenerateViolation("matrix is singular");
        if (piv != k)
            for (int j = 0; j < n; ++j) {
                std::swap(m.at(piv, j), m.at(k, j));
                std::swap(inv.at(piv, j), inv.at(k, j));
            }
        const Scalar p = m.at(k, k);
        for (int j = 0; j < n; ++j) {
            m.at(k, j) /= p;
            inv.at(k, j) /= p;
        }
        for (int i = 0; i < n; ++i) {
            if (i == k || m.at(i, k).sign() == 0) continue;
            const Scalar f = m.at(i, k);
            for (int j = 0; j < n; ++j) {
                m.at(i, j) -= f * m.at(k, j);
                inv.at(i, j) -= f * inv.at(k, j);
            }
        }
    }
    return inv;
}

std::vector<int> rref_in_place(SMatrix& m) {
    std::vector<int> pivots;
    int row = 0;
    for (int col = 0; col < m.cols() && row < m.rows(); ++col) {
        int piv = -1;
        for (int i = row; i < m.rows(); ++i)
            if (m.at(i, col).sign() != 0) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        if (piv != row)
            for (int j = 0; j < m.cols(); ++j) std::swap(m.at(piv, j), m.at(row, j));
        const Scalar p = m.at(row, col);
        for (int j = 0; j < m.cols(); ++j) m.at(row, j) /= p;
        for (int i = 0; i < m.rows(); ++i) {
            if (i == row || m.at(i, col).sign() == 0) continue;
            const Scalar f = m.at(i, col);
            for (int j = 0; j < m.cols(); ++j) m.at(i, j) -= f * m.at(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

int rank(SMatrix m) { return static_cast<int>(rref_in_place(m).size()); }

SMatrix kernel_basis(const SMatrix& m) {
    SMatrix r = m;
    const std::vector<int> pivots = rref_in_place(r);
    std::vector<int> free_cols;
    {
        size_t p = 0;
        for (int c = 0; c < m.cols(); ++c) {
            if (p < pivots.size() && pivots[p] == c)
                ++p;
            else
                free_cols.push_back(c);
        }
    }
    SMatrix k(m.cols(), static_cast<int>(free_cols.size()));
    for (size_t f = 0; f < free_cols.size(); ++f) {
        const int fc = free_cols[f];
        k.at(fc, static_cast<int>(f)) = Scalar(1);
        for (size_t p = 0; p < pivots.size(); ++p)
            k.at(pivots[p], static_cast<int>(f)) = -r.at(static_cast<int>(p), fc);
    }
    return k;
}

}  // namespace formlab
