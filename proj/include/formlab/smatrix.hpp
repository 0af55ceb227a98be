#pragma once

#include <vector>

#include "formlab/scalar.hpp"

namespace formlab {

// Dense matrix of Scalars.  All the elimination routines below pivot on
// exact sign tests, so they are reliable for rational / quadratic-field
// entries; float entries go through the same code with MPFR comparisons.
class SMatrix {
  public:
    SMatrix() : rows_(0), cols_(0) {}
    SMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(size_t(rows) * cols) {}
    static SMatrix identity(int n) {
        SMatrix m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = Scalar(1);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Scalar& at(int i, int j) { return a_[size_t(i) * cols_ + j]; }
    const Scalar& at(int i, int j) const { return a_[size_t(i) * cols_ + j]; }

    SMatrix transpose() const {
        SMatrix t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
        return t;
    }

    SMatrix operator*(const SMatrix& o) const {
        if (cols_ != o.rows_) throw Error("matrix product shape mismatch");
        SMatrix r(rows_, o.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k) {
                const Scalar& aik = at(i, k);
                if (aik.is_exact() && aik.sign() == 0) continue;
                for (int j = 0; j < o.cols_; ++j) r.at(i, j) += aik * o.at(k, j);
            }
        return r;
    }

    SMatrix operator+(const SMatrix& o) const {
        check_same_shape(o);
        SMatrix r(rows_, cols_);
        for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + o.a_[i];
        return r;
    }

    SMatrix operator-(const SMatrix& o) const {
        check_same_shape(o);
        SMatrix r(rows_, cols_);
        for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
        return r;
    }

    SMatrix operator*(const Scalar& s) const {
        SMatrix r(rows_, cols_);
        for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] * s;
        return r;
    }

    bool operator==(const SMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) return false;
        for (size_t i = 0; i < a_.size(); ++i)
            if (a_[i] != o.a_[i]) return false;
        return true;
    }

    bool is_zero() const {
        for (const Scalar& s : a_)
            if (s.sign() != 0) return false;
        return true;
    }

    Scalar trace() const {
        Scalar t;
        for (int i = 0; i < rows_ && i < cols_; ++i) t += at(i, i);
        return t;
    }

    Scalar det() const;
    SMatrix inverse() const;  // throws NonDegenerateViolation if singular

  private:
    void check_same_shape(const SMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw Error("matrix shape mismatch");
    }
    int rows_, cols_;
    std::vector<Scalar> a_;
};

inline SMatrix commutator(const SMatrix& x, const SMatrix& y) { return x * y - y * x; }

// Reduced row echelon form in place; returns pivot column indices.
std::vector<int> rref_in_place(SMatrix& m);
int rank(SMatrix m);
// Basis of the right kernel {v : m v = 0}, as columns of the result.
SMatrix kernel_basis(const SMatrix& m);

}  // namespace formlab
