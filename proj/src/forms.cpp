#include "formlab/forms.hpp"

#include <algorithm>

namespace formlab {

namespace {

long merged_field_tag(const SMatrix& m) {
    long d = 0;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) {
            const long e = m.at(i, j).quad_d();
            if (!e) continue;
            if (d && d != e)
                throw ScalarDomainError("form entries mix sqrt(" + std::to_string(d) +
                                        ") and sqrt(" + std::to_string(e) + ")");
            d = e;
        }
    return d;
}

BigFloat max_abs_entry(const SMatrix& m, unsigned bits) {
    BigFloat best = make_bigfloat(0.0, bits);
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) {
            BigFloat v = abs(m.at(i, j).to_bigfloat(bits));
            if (v > best) best = v;
        }
    return best;
}

}  // namespace

QuadraticForm::QuadraticForm(SMatrix entries, Rational degeneracy_tol) : m_(std::move(entries)) {
    if (m_.rows() != m_.cols() || m_.rows() == 0)
        throw PreconditionViolation("form matrix must be square and non-empty");
    for (int i = 0; i < m_.rows(); ++i)
        for (int j = i + 1; j < m_.cols(); ++j)
            if (m_.at(i, j) != m_.at(j, i))
                throw PreconditionViolation("form matrix is not symmetric at (" +
                                            std::to_string(i) + "," + std::to_string(j) + ")");
    d_ = merged_field_tag(m_);
    exact_ = true;
    for (int i = 0; i < m_.rows() && exact_; ++i)
        for (int j = 0; j < m_.cols(); ++j)
            if (m_.at(i, j).is_float()) {
                exact_ = false;
                break;
            }
    det_ = m_.det();
    if (exact_) {
        if (det_.sign() == 0) throw NonDegenerateViolation("form has determinant zero");
    } else {
        const BigFloat scale = max_abs_entry(m_, kDefaultFloatBits);
        BigFloat floor_val = make_bigfloat(degeneracy_tol, kDefaultFloatBits);
        BigFloat rel = scale;
        for (int i = 1; i < m_.rows(); ++i) rel *= scale;
        if (rel > 1) floor_val *= rel;
        if (abs(det_.to_bigfloat()) <= floor_val)
            throw NonDegenerateViolation("float form determinant below degeneracy tolerance");
    }
}

QuadraticForm QuadraticForm::diagonal(const std::vector<Scalar>& diag) {
    SMatrix m(static_cast<int>(diag.size()), static_cast<int>(diag.size()));
    for (size_t i = 0; i < diag.size(); ++i) m.at(int(i), int(i)) = diag[i];
    return QuadraticForm(std::move(m));
}

Scalar QuadraticForm::evaluate(const IntVector& x) const {
    if (static_cast<int>(x.size()) != n())
        throw PreconditionViolation("evaluate: vector length does not match form rank");
    Scalar acc;
    for (int i = 0; i < n(); ++i) {
        if (x[i] == 0) continue;
        acc += at(i, i) * Scalar(Integer(x[i]) * Integer(x[i]));
        for (int j = i + 1; j < n(); ++j) {
            if (x[j] == 0) continue;
            acc += at(i, j) * Scalar(2 * Integer(x[i]) * Integer(x[j]));
        }
    }
    return acc;
}

Scalar QuadraticForm::evaluate(const std::vector<Rational>& x) const {
    if (static_cast<int>(x.size()) != n())
        throw PreconditionViolation("evaluate: vector length does not match form rank");
    Scalar acc;
    for (int i = 0; i < n(); ++i) {
        acc += at(i, i) * Scalar(x[i] * x[i]);
        for (int j = i + 1; j < n(); ++j) acc += at(i, j) * Scalar(2 * x[i] * x[j]);
    }
    return acc;
}

QuadraticForm QuadraticForm::transform(const std::vector<IntVector>& cols) const {
    const int m = static_cast<int>(cols.size());
    if (m == 0) throw PreconditionViolation("transform: no columns");
    for (const auto& c : cols)
        if (static_cast<int>(c.size()) != n())
            throw PreconditionViolation("transform: column length does not match form rank");
    SMatrix res(m, m);
    for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b) {
            Scalar acc;
            for (int i = 0; i < n(); ++i) {
                if (cols[a][i] == 0) continue;
                Scalar row;
                for (int j = 0; j < n(); ++j) {
                    if (cols[b][j] == 0) continue;
                    row += at(i, j) * Scalar(Integer(cols[b][j]));
                }
                acc += row * Scalar(Integer(cols[a][i]));
            }
            res.at(a, b) = acc;
            res.at(b, a) = acc;  // mirror, so float forms stay exactly symmetric
        }
    return QuadraticForm(std::move(res));
}

std::pair<int, int> QuadraticForm::reference_entry() const {
    std::pair<int, int> best{0, 0};
    Scalar best_abs = at(0, 0).abs();
    for (int i = 0; i < n(); ++i)
        for (int j = 0; j < n(); ++j) {
            Scalar v = at(i, j).abs();
            if (v.cmp(best_abs) > 0) {
                best = {i, j};
                best_abs = v;
            }
        }
    return best;
}

// ---------------------------------------------------------------------------
// Signature

namespace {

Signature signature_exact(const QuadraticForm& f) {
    const int n = f.n();
    SMatrix m = f.matrix();
    Signature sig;
    for (int k = 0; k < n; ++k) {
        if (m.at(k, k).sign() == 0) {
            int dpiv = -1;
            for (int i = k + 1; i < n; ++i)
                if (m.at(i, i).sign() != 0) {
                    dpiv = i;
                    break;
                }
            if (dpiv >= 0) {
                for (int j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(dpiv, j));
                for (int j = 0; j < n; ++j) std::swap(m.at(j, k), m.at(j, dpiv));
            } else {
                // all remaining diagonal entries are zero; pull in an
                // off-diagonal one: row/col i += row/col j turns the zero
                // diagonal entry into 2*m_ij
                int oi = -1, oj = -1;
                for (int i = k; i < n && oi < 0; ++i)
                    for (int j = i + 1; j < n; ++j)
                        if (m.at(i, j).sign() != 0) {
                            oi = i;
                            oj = j;
                            break;
                        }
                if (oi < 0) throw NonDegenerateViolation("degenerate block in signature");
                for (int t = 0; t < n; ++t) m.at(oi, t) += m.at(oj, t);
                for (int t = 0; t < n; ++t) m.at(t, oi) += m.at(t, oj);
                if (oi != k) {
                    for (int t = 0; t < n; ++t) std::swap(m.at(k, t), m.at(oi, t));
                    for (int t = 0; t < n; ++t) std::swap(m.at(t, k), m.at(t, oi));
                }
            }
        }
        const Scalar p = m.at(k, k);
        (p.sign() > 0 ? sig.positive : sig.negative) += 1;
        for (int i = k + 1; i < n; ++i) {
            if (m.at(i, k).sign() == 0) continue;
            const Scalar fct = m.at(i, k) / p;
            for (int j = k; j < n; ++j) m.at(i, j) -= fct * m.at(k, j);
            for (int j = k; j < n; ++j) m.at(j, i) = m.at(i, j);
        }
    }
    return sig;
}

Signature signature_float(const QuadraticForm& f, unsigned bits) {
    const int n = f.n();
    std::vector<std::vector<BigFloat>> a(n, std::vector<BigFloat>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[i][j] = f.at(i, j).to_bigfloat(bits);
    const BigFloat one = make_bigfloat(1.0, bits);
    BigFloat scale = make_bigfloat(0.0, bits);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale = std::max(scale, BigFloat(abs(a[i][j])));
    if (scale == 0) throw NonDegenerateViolation("zero float form");
    // classical Jacobi sweeps; quadratic convergence makes 60 sweeps generous
    BigFloat stop = scale;
    stop *= pow(make_bigfloat(2.0, bits), -long(bits) + 8);
    for (int sweep = 0; sweep < 60; ++sweep) {
        BigFloat off = make_bigfloat(0.0, bits);
        int p = 0, q = 1;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (abs(a[i][j]) > off) {
                    off = abs(a[i][j]);
                    p = i;
                    q = j;
                }
        if (off <= stop) break;
        const BigFloat theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        BigFloat t = one / (abs(theta) + sqrt(theta * theta + one));
        if (theta < 0) t = -t;
        const BigFloat c = one / sqrt(t * t + one);
        const BigFloat s = t * c;
        for (int k = 0; k < n; ++k) {
            const BigFloat akp = a[k][p], akq = a[k][q];
            a[k][p] = c * akp - s * akq;
            a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
            const BigFloat apk = a[p][k], aqk = a[q][k];
            a[p][k] = c * apk - s * aqk;
            a[q][k] = s * apk + c * aqk;
        }
    }
    Signature sig;
    const BigFloat tol = make_bigfloat(QuadraticForm::default_tolerance()) * std::max(one, scale);
    for (int i = 0; i < n; ++i) {
        if (abs(a[i][i]) <= tol)
            throw NonDegenerateViolation("near-zero eigenvalue in float signature");
        (a[i][i] > 0 ? sig.positive : sig.negative) += 1;
    }
    return sig;
}

}  // namespace

Signature signature(const QuadraticForm& f) {
    return f.is_exact() ? signature_exact(f) : signature_float(f, kDefaultFloatBits);
}

bool is_indefinite(const QuadraticForm& f) {
    const Signature s = signature(f);
    return s.positive > 0 && s.negative > 0;
}

bool is_isotropic_real(const QuadraticForm& f) { return is_indefinite(f); }

// ---------------------------------------------------------------------------
// Rationality

RationalApprox best_rational_approx(const BigFloat& x, const Integer& bound) {
    const unsigned bits = bigfloat_bits(x);
    BigFloat y = abs(x);
    const int sign = x.sign();
    Integer p0 = 1, q0 = 0;  // convergent h_{-1}
    Integer p1 = 0, q1 = 1;  // placeholder; replaced by a0/1 in the first step
    bool first = true;
    BigFloat tiny = pow(make_bigfloat(2.0, bits), -long(bits) / 2);
    for (int iter = 0; iter < 256; ++iter) {
        const Integer a = floor(y).convert_to<Integer>();
        Integer p = first ? a : a * p1 + p0;
        Integer q = first ? Integer(1) : a * q1 + q0;
        if (!first && q > bound) break;
        p0 = first ? Integer(1) : p1;
        q0 = first ? Integer(0) : q1;
        p1 = p;
        q1 = q;
        first = false;
        BigFloat frac = y - make_bigfloat(Rational(a), bits);
        if (frac < tiny) break;  // rational hit at working precision
        y = 1 / frac;
    }
    RationalApprox best;
    best.p = sign < 0 ? Integer(-p1) : p1;
    best.q = q1;
    best.residual = abs(x - make_bigfloat(Rational(best.p, best.q), bits));
    return best;
}

namespace {

// Normalise a rational matrix R to an integer matrix G with content 1, and
// the rational multiplier m with R = m * G.
Rational normalize_rational_matrix(const std::vector<std::vector<Rational>>& r,
                                   SMatrix& g_out) {
    const int n = static_cast<int>(r.size());
    Integer den = 1;
    for (const auto& row : r)
        for (const Rational& v : row) den = lcm(den, denominator(v));
    Integer content = 0;
    std::vector<std::vector<Integer>> g(n, std::vector<Integer>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            g[i][j] = numerator(r[i][j]) * (den / denominator(r[i][j]));
            content = gcd(content, g[i][j]);
        }
    if (content == 0) throw NonDegenerateViolation("zero matrix in rationality normalisation");
    g_out = SMatrix(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g_out.at(i, j) = Scalar(Rational(g[i][j] / content));
    return Rational(content, den);
}

std::string entry_name(int i, int j) {
    return "f(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

// Canonical sign: first nonzero entry of the normal form (row-major) is
// positive.  Returns true if the matrix was negated.
bool flip_for_leading_sign(SMatrix& g) {
    for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.cols(); ++j) {
            const int s = g.at(i, j).sign();
            if (s == 0) continue;
            if (s > 0) return false;
            for (int a = 0; a < g.rows(); ++a)
                for (int b = 0; b < g.cols(); ++b) g.at(a, b) = -g.at(a, b);
            return true;
        }
    return false;
}

}  // namespace

RationalityResult rationality_test(const QuadraticForm& f, const Integer& denominator_bound,
                                   const Rational& tolerance, unsigned bits) {
    RationalityResult res;
    const auto [ri, rj] = f.reference_entry();
    const Scalar& fref = f.at(ri, rj);
    const int n = f.n();

    if (f.is_exact()) {
        std::vector<std::vector<Rational>> ratios(n, std::vector<Rational>(n));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const Scalar ratio = f.at(i, j) / fref;
                if (!ratio.is_rational()) {
                    res.verdict = RationalityResult::Verdict::Irrational;
                    res.witness = {i, j, ri, rj};
                    res.detail = entry_name(i, j) + "/" + entry_name(ri, rj) + " = " +
                                 ratio.str() + " is irrational";
                    return res;
                }
                ratios[i][j] = ratio.rational();
            }
        SMatrix g;
        const Rational mult = normalize_rational_matrix(ratios, g);
        Scalar c = fref * Scalar(mult);
        if (flip_for_leading_sign(g)) c = -c;
        res.verdict = RationalityResult::Verdict::RationalMultiple;
        res.normal_form = QuadraticForm(g);
        res.c = c;
        res.detail = "exact";
        return res;
    }

    // Float entries: reconstruct each ratio as a bounded-denominator rational
    // and cross-check the reconstruction against the original coefficients.
    const BigFloat fref_big = fref.to_bigfloat(bits);
    const BigFloat tol_big = make_bigfloat(tolerance, bits);
    std::vector<std::vector<Rational>> ratios(n, std::vector<Rational>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const BigFloat x = f.at(i, j).to_bigfloat(bits) / fref_big;
            const RationalApprox approx = best_rational_approx(x, denominator_bound);
            if (approx.residual > tol_big) {
                res.verdict = RationalityResult::Verdict::Undecided;
                res.witness = {i, j, ri, rj};
                res.detail = "ratio " + entry_name(i, j) + "/" + entry_name(ri, rj) +
                             " has no rational approximation with denominator <= " +
                             denominator_bound.str() + " within tolerance (best residual " +
                             approx.residual.str(8, std::ios_base::scientific) + ")";
                return res;
            }
            ratios[i][j] = Rational(approx.p, approx.q);
        }
    SMatrix g;
    const Rational mult = normalize_rational_matrix(ratios, g);
    BigFloat c_big = fref_big * make_bigfloat(mult, bits);
    if (flip_for_leading_sign(g)) c_big = -c_big;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const BigFloat lhs = f.at(i, j).to_bigfloat(bits);
            const BigFloat rhs = c_big * g.at(i, j).to_bigfloat(bits);
            BigFloat allowed = tol_big;
            if (abs(lhs) > 1) allowed = tol_big * abs(lhs);
            if (abs(lhs - rhs) > allowed) {
                res.verdict = RationalityResult::Verdict::Undecided;
                res.witness = {i, j, ri, rj};
                res.detail = "reconstructed rational form is inconsistent at " + entry_name(i, j);
                return res;
            }
        }
    res.verdict = RationalityResult::Verdict::RationalMultiple;
    res.normal_form = QuadraticForm(g);
    res.c = Scalar::floating(c_big);
    res.detail = "reconstructed from float coefficients";
    return res;
}

}  // namespace formlab
