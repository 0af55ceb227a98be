#include "formlab/lie.hpp"

#include <random>

#include "formlab/errors.hpp"

namespace formlab {
namespace {

std::vector<Scalar> flatten(const SMatrix& x) {
    std::vector<Scalar> v;
    v.reserve(size_t(x.rows()) * x.cols());
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) v.push_back(x.at(i, j));
    return v;
}

SMatrix unflatten(const std::vector<Scalar>& v, int n) {
    SMatrix x(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) x.at(i, j) = v[size_t(i) * n + j];
    return x;
}

void require_exact(const SMatrix& x) {
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j)
            if (!x.at(i, j).is_exact())
                throw PreconditionViolation(
                    "exact scalars required for Lie algebra verification");
}

}  // namespace

LieAlgebraSLn sl_algebra(int n) {
    if (n < 2) throw PreconditionViolation("sl_n needs n >= 2");
    LieAlgebraSLn alg;
    alg.n = n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            SMatrix e(n, n);
            e.at(i, j) = Scalar(1);
            alg.basis.push_back(std::move(e));
        }
    for (int i = 0; i + 1 < n; ++i) {
        SMatrix h(n, n);
        h.at(i, i) = Scalar(1);
        h.at(i + 1, i + 1) = Scalar(-1);
        alg.basis.push_back(std::move(h));
    }
    return alg;
}

std::vector<Scalar> sl_coordinates(const LieAlgebraSLn& alg, const SMatrix& x) {
    const int n = alg.n;
    if (x.rows() != n || x.cols() != n || !x.trace().is_zero())
        throw PreconditionViolation("element is not in sl_n");
    std::vector<Scalar> c;
    c.reserve(alg.basis.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) c.push_back(x.at(i, j));
    // diag(m_1..m_n) = sum_i (m_1 + ... + m_i) (E_ii - E_{i+1,i+1})
    Scalar run;
    for (int i = 0; i + 1 < n; ++i) {
        run += x.at(i, i);
        c.push_back(run);
    }
    return c;
}

Scalar killing_form(const LieAlgebraSLn& alg, const SMatrix& x,
                    const SMatrix& y) {
    // trace(ad x . ad y) = sum_j coord_j([x, [y, b_j]])
    Scalar b;
    for (std::size_t j = 0; j < alg.basis.size(); ++j) {
        const SMatrix w = commutator(x, commutator(y, alg.basis[j]));
        b += sl_coordinates(alg, w)[j];
    }
    return b;
}

bool Subspace::add(const SMatrix& x) {
    std::vector<Scalar> v = flatten(x);
    reduce(v);
    int piv = -1;
    for (std::size_t j = 0; j < v.size(); ++j)
        if (!v[j].is_zero()) {
            piv = static_cast<int>(j);
            break;
        }
    if (piv < 0) return false;
    const Scalar lead = v[piv];
    for (auto& e : v) e = e / lead;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        const Scalar f = rows_[r][piv];  // copy: the loop overwrites the entry
        if (f.is_zero()) continue;
        for (std::size_t j = 0; j < v.size(); ++j)
            rows_[r][j] -= f * v[j];
    }
    // keep rows ordered by pivot column
    std::size_t pos = 0;
    while (pos < pivots_.size() && pivots_[pos] < piv) ++pos;
    rows_.insert(rows_.begin() + pos, std::move(v));
    pivots_.insert(pivots_.begin() + pos, piv);
    return true;
}

void Subspace::reduce(std::vector<Scalar>& v) const {
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        const Scalar& f = v[pivots_[r]];
        if (f.is_zero()) continue;
        const Scalar c = f;  // rows have unit pivots
        for (std::size_t j = 0; j < v.size(); ++j) v[j] -= c * rows_[r][j];
    }
}

bool Subspace::contains(const SMatrix& x) const {
    std::vector<Scalar> v = flatten(x);
    reduce(v);
    for (const Scalar& e : v)
        if (!e.is_zero()) return false;
    return true;
}

std::vector<SMatrix> Subspace::basis() const {
    std::vector<SMatrix> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.push_back(unflatten(r, n_));
    return out;
}

SMatrix involution(const SymmetricPair& pair, const SMatrix& x) {
    // fixed space is exactly so(F) = {X : X^T F + F X = 0}
    return (pair.f_inv * x.transpose() * pair.f) * Scalar(-1);
}

SymmetricPair build_pair(const QuadraticForm& f) {
    if (!f.is_exact())
        throw PreconditionViolation("pair construction needs an exact form");
    const int n = f.n();
    SymmetricPair pair;
    pair.algebra = sl_algebra(n);
    pair.f = f.matrix();
    pair.f_inv = pair.f.inverse();
    require_exact(pair.f);

    const auto& basis = pair.algebra.basis;
    std::vector<SMatrix> sigma;
    sigma.reserve(basis.size());
    for (const auto& b : basis) sigma.push_back(involution(pair, b));

    // involutive automorphism, verified exactly on the basis
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (!(involution(pair, sigma[i]) == basis[i]))
            throw ConditioningError("involution failed to square to identity");
        for (std::size_t j = i; j < basis.size(); ++j)
            if (!(involution(pair, commutator(basis[i], basis[j])) ==
                  commutator(sigma[i], sigma[j])))
                throw ConditioningError("involution is not an automorphism");
    }

    Subspace k_span(n), p_span(n);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        k_span.add(basis[i] + sigma[i]);
        p_span.add(basis[i] - sigma[i]);
    }
    pair.k_basis = k_span.basis();
    pair.p_basis = p_span.basis();

    if (k_span.dim() != n * (n - 1) / 2 ||
        p_span.dim() != n * (n + 1) / 2 - 1)
        throw ConditioningError("unexpected eigenspace dimensions");

    // k = so(F): every fixed vector satisfies X^T F + F X = 0, and the
    // dimensions already match
    for (const auto& kb : pair.k_basis)
        if (!(kb.transpose() * pair.f + pair.f * kb).is_zero())
            throw ConditioningError("fixed space is not so(F)");

    // [k,k] c k, [k,p] c p, [p,p] c k
    for (const auto& a : pair.k_basis) {
        for (const auto& b : pair.k_basis)
            if (!k_span.contains(commutator(a, b)))
                throw ConditioningError("[k,k] escapes k");
        for (const auto& b : pair.p_basis)
            if (!p_span.contains(commutator(a, b)))
                throw ConditioningError("[k,p] escapes p");
    }
    for (const auto& a : pair.p_basis)
        for (const auto& b : pair.p_basis)
            if (!k_span.contains(commutator(a, b)))
                throw ConditioningError("[p,p] escapes k");

    return pair;
}

bool verify_step_b(const SymmetricPair& pair) {
    const int n = pair.algebra.n;
    Subspace bracket_span(n);
    for (std::size_t i = 0; i < pair.p_basis.size(); ++i)
        for (std::size_t j = i + 1; j < pair.p_basis.size(); ++j)
            bracket_span.add(commutator(pair.p_basis[i], pair.p_basis[j]));
    if (bracket_span.dim() != static_cast<int>(pair.k_basis.size()))
        return false;
    for (const auto& kb : pair.k_basis)
        if (!bracket_span.contains(kb)) return false;
    return true;
}

namespace {

Scalar gram_det(const LieAlgebraSLn& alg, const std::vector<SMatrix>& basis) {
    const int m = static_cast<int>(basis.size());
    SMatrix g(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            Scalar v = killing_form(alg, basis[i], basis[j]);
            g.at(i, j) = v;
            g.at(j, i) = std::move(v);
        }
    return g.det();
}

}  // namespace

bool verify_orthogonality(const SymmetricPair& pair) {
    for (const auto& kb : pair.k_basis)
        for (const auto& pb : pair.p_basis)
            if (!killing_form(pair.algebra, kb, pb).is_zero()) return false;
    return !gram_det(pair.algebra, pair.k_basis).is_zero() &&
           !gram_det(pair.algebra, pair.p_basis).is_zero();
}

Subspace invariant_span(const SymmetricPair& pair,
                        const std::vector<SMatrix>& seeds) {
    Subspace span(pair.algebra.n);
    std::vector<SMatrix> work;
    for (const auto& s : seeds)
        if (span.add(s)) work.push_back(s);
    while (!work.empty()) {
        const SMatrix v = std::move(work.back());
        work.pop_back();
        for (const auto& kb : pair.k_basis) {
            SMatrix w = commutator(kb, v);
            if (span.add(w)) work.push_back(std::move(w));
        }
    }
    return span;
}

bool maximality_check(const SymmetricPair& pair, int trials,
                      std::uint64_t seed) {
    const int n = pair.algebra.n;
    if (n < 3)
        throw HypothesisViolation(
            "maximality needs k semisimple, which fails for sl_2");
    if (trials < 1) throw PreconditionViolation("trials must be >= 1");

    const int full = n * n - 1;
    const int pdim = static_cast<int>(pair.p_basis.size());
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> coeff(-3, 3);

    for (int t = 0; t < trials; ++t) {
        SMatrix w(n, n);
        bool nonzero = false;
        while (!nonzero) {
            w = SMatrix(n, n);
            for (const auto& pb : pair.p_basis) {
                const int c = coeff(rng);
                if (c != 0) w = w + pb * Scalar(c);
            }
            nonzero = !w.is_zero();
        }

        std::vector<SMatrix> seeds = pair.k_basis;
        seeds.push_back(w);
        if (invariant_span(pair, seeds).dim() != full) return false;

        // ad(k) keeps p invariant, so the closure of {w} must be exactly p
        const Subspace orbit = invariant_span(pair, {w});
        if (orbit.dim() != pdim) return false;
        for (const auto& pb : pair.p_basis)
            if (!orbit.contains(pb)) return false;
    }
    return true;
}

Sl2Report counterexample_sl2() {
    SMatrix anti(2, 2);
    anti.at(0, 1) = Scalar(1);
    anti.at(1, 0) = Scalar(1);
    const auto pair = build_pair(QuadraticForm(std::move(anti)));

    SMatrix e12(2, 2), e21(2, 2), h(2, 2);
    e12.at(0, 1) = Scalar(1);
    e21.at(1, 0) = Scalar(1);
    h.at(0, 0) = Scalar(1);
    h.at(1, 1) = Scalar(-1);

    Sl2Report rep;
    rep.dim_k = static_cast<int>(pair.k_basis.size());
    rep.dim_g = 3;

    const Subspace mid = invariant_span(pair, {h, e12});
    rep.dim_intermediate = mid.dim();
    rep.intermediate_invariant = mid.dim() == 2 && mid.contains(h) &&
                                 mid.contains(e12) && !mid.contains(e21);

    // n = span{E_12} and m = span{E_21} are the +-2 weight lines of ad h
    const Subspace nline = invariant_span(pair, {e12});
    const Subspace mline = invariant_span(pair, {e21});
    rep.upper_lower_weights = nline.dim() == 1 && mline.dim() == 1;
    rep.nil_lines_abelian = commutator(e12, e12).is_zero() &&
                            commutator(e21, e21).is_zero();
    rep.killing_null_on_n = killing_form(pair.algebra, e12, e12).is_zero();

    Subspace from_bracket(2);
    from_bracket.add(commutator(e21, e12));
    rep.k_from_bracket =
        from_bracket.dim() == 1 && from_bracket.contains(pair.k_basis[0]);
    return rep;
}

}  // namespace formlab
