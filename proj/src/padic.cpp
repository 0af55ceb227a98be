#include "formlab/padic.hpp"

#include <unordered_set>

#include "formlab/intmat.hpp"

namespace formlab {

namespace {

bool is_prime_long(long p) {
    if (p < 2) return false;
    const Integer n(p);
    return mpz_probab_prime_p(n.backend().data(), 32) != 0;
}

int valuation(Integer v, long p, int cap) {
    if (v == 0) return cap;
    int k = 0;
    while (k < cap && v % p == 0) {
        v /= p;
        ++k;
    }
    return k;
}

struct Frontier {
    // packed coordinates mod p^k, radix p, little-endian by coordinate digit
    std::vector<std::vector<Integer>> states;
};

}  // namespace

PadicModel padic_model(const QuadraticForm& f, long p) {
    if (!f.is_exact() || f.quad_d() != 0)
        throw PreconditionViolation("p-adic isotropy needs a rational form");
    if (!is_prime_long(p)) throw PreconditionViolation("p must be prime");
    const int n = f.n();
    PadicModel m;
    m.p = p;
    m.n = n;
    Integer den = 1;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) den = lcm(den, denominator(f.at(i, j).rational()));
    Integer content = 0;
    m.g.assign(n, std::vector<Integer>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Rational& r = f.at(i, j).rational();
            m.g[i][j] = numerator(r) * (den / denominator(r));
            content = gcd(content, m.g[i][j]);
        }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m.g[i][j] /= content;
    IMatrix gm = m.g;
    const Integer det = imat_det(gm);
    m.default_level = 2 * valuation(2 * det, p, 64) + 3;
    return m;
}

bool padic_isotropy_by_search(const PadicModel& model, int level_cap) {
    const long p = model.p;
    const int n = model.n;
    const int max_level = level_cap > 0 ? level_cap : model.default_level;

    double start_count = 1;
    for (int i = 0; i < n; ++i) start_count *= double(p);
    if (start_count > 2e7)
        throw ConditioningError("p^n too large for the lifting search");

    auto eval_g = [&](const std::vector<Integer>& x) {
        Integer acc = 0;
        for (int i = 0; i < n; ++i) {
            if (x[i] == 0) continue;
            acc += model.g[i][i] * x[i] * x[i];
            for (int j = i + 1; j < n; ++j) acc += 2 * model.g[i][j] * x[i] * x[j];
        }
        return acc;
    };
    auto gradient = [&](const std::vector<Integer>& x) {
        std::vector<Integer> grad(n);
        for (int i = 0; i < n; ++i) {
            Integer acc = 0;
            for (int j = 0; j < n; ++j) acc += model.g[i][j] * x[j];
            grad[i] = 2 * acc;
        }
        return grad;
    };

    // level 1: primitive solutions of F(x) = 0 mod p
    Integer pk = p;  // p^k for the current level
    std::vector<std::vector<Integer>> frontier;
    {
        std::vector<Integer> x(n, Integer(0));
        while (true) {
            bool nonzero = false;
            for (int i = 0; i < n; ++i)
                if (x[i] != 0) nonzero = true;
            if (nonzero && eval_g(x) % p == 0) frontier.push_back(x);
            int c = 0;
            while (c < n) {
                x[c] += 1;
                if (x[c] < p) break;
                x[c] = 0;
                ++c;
            }
            if (c == n) break;
        }
    }

    for (int k = 1; k <= max_level; ++k) {
        if (frontier.empty()) return false;  // no solution mod p^k => anisotropic
        // Hensel certificate: F(x) = 0 mod p^k with k >= 2m+1,
        // m = min_i v_p((2Gx)_i) < k, lifts to a p-adic zero.
        for (const auto& x : frontier) {
            const std::vector<Integer> grad = gradient(x);
            int m = k;
            for (int i = 0; i < n; ++i) m = std::min(m, valuation(grad[i], p, k));
            if (m < k && k >= 2 * m + 1) return true;
        }
        if (k == max_level) break;
        // expand to level k+1
        std::vector<std::vector<Integer>> next;
        const Integer pk1 = pk * p;
        std::vector<Integer> e(n);
        for (const auto& x : frontier) {
            std::fill(e.begin(), e.end(), Integer(0));
            while (true) {
                std::vector<Integer> y(n);
                for (int i = 0; i < n; ++i) y[i] = x[i] + pk * e[i];
                if (eval_g(y) % pk1 == 0) next.push_back(std::move(y));
                int c = 0;
                while (c < n) {
                    e[c] += 1;
                    if (e[c] < p) break;
                    e[c] = 0;
                    ++c;
                }
                if (c == n) break;
            }
            if (next.size() > 4'000'000)
                throw ConditioningError("p-adic lifting frontier exceeded its budget");
        }
        frontier = std::move(next);
        pk = pk1;
    }
    if (frontier.empty()) return false;
    throw PadicUndecided(max_level);
}

bool is_isotropic_padic(const QuadraticForm& f, long p, int level_cap) {
    const PadicModel model = padic_model(f, p);
    if (f.n() >= 5) return true;  // every rank >= 5 form is isotropic over Q_p
    return padic_isotropy_by_search(model, level_cap);
}

}  // namespace formlab
