#include "formlab/search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <utility>

#include "formlab/errors.hpp"

namespace formlab {
namespace {

// Exact value of a finite double as a rational (doubles are dyadic).
Rational dyadic_from_double(double x) {
    int e = 0;
    const double m = std::frexp(x, &e);
    const auto mi = static_cast<long long>(std::ldexp(m, 53));  // exact
    Rational r{Integer(mi)};
    const int shift = e - 53;
    if (shift >= 0) return r * Rational(pow(Integer(2), unsigned(shift)));
    return r / Rational(pow(Integer(2), unsigned(-shift)));
}

long long gcd_ll(long long a, long long b) {
    return std::gcd(std::llabs(a), std::llabs(b));
}

long long content(const IntVector& x) {
    long long g = 0;
    for (long long c : x) g = gcd_ll(g, c);
    return g;
}

long long isqrt_ll(long long n) {
    if (n <= 0) return 0;
    auto r = static_cast<long long>(std::sqrt(double(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

// ---------------------------------------------------------------------------
// Certified double shadow of the form.  Every double evaluation of F over the
// box ||x||_inf <= r differs from the true value by at most margin(r): the
// coefficient conversion contributes conv_err * (sum |x_i|)^2 and the double
// accumulation is covered by 2^-48 * maxabs * n^2 * r^2 (worst-case rounding
// is ~2^-52 per operation; the slack absorbs the summation length).

struct DoubleModel {
    int n = 0;
    std::vector<double> g;
    double conv_err = 0;
    double maxabs = 0;
    bool usable = true;

    double at(int i, int j) const { return g[std::size_t(i) * n + j]; }

    double margin(long long r) const {
        if (!usable) return std::numeric_limits<double>::infinity();
        const double nr = double(n) * double(r);
        return conv_err * nr * nr +
               std::ldexp(std::max(1.0, maxabs) * double(n) * double(n) *
                              double(r) * double(r),
                          -48);
    }
};

DoubleModel build_double_model(const QuadraticForm& f) {
    DoubleModel dm;
    dm.n = f.n();
    dm.g.assign(std::size_t(dm.n) * dm.n, 0.0);
    for (int i = 0; i < dm.n; ++i)
        for (int j = 0; j < dm.n; ++j) {
            const Scalar& s = f.at(i, j);
            const double d = s.to_double();
            if (!std::isfinite(d)) {
                dm.usable = false;
                return dm;
            }
            dm.g[std::size_t(i) * dm.n + j] = d;
            const Scalar diff = (s - Scalar(dyadic_from_double(d))).abs();
            const double err = diff.to_double() * (1 + 1e-9) + 1e-300;
            dm.conv_err = std::max(dm.conv_err, err);
            dm.maxabs = std::max(dm.maxabs, std::fabs(d));
        }
    return dm;
}

// One acceptance window on the value of F.  Endpoint comparisons are exact
// (Scalar::cmp); the double mirror plus `slack` only short-circuits
// decisions that are too far from the ends to flip.
struct WindowD {
    Scalar lo, hi;
    bool lo_strict = false;
    bool hi_strict = false;
    double lo_d = 0, hi_d = 0, slack = 0;
};

void prep_window(WindowD& w, double margin) {
    w.lo_d = w.lo.to_double();
    w.hi_d = w.hi.to_double();
    w.slack = margin +
              (std::fabs(w.lo_d) + std::fabs(w.hi_d) + 1.0) * 1e-12;
    if (!std::isfinite(w.lo_d) || !std::isfinite(w.hi_d))
        w.slack = std::numeric_limits<double>::infinity();
}

bool ground_in(const WindowD& w, const Scalar& val) {
    const int cl = val.cmp(w.lo);
    if (w.lo_strict ? cl <= 0 : cl < 0) return false;
    const int ch = val.cmp(w.hi);
    return !(w.hi_strict ? ch >= 0 : ch > 0);
}

bool ground_in_any(const std::vector<WindowD>& ws, const Scalar& val) {
    for (const auto& w : ws)
        if (ground_in(w, val)) return true;
    return false;
}

// ---------------------------------------------------------------------------
// Restriction of F to the affine line t -> v + t e_k (all coordinates of v
// except k are fixed).  True function: q(t) = A t^2 + B t + C with exact
// A = f_kk; the double mirror carries the model margin.

struct Line {
    const QuadraticForm* f = nullptr;
    IntVector* v = nullptr;  // shared buffer; coordinate k is scratch
    int k = 0;
    int a_sign = 0;  // exact sign of f_kk
    double margin = 0;
    double Ad = 0, Bd = 0, Cd = 0;
    long long* evals = nullptr;
    mutable bool have_b = false;
    mutable Scalar B;  // exact slope coefficient, built on demand

    double qd(long long t) const {
        const double td = double(t);
        return (Ad * td + Bd) * td + Cd;
    }

    Scalar ground(long long t) const {
        ++*evals;
        (*v)[k] = t;
        return f->evaluate(*v);
    }

    // sign of q(t+1) - q(t) = A(2t+1) + B, certified or exact
    int delta_sign(long long t) const {
        ++*evals;
        const double q0 = qd(t), q1 = qd(t + 1);
        const double dd = q1 - q0;
        const double dm =
            2 * margin + (std::fabs(q0) + std::fabs(q1)) * 1e-15 + 1e-300;
        if (dd > dm) return 1;
        if (dd < -dm) return -1;
        if (!have_b) {
            B = Scalar(0);
            for (int j = 0; j < f->n(); ++j)
                if (j != k) B += f->at(k, j) * Scalar((*v)[j]);
            B *= Scalar(2);
            have_b = true;
        }
        return (f->at(k, k) * Scalar(2 * t + 1) + B).sign();
    }
};

bool below_hi(const Line& ln, const WindowD& w, long long t) {
    ++*ln.evals;
    const double q = ln.qd(t);
    if (q < w.hi_d - w.slack) return true;
    if (q > w.hi_d + w.slack) return false;
    const int c = ln.ground(t).cmp(w.hi);
    return w.hi_strict ? c < 0 : c <= 0;
}

bool above_lo(const Line& ln, const WindowD& w, long long t) {
    ++*ln.evals;
    const double q = ln.qd(t);
    if (q > w.lo_d + w.slack) return true;
    if (q < w.lo_d - w.slack) return false;
    const int c = ln.ground(t).cmp(w.lo);
    return w.lo_strict ? c > 0 : c >= 0;
}

struct IntInterval {
    long long lo, hi;  // inclusive
};

// first t in [lo, hi] with pred(t); pred monotone non-decreasing, pred(hi).
template <class P>
long long first_true(long long lo, long long hi, P pred) {
    while (lo < hi) {
        const long long mid = lo + (hi - lo) / 2;
        if (pred(mid))
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

// last t in [lo, hi] with pred(t); pred monotone non-increasing, pred(lo).
template <class P>
long long last_true(long long lo, long long hi, P pred) {
    while (lo < hi) {
        const long long mid = lo + (hi - lo + 1) / 2;
        if (pred(mid))
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

// Append the maximal integer intervals of {t in [ta, tb] : q(t) in w}.
// Rests on the true q being an exact quadratic: the <= hi region is
// contiguous and the < lo dip is contiguous, so boundaries are found by
// binary search on certified predicates around the exact integer extremizer.
void solve_window(const Line& ln, const WindowD& w, long long ta, long long tb,
                  std::vector<IntInterval>& out) {
    if (ta > tb) return;

    auto scan_all = [&] {
        long long run = 0;
        bool inrun = false;
        for (long long t = ta; t <= tb; ++t) {
            const bool in = below_hi(ln, w, t) && above_lo(ln, w, t);
            if (in && !inrun) {
                run = t;
                inrun = true;
            } else if (!in && inrun) {
                out.push_back({run, t - 1});
                inrun = false;
            }
        }
        if (inrun) out.push_back({run, tb});
    };

    if (tb - ta <= 8) {
        scan_all();
        return;
    }

    if (ln.a_sign == 0) {
        const int bs = ln.delta_sign(ta);  // slope sign, exact
        if (bs == 0) {
            if (below_hi(ln, w, ta) && above_lo(ln, w, ta))
                out.push_back({ta, tb});
            return;
        }
        // strictly monotone line: the window preimage is one interval
        auto enter = [&](long long t) {
            return bs > 0 ? above_lo(ln, w, t) : below_hi(ln, w, t);
        };
        auto stay = [&](long long t) {
            return bs > 0 ? below_hi(ln, w, t) : above_lo(ln, w, t);
        };
        if (!enter(tb) || !stay(ta)) return;
        const long long l = enter(ta) ? ta : first_true(ta, tb, enter);
        const long long r = stay(tb) ? tb : last_true(ta, tb, stay);
        if (l <= r) out.push_back({l, r});
        return;
    }

    // Quadratic: normalize to an upward parabola by swapping the roles of
    // the two one-sided predicates when f_kk < 0.
    const bool neg = ln.a_sign < 0;
    auto conv = [&](long long t) {  // contiguous region
        return neg ? above_lo(ln, w, t) : below_hi(ln, w, t);
    };
    auto coconv = [&](long long t) {  // complement of a contiguous dip
        return neg ? below_hi(ln, w, t) : above_lo(ln, w, t);
    };

    // exact integer extremizer: first t with q(t+1) > q(t) (resp. <), clamped
    const double tv = -ln.Bd / (2 * ln.Ad);
    if (!std::isfinite(tv)) {
        scan_all();
        return;
    }
    long long t0;
    if (tv <= double(ta))
        t0 = ta;
    else if (tv >= double(tb))
        t0 = tb;
    else
        t0 = std::clamp(static_cast<long long>(std::llround(tv)), ta, tb);
    auto dsign = [&](long long t) {
        const int s = ln.delta_sign(t);
        return neg ? -s : s;
    };
    int guard = 0;
    while (t0 > ta && dsign(t0 - 1) > 0) {
        --t0;
        if (++guard > 64) {
            scan_all();
            return;
        }
    }
    while (t0 < tb && dsign(t0) <= 0) {
        ++t0;
        if (++guard > 64) {
            scan_all();
            return;
        }
    }

    if (!conv(t0)) return;  // even the extreme value misses the window side
    const long long L = conv(ta) ? ta : first_true(ta, t0, conv);
    const long long R = conv(tb) ? tb : last_true(t0, tb, conv);
    if (coconv(t0)) {
        out.push_back({L, R});
        return;
    }
    if (coconv(L)) out.push_back({L, last_true(L, t0, coconv)});
    if (coconv(R)) out.push_back({first_true(t0, R, coconv), R});
}

void merge_intervals(std::vector<IntInterval>& iv) {
    std::sort(iv.begin(), iv.end(), [](const IntInterval& a, const IntInterval& b) {
        return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
    });
    std::size_t n = 0;
    for (const auto& it : iv) {
        if (n > 0 && iv[n - 1].hi >= it.lo)
            iv[n - 1].hi = std::max(iv[n - 1].hi, it.hi);
        else
            iv[n++] = it;
    }
    iv.resize(n);
}

// ---------------------------------------------------------------------------
// Box census: odometer over the first n-1 coordinates, window solve on the
// last.  Interval interiors are counted by length; only boundary decisions
// ever touch exact arithmetic.

struct BoxParams {
    std::vector<WindowD> windows;
    long long r = 0;
    bool primitive_only = false;
    bool euclidean = false;
    long long max_evals = 0;
    std::size_t sample_cap = 0;
};

BandResult run_box_census(const QuadraticForm& f, BoxParams P) {
    BandResult res;
    const int n = f.n();
    if (P.r <= 0) return res;

    const DoubleModel dm = build_double_model(f);
    const double margin = dm.margin(P.r);
    for (auto& w : P.windows) prep_window(w, margin);

    IntVector v(n, 0);
    Line ln;
    ln.f = &f;
    ln.v = &v;
    ln.k = n - 1;
    ln.a_sign = f.at(n - 1, n - 1).sign();
    ln.margin = margin;
    ln.Ad = dm.usable ? dm.at(n - 1, n - 1) : 0.0;
    ln.evals = &res.evals;

    const long long rr = P.r * P.r;
    std::vector<IntInterval> iv;

    for (int j = 0; j < n - 1; ++j) v[j] = -P.r;
    while (true) {
        ++res.evals;
        if (res.evals > P.max_evals) {
            res.partial = true;
            break;
        }
        long long ta = -P.r, tb = P.r;
        long long ss = 0, pgcd = 0;
        bool skip = false;
        for (int j = 0; j < n - 1; ++j) {
            ss += v[j] * v[j];
            pgcd = gcd_ll(pgcd, v[j]);
        }
        if (P.euclidean) {
            if (ss > rr) skip = true;
            else {
                const long long te = isqrt_ll(rr - ss);
                ta = -te;
                tb = te;
            }
        }
        if (!skip) {
            ln.Bd = 0;
            ln.Cd = 0;
            if (dm.usable) {
                for (int a = 0; a < n - 1; ++a) {
                    ln.Bd += dm.at(n - 1, a) * double(v[a]);
                    for (int b = 0; b < n - 1; ++b)
                        ln.Cd += dm.at(a, b) * double(v[a]) * double(v[b]);
                }
                ln.Bd *= 2;
            }
            ln.have_b = false;
            iv.clear();
            for (const auto& w : P.windows) solve_window(ln, w, ta, tb, iv);
            merge_intervals(iv);
            for (const auto& seg : iv) {
                if (P.primitive_only) {
                    for (long long t = seg.lo; t <= seg.hi; ++t) {
                        ++res.evals;
                        if (res.evals > P.max_evals) {
                            res.partial = true;
                            break;
                        }
                        if (gcd_ll(pgcd, t) != 1) continue;
                        ++res.count;
                        if (res.samples.size() < P.sample_cap) {
                            v[n - 1] = t;
                            res.samples.push_back(v);
                        }
                    }
                    if (res.partial) break;
                } else {
                    res.count += seg.hi - seg.lo + 1;
                    if (pgcd == 0 && seg.lo <= 0 && 0 <= seg.hi)
                        --res.count;  // the all-zero point is never reported
                    for (long long t = seg.lo;
                         t <= seg.hi && res.samples.size() < P.sample_cap; ++t) {
                        if (pgcd == 0 && t == 0) continue;  // origin
                        v[n - 1] = t;
                        res.samples.push_back(v);
                    }
                }
            }
        }
        if (res.partial) break;
        int j = n - 2;
        while (j >= 0 && v[j] == P.r) {
            v[j] = -P.r;
            --j;
        }
        if (j < 0) break;
        ++v[j];
    }
    return res;
}

// ---------------------------------------------------------------------------
// Expanding sup-norm shells.  A shell point is keyed by the first coordinate
// achieving the norm; the remaining coordinates split into enumerated ones
// and one window-solved coordinate, so a shell costs O(s^{n-2}) line solves.

struct ShellParams {
    std::vector<WindowD> windows;
    bool require_primitive = true;
    std::function<bool(const IntVector&, const Scalar&)> accept;
    long long max_radius = 0;
    long long max_evals = 0;
    std::size_t cap = 1;
};

struct ShellOut {
    std::vector<SmallValueHit> hits;
    long long evals = 0;
    bool budget_hit = false;
};

ShellOut run_shells(const QuadraticForm& f, ShellParams sp) {
    ShellOut out;
    const int n = f.n();
    const DoubleModel dm = build_double_model(f);
    const double margin = dm.margin(sp.max_radius);
    for (auto& w : sp.windows) prep_window(w, margin);

    IntVector v(n, 0);

    if (n == 1) {
        for (long long s = 1; s <= sp.max_radius; ++s) {
            for (int sg = 0; sg < 2; ++sg) {
                if (++out.evals > sp.max_evals) {
                    out.budget_hit = true;
                    return out;
                }
                v[0] = sg == 0 ? s : -s;
                const Scalar val = f.evaluate(v);
                if (!ground_in_any(sp.windows, val)) continue;
                if (sp.require_primitive && s != 1) continue;
                if (sp.accept && !sp.accept(v, val)) continue;
                out.hits.push_back({v, val, s, out.evals});
                if (out.hits.size() >= sp.cap) return out;
            }
        }
        return out;
    }

    Line ln;
    ln.f = &f;
    ln.v = &v;
    ln.margin = margin;
    ln.evals = &out.evals;

    std::vector<IntInterval> iv;
    std::vector<int> fc;  // enumerated coordinates

    for (long long s = 1; s <= sp.max_radius; ++s) {
        for (int i = 0; i < n; ++i) {
            for (int sg = 0; sg < 2; ++sg) {
                std::fill(v.begin(), v.end(), 0);
                v[i] = sg == 0 ? s : -s;
                const int k = (i == n - 1) ? n - 2 : n - 1;
                ln.k = k;
                ln.a_sign = f.at(k, k).sign();
                ln.Ad = dm.usable ? dm.at(k, k) : 0.0;
                const long long tl = (k < i) ? s - 1 : s;
                fc.clear();
                for (int j = 0; j < n; ++j)
                    if (j != i && j != k) fc.push_back(j);
                for (int j : fc) v[j] = -(j < i ? s - 1 : s);
                while (true) {
                    ++out.evals;
                    if (out.evals > sp.max_evals) {
                        out.budget_hit = true;
                        return out;
                    }
                    ln.Bd = 0;
                    ln.Cd = 0;
                    if (dm.usable) {
                        for (int a = 0; a < n; ++a) {
                            if (a == k) continue;
                            ln.Bd += dm.at(k, a) * double(v[a]);
                            for (int b = 0; b < n; ++b)
                                if (b != k)
                                    ln.Cd +=
                                        dm.at(a, b) * double(v[a]) * double(v[b]);
                        }
                        ln.Bd *= 2;
                    }
                    ln.have_b = false;
                    iv.clear();
                    for (const auto& w : sp.windows)
                        solve_window(ln, w, -tl, tl, iv);
                    merge_intervals(iv);
                    for (const auto& seg : iv) {
                        for (long long t = seg.lo; t <= seg.hi; ++t) {
                            const Scalar val = ln.ground(t);  // sets v[k] = t
                            if (!ground_in_any(sp.windows, val))
                                continue;  // boundary re-check, certified path
                            if (sp.require_primitive && content(v) != 1)
                                continue;
                            if (sp.accept && !sp.accept(v, val)) continue;
                            out.hits.push_back({v, val, s, out.evals});
                            if (out.hits.size() >= sp.cap) return out;
                        }
                    }
                    // advance the enumerated coordinates
                    std::size_t a = fc.size();
                    while (a > 0) {
                        const int j = fc[a - 1];
                        const long long lim = j < i ? s - 1 : s;
                        if (v[j] == lim) {
                            v[j] = -lim;
                            --a;
                        } else {
                            ++v[j];
                            break;
                        }
                    }
                    if (a == 0) break;
                }
            }
        }
    }
    return out;
}

Integer eval_int_form(const std::vector<std::vector<Integer>>& g,
                      const IntVector& x) {
    Integer acc = 0;
    const std::size_t n = g.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            acc += g[i][j] * Integer(x[i]) * Integer(x[j]);
    return acc;
}

Scalar eval_integer_columns(const QuadraticForm& f,
                            const std::vector<Integer>& x) {
    Scalar acc(0);
    for (int i = 0; i < f.n(); ++i)
        for (int j = 0; j < f.n(); ++j) {
            const Integer prod = x[i] * x[j];
            if (prod == 0) continue;
            acc += f.at(i, j) * Scalar(prod);
        }
    return acc;
}

struct CompletionResult {
    bool ok = false;
    IMatrix v;
};

// Unimodular row reduction of the column tuple to [I_m; 0], mirrored as
// inverse column operations on V (so V * reduced = original at every step).
CompletionResult completion_core(const IntTuple& t) {
    if (t.empty()) throw PreconditionViolation("tuple must be nonempty");
    const std::size_t n = t[0].size();
    const std::size_t m = t.size();
    if (n == 0 || m > n)
        throw PreconditionViolation("tuple needs m <= n and n >= 1");
    for (const auto& col : t)
        if (col.size() != n)
            throw PreconditionViolation("tuple vectors must share a dimension");

    IMatrix x(n, std::vector<Integer>(m, 0));
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < n; ++i) x[i][j] = Integer(t[j][i]);
    IMatrix v = imat_identity(int(n));

    auto row_add = [&](std::size_t dst, std::size_t src, const Integer& c) {
        for (std::size_t j = 0; j < m; ++j) x[dst][j] += c * x[src][j];
        for (std::size_t i = 0; i < n; ++i) v[i][src] -= c * v[i][dst];
    };
    auto row_swap = [&](std::size_t a, std::size_t b) {
        std::swap(x[a], x[b]);
        for (std::size_t i = 0; i < n; ++i) std::swap(v[i][a], v[i][b]);
    };
    auto row_neg = [&](std::size_t a) {
        for (std::size_t j = 0; j < m; ++j) x[a][j] = -x[a][j];
        for (std::size_t i = 0; i < n; ++i) v[i][a] = -v[i][a];
    };

    for (std::size_t j = 0; j < m; ++j) {
        while (true) {
            std::size_t p = n;
            for (std::size_t q = j; q < n; ++q)
                if (x[q][j] != 0 && (p == n || abs(x[q][j]) < abs(x[p][j])))
                    p = q;
            if (p == n) return {};  // column exhausted: dependent or zero
            if (p != j) row_swap(p, j);
            bool dirty = false;
            for (std::size_t q = j + 1; q < n; ++q)
                if (x[q][j] != 0) {
                    dirty = true;
                    row_add(q, j, -(x[q][j] / x[j][j]));
                }
            if (!dirty) break;
        }
        if (abs(x[j][j]) != 1) return {};  // pivot > 1: minor gcd exceeds 1
        if (x[j][j] < 0) row_neg(j);
        for (std::size_t q = 0; q < n; ++q)
            if (q != j && x[q][j] != 0) row_add(q, j, -x[q][j]);
    }
    return {true, std::move(v)};
}

}  // namespace

BandResult enumerate_band(const QuadraticForm& f, const BandQuery& q,
                          const SearchBudget& budget, std::size_t sample_cap) {
    if (q.a.sign() < 0)
        throw PreconditionViolation("band must start at a >= 0");
    if (q.a.cmp(q.b) > 0)
        throw PreconditionViolation("band needs a <= b");
    if (q.r < 0) throw PreconditionViolation("box radius must be >= 0");

    BoxParams P;
    P.windows.push_back({q.a, q.b, false, false});
    P.windows.push_back({-q.b, -q.a, false, false});
    P.r = q.r;
    P.primitive_only = q.primitive_only;
    P.euclidean = q.euclidean;
    P.max_evals = budget.max_evals;
    P.sample_cap = sample_cap;
    return run_box_census(f, std::move(P));
}

std::optional<SmallValueHit> find_small_value(const QuadraticForm& f,
                                              const Scalar& eps,
                                              const SearchBudget& budget,
                                              bool strict_nonzero) {
    if (eps.sign() <= 0) throw PreconditionViolation("eps must be positive");
    ShellParams sp;
    if (strict_nonzero) {
        sp.windows.push_back({Scalar(0), eps, true, true});
        sp.windows.push_back({-eps, Scalar(0), true, true});
    } else {
        sp.windows.push_back({-eps, eps, true, true});
    }
    sp.require_primitive = true;
    sp.max_radius = budget.max_radius;
    sp.max_evals = budget.max_evals;
    sp.cap = 1;
    auto out = run_shells(f, std::move(sp));
    if (out.hits.empty()) return std::nullopt;
    return out.hits.front();
}

std::pair<long long, long long> sign_profile(const std::vector<Scalar>& values,
                                             const Scalar& eps) {
    long long pos = 0, neg = 0;
    for (const auto& val : values) {
        const int s = val.sign();
        if (s > 0 && val.cmp(eps) < 0) ++pos;
        if (s < 0 && (-val).cmp(eps) < 0) ++neg;
    }
    return {pos, neg};
}

bool is_primitive_tuple(const IntTuple& t) { return completion_core(t).ok; }

IMatrix complete_to_unimodular(const IntTuple& t) {
    auto core = completion_core(t);
    if (!core.ok)
        throw PrimitivityViolation("tuple is not part of an integral basis");
    const std::size_t n = core.v.size();
    if (t.size() < n && imat_det(core.v) < 0)
        for (auto& row : core.v) row[n - 1] = -row[n - 1];
    return std::move(core.v);
}

std::optional<IntTuple> primitive_tuple_approx(const QuadraticForm& f,
                                               const std::vector<Scalar>& targets,
                                               const Scalar& eps,
                                               const SearchBudget& budget) {
    const int n = f.n();
    const std::size_t m = targets.size();
    if (m < 1 || m + 1 > std::size_t(n))
        throw PreconditionViolation("need 1 <= #targets <= n-1");
    if (eps.sign() <= 0) throw PreconditionViolation("eps must be positive");

    constexpr std::size_t kPerTarget = 48;
    std::vector<std::vector<SmallValueHit>> cand(m);
    bool all_found = true;
    for (std::size_t i = 0; i < m; ++i) {
        ShellParams sp;
        sp.windows.push_back({targets[i] - eps, targets[i] + eps, true, true});
        sp.require_primitive = true;
        sp.max_radius = budget.max_radius;
        sp.max_evals = budget.max_evals / (2 * (long long)m) + 1;
        sp.cap = kPerTarget;
        auto out = run_shells(f, std::move(sp));
        cand[i] = std::move(out.hits);
        if (cand[i].empty()) all_found = false;
    }

    if (all_found) {
        std::size_t kmax = 0;
        for (const auto& c : cand) kmax = std::max(kmax, c.size());
        long long visited = 0;
        std::vector<std::size_t> idx(m, 0);
        for (std::size_t ring = 0; ring < kmax && visited < 200000; ++ring) {
            // all index tuples whose maximum entry is exactly `ring`
            std::fill(idx.begin(), idx.end(), 0);
            while (true) {
                bool usable = true, on_ring = false;
                for (std::size_t i = 0; i < m; ++i) {
                    if (idx[i] >= cand[i].size() || idx[i] > ring) usable = false;
                    if (idx[i] == ring) on_ring = true;
                }
                if (usable && on_ring && ++visited <= 200000) {
                    IntTuple tuple;
                    tuple.reserve(m);
                    for (std::size_t i = 0; i < m; ++i)
                        tuple.push_back(cand[i][idx[i]].x);
                    bool dup = false;
                    for (std::size_t a = 0; a + 1 < m && !dup; ++a)
                        for (std::size_t b = a + 1; b < m; ++b)
                            if (tuple[a] == tuple[b]) dup = true;
                    if (!dup && is_primitive_tuple(tuple)) return tuple;
                }
                std::size_t a = m;
                while (a > 0) {
                    if (idx[a - 1] == ring) {
                        idx[a - 1] = 0;
                        --a;
                    } else {
                        ++idx[a - 1];
                        break;
                    }
                }
                if (a == 0) break;
            }
        }
    }

    // Seeded elementary-matrix walk: columns of a unimodular matrix are
    // always a primitive tuple, so any score hit is already admissible.
    IMatrix g = imat_identity(n);
    std::mt19937_64 rng(budget.seed);
    std::uniform_int_distribution<int> coord(0, n - 1);
    std::uniform_int_distribution<int> coin(0, 1);
    const long long steps = std::min<long long>(20000, budget.max_evals);
    std::vector<Integer> col(n);
    for (long long step = 0; step < steps; ++step) {
        int i = coord(rng), j = coord(rng);
        if (i == j) continue;
        const int c = coin(rng) ? 1 : -1;
        for (int r = 0; r < n; ++r) g[r][j] += c * g[r][i];
        bool all = true;
        IntTuple tuple;
        for (std::size_t ti = 0; ti < m && all; ++ti) {
            for (int r = 0; r < n; ++r) col[r] = g[r][ti];
            const Scalar val = eval_integer_columns(f, col);
            if ((val - targets[ti]).abs().cmp(eps) >= 0) {
                all = false;
                break;
            }
            IntVector cv(n);
            for (int r = 0; r < n; ++r) {
                if (abs(col[r]) > Integer(1) << 62) {
                    all = false;
                    break;
                }
                cv[r] = static_cast<long long>(col[r]);
            }
            if (all) tuple.push_back(std::move(cv));
        }
        if (all && tuple.size() == m) return tuple;
    }
    return std::nullopt;
}

std::optional<SmallValueHit> approx_value(const QuadraticForm& f,
                                          const Scalar& c, const Scalar& eps,
                                          const SearchBudget& budget) {
    if (eps.sign() <= 0) throw PreconditionViolation("eps must be positive");
    if (c.is_zero()) return find_small_value(f, eps, budget, true);
    ShellParams sp;
    sp.windows.push_back({c - eps, c + eps, true, true});
    sp.require_primitive = true;
    sp.max_radius = budget.max_radius;
    sp.max_evals = budget.max_evals;
    sp.cap = 1;
    auto out = run_shells(f, std::move(sp));
    if (out.hits.empty()) return std::nullopt;
    return out.hits.front();
}

std::optional<PairDifferenceHit> pair_difference_search(
    const QuadraticForm& e, const Scalar& eps, const SearchBudget& budget) {
    const int n = e.n();
    if (n < 2) throw PreconditionViolation("difference search needs n >= 2");
    SMatrix d(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            d.at(i, j) = e.at(i, j);
            d.at(n + i, n + j) = -e.at(i, j);
        }
    const QuadraticForm diff(std::move(d));
    auto hit = find_small_value(diff, eps, budget, true);
    if (!hit) return std::nullopt;
    PairDifferenceHit out;
    out.x.assign(hit->x.begin(), hit->x.begin() + n);
    out.y.assign(hit->x.begin() + n, hit->x.end());
    out.difference = hit->value;
    out.radius = hit->radius;
    return out;
}

std::optional<SIntegerHit> s_integer_small_value(const QuadraticForm& f_real,
                                                 const PadicModel& f_padic,
                                                 const SIntegerContext& ctx,
                                                 const SearchBudget& budget) {
    const int n = f_real.n();
    if (f_padic.n != n)
        throw PreconditionViolation("real and p-adic components must share n");
    if (ctx.p != f_padic.p)
        throw PreconditionViolation("context prime differs from the model");
    if (ctx.e < 0)
        throw PreconditionViolation("denominator exponent must be >= 0");
    if (ctx.eps_real.sign() <= 0 || ctx.eps_real.cmp(Scalar(1)) >= 0)
        throw PreconditionViolation("real tolerance must lie in (0, 1)");
    if (ctx.eps_padic <= 0 || ctx.eps_padic >= 1)
        throw PreconditionViolation("p-adic tolerance must lie in (0, 1)");
    if (!is_isotropic_real(f_real))
        throw IsotropyViolation("real component has no nontrivial real zero");
    if (f_padic.n < 5 && !padic_isotropy_by_search(f_padic))
        throw IsotropyViolation("p-adic component has no nontrivial zero");

    const Integer p(ctx.p);
    // |F_p(v/p^e)|_p < eps_p  <=>  v_p(g(v)) >= 2e + w with p^w > 1/eps_p
    long long w = 1;
    Integer pw = p;
    while (pw * numerator(ctx.eps_padic) <= denominator(ctx.eps_padic)) {
        pw *= p;
        ++w;
    }
    const long long need = 2LL * ctx.e + w;
    const Integer p2e = pow(p, unsigned(2 * ctx.e));
    const Scalar scale{Rational(p2e)};
    const Scalar band = ctx.eps_real * scale;

    ShellParams sp;
    sp.windows.push_back({Scalar(0), band, true, true});
    sp.windows.push_back({-band, Scalar(0), true, true});
    sp.require_primitive = false;  // dividing v by a gcd can break p-divisibility
    sp.max_radius = budget.max_radius;
    sp.max_evals = budget.max_evals;
    sp.cap = 1;
    sp.accept = [&](const IntVector& v, const Scalar&) {
        Integer gv = eval_int_form(f_padic.g, v);
        if (gv == 0) return false;
        long long val = 0;
        while (val < need && gv % p == 0) {
            gv /= p;
            ++val;
        }
        return val >= need;
    };
    auto out = run_shells(f_real, std::move(sp));
    if (out.hits.empty()) return std::nullopt;

    const auto& hit = out.hits.front();
    SIntegerHit res;
    res.numerator = hit.x;
    res.x.reserve(n);
    const Integer pe = pow(p, unsigned(ctx.e));
    for (long long c : hit.x) res.x.push_back(Rational(Integer(c), pe));
    res.real_abs = hit.value.abs() / scale;
    Integer gv = eval_int_form(f_padic.g, hit.x);
    long long val = 0;
    while (gv % p == 0) {
        gv /= p;
        ++val;
    }
    res.padic_abs = val >= 2 * ctx.e
                        ? Rational(Integer(1), pow(p, unsigned(val - 2 * ctx.e)))
                        : Rational(pow(p, unsigned(2 * ctx.e - val)));
    res.radius = hit.radius;
    return res;
}

}  // namespace formlab
