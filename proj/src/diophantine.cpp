#include "formlab/diophantine.hpp"

#include <map>
#include <utility>

#include "formlab/errors.hpp"

namespace formlab {
namespace {

bool squarefree(long d) {
    if (d < 2) return false;
    for (long f = 2; f * f <= d; ++f)
        if (d % (f * f) == 0) return false;
    return true;
}

QuadExt qi_quad(const QuadraticIrrational& th) {
    return QuadExt(Rational(th.a, th.c), Rational(th.b, th.c), th.d);
}

// Continued-fraction state theta_k = (P + m*sqrt(d)) / Q with the classical
// invariant Q | m^2 d - P^2, which keeps the whole recurrence in integers.
struct CfEngine {
    Integer P, Q, m, D;
    long d;

    explicit CfEngine(const QuadraticIrrational& th) : d(th.d) {
        if (th.b > 0) {
            P = th.a;
            Q = th.c;
            m = th.b;
        } else {  // (a + b sqrt d)/c = (-a + |b| sqrt d)/(-c)
            P = -th.a;
            Q = -th.c;
            m = -th.b;
        }
        D = m * m * Integer(d);
        if ((D - P * P) % Q != 0) {
            const Integer s = abs(Q);
            P *= s;
            m *= s;
            Q *= s;
            D = m * m * Integer(d);
        }
    }

    Integer step() {  // emit a_k, advance to theta_{k+1} = 1/(theta_k - a_k)
        const Integer a = QuadExt(Rational(P, Q), Rational(m, Q), d).floor();
        P = a * Q - P;
        Q = (D - P * P) / Q;
        return a;
    }
};

}  // namespace

QuadraticIrrational make_quadratic_irrational(Integer a, Integer b, Integer c,
                                              long d) {
    if (b == 0) throw PreconditionViolation("quadratic irrational needs b != 0");
    if (c == 0) throw PreconditionViolation("zero denominator");
    if (!squarefree(d))
        throw PreconditionViolation("d must be squarefree and >= 2");
    if (c < 0) {
        a = -a;
        b = -b;
        c = -c;
    }
    const Integer g = gcd(gcd(abs(a), abs(b)), c);
    return {a / g, b / g, c / g, d};
}

QuadraticIrrational make_quadratic_irrational(const Scalar& s) {
    if (!s.is_quad())
        throw PreconditionViolation("value is not a quadratic irrational");
    const QuadExt& q = s.quad();
    // clear the two rational denominators
    const Integer lcm =
        denominator(q.a()) / gcd(denominator(q.a()), denominator(q.b())) *
        denominator(q.b());
    return make_quadratic_irrational(numerator(q.a()) * (lcm / denominator(q.a())),
                                     numerator(q.b()) * (lcm / denominator(q.b())),
                                     lcm, q.d());
}

Scalar qi_value(const QuadraticIrrational& th) { return Scalar(qi_quad(th)); }

ContinuedFraction cf_expand(const QuadraticIrrational& th, int depth) {
    if (depth < 1) throw PreconditionViolation("depth must be >= 1");
    ContinuedFraction cf;
    cf.quotients.reserve(depth);
    CfEngine eng(th);
    std::map<std::pair<Integer, Integer>, int> seen;
    for (int k = 0; k < depth; ++k) {
        if (cf.period == 0) {
            const auto [it, fresh] = seen.emplace(std::pair{eng.P, eng.Q}, k);
            if (!fresh) {
                cf.preperiod = it->second;
                cf.period = k - it->second;
            }
        }
        cf.quotients.push_back(eng.step());
    }
    if (cf.period == 0) {
        // keep going off-record until the state repeats, so callers always
        // get the exact cycle markers (cycles are short for small d)
        std::vector<Integer> extra;
        for (int k = depth; k < depth + 4096; ++k) {
            const auto [it, fresh] = seen.emplace(std::pair{eng.P, eng.Q}, k);
            if (!fresh) {
                cf.preperiod = it->second;
                cf.period = k - it->second;
                break;
            }
            eng.step();
        }
    }
    return cf;
}

std::vector<Convergent> convergents(const ContinuedFraction& cf) {
    std::vector<Convergent> out;
    out.reserve(cf.quotients.size());
    Integer p0 = 0, q0 = 1, p1 = 1, q1 = 0;  // p_{-2}/q_{-2}, p_{-1}/q_{-1}
    for (const Integer& a : cf.quotients) {
        const Integer p = a * p1 + p0;
        const Integer q = a * q1 + q0;
        out.push_back({p, q});
        p0 = p1;
        q0 = q1;
        p1 = p;
        q1 = q;
    }
    return out;
}

LiouvilleEstimate liouville_constant_estimate(const QuadraticIrrational& th,
                                              const Integer& bound) {
    if (bound < 1) throw PreconditionViolation("bound must be >= 1");
    const Scalar theta = qi_value(th);

    LiouvilleEstimate est;
    bool have_min = false;

    CfEngine eng(th);
    std::map<std::pair<Integer, Integer>, int> seen;
    std::vector<std::pair<Integer, Integer>> states;  // (Q_k, m_k) per index
    int preperiod = -1, period = 0;

    Integer p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    for (int k = 0; k < 100000; ++k) {
        if (period == 0) {
            const auto [it, fresh] = seen.emplace(std::pair{eng.P, eng.Q}, k);
            if (!fresh) {
                preperiod = it->second;
                period = k - it->second;
            } else {
                states.emplace_back(eng.Q, eng.m);
            }
        }
        const Integer a = eng.step();
        const Integer p = a * p1 + p0;
        const Integer q = a * q1 + q0;
        p0 = p1;
        q0 = q1;
        p1 = p;
        q1 = q;
        if (q <= bound) {
            // q^2 |theta - p/q| = q * |q theta - p|, exactly
            const Scalar qs{Rational(q)};
            const Scalar v = (theta * qs - Scalar(Rational(p))).abs() * qs;
            if (!have_min || v.cmp(est.minimum) < 0) {
                est.minimum = v;
                est.argmin = {p, q};
                have_min = true;
            }
        } else if (period != 0) {
            break;  // denominators are past the bound and the cycle is known
        }
    }
    if (!have_min || period == 0)
        throw ConditioningError("continued fraction did not stabilize");

    // liminf q_k^2 |theta - p_k/q_k| = min over the period of
    // 1 / (theta_j - conj(theta_j)) = Q_j / (2 m sqrt(d)), all exact.
    bool have_limit = false;
    for (int j = preperiod; j < preperiod + period; ++j) {
        const auto& [Q, m] = states[j];
        const Scalar cand{
            QuadExt(Rational(0), Rational(Q, 2 * m * Integer(th.d)), th.d)};
        if (!have_limit || cand.cmp(est.classical_limit) < 0) {
            est.classical_limit = cand;
            have_limit = true;
        }
    }
    return est;
}

CounterexampleScan counterexample_min(const QuadraticIrrational& th,
                                      long long box) {
    if (th.a == 0)
        throw PreconditionViolation(
            "theta^2 is rational; the planar minimum argument needs theta^2 "
            "irrational");
    if (box < 1) throw PreconditionViolation("box must be >= 1");

    const QuadExt tau = qi_quad(th).abs();
    const QuadExt tau2 = tau * tau;
    const Integer n(box);

    CounterexampleScan scan;
    // y-axis: x = 0, |y| = 1 gives the value 1
    QuadExt best(Rational(1), Rational(0), th.d);
    scan.x = 0;
    scan.y = 1;

    // |y^2 - tau^2 x^2| is even in both variables; for fixed x >= 1 it is
    // minimized over y >= 0 at the integers flanking tau*x
    for (Integer x = 1; x <= n; ++x) {
        const Integer x2 = x * x;
        const QuadExt tx(tau.a() * Rational(x), tau.b() * Rational(x), th.d);
        const QuadExt t2x2(tau2.a() * Rational(x2), tau2.b() * Rational(x2),
                           th.d);
        Integer ylo = tx.floor();
        if (ylo < 0) ylo = 0;
        for (int step = 0; step <= 1; ++step) {
            Integer y = ylo + step;
            if (y > n) y = n;
            const QuadExt v =
                (QuadExt(Rational(y * y), Rational(0), th.d) - t2x2).abs();
            if (v.cmp(best) < 0) {
                best = v;
                scan.x = static_cast<long long>(x);
                scan.y = static_cast<long long>(y);
            }
        }
    }

    scan.minimum = Scalar(best);
    scan.liouville = liouville_constant_estimate(th, n);
    scan.bound = scan.liouville.minimum * Scalar(tau);
    return scan;
}

}  // namespace formlab
