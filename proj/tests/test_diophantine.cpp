#include <doctest.h>

#include "formlab/diophantine.hpp"
#include "formlab/errors.hpp"

using namespace formlab;

namespace {

QuadraticIrrational golden() { return make_quadratic_irrational(1, 1, 2, 5); }
QuadraticIrrational silver() { return make_quadratic_irrational(1, 1, 1, 2); }

}  // namespace

TEST_CASE("quadratic irrational normalization") {
    const auto t = make_quadratic_irrational(2, 2, 4, 2);
    CHECK(t.a == 1);
    CHECK(t.b == 1);
    CHECK(t.c == 2);

    const auto neg = make_quadratic_irrational(1, 1, -1, 2);
    CHECK(neg.c == 1);
    CHECK(neg.a == -1);
    CHECK(neg.b == -1);
    CHECK(qi_value(neg).cmp(Scalar(0)) < 0);

    CHECK_THROWS_AS(make_quadratic_irrational(1, 0, 1, 2), PreconditionViolation);
    CHECK_THROWS_AS(make_quadratic_irrational(1, 1, 0, 2), PreconditionViolation);
    CHECK_THROWS_AS(make_quadratic_irrational(1, 1, 1, 4), PreconditionViolation);
    CHECK_THROWS_AS(make_quadratic_irrational(1, 1, 1, 12), PreconditionViolation);
    CHECK_THROWS_AS(make_quadratic_irrational(1, 1, 1, 1), PreconditionViolation);

    const auto s = make_quadratic_irrational(parse_scalar("sqrt(2)"));
    CHECK(s.a == 0);
    CHECK(s.b == 1);
    CHECK(s.c == 1);
    CHECK(s.d == 2);
    const auto frac = make_quadratic_irrational(
        Scalar(QuadExt(Rational(1, 2), Rational(1, 3), 5)));
    CHECK(frac.a == 3);
    CHECK(frac.b == 2);
    CHECK(frac.c == 6);
    CHECK_THROWS_AS(make_quadratic_irrational(Scalar(Rational(1, 2))),
                    PreconditionViolation);
}

TEST_CASE("continued fractions of the classical constants") {
    const auto phi = cf_expand(golden(), 12);
    REQUIRE(phi.quotients.size() == 12);
    for (const auto& a : phi.quotients) CHECK(a == 1);
    CHECK(phi.preperiod == 0);
    CHECK(phi.period == 1);

    const auto r2 = cf_expand(make_quadratic_irrational(0, 1, 1, 2), 10);
    CHECK(r2.quotients[0] == 1);
    for (std::size_t k = 1; k < r2.quotients.size(); ++k)
        CHECK(r2.quotients[k] == 2);
    CHECK(r2.preperiod == 1);
    CHECK(r2.period == 1);

    const auto s = cf_expand(silver(), 10);
    for (const auto& a : s.quotients) CHECK(a == 2);
    CHECK(s.preperiod == 0);
    CHECK(s.period == 1);

    // (3+sqrt 7)/2 = [2; 1,4,1,1, 1,4,1,1, ...], preperiod 1, period 4
    const auto t = cf_expand(make_quadratic_irrational(3, 1, 2, 7), 13);
    const std::vector<long long> head = {2, 1, 4, 1, 1, 1, 4, 1, 1, 1, 4, 1, 1};
    for (std::size_t k = 0; k < head.size(); ++k)
        CHECK(t.quotients[k] == head[k]);
    CHECK(t.preperiod == 1);
    CHECK(t.period == 4);

    // period markers are found even when depth stops mid-cycle
    const auto short_t = cf_expand(make_quadratic_irrational(3, 1, 2, 7), 2);
    CHECK(short_t.quotients.size() == 2);
    CHECK(short_t.preperiod == 1);
    CHECK(short_t.period == 4);

    CHECK_THROWS_AS(cf_expand(golden(), 0), PreconditionViolation);
}

TEST_CASE("convergents approximate from alternating sides, tightly") {
    for (const auto& th :
         {golden(), silver(), make_quadratic_irrational(3, 1, 2, 7),
          make_quadratic_irrational(-5, 2, 3, 3)}) {
        const Scalar theta = qi_value(th);
        const auto cf = cf_expand(th, 14);
        const auto cs = convergents(cf);
        REQUIRE(cs.size() == 14);
        for (std::size_t k = 0; k + 1 < cs.size(); ++k) {
            // |theta - p_k/q_k| < 1/(q_k q_{k+1}), exactly
            const Scalar err =
                (theta - Scalar(Rational(cs[k].p, cs[k].q))).abs();
            CHECK(err.cmp(Scalar(Rational(1, cs[k].q * cs[k + 1].q))) < 0);
        }
        // denominators strictly increase from k = 1 on
        for (std::size_t k = 2; k < cs.size(); ++k)
            CHECK(cs[k].q > cs[k - 1].q);
    }
}

TEST_CASE("badly-approximable constants") {
    SUBCASE("golden ratio") {
        const auto est = liouville_constant_estimate(golden(), Integer(100000));
        // running minimum (3 - sqrt 5)/2 at the convergent 2/1, strictly
        // below the liminf 1/sqrt 5
        CHECK(est.minimum ==
              Scalar(QuadExt(Rational(3, 2), Rational(-1, 2), 5)));
        CHECK(est.argmin.p == 2);
        CHECK(est.argmin.q == 1);
        CHECK(est.classical_limit ==
              Scalar(QuadExt(Rational(0), Rational(1, 5), 5)));
        CHECK(est.minimum.cmp(est.classical_limit) < 0);
    }

    SUBCASE("1 + sqrt 2") {
        const auto est = liouville_constant_estimate(silver(), Integer(100000));
        // 6 - 4 sqrt 2 at the convergent 5/2; liminf 1/(2 sqrt 2)
        CHECK(est.minimum == Scalar(QuadExt(Rational(6), Rational(-4), 2)));
        CHECK(est.argmin.p == 5);
        CHECK(est.argmin.q == 2);
        CHECK(est.classical_limit ==
              Scalar(QuadExt(Rational(0), Rational(1, 4), 2)));
    }

    SUBCASE("monotone and positive") {
        Scalar prev;
        bool first = true;
        for (long n : {1, 2, 3, 5, 10, 100, 10000}) {
            const auto est =
                liouville_constant_estimate(make_quadratic_irrational(3, 1, 2, 7),
                                            Integer(n));
            CHECK(est.minimum.sign() > 0);
            if (!first) CHECK(est.minimum.cmp(prev) <= 0);
            prev = est.minimum;
            first = false;
        }
    }

    CHECK_THROWS_AS(liouville_constant_estimate(golden(), Integer(0)),
                    PreconditionViolation);
}

TEST_CASE("planar minimum stays away from zero") {
    SUBCASE("pinned values for 1 + sqrt 2") {
        const auto scan = counterexample_min(silver(), 1000);
        CHECK(scan.minimum == Scalar(1));  // attained on the y-axis
        CHECK(scan.x == 0);
        CHECK(scan.y == 1);
        // bound = (6 - 4 sqrt 2)(1 + sqrt 2) = 2 sqrt 2 - 2
        CHECK(scan.bound == Scalar(QuadExt(Rational(-2), Rational(2), 2)));
        CHECK(scan.minimum.cmp(scan.bound) > 0);
    }

    SUBCASE("agrees with the full-box oracle") {
        for (const auto& th : {silver(), make_quadratic_irrational(3, 1, 2, 7)}) {
            const Scalar t2 = qi_value(th) * qi_value(th);
            Scalar best;
            bool first = true;
            for (long long x = 0; x <= 40; ++x)
                for (long long y = 0; y <= 40; ++y) {
                    if (x == 0 && y == 0) continue;
                    const Scalar v =
                        (Scalar(Rational(Integer(y * y))) -
                         t2 * Scalar(Rational(Integer(x * x))))
                            .abs();
                    if (first || v.cmp(best) < 0) {
                        best = v;
                        first = false;
                    }
                }
            const auto scan = counterexample_min(th, 40);
            CHECK(scan.minimum == best);
        }
    }

    SUBCASE("monotone in the box and above the certified bound") {
        Scalar prev;
        bool first = true;
        for (long long n : {10, 40, 100, 1000}) {
            const auto scan = counterexample_min(silver(), n);
            if (!first) CHECK(scan.minimum.cmp(prev) <= 0);
            CHECK(scan.minimum.cmp(scan.bound) >= 0);
            prev = scan.minimum;
            first = false;
        }
    }

    SUBCASE("rational theta^2 is rejected") {
        CHECK_THROWS_AS(counterexample_min(make_quadratic_irrational(0, 1, 1, 2), 100),
                        PreconditionViolation);
        CHECK_THROWS_AS(counterexample_min(silver(), 0), PreconditionViolation);
    }
}
