#include "formlab/scalar.hpp"

#include <cmath>

#include "doctest.h"

using namespace formlab;

TEST_CASE("rational floor and integer sqrt") {
    CHECK(isqrt_floor(Integer(0)) == 0);
    CHECK(isqrt_floor(Integer(15)) == 3);
    CHECK(isqrt_floor(Integer(16)) == 4);
    CHECK_THROWS_AS(isqrt_floor(Integer(-1)), PreconditionViolation);

    CHECK(is_squarefree(2));
    CHECK(is_squarefree(6));
    CHECK(is_squarefree(10));
    CHECK_FALSE(is_squarefree(4));
    CHECK_FALSE(is_squarefree(12));
    CHECK_FALSE(is_squarefree(18));
}

TEST_CASE("quadratic field sign is exact near zero") {
    // 665857/470832 is a Pell approximant: 665857^2 - 2*470832^2 = 1, so the
    // difference to sqrt(2) is ~1e-12 and doubles cannot certify the sign.
    const QuadExt tight(Rational(665857, 470832), Rational(-1), 2);
    CHECK(tight.sign() == 1);
    const QuadExt tight2(Rational(-665857, 470832), Rational(1), 2);
    CHECK(tight2.sign() == -1);

    CHECK(QuadExt(1, 1, 2).sign() == 1);
    CHECK(QuadExt(1, -1, 2).sign() == -1);   // 1 - sqrt(2)
    CHECK(QuadExt(3, -2, 2).sign() == 1);    // 9 > 8
    CHECK(QuadExt(2, -1, 5).sign() == -1);   // 4 < 5
    CHECK(QuadExt(0, 0, 2).sign() == 0);
}

TEST_CASE("quadratic field floor") {
    CHECK(QuadExt(0, 1, 2).floor() == 1);
    CHECK(QuadExt(0, -1, 2).floor() == -2);
    CHECK(QuadExt(Rational(1, 2), Rational(1, 2), 5).floor() == 1);  // golden ratio
    CHECK(QuadExt(10, 3, 2).floor() == 14);
    CHECK(QuadExt(Rational(-7, 2), 0, 2).floor() == -4);

    // (sqrt(2)-1)^5 = 29*sqrt(2) - 41 ~ 0.01214
    QuadExt q(-1, 1, 2);
    QuadExt p = q * q * q * q * q;
    CHECK(p == QuadExt(-41, 29, 2));
    CHECK(p.floor() == 0);
    CHECK((-p).floor() == -1);
}

TEST_CASE("quadratic field arithmetic identities") {
    const QuadExt u(1, 1, 2);
    CHECK(u * u.conj() == QuadExt(-1, 0, 2));           // (1+r2)(1-r2) = -1
    CHECK(u.norm() == Rational(-1));
    const QuadExt inv = QuadExt(1, 0, 2) / u;
    CHECK(inv == QuadExt(-1, 1, 2));                    // 1/(1+r2) = r2 - 1
    CHECK(u * inv == QuadExt(1, 0, 2));
    CHECK((u - u).sign() == 0);

    // sqrt(8) normalises into Q(sqrt(2))
    CHECK(QuadExt(0, 1, 8) == QuadExt(0, 2, 2));
    CHECK(QuadExt(0, 1, 9).is_rational());
    CHECK(QuadExt(0, 1, 9).a() == 3);

    CHECK_THROWS_AS(QuadExt(1, 1, 2) + QuadExt(1, 1, 3), ScalarDomainError);
    CHECK_THROWS_AS(QuadExt(0, 1, 2) / QuadExt(0, 0, 3), PreconditionViolation);
    CHECK_THROWS_AS(QuadExt(1, 1, 0), ScalarDomainError);
}

TEST_CASE("scalar promotion rules") {
    const Scalar r(Rational(1, 2));
    const Scalar q{QuadExt(0, 1, 2)};
    const Scalar f = Scalar::floating(0.5);

    CHECK((r + r).is_rational());
    CHECK((r + q).is_quad());
    CHECK((q * q).is_rational());          // sqrt(2)^2 collapses to 2
    CHECK((q * q).rational() == 2);
    CHECK((r + f).is_float());
    CHECK((q + f).is_float());
    CHECK((r + f).float_bits() >= 256);

    // float precision follows the larger operand
    const Scalar f64 = Scalar::floating(0.25, 64);
    CHECK((f + f64).float_bits() >= 256);

    CHECK_THROWS_AS(Scalar{QuadExt(0, 1, 2)} + Scalar{QuadExt(0, 1, 3)}, ScalarDomainError);
    CHECK_THROWS_AS(r / Scalar(0), PreconditionViolation);
}

TEST_CASE("scalar comparison") {
    const Scalar a(Rational(1, 3));
    const Scalar b = Scalar::floating(1.0 / 3.0);
    // double 1/3 is below the exact value
    CHECK(a.cmp(b) > 0);
    CHECK(Scalar(1).cmp(Scalar(2)) < 0);
    CHECK(Scalar{QuadExt(0, 1, 2)}.cmp(Scalar(1)) > 0);
    CHECK(Scalar{QuadExt(0, 1, 2)}.cmp(Scalar(2)) < 0);
    CHECK(Scalar(Rational(7)).abs() == Scalar(7));
    CHECK(Scalar(Rational(-7)).abs() == Scalar(7));
    CHECK(Scalar{QuadExt(1, -1, 2)}.abs() == Scalar{QuadExt(-1, 1, 2)});
}

TEST_CASE("scalar parse and canonical emission") {
    CHECK(parse_scalar("2/3") == Scalar(Rational(2, 3)));
    CHECK(parse_scalar("-3") == Scalar(-3));
    CHECK(parse_scalar("sqrt(2)") == Scalar{QuadExt(0, 1, 2)});
    CHECK(parse_scalar("-sqrt(2)") == Scalar{QuadExt(0, -1, 2)});
    CHECK(parse_scalar("1/2+3/4*sqrt(2)") == Scalar{QuadExt(Rational(1, 2), Rational(3, 4), 2)});
    CHECK(parse_scalar("3-sqrt(5)") == Scalar{QuadExt(3, -1, 5)});
    CHECK(parse_scalar("2*sqrt(3)") == Scalar{QuadExt(0, 2, 3)});
    CHECK(parse_scalar("sqrt(8)") == Scalar{QuadExt(0, 2, 2)});
    CHECK(parse_scalar(" 1/2 + 3/4 * sqrt(2) ") == parse_scalar("1/2+3/4*sqrt(2)"));
    CHECK(parse_scalar("sqrt(4)") == Scalar(2));
    CHECK(parse_scalar("3+sqrt(2)-sqrt(2)") == Scalar(3));

    // canonical strings round-trip
    for (const char* s : {"2/3", "-3", "sqrt(2)", "-sqrt(2)", "1/2+3/4*sqrt(2)", "3-sqrt(5)",
                          "2*sqrt(3)", "-1/2-sqrt(7)"}) {
        const Scalar v = parse_scalar(s);
        CHECK(v.str() == s);
        CHECK(parse_scalar(v.str()) == v);
    }

    // decimals become 256-bit floats
    const Scalar dec = parse_scalar("1.25");
    CHECK(dec.is_float());
    CHECK(dec.float_bits() >= 256);
    CHECK(dec.cmp(Scalar(Rational(5, 4))) == 0);  // dyadic, hence exact

    const Scalar milli = parse_scalar("1e-3");
    const BigFloat err = abs(milli.to_bigfloat() - make_bigfloat(Rational(1, 1000)));
    CHECK(err < make_bigfloat(Rational(1, Integer("1000000000000000000000000000000000000000000000000000000000000"))));

    CHECK_THROWS_AS(parse_scalar(""), FormParseError);
    CHECK_THROWS_AS(parse_scalar("sqrt(2"), FormParseError);
    CHECK_THROWS_AS(parse_scalar("1..2"), FormParseError);
    CHECK_THROWS_AS(parse_scalar("1+/2"), FormParseError);
    CHECK_THROWS_AS(parse_scalar("3/0"), FormParseError);
    CHECK_THROWS_AS(parse_scalar("sqrt(-2)"), FormParseError);
    CHECK_THROWS_AS(parse_scalar("1.5*sqrt(2)"), FormParseError);
    CHECK_THROWS_AS(parse_scalar("1+sqrt(2)+sqrt(3)"), FormParseError);
}

TEST_CASE("exact rational value of decimal literals") {
    CHECK(rational_from_decimal("0.001") == Rational(1, 1000));
    CHECK(rational_from_decimal("2.5e-3") == Rational(1, 400));
    CHECK(rational_from_decimal("-0.125") == Rational(-1, 8));
    CHECK(rational_from_decimal("7") == Rational(7));
    CHECK(rational_from_decimal("1/4") == Rational(1, 4));
    CHECK(rational_from_decimal(".5") == Rational(1, 2));
    CHECK(rational_from_decimal("1e2") == Rational(100));
    CHECK_THROWS_AS(rational_from_decimal("."), FormParseError);
    CHECK_THROWS_AS(rational_from_decimal("1.2.3"), FormParseError);
    CHECK_THROWS_AS(rational_from_decimal("5/0"), FormParseError);
}
