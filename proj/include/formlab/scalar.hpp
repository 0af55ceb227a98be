#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <string>
#include <string_view>
#include <variant>

#include "formlab/errors.hpp"

namespace formlab {

namespace mp = boost::multiprecision;

using Integer = mp::number<mp::gmp_int, mp::et_off>;
using Rational = mp::number<mp::gmp_rational, mp::et_off>;
// Variable-precision MPFR float.  Every value carries its own mantissa size;
// arithmetic keeps the larger operand precision (verified, not assumed).
using BigFloat = mp::number<mp::mpfr_float_backend<0>, mp::et_off>;

inline constexpr unsigned kDefaultFloatBits = 256;

// Smallest digits10 setting that guarantees >= bits of mantissa.
unsigned digits_for_bits(unsigned bits);
unsigned bigfloat_bits(const BigFloat& x);

BigFloat make_bigfloat(double x, unsigned bits = kDefaultFloatBits);
BigFloat make_bigfloat(const Rational& x, unsigned bits = kDefaultFloatBits);
BigFloat bigfloat_from_string(const std::string& text, unsigned bits = kDefaultFloatBits);

int sign_of(const Rational& x);
// floor(sqrt(n)) for n >= 0.
Integer isqrt_floor(const Integer& n);
bool is_squarefree(long d);

// sign(a - b*sqrt(d)), computed exactly.  d squarefree >= 2.
int cmp_rational_sqrt(const Rational& a, const Rational& b, long d);

// Element a + b*sqrt(d) of the real quadratic field Q(sqrt(d)).
// Invariant: d is squarefree and >= 2.  b may be zero (rational element).
class QuadExt {
  public:
    QuadExt(Rational a, Rational b, long d);

    const Rational& a() const { return a_; }
    const Rational& b() const { return b_; }
    long d() const { return d_; }

    bool is_rational() const { return b_ == 0; }
    QuadExt conj() const { return QuadExt(a_, -b_, d_); }
    // Field norm a^2 - d b^2 (= x * conj(x)).
    Rational norm() const { return a_ * a_ - Rational(d_) * b_ * b_; }
    int sign() const;
    QuadExt abs() const { return sign() < 0 ? -*this : *this; }
    Integer floor() const;

    QuadExt operator-() const { return QuadExt(-a_, -b_, d_); }
    QuadExt operator+(const QuadExt& o) const;
    QuadExt operator-(const QuadExt& o) const;
    QuadExt operator*(const QuadExt& o) const;
    QuadExt operator/(const QuadExt& o) const;
    bool operator==(const QuadExt& o) const;

    // sign(*this - o); operands must live in the same field.
    int cmp(const QuadExt& o) const { return (*this - o).sign(); }

    double to_double() const;
    BigFloat to_bigfloat(unsigned bits = kDefaultFloatBits) const;
    std::string str() const;

  private:
    void check_same_field(const QuadExt& o) const;
    Rational a_, b_;
    long d_;
};

// One number out of the exact/approximate tower used for form coefficients:
// rational, quadratic-field element, or arbitrary-precision float.
//
// Canonical form: a QuadExt with b == 0 is stored as the Rational variant,
// so variant identity is meaningful under ==.
class Scalar {
  public:
    Scalar() : v_(Rational(0)) {}
    Scalar(int v) : v_(Rational(v)) {}
    Scalar(long v) : v_(Rational(v)) {}
    Scalar(long long v) : v_(Rational(Integer(v))) {}
    Scalar(Integer v) : v_(Rational(std::move(v))) {}
    Scalar(Rational v) : v_(std::move(v)) {}
    Scalar(const QuadExt& v);
    static Scalar floating(BigFloat v) { return Scalar(Tag{}, std::move(v)); }
    static Scalar floating(double v, unsigned bits = kDefaultFloatBits) {
        return Scalar(Tag{}, make_bigfloat(v, bits));
    }

    bool is_rational() const { return std::holds_alternative<Rational>(v_); }
    bool is_quad() const { return std::holds_alternative<QuadExt>(v_); }
    bool is_float() const { return std::holds_alternative<BigFloat>(v_); }
    bool is_exact() const { return !is_float(); }

    const Rational& rational() const;
    const QuadExt& quad() const;
    const BigFloat& flt() const;
    // d of the quadratic field this value needs; 0 for rational/float.
    long quad_d() const { return is_quad() ? quad().d() : 0; }
    unsigned float_bits() const;

    int sign() const;
    bool is_zero() const { return sign() == 0; }
    Scalar conj() const;
    Scalar abs() const { return sign() < 0 ? -*this : *this; }

    Scalar operator-() const;
    Scalar operator+(const Scalar& o) const;
    Scalar operator-(const Scalar& o) const;
    Scalar operator*(const Scalar& o) const;
    Scalar operator/(const Scalar& o) const;
    Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
    Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
    Scalar& operator/=(const Scalar& o) { return *this = *this / o; }

    // Exact equality for exact values, MPFR equality for floats.  Mixed
    // exact/float compares after rounding the exact side to the float's
    // precision.
    bool operator==(const Scalar& o) const { return cmp(o) == 0; }
    bool operator!=(const Scalar& o) const { return cmp(o) != 0; }
    // sign(*this - o) under the same rules.
    int cmp(const Scalar& o) const;

    double to_double() const;
    BigFloat to_bigfloat(unsigned bits = kDefaultFloatBits) const;
    std::string str() const;

  private:
    struct Tag {};
    Scalar(Tag, BigFloat v) : v_(std::move(v)) {}
    std::variant<Rational, QuadExt, BigFloat> v_;
};

// Form-entry grammar: "-3", "2/3", "1.25e-3" (becomes a 256-bit float),
// "1/2+3/4*sqrt(2)", "-sqrt(5)", "3-sqrt(2)".
Scalar parse_scalar(std::string_view text);

// Exact rational value of a decimal literal ("0.001", "2.5e-3", "7").
// Used for tolerances and band endpoints, where float rounding would change
// the meaning of a comparison.
Rational rational_from_decimal(std::string_view text);

}  // namespace formlab
