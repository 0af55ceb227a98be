#include "formlab/scalar.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace formlab {

unsigned digits_for_bits(unsigned bits) {
    // log10(2) rounded up, plus one guard digit.
    return static_cast<unsigned>(std::ceil(bits * 0.3010299956639812)) + 1;
}

unsigned bigfloat_bits(const BigFloat& x) {
    return static_cast<unsigned>(mpfr_get_prec(x.backend().data()));
}

static BigFloat raw_bigfloat(unsigned bits) {
    BigFloat r;
    r.precision(digits_for_bits(bits));
    return r;
}

BigFloat make_bigfloat(double x, unsigned bits) {
    BigFloat r = raw_bigfloat(bits);
    mpfr_set_d(r.backend().data(), x, MPFR_RNDN);
    return r;
}

BigFloat make_bigfloat(const Rational& x, unsigned bits) {
    BigFloat r = raw_bigfloat(bits);
    mpfr_set_q(r.backend().data(), x.backend().data(), MPFR_RNDN);
    return r;
}

BigFloat bigfloat_from_string(const std::string& text, unsigned bits) {
    BigFloat r = raw_bigfloat(bits);
    if (mpfr_set_str(r.backend().data(), text.c_str(), 10, MPFR_RNDN) != 0)
        throw FormParseError("malformed float literal: '" + text + "'");
    return r;
}

int sign_of(const Rational& x) { return x.sign(); }

Integer isqrt_floor(const Integer& n) {
    if (n < 0) throw PreconditionViolation("isqrt of negative integer");
    return sqrt(n);
}

bool is_squarefree(long d) {
    if (d <= 0) return false;
    for (long f = 2; f * f <= d; ++f) {
        if (d % (f * f) == 0) return false;
        while (d % f == 0) d /= f;
    }
    return true;
}

// Largest s with s^2 | d, and the squarefree kernel d/s^2.
static void square_split(long d, long& s, long& kernel) {
    s = 1;
    kernel = 1;
    for (long f = 2; f * f <= d; ++f) {
        long cnt = 0;
        while (d % f == 0) { d /= f; ++cnt; }
        for (long i = 0; i < cnt / 2; ++i) s *= f;
        if (cnt % 2) kernel *= f;
    }
    kernel *= d;
}

int cmp_rational_sqrt(const Rational& a, const Rational& b, long d) {
    const int sa = a.sign();
    const int sb = b.sign();
    if (sb == 0) return sa;
    if (sa == 0) return -sb;
    if (sa != sb) return sa;  // a and b*sqrt(d) lie on opposite sides of 0
    const Rational t = a * a - Rational(d) * b * b;
    const int st = t.sign();
    if (st == 0)
        throw Error("internal: sqrt(d) compared equal to a rational (d not squarefree?)");
    return sa > 0 ? st : -st;
}

// ---------------------------------------------------------------------------
// QuadExt

QuadExt::QuadExt(Rational a, Rational b, long d) : a_(std::move(a)), b_(std::move(b)) {
    if (d <= 0) throw ScalarDomainError("sqrt argument must be a positive integer");
    long s, kernel;
    square_split(d, s, kernel);
    if (kernel == 1) {
        // sqrt(d) is the integer s; the value is rational.
        a_ += b_ * s;
        b_ = 0;
        d_ = 2;  // placeholder field, value is rational
    } else {
        b_ *= s;
        d_ = kernel;
    }
}

void QuadExt::check_same_field(const QuadExt& o) const {
    if (b_ != 0 && o.b_ != 0 && d_ != o.d_)
        throw ScalarDomainError("cannot combine sqrt(" + std::to_string(d_) + ") with sqrt(" +
                                std::to_string(o.d_) + ")");
}

int QuadExt::sign() const { return cmp_rational_sqrt(a_, -b_, d_); }

static Integer rational_floor(const Rational& x) {
    Integer num = numerator(x), den = denominator(x);
    Integer q, r;
    divide_qr(num, den, q, r);
    if (r != 0 && num < 0) q -= 1;
    return q;
}

Integer QuadExt::floor() const {
    if (b_ == 0) return rational_floor(a_);
    // floor(b*sqrt(d)) computed exactly through an integer square root, then
    // at most a couple of unit adjustments for the a_ part.
    const Integer nb = numerator(b_), db = denominator(b_);
    const Integer root = isqrt_floor(nb * nb * Integer(d_));
    Integer fb;
    if (b_ > 0) {
        fb = root / db;
    } else {
        fb = -(root / db) - 1;  // b*sqrt(d) irrational, so ceil = floor + 1
    }
    Integer m = rational_floor(a_) + fb;
    while (cmp_rational_sqrt(a_ - Rational(m), -b_, d_) < 0) m -= 1;        // v < m
    while (cmp_rational_sqrt(a_ - Rational(m + 1), -b_, d_) >= 0) m += 1;   // v >= m+1
    return m;
}

QuadExt QuadExt::operator+(const QuadExt& o) const {
    check_same_field(o);
    const long dr = b_ != 0 ? d_ : o.d_;
    return QuadExt(a_ + o.a_, b_ + o.b_, dr);
}

QuadExt QuadExt::operator-(const QuadExt& o) const {
    check_same_field(o);
    const long dr = b_ != 0 ? d_ : o.d_;
    return QuadExt(a_ - o.a_, b_ - o.b_, dr);
}

QuadExt QuadExt::operator*(const QuadExt& o) const {
    check_same_field(o);
    const long dr = b_ != 0 ? d_ : o.d_;
    return QuadExt(a_ * o.a_ + Rational(dr) * b_ * o.b_, a_ * o.b_ + b_ * o.a_, dr);
}

QuadExt QuadExt::operator/(const QuadExt& o) const {
    check_same_field(o);
    if (o.a_ == 0 && o.b_ == 0) throw PreconditionViolation("division by zero");
    const Rational n = o.norm();
    // norm == 0 with o != 0 would make sqrt(d) rational.
    const QuadExt num = *this * o.conj();
    const long dr = b_ != 0 ? d_ : o.d_;
    return QuadExt(num.a_ / n, num.b_ / n, dr);
}

bool QuadExt::operator==(const QuadExt& o) const {
    if (b_ != 0 && o.b_ != 0 && d_ != o.d_) return false;
    return a_ == o.a_ && b_ == o.b_;
}

double QuadExt::to_double() const {
    return a_.convert_to<double>() + b_.convert_to<double>() * std::sqrt(double(d_));
}

BigFloat QuadExt::to_bigfloat(unsigned bits) const {
    BigFloat root = raw_bigfloat(bits);
    mpfr_sqrt_ui(root.backend().data(), static_cast<unsigned long>(d_), MPFR_RNDN);
    return make_bigfloat(a_, bits) + make_bigfloat(b_, bits) * root;
}

static std::string rat_str(const Rational& x) { return x.str(); }

std::string QuadExt::str() const {
    if (b_ == 0) return rat_str(a_);
    const Rational babs = b_ < 0 ? Rational(-b_) : b_;
    std::string part = babs == 1 ? "" : rat_str(babs) + "*";
    part += "sqrt(" + std::to_string(d_) + ")";
    if (a_ == 0) return (b_ < 0 ? "-" : "") + part;
    return rat_str(a_) + (b_ < 0 ? "-" : "+") + part;
}

// ---------------------------------------------------------------------------
// Scalar

Scalar::Scalar(const QuadExt& v) {
    if (v.is_rational())
        v_ = v.a();
    else
        v_ = v;
}

const Rational& Scalar::rational() const {
    if (!is_rational()) throw Error("scalar is not rational");
    return std::get<Rational>(v_);
}

const QuadExt& Scalar::quad() const {
    if (!is_quad()) throw Error("scalar is not a quadratic-field element");
    return std::get<QuadExt>(v_);
}

const BigFloat& Scalar::flt() const {
    if (!is_float()) throw Error("scalar is not a float");
    return std::get<BigFloat>(v_);
}

unsigned Scalar::float_bits() const { return bigfloat_bits(flt()); }

int Scalar::sign() const {
    if (is_rational()) return rational().sign();
    if (is_quad()) return quad().sign();
    const BigFloat& f = flt();
    if (mpfr_nan_p(f.backend().data()))
        throw ConditioningError("sign of NaN float scalar");
    return f.sign();
}

Scalar Scalar::conj() const {
    if (is_quad()) return Scalar(quad().conj());
    return *this;
}

Scalar Scalar::operator-() const {
    if (is_rational()) return Scalar(Rational(-rational()));
    if (is_quad()) return Scalar(-quad());
    return floating(BigFloat(-flt()));
}

double Scalar::to_double() const {
    if (is_rational()) return rational().convert_to<double>();
    if (is_quad()) return quad().to_double();
    return flt().convert_to<double>();
}

BigFloat Scalar::to_bigfloat(unsigned bits) const {
    if (is_rational()) return make_bigfloat(rational(), bits);
    if (is_quad()) return quad().to_bigfloat(bits);
    BigFloat r = flt();
    r.precision(digits_for_bits(bits));
    return r;
}

static QuadExt as_quad(const Scalar& s, long d) {
    if (s.is_quad()) return s.quad();
    return QuadExt(s.rational(), 0, d);
}

// Field tag for an exact binary op; throws if two distinct sqrt's meet.
static long merge_d(const Scalar& x, const Scalar& y) {
    const long dx = x.quad_d(), dy = y.quad_d();
    if (dx && dy && dx != dy)
        throw ScalarDomainError("cannot combine sqrt(" + std::to_string(dx) + ") with sqrt(" +
                                std::to_string(dy) + ")");
    return dx ? dx : dy;
}

template <typename RatOp, typename QuadOp, typename FloatOp>
static Scalar binop(const Scalar& x, const Scalar& y, RatOp rop, QuadOp qop, FloatOp fop) {
    if (x.is_float() || y.is_float()) {
        unsigned bits = 0;
        if (x.is_float()) bits = std::max(bits, x.float_bits());
        if (y.is_float()) bits = std::max(bits, y.float_bits());
        return Scalar::floating(fop(x.to_bigfloat(bits), y.to_bigfloat(bits)));
    }
    const long d = merge_d(x, y);
    if (d) return Scalar(qop(as_quad(x, d), as_quad(y, d)));
    return Scalar(rop(x.rational(), y.rational()));
}

Scalar Scalar::operator+(const Scalar& o) const {
    return binop(*this, o,
                 [](const Rational& a, const Rational& b) { return Rational(a + b); },
                 [](const QuadExt& a, const QuadExt& b) { return a + b; },
                 [](const BigFloat& a, const BigFloat& b) { return BigFloat(a + b); });
}

Scalar Scalar::operator-(const Scalar& o) const {
    return binop(*this, o,
                 [](const Rational& a, const Rational& b) { return Rational(a - b); },
                 [](const QuadExt& a, const QuadExt& b) { return a - b; },
                 [](const BigFloat& a, const BigFloat& b) { return BigFloat(a - b); });
}

Scalar Scalar::operator*(const Scalar& o) const {
    return binop(*this, o,
                 [](const Rational& a, const Rational& b) { return Rational(a * b); },
                 [](const QuadExt& a, const QuadExt& b) { return a * b; },
                 [](const BigFloat& a, const BigFloat& b) { return BigFloat(a * b); });
}

Scalar Scalar::operator/(const Scalar& o) const {
    if (o.sign() == 0) throw PreconditionViolation("division by zero");
    return binop(*this, o,
                 [](const Rational& a, const Rational& b) { return Rational(a / b); },
                 [](const QuadExt& a, const QuadExt& b) { return a / b; },
                 [](const BigFloat& a, const BigFloat& b) { return BigFloat(a / b); });
}

int Scalar::cmp(const Scalar& o) const {
    if (is_exact() && o.is_exact()) return (*this - o).sign();
    unsigned bits = 0;
    if (is_float()) bits = std::max(bits, float_bits());
    if (o.is_float()) bits = std::max(bits, o.float_bits());
    const BigFloat a = to_bigfloat(bits), b = o.to_bigfloat(bits);
    if (mpfr_nan_p(a.backend().data()) || mpfr_nan_p(b.backend().data()))
        throw ConditioningError("comparison with NaN float scalar");
    if (a < b) return -1;
    if (a > b) return 1;
    return 0;
}

std::string Scalar::str() const {
    if (is_rational()) return rational().str();
    if (is_quad()) return quad().str();
    return flt().str(0, std::ios_base::fmtflags(0));
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Cursor {
    std::string_view s;
    size_t i = 0;
    void skip_ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool done() {
        skip_ws();
        return i >= s.size();
    }
    char peek() {
        skip_ws();
        return i < s.size() ? s[i] : '\0';
    }
    bool eat(char c) {
        skip_ws();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }
    bool eat_word(std::string_view w) {
        skip_ws();
        if (s.substr(i, w.size()) == w) {
            i += w.size();
            return true;
        }
        return false;
    }
    std::string digits() {
        skip_ws();
        size_t start = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        return std::string(s.substr(start, i - start));
    }
    [[noreturn]] void fail(const std::string& what) {
        throw FormParseError(what + " in scalar '" + std::string(s) + "'");
    }
};

// Integer from a digit string, always base 10 (Integer("0125") would
// otherwise parse as octal via GMP prefix detection).
Integer integer_from_digits(const std::string& digits) {
    size_t i = 0;
    while (i + 1 < digits.size() && digits[i] == '0') ++i;
    return Integer(digits.substr(i));
}

Rational parse_unsigned_rational(Cursor& c) {
    const std::string num = c.digits();
    if (num.empty()) c.fail("expected a number");
    if (c.eat('/')) {
        const std::string den = c.digits();
        if (den.empty()) c.fail("expected a denominator");
        Integer d = integer_from_digits(den);
        if (d == 0) c.fail("zero denominator");
        return Rational(integer_from_digits(num), d);
    }
    return Rational(integer_from_digits(num));
}

long parse_sqrt_arg(Cursor& c) {
    if (!c.eat('(')) c.fail("expected '(' after sqrt");
    const std::string arg = c.digits();
    if (arg.empty()) c.fail("expected an integer inside sqrt()");
    if (!c.eat(')')) c.fail("expected ')'");
    errno = 0;
    char* end = nullptr;
    const long d = std::strtol(arg.c_str(), &end, 10);
    if (errno || *end) c.fail("sqrt argument out of range");
    return d;
}

}  // namespace

Scalar parse_scalar(std::string_view text) {
    const bool has_sqrt = text.find("sqrt") != std::string_view::npos;
    const bool has_dec = text.find('.') != std::string_view::npos ||
                         text.find('e') != std::string_view::npos ||
                         text.find('E') != std::string_view::npos;
    if (has_dec && !has_sqrt) {
        rational_from_decimal(text);  // validates the literal strictly
        return Scalar::floating(bigfloat_from_string(std::string(text)));
    }
    if (has_dec)
        throw FormParseError("decimal literals cannot be combined with sqrt: '" +
                             std::string(text) + "'");

    Cursor c{text};
    Rational a = 0, b = 0;
    long d = 0;
    bool first = true;
    while (!c.done()) {
        int sign = 1;
        if (c.eat('-'))
            sign = -1;
        else if (c.eat('+'))
            sign = 1;
        else if (!first)
            c.fail("expected '+' or '-'");
        Rational coef = 1;
        bool is_sqrt = false;
        if (c.eat_word("sqrt")) {
            is_sqrt = true;
        } else {
            coef = parse_unsigned_rational(c);
            if (c.eat('*')) {
                if (!c.eat_word("sqrt")) c.fail("expected sqrt after '*'");
                is_sqrt = true;
            }
        }
        if (is_sqrt) {
            const long arg = parse_sqrt_arg(c);
            // Normalise through QuadExt so sqrt(8) merges with sqrt(2).
            const QuadExt q(0, sign * coef, arg);
            if (q.is_rational()) {
                a += q.a();
            } else {
                if (d && d != q.d())
                    c.fail("two different square roots");
                d = q.d();
                b += q.b();
            }
        } else {
            a += sign * coef;
        }
        first = false;
    }
    if (first) throw FormParseError("empty scalar");
    if (d && b != 0) return Scalar(QuadExt(a, b, d));
    return Scalar(a);
}

Rational rational_from_decimal(std::string_view text) {
    Cursor c{text};
    int sign = 1;
    if (c.eat('-')) sign = -1;
    else c.eat('+');
    c.skip_ws();
    std::string ipart = c.digits();
    std::string fpart;
    bool has_dot = false;
    if (c.i < c.s.size() && c.s[c.i] == '.') {
        ++c.i;
        has_dot = true;
        fpart = c.digits();
    }
    if (ipart.empty() && fpart.empty()) c.fail("expected digits");
    // Plain p/q is accepted too, for CLI convenience.
    if (!has_dot && c.i < c.s.size() && c.s[c.i] == '/') {
        ++c.i;
        const std::string den = c.digits();
        if (den.empty() || !c.done()) c.fail("malformed fraction");
        Integer dn = integer_from_digits(den);
        if (dn == 0) c.fail("zero denominator");
        return Rational(sign * integer_from_digits(ipart), dn);
    }
    long expo = 0;
    if (c.i < c.s.size() && (c.s[c.i] == 'e' || c.s[c.i] == 'E')) {
        ++c.i;
        int esign = 1;
        if (c.eat('-')) esign = -1;
        else c.eat('+');
        const std::string ed = c.digits();
        if (ed.empty()) c.fail("malformed exponent");
        expo = esign * std::strtol(ed.c_str(), nullptr, 10);
        if (std::abs(expo) > 100000) c.fail("exponent out of range");
    }
    if (!c.done()) c.fail("trailing characters");
    Integer mant = integer_from_digits((ipart.empty() ? "0" : ipart) + fpart);
    long k = expo - static_cast<long>(fpart.size());
    Rational r(mant);
    if (k > 0) r *= Rational(pow(Integer(10), static_cast<unsigned>(k)));
    if (k < 0) r /= Rational(pow(Integer(10), static_cast<unsigned>(-k)));
    return sign < 0 ? Rational(-r) : r;
}

}  // namespace formlab
