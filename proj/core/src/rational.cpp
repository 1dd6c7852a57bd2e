#include "detcount/rational.hpp"

#include "detcount/error.hpp"

#include <algorithm>
#include <cmath>

namespace detcount {

std::string to_string(i128 v) {
    if (v == 0) return "0";
    const bool neg = v < 0;
    u128 u = neg ? u128(0) - u128(v) : u128(v);
    std::string s;
    while (u != 0) {
        s.push_back(char('0' + int(u % 10)));
        u /= 10;
    }
    if (neg) s.push_back('-');
    std::reverse(s.begin(), s.end());
    return s;
}

namespace checked {

i128 add(i128 a, i128 b) {
    i128 r;
    if (__builtin_add_overflow(a, b, &r)) throw OverflowError("128-bit addition overflow");
    return r;
}

i128 sub(i128 a, i128 b) {
    i128 r;
    if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("128-bit subtraction overflow");
    return r;
}

i128 mul(i128 a, i128 b) {
    i128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("128-bit multiplication overflow");
    return r;
}

} // namespace checked

i128 gcd128(i128 a, i128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

Rational::Rational(i128 num) : num_(num), den_(1) {}

Rational::Rational(i128 num, i128 den) {
    if (den == 0) throw PreconditionError("Rational with zero denominator");
    if (den < 0) {
        num = checked::sub(0, num);
        den = checked::sub(0, den);
    }
    const i128 g = gcd128(num, den);
    num_ = g > 1 ? num / g : num;
    den_ = g > 1 ? den / g : den;
    if (num_ == 0) den_ = 1;
}

i128 Rational::floor() const {
    i128 q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
}

i128 Rational::ceil() const {
    i128 q = num_ / den_;
    if (num_ % den_ != 0 && num_ > 0) ++q;
    return q;
}

Rational Rational::frac() const {
    i128 r = num_ % den_;
    if (r < 0) r += den_;
    return Rational(r, den_);
}

long double Rational::to_long_double() const {
    // Split off the integer part so huge numerators keep their low bits.
    const i128 q = floor();
    const i128 r = num_ - q * den_;
    return static_cast<long double>(q) + static_cast<long double>(r) / static_cast<long double>(den_);
}

double Rational::to_double() const {
    if (den_ == 1) return static_cast<double>(num_);
    return static_cast<double>(to_long_double());
}

Rational Rational::operator-() const {
    Rational r;
    r.num_ = checked::sub(0, num_);
    r.den_ = den_;
    return r;
}

Rational& Rational::operator+=(const Rational& o) {
    const i128 g = gcd128(den_, o.den_);
    const i128 lhs = checked::mul(num_, o.den_ / g);
    const i128 rhs = checked::mul(o.num_, den_ / g);
    *this = Rational(checked::add(lhs, rhs), checked::mul(den_ / g, o.den_));
    return *this;
}

Rational& Rational::operator-=(const Rational& o) { return *this += -o; }

Rational& Rational::operator*=(const Rational& o) {
    const i128 g1 = gcd128(num_, o.den_);
    const i128 g2 = gcd128(o.num_, den_);
    const i128 a = g1 > 1 ? num_ / g1 : num_;
    const i128 d = g1 > 1 ? o.den_ / g1 : o.den_;
    const i128 c = g2 > 1 ? o.num_ / g2 : o.num_;
    const i128 b = g2 > 1 ? den_ / g2 : den_;
    *this = Rational(checked::mul(a, c), checked::mul(b, d));
    return *this;
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.num_ == 0) throw PreconditionError("Rational division by zero");
    return *this *= Rational(o.den_, o.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    const i128 lhs = checked::mul(a.num_, b.den_);
    const i128 rhs = checked::mul(b.num_, a.den_);
    return lhs <=> rhs;
}

std::string Rational::str() const {
    if (den_ == 1) return to_string(num_);
    return to_string(num_) + "/" + to_string(den_);
}

} // namespace detcount
