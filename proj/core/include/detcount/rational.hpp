#pragma once

// Exact rationals over 128-bit integers. Every operation that would wrap
// throws OverflowError instead.

#include <compare>
#include <cstdint>
#include <string>

namespace detcount {

using i128 = __int128;
using u128 = unsigned __int128;

std::string to_string(i128 v);

class Rational {
public:
    constexpr Rational() = default;
    Rational(i128 num); // NOLINT(google-explicit-constructor): integers embed
    Rational(i128 num, i128 den);

    i128 num() const { return num_; }
    i128 den() const { return den_; }

    bool is_integer() const { return den_ == 1; }
    i128 floor() const;
    i128 ceil() const;
    /// x - floor(x), in [0, 1).
    Rational frac() const;

    /// Nearest double; long double intermediate keeps it within one ulp.
    double to_double() const;
    long double to_long_double() const;

    Rational operator-() const;
    Rational& operator+=(const Rational& o);
    Rational& operator-=(const Rational& o);
    Rational& operator*=(const Rational& o);
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

    std::string str() const;

private:
    i128 num_ = 0;
    i128 den_ = 1;
};

namespace checked {
i128 add(i128 a, i128 b);
i128 sub(i128 a, i128 b);
i128 mul(i128 a, i128 b);
} // namespace checked

i128 gcd128(i128 a, i128 b);

} // namespace detcount
