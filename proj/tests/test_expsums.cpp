#include "detcount/arith.hpp"
#include "detcount/error.hpp"
#include "detcount/expsums.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numeric>
#include <random>

using namespace detcount;
using namespace detcount::expsums;

namespace {

std::int64_t brute_inverse(std::int64_t x, std::int64_t u) {
    const std::int64_t r = ((x % u) + u) % u;
    for (std::int64_t y = 1; y < u; ++y)
        if (r * y % u == 1) return y;
    return 0;
}

std::complex<long double> phase(std::int64_t k, std::int64_t u) {
    const long double t = 2 * M_PIl * static_cast<long double>(((k % u) + u) % u) / u;
    return {std::cos(t), std::sin(t)};
}

std::complex<long double> naive_kloosterman(std::int64_t a, std::int64_t b, std::int64_t u) {
    std::complex<long double> s = 0;
    for (std::int64_t x = 1; x <= u; ++x)
        if (std::gcd(x, u) == 1) s += phase(a * x + b * brute_inverse(x, u), u);
    return s;
}

} // namespace

TEST_CASE("modular inverse") {
    CHECK(mod_inverse(3, 7) == 5);
    for (std::int64_t u = 2; u < 40; ++u) CHECK(mod_inverse(1, u) == 1);
    CHECK_THROWS_AS(mod_inverse(2, 4), PreconditionError);
    for (std::int64_t u = 2; u <= 200; ++u)
        for (std::int64_t x = -u; x <= 2 * u; ++x) {
            if (std::gcd(x, u) != 1) continue;
            const auto y = mod_inverse(x, u);
            CHECK(y >= 1);
            CHECK(y < u);
            CHECK(y == brute_inverse(x, u));
        }
}

TEST_CASE("complete Kloosterman sums against naive evaluation") {
    CHECK(kloosterman_complete(5, -3, 1).value == std::complex<double>(1.0, 0.0));
    const auto k = kloosterman_complete(1, 1, 2);
    CHECK(k.value.real() == doctest::Approx(1.0));
    CHECK(std::abs(k.value.imag()) < 1e-12);

    std::mt19937_64 rng(17);
    for (std::int64_t u = 2; u <= 120; ++u)
        for (int i = 0; i < 4; ++i) {
            const std::int64_t a = static_cast<std::int64_t>(rng() % 1000) - 500;
            const std::int64_t b = static_cast<std::int64_t>(rng() % 1000) - 500;
            const auto v = kloosterman_complete(a, b, u);
            const auto ref = naive_kloosterman(a, b, u);
            CHECK(std::abs(v.value - std::complex<double>(ref)) < 1e-9);
            // Real-valued, and within the Weil bound.
            CHECK(std::abs(v.value.imag()) < 1e-9);
            CHECK(std::abs(v.value) <= v.weil_bound + 1e-9);
        }
}

TEST_CASE("Kloosterman sums with a zero argument are Ramanujan sums") {
    for (std::int64_t u = 2; u <= 150; ++u)
        for (std::int64_t b : {1, 2, 6, 12, 30, -7}) {
            const auto v = kloosterman_complete(0, b, u);
            CHECK(v.value.real() ==
                  doctest::Approx(static_cast<double>(arith::ramanujan_sum_divisor(static_cast<std::uint64_t>(u), b)))
                      .epsilon(1e-9));
        }
}

TEST_CASE("incomplete Kloosterman sums") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 200; ++i) {
        const std::int64_t u = 2 + static_cast<std::int64_t>(rng() % 400);
        const std::int64_t r = static_cast<std::int64_t>(rng() % 2000) - 1000;
        const std::int64_t first = static_cast<std::int64_t>(rng() % 1000) - 500;
        const std::int64_t last = first + static_cast<std::int64_t>(rng() % 700);
        std::complex<long double> ref = 0;
        for (std::int64_t v = first; v <= last; ++v)
            if (std::gcd(v, u) == 1) ref += phase(r * brute_inverse(v, u), u);
        const auto s = kloosterman_incomplete({first, last}, r, u);
        CHECK(std::abs(s.value - std::complex<double>(ref)) < 1e-8);
        CHECK(std::abs(s.value) <= 3 * s.hooley_bound);
    }
    // A full period reproduces the complete sum.
    for (std::int64_t u = 2; u <= 60; ++u) {
        const auto inc = kloosterman_incomplete({1, u}, 5, u);
        const auto full = kloosterman_complete(0, 5, u);
        CHECK(std::abs(inc.value - full.value) < 1e-9);
    }
}

TEST_CASE("unit phase reduces its argument") {
    for (std::int64_t u : {2, 3, 7, 1000003}) {
        const auto a = unit_phase(1, u);
        const auto b = unit_phase(1 + 1000000 * u, u);
        const auto c = unit_phase(1 - 5 * u, u);
        CHECK(std::abs(a - b) < 1e-15);
        CHECK(std::abs(a - c) < 1e-15);
        CHECK(std::abs(std::abs(a) - 1.0) < 1e-15);
    }
}
