#include "detcount/arith.hpp"
#include "detcount/error.hpp"
#include "detcount/rational.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace detcount;
using namespace detcount::arith;

namespace {

std::uint64_t naive_restricted_divisor(std::uint64_t m, std::uint64_t N) {
    std::uint64_t c = 0;
    for (std::uint64_t a = 1; a <= N; ++a)
        if (m % a == 0 && m / a <= N) ++c;
    return c;
}

std::uint64_t naive_signed_divisor(std::int64_t n, std::int64_t N) {
    std::uint64_t c = 0;
    for (std::int64_t x = -N; x <= N; ++x)
        for (std::int64_t y = -N; y <= N; ++y) c += x * y == n;
    return c;
}

int naive_mobius(std::uint64_t n) {
    int sign = 1;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        n /= p;
        if (n % p == 0) return 0;
        sign = -sign;
    }
    return n > 1 ? -sign : sign;
}

long double naive_psi(long double x) { return x - std::floor(x) - 0.5L; }

} // namespace

TEST_CASE("factorize small and large values") {
    const auto f12 = factorize(12);
    REQUIRE(f12.factors().size() == 2);
    CHECK(f12.factors()[0] == PrimePower{2, 2});
    CHECK(f12.factors()[1] == PrimePower{3, 1});
    CHECK(f12.divisor_count() == 6);
    CHECK(f12.divisor_sum() == 28);

    const auto big = factorize(std::uint64_t{1} << 40);
    REQUIRE(big.factors().size() == 1);
    CHECK(big.factors()[0] == PrimePower{2, 40});

    CHECK(factorize(1).is_one());
    CHECK_THROWS_AS(factorize(0), PreconditionError);

    const std::uint64_t semiprime = 2147483647ull * 4294967291ull;
    const auto f = factorize(semiprime);
    REQUIRE(f.factors().size() == 2);
    CHECK(f.factors()[0].prime == 2147483647ull);
    CHECK_THROWS_AS(factorize(std::uint64_t{1} << 63), PreconditionError);
}

TEST_CASE("factorization round-trips and divisors match trial division") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 300; ++i) {
        const std::uint64_t n = 1 + rng() % 200000;
        const auto f = factorize(n);
        std::uint64_t prod = 1;
        for (const auto& pp : f.factors()) {
            CHECK(is_prime(pp.prime));
            for (unsigned k = 0; k < pp.exponent; ++k) prod *= pp.prime;
        }
        CHECK(prod == n);
        std::vector<std::uint64_t> expect;
        for (std::uint64_t d = 1; d <= n; ++d)
            if (n % d == 0) expect.push_back(d);
        auto got = f.divisors();
        std::sort(got.begin(), got.end());
        CHECK(got == expect);
        CHECK(mobius(f) == naive_mobius(n));
    }
}

TEST_CASE("mobius and divisor reciprocal sums") {
    CHECK(mobius(factorize(30)) == -1);
    CHECK(mobius(factorize(1)) == 1);
    CHECK(mobius(factorize(12)) == 0);
    CHECK(divisor_reciprocal_sum(factorize(12)) == Rational(7, 3));
    for (std::uint64_t n = 1; n <= 500; ++n) {
        Rational s = 0;
        for (std::uint64_t d = 1; d <= n; ++d)
            if (n % d == 0) s += Rational(1, static_cast<i128>(d));
        CHECK(divisor_reciprocal_sum(factorize(n)) == s);
    }
}

TEST_CASE("primes_up_to agrees with is_prime") {
    const auto ps = primes_up_to(1000);
    CHECK(ps.size() == 168);
    std::size_t k = 0;
    for (std::uint64_t n = 0; n <= 1000; ++n) {
        const bool listed = k < ps.size() && ps[k] == n;
        CHECK(listed == is_prime(n));
        if (listed) ++k;
    }
}

TEST_CASE("restricted divisor counts") {
    CHECK(restricted_divisor(4, 2) == 1);
    CHECK(restricted_divisor_signed(0, 3) == 13);
    for (std::uint64_t N = 1; N <= 12; ++N)
        for (std::uint64_t m = 1; m <= 2 * N * N; ++m) CHECK(restricted_divisor(m, N) == naive_restricted_divisor(m, N));
    for (std::int64_t N = 1; N <= 6; ++N)
        for (std::int64_t n = -40; n <= 40; ++n)
            CHECK(restricted_divisor_signed(n, N) == naive_signed_divisor(n, N));
}

TEST_CASE("gcd sums") {
    CHECK(gcd_sum(6, 10) == 23);
    CHECK(gcd_sum(4, 4) == 8);
    for (std::uint64_t m = 1; m <= 40; ++m)
        for (double M : {1.0, 7.5, 33.0, 100.2}) {
            std::uint64_t s = 0;
            for (std::uint64_t y = 1; y <= static_cast<std::uint64_t>(M); ++y) s += std::gcd(y, m);
            CHECK(gcd_sum(m, M) == s);
        }
}

TEST_CASE("sawtooth values and periodicity") {
    CHECK(sawtooth(0.25) == doctest::Approx(-0.25));
    CHECK(sawtooth(7.0) == -0.5);
    CHECK(sawtooth(-0.25) == doctest::Approx(0.25));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-50, 50);
    for (int i = 0; i < 1000; ++i) {
        const double x = dist(rng);
        const double s = sawtooth(x);
        CHECK(s >= -0.5);
        CHECK(s < 0.5);
        CHECK(s == doctest::Approx(static_cast<double>(naive_psi(x))).epsilon(1e-12));
    }
    CHECK(sawtooth(Rational(-1, 4)) == Rational(1, 4));
    CHECK(sawtooth(Rational(5)) == Rational(-1, 2));
    CHECK(distance_to_integer(2.7) == doctest::Approx(0.3));
}

TEST_CASE("truncated sawtooth expansion") {
    const auto half = sawtooth_truncated(0.5, 1);
    CHECK(std::abs(half.partial_sum) < 1e-15);
    const auto integer = sawtooth_truncated(3.0, 50);
    CHECK(std::abs(integer.partial_sum) < 1e-12);
    CHECK(integer.residual == doctest::Approx(0.5));
    const auto third = sawtooth_truncated(1.0 / 3, 100);
    CHECK(third.residual <= 5 * third.bound);
    CHECK_THROWS_AS(sawtooth_truncated(0.1, 0.5), PreconditionError);

    // Direct evaluation of -sum_{s=1}^{Q} sin(2 pi s theta) / (pi s).
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(0, 1);
    for (int i = 0; i < 200; ++i) {
        const double theta = dist(rng);
        const double Q = 1 + 300 * dist(rng);
        long double s = 0;
        for (int k = 1; k <= static_cast<int>(Q); ++k)
            s -= std::sin(2 * M_PIl * k * theta) / (M_PIl * k);
        const auto r = sawtooth_truncated(theta, Q);
        CHECK(r.partial_sum == doctest::Approx(static_cast<double>(s)).epsilon(1e-9));
        CHECK(r.residual <= 5 * r.bound);
    }
}

TEST_CASE("Ramanujan sums two ways") {
    CHECK(ramanujan_sum(6, 3).divisor == -2);
    CHECK(ramanujan_sum(6, 3).agree());
    for (std::int64_t n = -20; n <= 20; ++n) CHECK(ramanujan_sum_divisor(1, n) == 1);
    for (std::uint64_t p : {2, 3, 5, 7, 11, 13}) CHECK(ramanujan_sum_divisor(p, 2 * p) == static_cast<std::int64_t>(p - 1));
    CHECK_THROWS_AS(ramanujan_sum(0, 1), PreconditionError);
    for (std::uint64_t q = 1; q <= 60; ++q)
        for (std::int64_t n = -30; n <= 30; ++n) {
            long double s = 0;
            for (std::uint64_t t = 1; t <= q; ++t)
                if (std::gcd(t, q) == 1) s += std::cos(2 * M_PIl * static_cast<long double>(n * static_cast<std::int64_t>(t) % static_cast<std::int64_t>(q)) / q);
            const auto v = ramanujan_sum(q, n);
            CHECK(v.agree());
            CHECK(v.divisor == std::llround(static_cast<double>(s)));
        }
}

TEST_CASE("interval lattice counts") {
    CHECK(interval_lattice_count(0.5, 3.5).count == 3);
    CHECK(interval_lattice_count(2.0, 5.0).count == 4);
    CHECK(interval_lattice_count(3.2, 2.9).count == 0);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 500; ++i) {
        const i128 a = static_cast<i128>(rng() % 2001) - 1000, b = static_cast<i128>(rng() % 2001) - 1000;
        const i128 den = 1 + static_cast<i128>(rng() % 12);
        const Rational U(a, den), V(b, den);
        std::int64_t naive = 0;
        for (i128 s = -1000; s <= 1000; ++s)
            if (Rational(s) >= U && Rational(s) <= V) ++naive;
        const auto c = interval_lattice_count(U, V);
        CHECK(c.count == naive);
        if (V >= U) CHECK(c.linear + Rational(c.integrality) + c.sawtooth_correction == Rational(naive));
    }
}

TEST_CASE("Rational arithmetic guards overflow") {
    CHECK(Rational(6, -4) == Rational(-3, 2));
    CHECK(Rational(-7, 2).floor() == -4);
    CHECK(Rational(-7, 2).frac() == Rational(1, 2));
    CHECK_THROWS_AS(Rational(1, 0), PreconditionError);
    const Rational huge(static_cast<i128>(1) << 120);
    CHECK_THROWS_AS(huge * huge, OverflowError);
}
