#include "detcount/arith.hpp"
#include "detcount/density.hpp"
#include "detcount/error.hpp"
#include "detcount/singular.hpp"

#include <doctest.h>

#include <cmath>

using namespace detcount;
using namespace detcount::singular;

namespace {

std::uint64_t naive_local_count(std::int64_t q, std::int64_t h) {
    std::vector<std::uint64_t> prod(q, 0);
    for (std::int64_t a = 0; a < q; ++a)
        for (std::int64_t b = 0; b < q; ++b) ++prod[a * b % q];
    std::uint64_t c = 0;
    const std::int64_t hr = ((h % q) + q) % q;
    for (std::int64_t m = 0; m < q; ++m) c += prod[m] * prod[((m - hr) % q + q) % q];
    return c;
}

std::uint64_t ipow(std::uint64_t p, unsigned k) {
    std::uint64_t r = 1;
    while (k--) r *= p;
    return r;
}

} // namespace

TEST_CASE("local counts") {
    CHECK(local_count_enumerate(2, 1, 1) == 6);
    CHECK(local_count_enumerate(3, 1, 1) == 24);
    CHECK(local_count_enumerate(2, 2, 1) == 48);
    for (std::uint64_t p : {2, 3, 5, 7})
        for (unsigned k = 1; ipow(p, k) <= 27; ++k)
            for (std::int64_t h = -3; h <= 30; ++h)
                CHECK(local_count_enumerate(p, k, h) ==
                      naive_local_count(static_cast<std::int64_t>(ipow(p, k)), h));
    CHECK_THROWS_AS(local_count_enumerate(101, 1, 1), PreconditionError);
}

TEST_CASE("local densities") {
    CHECK(local_density(3, 9).value == Rational(104, 81));
    CHECK(local_density(2, 1).value == Rational(3, 4));
    CHECK(local_density(5, 3).value == Rational(24, 25));
    CHECK(local_density(3, 9).nu == 2);
    CHECK_THROWS_AS(local_density(4, 1), PreconditionError);
    CHECK_THROWS_AS(local_density(3, 0), PreconditionError);

    // For p not dividing h the predicted count is exact at every level.
    for (std::uint64_t p : {2, 3, 5, 7, 11})
        for (unsigned k = 1; ipow(p, k) <= 25; ++k)
            for (std::uint64_t h = 1; h <= 40; ++h) {
                if (h % p == 0) continue;
                const Rational predicted = local_count_predicted(p, k, h);
                CHECK(predicted == Rational(static_cast<i128>(local_count_enumerate(p, k, static_cast<std::int64_t>(h)))));
            }
}

TEST_CASE("singular series values") {
    const double z2 = density::kZeta2;
    CHECK(singular_series(arith::factorize(1)).value == doctest::Approx(0.6079271).epsilon(1e-7));
    CHECK(singular_series(arith::factorize(6)).value == doctest::Approx(1.2158542).epsilon(1e-7));
    CHECK(singular_series(arith::factorize(4)).value == doctest::Approx(1.0638725).epsilon(1e-7));
    const auto s12 = singular_series(arith::factorize(12));
    CHECK(s12.divisor_sum == Rational(7, 3));
    CHECK(s12.value == doctest::Approx(1.41849657099273).epsilon(1e-13));
    CHECK(s12.local.size() == 2);
    for (std::uint64_t h = 1; h <= 300; ++h) {
        double s = 0;
        for (std::uint64_t d = 1; d <= h; ++d)
            if (h % d == 0) s += 1.0 / static_cast<double>(d);
        CHECK(singular_series(arith::factorize(h)).value == doctest::Approx(s / z2).epsilon(1e-13));
    }
}

TEST_CASE("truncated Euler product stays inside its tail bound") {
    for (std::uint64_t h : {1, 2, 6, 12, 30, 97, 100}) {
        const auto s = singular_series(arith::factorize(h), 10000);
        REQUIRE(s.truncation.has_value());
        CHECK(std::abs(s.truncation->product - s.value) <= s.truncation->tail_bound);
        CHECK(s.truncation->tail_bound < 1e-3);
    }
    // A prime factor above the cut-off is still accounted for.
    const auto big = singular_series(arith::factorize(2 * 10007), 1000);
    CHECK(std::abs(big.truncation->product - big.value) <= big.truncation->tail_bound);
}
