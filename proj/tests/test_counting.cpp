#include "detcount/counting.hpp"
#include "detcount/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace detcount;
using namespace detcount::counting;

namespace {

// Independent oracles: direct loops over the box.
std::uint64_t naive_T(std::int64_t h, std::int64_t N) {
    std::vector<std::uint64_t> prod(4 * N * N + 1, 0);
    for (std::int64_t a = -N; a <= N; ++a)
        for (std::int64_t b = -N; b <= N; ++b) ++prod[a * b + 2 * N * N];
    std::uint64_t t = 0;
    for (std::int64_t m = -N * N; m <= N * N; ++m) {
        const std::int64_t k = m - h;
        if (k >= -N * N && k <= N * N) t += prod[m + 2 * N * N] * prod[k + 2 * N * N];
    }
    return t;
}

std::uint64_t naive_plus(std::int64_t h, std::int64_t N) {
    std::uint64_t c = 0;
    for (std::int64_t a = 1; a <= N; ++a)
        for (std::int64_t x = 1; x <= N; ++x)
            for (std::int64_t b = 1; b <= N; ++b) {
                const std::int64_t rest = h - a * x;
                if (rest > 0 && rest % b == 0 && rest / b <= N) ++c;
            }
    return c;
}

std::uint64_t naive_minus(std::int64_t h, std::int64_t N) {
    std::uint64_t c = 0;
    for (std::int64_t a = 1; a <= N; ++a)
        for (std::int64_t x = 1; x <= N; ++x)
            for (std::int64_t b = 1; b <= N; ++b) {
                const std::int64_t rest = a * x - h;
                if (rest > 0 && rest % b == 0 && rest / b <= N) ++c;
            }
    return c;
}

} // namespace

TEST_CASE("query validation") {
    CHECK_NOTHROW(CountQuery::make(8, 2));
    CHECK_THROWS_AS(CountQuery::make(0, 2), PreconditionError);
    CHECK_THROWS_AS(CountQuery::make(9, 2), PreconditionError);
    CHECK_THROWS_AS(CountQuery::make(1, 0), PreconditionError);
    CHECK(parse_algorithm("lattice") == Algorithm::lattice);
    CHECK_THROWS_AS(parse_algorithm("magic"), PreconditionError);
}

TEST_CASE("small reference counts") {
    CHECK(brute_force_T(CountQuery::make(1, 1)).T == 20);
    CHECK(brute_force_T(CountQuery::make(4, 2)).T == 52);
    const auto q = CountQuery::make(4, 2);
    CHECK(count_additive(q) == 4);
    CHECK(count_difference(q) == 0);
    CHECK(zero_solutions(q) == 36);
    CHECK(zero_solutions(CountQuery::make(1, 1)) == 20);
    CHECK(count_difference(CountQuery::make(1, 2)) == 2);
    const auto rec = count_T(q, Algorithm::decomposition);
    CHECK(rec.T == 4 * rec.T_plus + 8 * rec.T_minus + rec.Z_zero);
    CHECK(rec.T == 52);
    for (std::uint64_t N = 1; N <= 30; ++N) {
        CHECK(count_additive(CountQuery::make(1, N)) == 0);
        CHECK(count_additive(CountQuery::make(2 * N * N, N)) == 1);
        CHECK(count_difference(CountQuery::make(N * N, N)) == 0);
    }
    // Largest h with no product representation above N^2.
    CHECK(zero_solutions(CountQuery::make(7 * 7 + 1, 7)) == 0);
}

TEST_CASE("extremal h with the guard lifted") {
    for (std::uint64_t N = 1; N <= 4; ++N) {
        const auto r = brute_force_T(CountQuery{2 * N * N, N}, true);
        CHECK(r.T == 4); // x1 x2 = N^2 and x3 x4 = -N^2, two sign choices each
    }
    CHECK_THROWS_AS(brute_force_T(CountQuery::make(1, 17)), PreconditionError);
}

TEST_CASE("every algorithm matches the naive oracles for N <= 8") {
    for (std::uint64_t N = 1; N <= 8; ++N) {
        const Counter counter(N);
        for (std::uint64_t h = 1; h <= 2 * N * N; ++h) {
            const auto q = CountQuery::make(h, N);
            const auto t = naive_T(static_cast<std::int64_t>(h), static_cast<std::int64_t>(N));
            const auto plus = naive_plus(static_cast<std::int64_t>(h), static_cast<std::int64_t>(N));
            const auto minus = naive_minus(static_cast<std::int64_t>(h), static_cast<std::int64_t>(N));
            CHECK(brute_force_T(q).T == t);
            for (auto alg : {Algorithm::convolution, Algorithm::decomposition, Algorithm::lattice}) {
                const auto rec = count_T(q, alg);
                CHECK(rec.T == t);
            }
            CHECK(counter.additive(h) == plus);
            CHECK(counter.difference(h) == minus);
            CHECK(count_additive_lattice(q).count == plus);
            CHECK(count_difference_lattice(q).count == minus);
        }
    }
}

TEST_CASE("decomposition identity and monotonicity on random points") {
    std::mt19937_64 rng(29);
    for (int i = 0; i < 60; ++i) {
        const std::uint64_t N = 9 + rng() % 120;
        const std::uint64_t h = 1 + rng() % (2 * N * N);
        const auto q = CountQuery::make(h, N);
        const auto dec = count_T(q, Algorithm::decomposition);
        const auto conv = count_T(q, Algorithm::convolution);
        CHECK(dec.T == conv.T);
        CHECK(dec.T == 4 * dec.T_plus + 8 * dec.T_minus + dec.Z_zero);
        CHECK(dec.T_plus == count_additive_lattice(q).count);
        CHECK(dec.T_minus == count_difference_lattice(q).count);
        CHECK(dec.T <= count_T(CountQuery::make(h, N + 1), Algorithm::decomposition).T);
        if (h >= N * N) CHECK(dec.T_minus == 0);
    }
}

TEST_CASE("segmented counting reproduces the table") {
    CountOptions tiny;
    tiny.memory_budget = 1000;
    for (std::uint64_t N : {40, 97, 150}) {
        const Counter full(N), seg(N, tiny);
        CHECK_FALSE(full.segmented());
        CHECK(seg.segmented());
        for (std::uint64_t h : {std::uint64_t{1}, N, N * N - 1, N * N, N * N + N, 2 * N * N - 3, 2 * N * N}) {
            CHECK(full.additive(h) == seg.additive(h));
            CHECK(full.difference(h) == seg.difference(h));
        }
    }
}

TEST_CASE("product table") {
    const auto t = ProductTable::full(6);
    for (std::uint64_t m = 1; m <= 36; ++m) {
        std::uint32_t c = 0;
        for (std::uint64_t a = 1; a <= 6; ++a)
            if (m % a == 0 && m / a <= 6) ++c;
        CHECK(t[m] == c);
    }
}

TEST_CASE("lattice cells") {
    const auto cell = lattice_bounds(1, 1, 1, 4, 2, Kind::additive);
    CHECK(cell.b0 == 1);
    CHECK(cell.a0 == 3);
    CHECK(cell.U == Rational(1));
    CHECK(cell.V == Rational(1));
    CHECK(cell.count() == 1);
    for (std::uint64_t h = 1; h <= 30; ++h) CHECK(lattice_bounds(1, 1, 3, h, 6, Kind::additive).b0 == 1);
    const auto diff = lattice_bounds(3, 1, 1, 3, 4, Kind::difference);
    CHECK(diff.b0 == 1);
    CHECK(diff.a0 == 2);

    // Congruence conditions for every cell of a moderate query.
    const std::uint64_t N = 20, h = 360;
    for (auto kind : {Kind::additive, Kind::difference})
        for (std::uint64_t d = 1; d <= N; ++d) {
            if (h % d) continue;
            const std::int64_t k = static_cast<std::int64_t>(h / d);
            for (std::uint64_t u = 1; u <= N / d; ++u)
                for (std::uint64_t v = 1; v <= N / d; ++v) {
                    if (std::gcd(u, v) != 1) continue;
                    const auto c = lattice_bounds(d, u, v, h, N, kind);
                    const auto su = static_cast<std::int64_t>(u), sv = static_cast<std::int64_t>(v);
                    if (kind == Kind::additive) CHECK(c.a0 * su + c.b0 * sv == k);
                    else CHECK(c.a0 * su - c.b0 * sv == k);
                    CHECK(c.b0 >= 1);
                    CHECK(c.b0 <= std::max<std::int64_t>(su, 1));
                }
        }
}

TEST_CASE("main plus error reproduces the exact count") {
    const auto s = main_error_split(CountQuery::make(4, 2), Kind::additive);
    CHECK(static_cast<double>(s.M + s.E) == doctest::Approx(4.0));
    for (std::uint64_t N : {5, 12, 33}) {
        const auto z = main_error_split(CountQuery::make(N * N, N), Kind::difference);
        CHECK(std::abs(static_cast<double>(z.M + z.E)) < 1e-9);
    }
    std::mt19937_64 rng(31);
    for (int i = 0; i < 40; ++i) {
        const std::uint64_t N = 2 + rng() % 80;
        const std::uint64_t h = 1 + rng() % (2 * N * N);
        for (auto kind : {Kind::additive, Kind::difference}) {
            const auto q = CountQuery::make(h, N);
            const auto split = main_error_split(q, kind);
            CHECK(std::llround(static_cast<double>(split.M + split.E)) == static_cast<long long>(split.exact));
            const auto comp = error_components(q, kind);
            CHECK(static_cast<double>(comp.total()) == doctest::Approx(static_cast<double>(split.E)).epsilon(1e-9));
            long double rows = 0;
            for (const auto& r : comp.per_divisor) rows += r.integrality - r.psi_V + r.psi_U;
            CHECK(static_cast<double>(rows) == doctest::Approx(static_cast<double>(comp.total())).epsilon(1e-9));
        }
    }
}

TEST_CASE("continuum weight cap and sum-integral gap") {
    CHECK(continuum_F(1, 1, 1e9, 10) == 0);
    CHECK(continuum_F(1, 1, 10, 10) <= 10);
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> unit(0, 1);
    for (int i = 0; i < 100000; ++i) {
        const double N = 2 + 500 * unit(rng);
        const double a = 1 + (N - 1) * unit(rng), b = 1 + (N - 1) * unit(rng);
        const double c = 2 * N * N * unit(rng);
        const double cap = N / std::max(a, b) + 1e-9;
        REQUIRE(continuum_F(a, b, c, N) <= cap);
        REQUIRE(continuum_G(a, b, c, N) <= cap);
        REQUIRE(continuum_F(a, b, c, N) >= 0);
    }
    for (std::uint64_t N : {32, 64, 128}) {
        const auto g = continuum_gap(N * N / 2, N, 1, 1, Kind::additive);
        const double L = std::log(static_cast<double>(N));
        CHECK(std::abs(g.difference()) <= 10 * N * L * L);
    }
}
