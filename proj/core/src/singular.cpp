#include "detcount/singular.hpp"

#include "detcount/density.hpp"
#include "detcount/error.hpp"

#include <cmath>
#include <string>

namespace detcount::singular {

namespace {

constexpr std::uint64_t kEnumerationGuard = 100'000'000;

void require_prime(std::uint64_t p, const char* what) {
    if (!arith::is_prime(p)) throw PreconditionError(std::string(what) + ": " + std::to_string(p) + " is not prime");
}

unsigned valuation(std::uint64_t p, std::uint64_t h) {
    unsigned nu = 0;
    while (h % p == 0) {
        h /= p;
        ++nu;
    }
    return nu;
}

Rational density_value(std::uint64_t p, unsigned nu) {
    const auto pp = static_cast<i128>(p);
    Rational geometric(0);
    Rational term(1);
    for (unsigned j = 0; j <= nu; ++j) {
        geometric += term;
        term /= Rational(pp);
    }
    return (Rational(1) - Rational(1, pp * pp)) * geometric;
}

} // namespace

LocalDensity local_density(std::uint64_t p, std::uint64_t h) {
    require_prime(p, "local_density");
    if (h == 0) throw PreconditionError("local_density: h must be positive");
    const unsigned nu = valuation(p, h);
    return {p, h, nu, density_value(p, nu)};
}

std::uint64_t local_count_enumerate(std::uint64_t p, unsigned k, std::int64_t h) {
    require_prime(p, "local_count_enumerate");
    if (k == 0) throw PreconditionError("local_count_enumerate: k must be positive");
    std::uint64_t q = 1;
    for (unsigned i = 0; i < k; ++i) {
        q *= p;
        if (q > 100) throw PreconditionError("local_count_enumerate: p^{4k} exceeds the 10^8 guard");
    }
    if (q * q * q * q > kEnumerationGuard)
        throw PreconditionError("local_count_enumerate: p^{4k} exceeds the 10^8 guard");
    const auto qi = static_cast<std::int64_t>(q);
    const std::int64_t target = ((h % qi) + qi) % qi;
    // x1 x2 = t (mod q) has gcd(x1, q) solutions when gcd(x1, q) | t, else none.
    std::vector<std::int64_t> g(q);
    for (std::int64_t x = 0; x < qi; ++x) g[x] = static_cast<std::int64_t>(arith::gcd(static_cast<std::uint64_t>(x), q));
    std::uint64_t total = 0;
    for (std::int64_t x1 = 0; x1 < qi; ++x1) {
        const std::int64_t gx = g[x1];
        for (std::int64_t x3 = 0; x3 < qi; ++x3) {
            for (std::int64_t x4 = 0; x4 < qi; ++x4) {
                const std::int64_t t = ((target - x3 * x4) % qi + qi) % qi;
                if (t % gx == 0) total += static_cast<std::uint64_t>(gx);
            }
        }
    }
    return total;
}

Rational local_count_predicted(std::uint64_t p, unsigned k, std::uint64_t h) {
    const LocalDensity ld = local_density(p, h);
    i128 cube = 1;
    for (unsigned i = 0; i < 3 * k; ++i) cube = checked::mul(cube, static_cast<i128>(p));
    return Rational(cube) * ld.value;
}

SingularSeries singular_series(const arith::Factorization& h, std::optional<std::uint64_t> truncate_at) {
    SingularSeries out;
    out.h = h.value();
    for (const auto& pp : h.factors()) out.local.push_back({pp.prime, h.value(), pp.exponent, density_value(pp.prime, pp.exponent)});
    out.divisor_sum = arith::divisor_reciprocal_sum(h);
    out.value = out.divisor_sum.to_double() / density::kZeta2;
    if (truncate_at) {
        const std::uint64_t P = *truncate_at;
        if (P < 2) throw PreconditionError("singular_series: truncation point must be >= 2");
        long double product = 1;
        for (std::uint64_t p : arith::primes_up_to(P))
            product *= static_cast<long double>(density_value(p, h.valuation(p)).to_double());
        for (const auto& pp : h.factors())
            if (pp.prime > P) product *= static_cast<long double>(density_value(pp.prime, pp.exponent).to_double());
        const double prod = static_cast<double>(product);
        out.truncation = EulerTruncation{P, prod, prod * -std::expm1(-2.0 / static_cast<double>(P))};
    }
    return out;
}

} // namespace detcount::singular
