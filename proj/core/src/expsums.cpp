#include "detcount/expsums.hpp"

#include "detcount/arith.hpp"
#include "detcount/error.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace detcount::expsums {

namespace {

std::int64_t reduce(std::int64_t x, std::int64_t u) {
    const std::int64_t r = x % u;
    return r < 0 ? r + u : r;
}

struct ComplexAccumulator {
    arith::CompensatedSum re;
    arith::CompensatedSum im;
    void add(std::complex<double> z) {
        re += z.real();
        im += z.imag();
    }
    std::complex<double> value() const {
        return {static_cast<double>(re.value()), static_cast<double>(im.value())};
    }
};

} // namespace

std::complex<double> unit_phase(std::int64_t k, std::int64_t u) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(reduce(k, u)) / static_cast<double>(u);
    return {std::cos(angle), std::sin(angle)};
}

std::int64_t mod_inverse(std::int64_t x, std::int64_t u) {
    if (u < 2) throw PreconditionError("mod_inverse: modulus must be at least 2");
    std::int64_t a = reduce(x, u);
    std::int64_t m = u;
    std::int64_t s0 = 1, s1 = 0;
    while (m != 0) {
        const std::int64_t q = a / m;
        std::int64_t t = a - q * m;
        a = m;
        m = t;
        t = s0 - q * s1;
        s0 = s1;
        s1 = t;
    }
    if (a != 1)
        throw PreconditionError("mod_inverse: " + std::to_string(x) + " is not invertible mod " + std::to_string(u));
    return reduce(s0, u);
}

KloostermanValue kloosterman_complete(std::int64_t a, std::int64_t b, std::int64_t u) {
    if (u < 1) throw PreconditionError("kloosterman_complete: u must be positive");
    const auto g = static_cast<double>(std::gcd(b < 0 ? -b : b, u));
    const double weil = static_cast<double>(arith::factorize(static_cast<std::uint64_t>(u)).divisor_count()) *
                        std::sqrt(g) * std::sqrt(static_cast<double>(u));
    if (u == 1) return {a, b, u, {1.0, 0.0}, weil};
    ComplexAccumulator acc;
    const std::int64_t ar = reduce(a, u);
    const std::int64_t br = reduce(b, u);
    for (std::int64_t x = 1; x < u; ++x) {
        if (std::gcd(x, u) != 1) continue;
        const std::int64_t xbar = mod_inverse(x, u);
        const auto k = static_cast<std::int64_t>((static_cast<i128>(ar) * x + static_cast<i128>(br) * xbar) % u);
        acc.add(unit_phase(k, u));
    }
    return {a, b, u, acc.value(), weil};
}

IncompleteKloosterman kloosterman_incomplete(IntRange interval, std::int64_t r, std::int64_t u) {
    if (u < 2) throw PreconditionError("kloosterman_incomplete: u must be at least 2");
    if (u > 1'000'000'000 || r > 1'000'000'000 || r < -1'000'000'000)
        throw PreconditionError("kloosterman_incomplete: |r| and u must not exceed 1e9");
    if (interval.last < interval.first) throw PreconditionError("kloosterman_incomplete: empty interval");
    const std::int64_t rr = reduce(r, u);
    ComplexAccumulator acc;
    for (std::int64_t v = interval.first; v <= interval.last; ++v) {
        if (std::gcd(reduce(v, u), u) != 1) continue;
        const std::int64_t vbar = mod_inverse(v, u);
        acc.add(unit_phase(static_cast<std::int64_t>(static_cast<i128>(rr) * vbar % u), u));
    }
    const auto g = static_cast<double>(std::gcd(r < 0 ? -r : r, u));
    const double ud = static_cast<double>(u);
    const double hooley = std::sqrt(g) / std::sqrt(ud) * (static_cast<double>(interval.size()) + ud * std::log(ud));
    return {interval, r, u, acc.value(), hooley};
}

} // namespace detcount::expsums
