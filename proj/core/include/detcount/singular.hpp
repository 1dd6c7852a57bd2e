#pragma once

// Local densities of x1 x2 + x3 x4 = h and the singular series
//
//   S_h = prod_p sigma_p(h) = zeta(2)^{-1} sum_{d | h} 1/d.

#include "detcount/arith.hpp"
#include "detcount/rational.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace detcount::singular {

struct LocalDensity {
    std::uint64_t p;
    std::uint64_t h;
    unsigned nu; // nu_p(h)
    /// (1 - p^-2) (1 + 1/p + ... + p^-nu)
    Rational value;
};

/// Throws PreconditionError when p is not prime or h == 0.
LocalDensity local_density(std::uint64_t p, std::uint64_t h);

/// #{x in (Z/p^k)^4 : x1 x2 + x3 x4 = h mod p^k}, by enumeration.
/// Requires p prime, k >= 1 and p^{4k} <= 10^8.
std::uint64_t local_count_enumerate(std::uint64_t p, unsigned k, std::int64_t h);

/// p^{3k} sigma_p(h), the count the local density predicts at level p^k.
Rational local_count_predicted(std::uint64_t p, unsigned k, std::uint64_t h);

struct EulerTruncation {
    std::uint64_t P;
    /// prod over p <= P, and over primes p > P dividing h, of sigma_p(h).
    double product;
    /// product - exact lies in [0, tail_bound], from sum_{p > P} log(1/(1 - p^-2)) <= 2/P.
    double tail_bound;
};

struct SingularSeries {
    std::uint64_t h;
    std::vector<LocalDensity> local; // one row per prime dividing h
    Rational divisor_sum;            // sum_{d | h} 1/d, exact
    double value;                    // divisor_sum / zeta(2)
    std::optional<EulerTruncation> truncation;
};

SingularSeries singular_series(const arith::Factorization& h, std::optional<std::uint64_t> truncate_at = {});

} // namespace detcount::singular
