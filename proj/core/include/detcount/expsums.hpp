#pragma once

// Complete and incomplete Kloosterman sums with their Weil/Hooley bounds.

#include <complex>
#include <cstdint>

namespace detcount::expsums {

/// Representative of x^{-1} mod u in [1, u). Throws unless gcd(x, u) = 1 and u >= 2.
std::int64_t mod_inverse(std::int64_t x, std::int64_t u);

struct KloostermanValue {
    std::int64_t a;
    std::int64_t b;
    std::int64_t u;
    std::complex<double> value;
    /// d(u) * gcd(b, u)^{1/2} * u^{1/2}
    double weil_bound;
};

/// S(a, b; u) = sum over x mod u, (x, u) = 1, of e((a x + b xbar) / u).
/// For u = 1 the single residue 0 is a unit and S = 1.
KloostermanValue kloosterman_complete(std::int64_t a, std::int64_t b, std::int64_t u);

/// Closed integer range [first, last].
struct IntRange {
    std::int64_t first;
    std::int64_t last;
    std::int64_t size() const { return last - first + 1; }
};

struct IncompleteKloosterman {
    IntRange interval;
    std::int64_t r;
    std::int64_t u;
    std::complex<double> value;
    /// gcd(r, u)^{1/2} / u^{1/2} * (|I| + u log u)
    double hooley_bound;
};

/// sum over v in I with (v, u) = 1 of e(r vbar / u). Requires u >= 2 and |r|, u <= 1e9.
IncompleteKloosterman kloosterman_incomplete(IntRange interval, std::int64_t r, std::int64_t u);

/// e(k/u) with k reduced mod u before scaling by 2 pi.
std::complex<double> unit_phase(std::int64_t k, std::int64_t u);

} // namespace detcount::expsums
