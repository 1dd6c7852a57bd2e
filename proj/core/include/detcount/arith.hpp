#pragma once

// Elementary number theory shared by the rest of the library: factorization,
// divisor functionals, Moebius, the sawtooth function, Ramanujan sums and the
// integer-interval counting identity.

#include "detcount/rational.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace detcount::arith {

struct PrimePower {
    std::uint64_t prime;
    unsigned exponent;
    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// A positive integer with its prime-power decomposition, primes ascending.
class Factorization {
public:
    Factorization() = default;
    /// Validates the invariants; throws PreconditionError on violation.
    Factorization(std::uint64_t value, std::vector<PrimePower> factors);

    std::uint64_t value() const { return value_; }
    std::span<const PrimePower> factors() const { return factors_; }
    bool is_one() const { return factors_.empty(); }

    /// nu_p(value); zero when p does not divide value.
    unsigned valuation(std::uint64_t p) const;

    /// All positive divisors, ascending.
    std::vector<std::uint64_t> divisors() const;

    /// d(value).
    std::uint64_t divisor_count() const;

    /// sigma(value) = sum of divisors.
    std::uint64_t divisor_sum() const;

private:
    std::uint64_t value_ = 1;
    std::vector<PrimePower> factors_;
};

/// Trial division to 10^6, then Miller-Rabin + Pollard rho on the cofactor.
Factorization factorize(std::uint64_t n);

/// Deterministic for all 64-bit inputs.
bool is_prime(std::uint64_t n);

/// Primes <= limit, ascending (simple Eratosthenes sieve).
std::vector<std::uint64_t> primes_up_to(std::uint64_t limit);

int mobius(const Factorization& f);

/// sum_{d | h} 1/d as an exact rational, built from the Euler product
/// prod_p (1 + 1/p + ... + 1/p^{nu_p}).
Rational divisor_reciprocal_sum(const Factorization& f);

/// D_N(m) = #{d | m : d <= N and m/d <= N}.
std::uint64_t restricted_divisor(std::uint64_t m, std::uint64_t N);

/// d'(n) = #{(x, y) in [-N, N]^2 : xy = n}.
std::uint64_t restricted_divisor_signed(std::int64_t n, std::uint64_t N);

/// sum_{1 <= y <= M} gcd(y, m).
std::uint64_t gcd_sum(std::uint64_t m, double M);

std::uint64_t gcd(std::uint64_t a, std::uint64_t b);

/// psi(x) = x - floor(x) - 1/2. Integers map to -1/2, not 0.
double sawtooth(double x);
Rational sawtooth(const Rational& x);

/// Distance from x to the nearest integer.
double distance_to_integer(double x);

struct SawtoothResidual {
    double theta;
    double Q;
    /// -sum_{0<|s|<=Q} e(theta s) / (2 pi i s), folded into a real sine series.
    double partial_sum;
    /// min{1, 1/(Q ||theta||)}
    double bound;
    /// |psi(theta) - partial_sum|
    double residual;
};

SawtoothResidual sawtooth_truncated(double theta, double Q);

struct RamanujanValue {
    std::uint64_t q;
    std::int64_t n;
    /// Rounded compensated sum of cos(2 pi n t / q) over units t.
    std::int64_t exponential;
    /// sum_{d | (n, q)} d mu(q/d)
    std::int64_t divisor;
    /// Distance of the floating sum from the nearest integer.
    double rounding_gap;
    bool agree() const { return exponential == divisor; }
};

/// c_q(n) evaluated two ways. Throws if q == 0 or if the exponential sum is
/// farther than 1e-6 from an integer.
RamanujanValue ramanujan_sum(std::uint64_t q, std::int64_t n);
std::int64_t ramanujan_sum_divisor(std::uint64_t q, std::int64_t n);
std::int64_t ramanujan_sum_exponential(std::uint64_t q, std::int64_t n, double* gap = nullptr);

/// Number of integers s with U <= s <= V, with its split into a linear part,
/// an integrality indicator and two sawtooth corrections.
template <typename T>
struct IntervalCount {
    std::int64_t count;
    T linear;               // V - U
    int integrality;        // 1_Z(U)
    T sawtooth_correction;  // -psi(V) + psi(U)
};

IntervalCount<double> interval_lattice_count(double U, double V);
IntervalCount<Rational> interval_lattice_count(const Rational& U, const Rational& V);

/// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    void add(long double x) {
        const long double t = sum_ + x;
        if (fabsl(sum_) >= fabsl(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(long double x) {
        add(x);
        return *this;
    }
    long double value() const { return sum_ + comp_; }

private:
    static long double fabsl(long double v) { return v < 0 ? -v : v; }
    long double sum_ = 0;
    long double comp_ = 0;
};

} // namespace detcount::arith
