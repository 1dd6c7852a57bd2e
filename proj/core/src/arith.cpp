#include "detcount/arith.hpp"

#include "detcount/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace detcount::arith {

namespace {

constexpr std::uint64_t kTrialLimit = 1'000'000;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    b %= m;
    while (e != 0) {
        if (e & 1) r = mulmod(r, b, m);
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return r;
}

bool miller_rabin_witness(std::uint64_t n, std::uint64_t a, std::uint64_t d, unsigned s) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) return false;
    for (unsigned i = 1; i < s; ++i) {
        x = mulmod(x, x, n);
        if (x == n - 1) return false;
    }
    return true;
}

// Brent's variant; n odd composite with no factor below kTrialLimit.
std::uint64_t pollard_rho(std::uint64_t n) {
    for (std::uint64_t c = 1;; ++c) {
        auto f = [&](std::uint64_t x) { return (mulmod(x, x, n) + c) % n; };
        std::uint64_t y = 2, x = 2, g = 1, q = 1, ys = 2;
        std::uint64_t r = 1;
        constexpr std::uint64_t m = 128;
        do {
            x = y;
            for (std::uint64_t i = 0; i < r; ++i) y = f(y);
            std::uint64_t k = 0;
            do {
                ys = y;
                for (std::uint64_t i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                g = std::gcd(q, n);
                k += m;
            } while (k < r && g == 1);
            r <<= 1;
        } while (g == 1);
        if (g == n) {
            do {
                ys = f(ys);
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

void split_large(std::uint64_t n, std::vector<std::uint64_t>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        out.push_back(n);
        return;
    }
    const std::uint64_t d = pollard_rho(n);
    split_large(d, out);
    split_large(n / d, out);
}

} // namespace

Factorization::Factorization(std::uint64_t value, std::vector<PrimePower> factors)
    : value_(value), factors_(std::move(factors)) {
    if (value_ == 0) throw PreconditionError("Factorization of zero");
    u128 product = 1;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        const auto& pp = factors_[i];
        if (pp.exponent == 0) throw PreconditionError("Factorization: zero exponent");
        if (i > 0 && factors_[i - 1].prime >= pp.prime)
            throw PreconditionError("Factorization: primes must be strictly increasing");
        for (unsigned e = 0; e < pp.exponent; ++e) {
            product *= pp.prime;
            if (product > value_) throw PreconditionError("Factorization: product exceeds value");
        }
    }
    if (product != value_) throw PreconditionError("Factorization: product does not match value");
}

unsigned Factorization::valuation(std::uint64_t p) const {
    for (const auto& pp : factors_)
        if (pp.prime == p) return pp.exponent;
    return 0;
}

std::vector<std::uint64_t> Factorization::divisors() const {
    std::vector<std::uint64_t> out{1};
    for (const auto& pp : factors_) {
        const std::size_t base = out.size();
        std::uint64_t pk = 1;
        for (unsigned e = 1; e <= pp.exponent; ++e) {
            pk *= pp.prime;
            for (std::size_t i = 0; i < base; ++i) out.push_back(out[i] * pk);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::uint64_t Factorization::divisor_count() const {
    std::uint64_t c = 1;
    for (const auto& pp : factors_) c *= pp.exponent + 1;
    return c;
}

std::uint64_t Factorization::divisor_sum() const {
    std::uint64_t s = 1;
    for (const auto& pp : factors_) {
        std::uint64_t term = 1, pk = 1;
        for (unsigned e = 1; e <= pp.exponent; ++e) {
            pk *= pp.prime;
            term += pk;
        }
        s *= term;
    }
    return s;
}

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // This base set is deterministic below 3.3e24.
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (miller_rabin_witness(n, a, d, s)) return false;
    }
    return true;
}

Factorization factorize(std::uint64_t n) {
    if (n == 0) throw PreconditionError("factorize: n must be positive");
    if (n > static_cast<std::uint64_t>(INT64_MAX)) throw PreconditionError("factorize: n must be below 2^63");
    const std::uint64_t value = n;
    std::vector<PrimePower> factors;
    auto strip = [&](std::uint64_t p) {
        if (n % p != 0) return;
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        factors.push_back({p, e});
    };
    strip(2);
    strip(3);
    for (std::uint64_t p = 5; p <= kTrialLimit && p * p <= n; p += 6) {
        strip(p);
        strip(p + 2);
    }
    if (n > 1) {
        std::vector<std::uint64_t> rest;
        split_large(n, rest);
        std::sort(rest.begin(), rest.end());
        for (std::uint64_t p : rest) {
            if (!factors.empty() && factors.back().prime == p)
                ++factors.back().exponent;
            else
                factors.push_back({p, 1});
        }
    }
    return Factorization(value, std::move(factors));
}

std::vector<std::uint64_t> primes_up_to(std::uint64_t limit) {
    std::vector<std::uint64_t> primes;
    if (limit < 2) return primes;
    std::vector<bool> composite(limit + 1, false);
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        primes.push_back(i);
        for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
    }
    return primes;
}

int mobius(const Factorization& f) {
    int sign = 1;
    for (const auto& pp : f.factors()) {
        if (pp.exponent >= 2) return 0;
        sign = -sign;
    }
    return sign;
}

Rational divisor_reciprocal_sum(const Factorization& f) {
    Rational total(1);
    for (const auto& pp : f.factors()) {
        // (p^{nu+1} - 1) / ((p - 1) p^nu)
        i128 pk = 1;
        for (unsigned e = 0; e < pp.exponent; ++e) pk = checked::mul(pk, static_cast<i128>(pp.prime));
        const i128 p = static_cast<i128>(pp.prime);
        const i128 num = checked::sub(checked::mul(pk, p), 1);
        const i128 den = checked::mul(p - 1, pk);
        total *= Rational(num, den);
    }
    return total;
}

std::uint64_t restricted_divisor(std::uint64_t m, std::uint64_t N) {
    if (m == 0) throw PreconditionError("restricted_divisor: m must be positive");
    if (static_cast<u128>(N) * N < m) return 0;
    std::uint64_t count = 0;
    if (m <= 1'000'000) {
        // Small m: direct scan up to sqrt is cheaper than factorizing.
        for (std::uint64_t d = 1; d * d <= m; ++d) {
            if (m % d != 0) continue;
            const std::uint64_t e = m / d;
            if (d <= N && e <= N) count += (d == e) ? 1 : 2;
        }
        return count;
    }
    for (std::uint64_t d : factorize(m).divisors()) {
        if (d <= N && m / d <= N) ++count;
    }
    return count;
}

std::uint64_t restricted_divisor_signed(std::int64_t n, std::uint64_t N) {
    if (n == 0) return 4 * N + 1;
    const std::uint64_t m = n < 0 ? static_cast<std::uint64_t>(-(n + 1)) + 1 : static_cast<std::uint64_t>(n);
    return 2 * restricted_divisor(m, N);
}

std::uint64_t gcd(std::uint64_t a, std::uint64_t b) { return std::gcd(a, b); }

std::uint64_t gcd_sum(std::uint64_t m, double M) {
    if (m == 0) throw PreconditionError("gcd_sum: m must be positive");
    if (!(M >= 1)) throw PreconditionError("gcd_sum: M must be at least 1");
    const auto top = static_cast<std::uint64_t>(std::floor(M));
    std::uint64_t s = 0;
    for (std::uint64_t y = 1; y <= top; ++y) s += std::gcd(y, m);
    return s;
}

double sawtooth(double x) { return x - std::floor(x) - 0.5; }

Rational sawtooth(const Rational& x) { return x.frac() - Rational(1, 2); }

double distance_to_integer(double x) { return std::fabs(x - std::nearbyint(x)); }

SawtoothResidual sawtooth_truncated(double theta, double Q) {
    if (!(Q >= 1)) throw PreconditionError("sawtooth_truncated: Q must be at least 1");
    const double r = theta - std::floor(theta);
    const auto S = static_cast<std::uint64_t>(std::floor(Q));
    CompensatedSum acc;
    for (std::uint64_t s = 1; s <= S; ++s) {
        // Reduce r*s mod 1 before scaling by 2 pi.
        const double phase = std::fmod(r * static_cast<double>(s), 1.0);
        acc += -std::sin(2.0 * std::numbers::pi * phase) / (std::numbers::pi * static_cast<double>(s));
    }
    const double partial = static_cast<double>(acc.value());
    const double dist = distance_to_integer(theta);
    const double bound = dist == 0.0 ? 1.0 : std::min(1.0, 1.0 / (Q * dist));
    return {theta, Q, partial, bound, std::fabs(sawtooth(theta) - partial)};
}

std::int64_t ramanujan_sum_divisor(std::uint64_t q, std::int64_t n) {
    if (q == 0) throw PreconditionError("ramanujan_sum: q must be positive");
    const std::uint64_t an = n < 0 ? static_cast<std::uint64_t>(-(n + 1)) + 1 : static_cast<std::uint64_t>(n);
    const std::uint64_t g = std::gcd(an, q); // gcd(0, q) = q
    std::int64_t total = 0;
    for (std::uint64_t d : factorize(g).divisors()) {
        total += static_cast<std::int64_t>(d) * mobius(factorize(q / d));
    }
    return total;
}

std::int64_t ramanujan_sum_exponential(std::uint64_t q, std::int64_t n, double* gap) {
    if (q == 0) throw PreconditionError("ramanujan_sum: q must be positive");
    const auto qq = static_cast<std::int64_t>(q);
    const std::int64_t nr = ((n % qq) + qq) % qq;
    CompensatedSum acc;
    for (std::uint64_t t = 1; t <= q; ++t) {
        if (std::gcd(t, q) != 1) continue;
        const auto k = static_cast<std::uint64_t>(static_cast<u128>(nr) * t % q);
        acc += std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(q));
    }
    const double v = static_cast<double>(acc.value());
    const double rounded = std::nearbyint(v);
    const double g = std::fabs(v - rounded);
    if (gap != nullptr) *gap = g;
    if (g > 1e-6)
        throw ConvergenceError("ramanujan_sum: exponential sum " + std::to_string(v) +
                               " is not within 1e-6 of an integer");
    return static_cast<std::int64_t>(rounded);
}

RamanujanValue ramanujan_sum(std::uint64_t q, std::int64_t n) {
    RamanujanValue r{q, n, 0, 0, 0.0};
    r.exponential = ramanujan_sum_exponential(q, n, &r.rounding_gap);
    r.divisor = ramanujan_sum_divisor(q, n);
    return r;
}

IntervalCount<double> interval_lattice_count(double U, double V) {
    if (!std::isfinite(U) || !std::isfinite(V)) throw PreconditionError("interval_lattice_count: non-finite bound");
    if (V < U) return {0, 0.0, 0, 0.0};
    const auto count = static_cast<std::int64_t>(std::floor(V) - std::ceil(U) + 1);
    const int integral = std::floor(U) == U ? 1 : 0;
    return {count, V - U, integral, -sawtooth(V) + sawtooth(U)};
}

IntervalCount<Rational> interval_lattice_count(const Rational& U, const Rational& V) {
    if (V < U) return {0, Rational(0), 0, Rational(0)};
    const auto count = static_cast<std::int64_t>(V.floor() - U.ceil() + 1);
    return {count, V - U, U.is_integer() ? 1 : 0, -sawtooth(V) + sawtooth(U)};
}

} // namespace detcount::arith
