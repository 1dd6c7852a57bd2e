#pragma once

// Exact counts of solutions to x1 x2 - x3 x4 = h in [-N, N]^4.
//
//   T(h, N) = 4 T+(h, N) + 8 T-(h, N) + Z(h, N)
//
// where T+ counts a x + b y = h and T- counts a x - b y = h over [N]^4, and Z
// counts solutions with a zero coordinate. T+ and T- are evaluated from the
// product-representation table r(m) = #{(a, x) in [N]^2 : a x = m}, and
// independently by the arithmetic-progression (lattice) method.

#include "detcount/rational.hpp"

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace detcount::counting {

/// (h, N) with 1 <= h <= 2 N^2.
struct CountQuery {
    std::uint64_t h = 1;
    std::uint64_t N = 1;

    /// Throws PreconditionError outside the standing range.
    static CountQuery make(std::uint64_t h, std::uint64_t N);
    std::uint64_t N2() const { return N * N; }
    friend bool operator==(const CountQuery&, const CountQuery&) = default;
};

enum class Algorithm { brute, convolution, decomposition, lattice };

std::string_view to_string(Algorithm a);
/// Accepts "brute", "convolution", "decomposition", "lattice".
Algorithm parse_algorithm(std::string_view name);

struct CountRecord {
    CountQuery query;
    std::uint64_t T = 0;
    std::uint64_t T_plus = 0;
    std::uint64_t T_minus = 0;
    std::uint64_t Z_zero = 0;
    Algorithm algorithm = Algorithm::decomposition;
    std::chrono::duration<double, std::milli> elapsed{};
};

struct CountOptions {
    /// Maximum number of 32-bit table entries held at once.
    std::uint64_t memory_budget = std::uint64_t{1} << 31;
};

/// r(m) for m in [lo, hi). Entries are 32-bit; r(m) <= d(m) never comes close.
class ProductTable {
public:
    ProductTable(std::uint64_t N, std::uint64_t lo, std::uint64_t hi);
    /// The full table for m in [0, N^2].
    static ProductTable full(std::uint64_t N, const CountOptions& opts = {});

    std::uint64_t N() const { return N_; }
    std::uint64_t lo() const { return lo_; }
    std::uint64_t hi() const { return hi_; }
    /// r(m); zero outside [1, N^2]. m must lie in [lo, hi).
    std::uint32_t operator[](std::uint64_t m) const { return r_[m - lo_]; }
    /// r(m) for any m, zero outside the stored window or outside [1, N^2].
    std::uint32_t at(std::int64_t m) const;

private:
    std::uint64_t N_, lo_, hi_;
    std::vector<std::uint32_t> r_;
};

/// Reuses one product table for many h at a fixed N. Falls back to streaming
/// segments when the full table would exceed the memory budget.
class Counter {
public:
    explicit Counter(std::uint64_t N, CountOptions opts = {});

    std::uint64_t N() const { return N_; }
    bool segmented() const { return table_.empty(); }

    std::uint64_t additive(std::uint64_t h) const;
    std::uint64_t difference(std::uint64_t h) const;
    /// sum_n d'(n) d'(n + h) over |n|, |n + h| <= N^2. Needs the full table.
    std::uint64_t convolution(std::uint64_t h) const;
    CountRecord count(std::uint64_t h, Algorithm algorithm) const;

private:
    std::uint64_t additive_segmented(std::uint64_t h) const;
    std::uint64_t difference_segmented(std::uint64_t h) const;
    std::uint64_t block_size() const;

    std::uint64_t N_;
    CountOptions opts_;
    std::vector<ProductTable> table_; // empty, or one full table
};

/// Full (2N+1)^4 enumeration; N <= 16 unless the guard is lifted.
CountRecord brute_force_T(CountQuery q, bool lift_guard = false);

std::uint64_t count_additive(CountQuery q, const CountOptions& opts = {});
std::uint64_t count_difference(CountQuery q, const CountOptions& opts = {});

/// 4 (4N + 1) D_N(h): one product is zero, the other is +-h.
std::uint64_t zero_solutions(CountQuery q);

CountRecord count_T(CountQuery q, Algorithm algorithm, const CountOptions& opts = {});

// ---------------------------------------------------------------------------
// Lattice (arithmetic-progression) method.

enum class Kind { additive, difference };
std::string_view to_string(Kind k);

/// One (d, u, v) cell: the admissible s form the integer interval [U, V].
struct LatticeCell {
    std::uint64_t d;
    std::uint64_t u;
    std::uint64_t v;
    std::int64_t b0;
    std::int64_t a0;
    Rational U;
    Rational V;
    Kind kind;

    std::int64_t count() const;
};

/// Requires d | h, 1 <= u, v <= N/d and gcd(u, v) = 1.
LatticeCell lattice_bounds(std::uint64_t d, std::uint64_t u, std::uint64_t v, std::uint64_t h, std::uint64_t N,
                           Kind kind);

/// Sums over the cells of one divisor d. The error part is
/// integrality - psi_V + psi_U, all restricted to cells with V >= U.
struct DivisorBreakdown {
    std::uint64_t d = 0;
    std::uint64_t cells = 0;
    std::uint64_t count = 0;
    long double main = 0;        // sum (V - U)
    long double integrality = 0; // sum 1_Z(U)
    long double psi_V = 0;       // sum psi(V)
    long double psi_U = 0;       // sum psi(U)

    long double error() const { return integrality - psi_V + psi_U; }
};

struct LatticeSweep {
    CountQuery query;
    Kind kind = Kind::additive;
    std::vector<DivisorBreakdown> per_divisor;
    std::uint64_t count = 0;
    long double main = 0;
    long double integrality = 0;
    long double psi_V = 0;
    long double psi_U = 0;

    long double error() const { return integrality - psi_V + psi_U; }
    /// Per-divisor breakdown as a JSON object keyed by d.
    std::string to_json() const;
};

/// Walks every cell, for d | h with d <= N and coprime u, v <= N/d.
LatticeSweep lattice_sweep(CountQuery q, Kind kind);

/// T+ via the lattice method, with its per-divisor breakdown.
LatticeSweep count_additive_lattice(CountQuery q);
LatticeSweep count_difference_lattice(CountQuery q);

struct MainErrorSplit {
    long double M;
    long double E;
    std::uint64_t exact;
};

/// Throws ConvergenceError if |M + E - exact| exceeds 1e-6.
MainErrorSplit main_error_split(CountQuery q, Kind kind);

struct ErrorComponents {
    struct Row {
        std::uint64_t d;
        long double integrality;
        long double psi_V;
        long double psi_U;
    };
    std::vector<Row> per_divisor;
    long double integrality = 0;
    long double psi_V = 0;
    long double psi_U = 0;
    /// integrality - psi_V + psi_U; equals E of main_error_split.
    long double total() const { return integrality - psi_V + psi_U; }
    /// psi_U - psi_V, the sawtooth part alone.
    long double sawtooth() const { return psi_U - psi_V; }
};

ErrorComponents error_components(CountQuery q, Kind kind);

// ---------------------------------------------------------------------------
// Continuum evaluators of the main term.

/// F_N(alpha, beta, c) = max{0, V' - U'} with
/// V' = min{N/alpha, c/(alpha beta) - 1/beta}, U' = max{1/alpha, c/(alpha beta) - N/beta}.
double continuum_F(double alpha, double beta, double c, double N);

/// G_N(alpha, beta, c) = 1[alpha - beta >= c/N] N/alpha
///                     + 1[c/N <= alpha < c/N + beta] (N/beta - c/(alpha beta)).
double continuum_G(double alpha, double beta, double c, double N);

struct ContinuumGap {
    double discrete;    // sum over 1 <= u, v <= L of F_N(u, v, c)
    double integral;    // integral over [1, L]^2 of F_N
    double difference() const { return discrete - integral; }
};

/// Compares the lattice sum of F_N (or G_N) against its integral, L = floor(N/(d k)), c = h/(d k).
ContinuumGap continuum_gap(std::uint64_t h, std::uint64_t N, std::uint64_t d, std::uint64_t k, Kind kind);

} // namespace detcount::counting
