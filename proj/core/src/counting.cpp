#include "detcount/counting.hpp"

#include "detcount/arith.hpp"
#include "detcount/error.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace detcount::counting {

namespace {

constexpr std::uint64_t kBruteGuard = 16;

using Clock = std::chrono::steady_clock;

} // namespace

CountQuery CountQuery::make(std::uint64_t h, std::uint64_t N) {
    if (N == 0) throw PreconditionError("CountQuery: N must be positive");
    if (N > 3'000'000'000ULL) throw PreconditionError("CountQuery: N too large");
    if (h == 0 || h > 2 * N * N)
        throw PreconditionError("CountQuery: need 1 <= h <= 2N^2 (h=" + std::to_string(h) +
                                ", N=" + std::to_string(N) + ")");
    return CountQuery{h, N};
}

std::string_view to_string(Algorithm a) {
    switch (a) {
    case Algorithm::brute: return "brute";
    case Algorithm::convolution: return "convolution";
    case Algorithm::decomposition: return "decomposition";
    case Algorithm::lattice: return "lattice";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view name) {
    if (name == "brute") return Algorithm::brute;
    if (name == "convolution") return Algorithm::convolution;
    if (name == "decomposition") return Algorithm::decomposition;
    if (name == "lattice") return Algorithm::lattice;
    throw PreconditionError("unknown algorithm '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

ProductTable::ProductTable(std::uint64_t N, std::uint64_t lo, std::uint64_t hi)
    : N_(N), lo_(lo), hi_(std::max(lo, hi)), r_(hi_ - lo_, 0) {
    if (hi_ == lo_) return;
    for (std::uint64_t a = 1; a <= N; ++a) {
        const std::uint64_t xlo = std::max<std::uint64_t>(1, (lo_ + a - 1) / a);
        const std::uint64_t xhi = std::min(N, (hi_ - 1) / a);
        for (std::uint64_t x = xlo; x <= xhi; ++x) {
            auto& slot = r_[a * x - lo_];
            if (slot == std::numeric_limits<std::uint32_t>::max())
                throw OverflowError("ProductTable: r(m) saturated 32 bits");
            ++slot;
        }
    }
}

ProductTable ProductTable::full(std::uint64_t N, const CountOptions& opts) {
    const std::uint64_t entries = N * N + 1;
    if (entries > opts.memory_budget)
        throw BudgetError("product table needs " + std::to_string(entries) + " entries, budget is " +
                          std::to_string(opts.memory_budget));
    return ProductTable(N, 0, entries);
}

std::uint32_t ProductTable::at(std::int64_t m) const {
    if (m < 0) return 0;
    const auto um = static_cast<std::uint64_t>(m);
    if (um < lo_ || um >= hi_) return 0;
    return r_[um - lo_];
}

// ---------------------------------------------------------------------------

Counter::Counter(std::uint64_t N, CountOptions opts) : N_(N), opts_(opts) {
    if (N == 0) throw PreconditionError("Counter: N must be positive");
    if (N * N + 1 <= opts_.memory_budget) table_.push_back(ProductTable::full(N, opts_));
}

std::uint64_t Counter::block_size() const { return std::max<std::uint64_t>(1, opts_.memory_budget / 2); }

std::uint64_t Counter::additive(std::uint64_t h) const {
    CountQuery::make(h, N_);
    if (segmented()) return additive_segmented(h);
    const auto& r = table_.front();
    const std::uint64_t N2 = N_ * N_;
    const std::uint64_t mlo = h > N2 ? h - N2 : 1;
    const std::uint64_t mhi = std::min(h - 1, N2);
    std::uint64_t total = 0;
    for (std::uint64_t m = mlo; m <= mhi && mhi >= 1; ++m) total += std::uint64_t{r[m]} * r[h - m];
    return total;
}

std::uint64_t Counter::difference(std::uint64_t h) const {
    CountQuery::make(h, N_);
    if (segmented()) return difference_segmented(h);
    const auto& r = table_.front();
    const std::uint64_t N2 = N_ * N_;
    std::uint64_t total = 0;
    for (std::uint64_t m = 1; m + h <= N2; ++m) total += std::uint64_t{r[m]} * r[m + h];
    return total;
}

std::uint64_t Counter::additive_segmented(std::uint64_t h) const {
    const std::uint64_t N2 = N_ * N_;
    const std::uint64_t mlo = h > N2 ? h - N2 : 1;
    const std::uint64_t mhi = std::min(h - 1, N2);
    if (h < 2 || mlo > mhi) return 0;
    const std::uint64_t B = block_size();
    std::uint64_t total = 0;
    for (std::uint64_t lo = mlo; lo <= mhi; lo += B) {
        const std::uint64_t hi = std::min(mhi + 1, lo + B); // m in [lo, hi)
        const ProductTable left(N_, lo, hi);
        const ProductTable right(N_, h - hi + 1, h - lo + 1); // h - m in (h - hi, h - lo]
        for (std::uint64_t m = lo; m < hi; ++m) total += std::uint64_t{left[m]} * right[h - m];
    }
    return total;
}

std::uint64_t Counter::difference_segmented(std::uint64_t h) const {
    const std::uint64_t N2 = N_ * N_;
    if (h >= N2) return 0;
    const std::uint64_t mhi = N2 - h;
    const std::uint64_t B = block_size();
    std::uint64_t total = 0;
    for (std::uint64_t lo = 1; lo <= mhi; lo += B) {
        const std::uint64_t hi = std::min(mhi + 1, lo + B);
        const ProductTable left(N_, lo, hi);
        const ProductTable right(N_, lo + h, hi + h);
        for (std::uint64_t m = lo; m < hi; ++m) total += std::uint64_t{left[m]} * right[m + h];
    }
    return total;
}

std::uint64_t Counter::convolution(std::uint64_t h) const {
    CountQuery::make(h, N_);
    if (segmented())
        throw BudgetError("convolution needs the full product table (N=" + std::to_string(N_) + ")");
    const auto& r = table_.front();
    const auto N2 = static_cast<std::int64_t>(N_ * N_);
    const auto hh = static_cast<std::int64_t>(h);
    auto dprime = [&](std::int64_t n) -> std::uint64_t {
        if (n == 0) return 4 * N_ + 1;
        return 2 * std::uint64_t{r.at(n < 0 ? -n : n)};
    };
    std::uint64_t total = 0;
    for (std::int64_t n = -N2; n + hh <= N2; ++n) total += dprime(n) * dprime(n + hh);
    return total;
}

CountRecord Counter::count(std::uint64_t h, Algorithm algorithm) const {
    const CountQuery q = CountQuery::make(h, N_);
    if (algorithm == Algorithm::brute) return brute_force_T(q);
    const auto start = Clock::now();
    CountRecord rec;
    rec.query = q;
    rec.algorithm = algorithm;
    rec.Z_zero = zero_solutions(q);
    switch (algorithm) {
    case Algorithm::decomposition:
        rec.T_plus = additive(h);
        rec.T_minus = difference(h);
        rec.T = 4 * rec.T_plus + 8 * rec.T_minus + rec.Z_zero;
        break;
    case Algorithm::convolution:
        rec.T = convolution(h);
        rec.T_plus = additive(h);
        rec.T_minus = difference(h);
        break;
    case Algorithm::lattice:
        rec.T_plus = lattice_sweep(q, Kind::additive).count;
        rec.T_minus = lattice_sweep(q, Kind::difference).count;
        rec.T = 4 * rec.T_plus + 8 * rec.T_minus + rec.Z_zero;
        break;
    case Algorithm::brute:
        break;
    }
    rec.elapsed = Clock::now() - start;
    return rec;
}

// ---------------------------------------------------------------------------

CountRecord brute_force_T(CountQuery q, bool lift_guard) {
    q = CountQuery::make(q.h, q.N);
    if (q.N > kBruteGuard && !lift_guard)
        throw PreconditionError("brute_force_T: N=" + std::to_string(q.N) + " exceeds the enumeration guard " +
                                std::to_string(kBruteGuard));
    const auto start = Clock::now();
    const auto N = static_cast<std::int64_t>(q.N);
    const auto h = static_cast<std::int64_t>(q.h);
    std::uint64_t total = 0, plus_patterns = 0, minus_patterns = 0, zero = 0;
    for (std::int64_t x1 = -N; x1 <= N; ++x1)
        for (std::int64_t x2 = -N; x2 <= N; ++x2) {
            const std::int64_t p = x1 * x2;
            for (std::int64_t x3 = -N; x3 <= N; ++x3)
                for (std::int64_t x4 = -N; x4 <= N; ++x4) {
                    const std::int64_t s = x3 * x4;
                    if (p - s != h) continue;
                    ++total;
                    if (x1 == 0 || x2 == 0 || x3 == 0 || x4 == 0)
                        ++zero;
                    else if ((p > 0) != (s > 0))
                        ++plus_patterns; // |p| + |s| = h
                    else
                        ++minus_patterns; // |p| - |s| = +-h
                }
        }
    CountRecord rec;
    rec.query = q;
    rec.T = total;
    rec.T_plus = plus_patterns / 4;
    rec.T_minus = minus_patterns / 8;
    rec.Z_zero = zero;
    rec.algorithm = Algorithm::brute;
    rec.elapsed = Clock::now() - start;
    return rec;
}

std::uint64_t count_additive(CountQuery q, const CountOptions& opts) {
    q = CountQuery::make(q.h, q.N);
    return Counter(q.N, opts).additive(q.h);
}

std::uint64_t count_difference(CountQuery q, const CountOptions& opts) {
    q = CountQuery::make(q.h, q.N);
    return Counter(q.N, opts).difference(q.h);
}

std::uint64_t zero_solutions(CountQuery q) {
    if (q.h == 0) throw PreconditionError("zero_solutions: h must be positive");
    return 4 * (4 * q.N + 1) * arith::restricted_divisor(q.h, q.N);
}

CountRecord count_T(CountQuery q, Algorithm algorithm, const CountOptions& opts) {
    q = CountQuery::make(q.h, q.N);
    if (algorithm == Algorithm::brute) return brute_force_T(q);
    if (algorithm == Algorithm::lattice) {
        // The lattice route needs no product table.
        const auto start = Clock::now();
        CountRecord rec;
        rec.query = q;
        rec.algorithm = algorithm;
        rec.Z_zero = zero_solutions(q);
        rec.T_plus = lattice_sweep(q, Kind::additive).count;
        rec.T_minus = lattice_sweep(q, Kind::difference).count;
        rec.T = 4 * rec.T_plus + 8 * rec.T_minus + rec.Z_zero;
        rec.elapsed = Clock::now() - start;
        return rec;
    }
    const auto start = Clock::now();
    const Counter counter(q.N, opts);
    CountRecord rec = counter.count(q.h, algorithm);
    rec.elapsed = Clock::now() - start;
    return rec;
}

} // namespace detcount::counting
