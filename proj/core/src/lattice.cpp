#include "detcount/counting.hpp"

#include "detcount/arith.hpp"
#include "detcount/error.hpp"
#include "detcount/expsums.hpp"
#include "quadrature.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace detcount::counting {

namespace {

// n / d with d > 0, never normalised; the hot loop only needs floor,
// fractional part and cross-multiplied comparison.
struct Frac {
    std::int64_t n;
    std::int64_t d;
};

bool less(const Frac& a, const Frac& b) { return static_cast<i128>(a.n) * b.d < static_cast<i128>(b.n) * a.d; }

std::int64_t floor_div(std::int64_t n, std::int64_t d) {
    std::int64_t q = n / d;
    if (n % d != 0 && n < 0) --q;
    return q;
}

std::int64_t ceil_div(std::int64_t n, std::int64_t d) { return -floor_div(-n, d); }

long double psi(const Frac& x) {
    std::int64_t r = x.n % x.d;
    if (r < 0) r += x.d;
    return static_cast<long double>(r) / static_cast<long double>(x.d) - 0.5L;
}

struct RawCell {
    std::int64_t b0;
    std::int64_t a0;
    Frac U;
    Frac V;
};

// c = h/d; vbar = v^{-1} mod u (ignored when u == 1).
RawCell raw_cell(std::int64_t c, std::int64_t u, std::int64_t v, std::int64_t vbar, std::int64_t N, Kind kind) {
    RawCell cell{};
    if (kind == Kind::additive) {
        // b0 v = c (mod u), b0 in [1, u]
        std::int64_t b0 = u == 1 ? 1 : static_cast<std::int64_t>(static_cast<i128>(c % u) * vbar % u);
        if (b0 == 0) b0 = u;
        cell.b0 = b0;
        cell.a0 = (c - b0 * v) / u;
        const Frac u1{1 - b0, u}, u2{cell.a0 - N, v};
        const Frac v1{N - b0, u}, v2{cell.a0 - 1, v};
        cell.U = less(u1, u2) ? u2 : u1;
        cell.V = less(v1, v2) ? v1 : v2;
    } else {
        // b0 v = -c (mod u), b0 in [1, u]
        const std::int64_t cm = ((-c) % u + u) % u;
        std::int64_t b0 = u == 1 ? 1 : static_cast<std::int64_t>(static_cast<i128>(cm) * vbar % u);
        if (b0 == 0) b0 = u;
        cell.b0 = b0;
        cell.a0 = (c + b0 * v) / u;
        const Frac u1{1 - cell.a0, v}, u2{1 - b0, u};
        const Frac v1{N - cell.a0, v}, v2{N - b0, u};
        cell.U = less(u1, u2) ? u2 : u1;
        cell.V = less(v1, v2) ? v1 : v2;
    }
    return cell;
}

} // namespace

std::string_view to_string(Kind k) { return k == Kind::additive ? "additive" : "difference"; }

std::int64_t LatticeCell::count() const { return arith::interval_lattice_count(U, V).count; }

LatticeCell lattice_bounds(std::uint64_t d, std::uint64_t u, std::uint64_t v, std::uint64_t h, std::uint64_t N,
                           Kind kind) {
    if (d == 0 || h % d != 0) throw PreconditionError("lattice_bounds: d must divide h");
    if (u == 0 || v == 0 || u * d > N || v * d > N)
        throw PreconditionError("lattice_bounds: need 1 <= u, v <= N/d");
    if (std::gcd(u, v) != 1) throw PreconditionError("lattice_bounds: u and v must be coprime");
    const auto uu = static_cast<std::int64_t>(u);
    const auto vv = static_cast<std::int64_t>(v);
    const std::int64_t vbar = u == 1 ? 0 : expsums::mod_inverse(vv, uu);
    const RawCell raw = raw_cell(static_cast<std::int64_t>(h / d), uu, vv, vbar, static_cast<std::int64_t>(N), kind);
    return LatticeCell{d, u, v, raw.b0, raw.a0, Rational(raw.U.n, raw.U.d), Rational(raw.V.n, raw.V.d), kind};
}

LatticeSweep lattice_sweep(CountQuery q, Kind kind) {
    q = CountQuery::make(q.h, q.N);
    LatticeSweep sweep;
    sweep.query = q;
    sweep.kind = kind;
    const auto N = static_cast<std::int64_t>(q.N);
    arith::CompensatedSum main_total, integ_total, psiV_total, psiU_total;
    for (std::uint64_t d : arith::factorize(q.h).divisors()) {
        if (d > q.N) break;
        const auto c = static_cast<std::int64_t>(q.h / d);
        const auto L = static_cast<std::int64_t>(q.N / d);
        DivisorBreakdown row;
        row.d = d;
        arith::CompensatedSum main, integ, psiV, psiU;
        for (std::int64_t u = 1; u <= L; ++u) {
            for (std::int64_t v = 1; v <= L; ++v) {
                if (std::gcd(u, v) != 1) continue;
                ++row.cells;
                const std::int64_t vbar = u == 1 ? 0 : expsums::mod_inverse(v, u);
                const RawCell cell = raw_cell(c, u, v, vbar, N, kind);
                if (less(cell.V, cell.U)) continue;
                row.count += static_cast<std::uint64_t>(floor_div(cell.V.n, cell.V.d) - ceil_div(cell.U.n, cell.U.d) + 1);
                const i128 num = static_cast<i128>(cell.V.n) * cell.U.d - static_cast<i128>(cell.U.n) * cell.V.d;
                const i128 den = static_cast<i128>(cell.V.d) * cell.U.d;
                main += static_cast<long double>(num) / static_cast<long double>(den);
                if (cell.U.n % cell.U.d == 0) integ += 1;
                psiV += psi(cell.V);
                psiU += psi(cell.U);
            }
        }
        row.main = main.value();
        row.integrality = integ.value();
        row.psi_V = psiV.value();
        row.psi_U = psiU.value();
        sweep.count += row.count;
        main_total += row.main;
        integ_total += row.integrality;
        psiV_total += row.psi_V;
        psiU_total += row.psi_U;
        sweep.per_divisor.push_back(row);
    }
    sweep.main = main_total.value();
    sweep.integrality = integ_total.value();
    sweep.psi_V = psiV_total.value();
    sweep.psi_U = psiU_total.value();
    return sweep;
}

std::string LatticeSweep::to_json() const {
    nlohmann::ordered_json j;
    j["h"] = query.h;
    j["N"] = query.N;
    j["kind"] = std::string(to_string(kind));
    j["count"] = count;
    j["main"] = static_cast<double>(main);
    j["error"] = static_cast<double>(error());
    nlohmann::ordered_json by_d = nlohmann::ordered_json::object();
    for (const auto& row : per_divisor) {
        by_d[std::to_string(row.d)] = {
            {"cells", row.cells},
            {"count", row.count},
            {"main", static_cast<double>(row.main)},
            {"integrality", static_cast<double>(row.integrality)},
            {"psi_V", static_cast<double>(row.psi_V)},
            {"psi_U", static_cast<double>(row.psi_U)},
        };
    }
    j["per_divisor"] = by_d;
    return j.dump();
}

LatticeSweep count_additive_lattice(CountQuery q) { return lattice_sweep(q, Kind::additive); }
LatticeSweep count_difference_lattice(CountQuery q) { return lattice_sweep(q, Kind::difference); }

MainErrorSplit main_error_split(CountQuery q, Kind kind) {
    const LatticeSweep s = lattice_sweep(q, kind);
    const MainErrorSplit out{s.main, s.error(), s.count};
    const long double gap = out.M + out.E - static_cast<long double>(out.exact);
    if (gap > 1e-6L || gap < -1e-6L)
        throw ConvergenceError("main_error_split: M + E misses the exact count by " +
                               std::to_string(static_cast<double>(gap)));
    return out;
}

ErrorComponents error_components(CountQuery q, Kind kind) {
    const LatticeSweep s = lattice_sweep(q, kind);
    ErrorComponents out;
    for (const auto& row : s.per_divisor) out.per_divisor.push_back({row.d, row.integrality, row.psi_V, row.psi_U});
    out.integrality = s.integrality;
    out.psi_V = s.psi_V;
    out.psi_U = s.psi_U;
    return out;
}

// ---------------------------------------------------------------------------

double continuum_F(double alpha, double beta, double c, double N) {
    if (!(alpha > 0) || !(beta > 0)) throw PreconditionError("continuum_F: alpha, beta must be positive");
    const double Vp = std::min(N / alpha, c / (alpha * beta) - 1.0 / beta);
    const double Up = std::max(1.0 / alpha, c / (alpha * beta) - N / beta);
    return std::max(0.0, Vp - Up);
}

double continuum_G(double alpha, double beta, double c, double N) {
    if (!(alpha > 0) || !(beta > 0)) throw PreconditionError("continuum_G: alpha, beta must be positive");
    double g = 0;
    if (alpha - beta >= c / N) g += N / alpha;
    if (c / N <= alpha && alpha < c / N + beta) g += N / beta - c / (alpha * beta);
    return g;
}

ContinuumGap continuum_gap(std::uint64_t h, std::uint64_t N, std::uint64_t d, std::uint64_t k, Kind kind) {
    if (d == 0 || k == 0 || h % d != 0) throw PreconditionError("continuum_gap: need d | h and k >= 1");
    const std::uint64_t L = N / (d * k);
    if (L < 1) return {0, 0};
    const double c = static_cast<double>(h) / static_cast<double>(d * k);
    const double Nd = static_cast<double>(N);
    auto f = [&](double a, double b) {
        return kind == Kind::additive ? continuum_F(a, b, c, Nd) : continuum_G(a, b, c, Nd);
    };
    double discrete = 0;
    for (std::uint64_t u = 1; u <= L; ++u)
        for (std::uint64_t v = 1; v <= L; ++v) discrete += f(static_cast<double>(u), static_cast<double>(v));

    const double top = static_cast<double>(L);
    auto inner = [&](double a) {
        std::vector<double> breaks;
        if (kind == Kind::additive)
            breaks = {(c - a) / Nd, c - Nd * a, c / Nd - a, c - a};
        else
            breaks = {a - c / Nd};
        return detail::integrate_split([&](double b) { return f(a, b); }, 1.0, top, breaks, 1e-10).value;
    };
    std::vector<double> outer_breaks{c / Nd, c - Nd, c - 1, 2 * c / Nd};
    const double integral = detail::integrate_split(inner, 1.0, top, outer_breaks, 1e-9).value;
    return {discrete, integral};
}

} // namespace detcount::counting
