// detcount: exact counts, densities, singular series, scans, fits and
// verification suites from the command line.
//
// Exit status: 0 success, 1 verification or runtime failure, 2 usage error.

#include "detcount/arith.hpp"
#include "detcount/counting.hpp"
#include "detcount/density.hpp"
#include "detcount/error.hpp"
#include "detcount/harness.hpp"
#include "detcount/singular.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace detcount;

constexpr int kFailure = 1;
constexpr int kUsage = 2;

int run_count(std::uint64_t h, std::uint64_t N, const std::string& algorithm, bool breakdown) {
    const auto q = counting::CountQuery::make(h, N);
    const auto rec = counting::count_T(q, counting::parse_algorithm(algorithm));
    std::cout << "h,N,T,T_plus,T_minus,Z,algorithm,elapsed_ms\n"
              << rec.query.h << ',' << rec.query.N << ',' << rec.T << ',' << rec.T_plus << ',' << rec.T_minus << ','
              << rec.Z_zero << ',' << counting::to_string(rec.algorithm) << ',' << rec.elapsed.count() << '\n';
    if (breakdown) {
        std::cout << counting::count_additive_lattice(q).to_json() << '\n';
        std::cout << counting::count_difference_lattice(q).to_json() << '\n';
    }
    return 0;
}

int run_density(const std::vector<double>& lambdas, const std::string& method, double eta, double tol) {
    const auto m = density::parse_method(method);
    std::cout << density::density_csv_header() << '\n';
    for (double l : lambdas) {
        const auto p = density::sigma_infinity(l, m, {tol, eta});
        std::cout << density::to_csv_row(p) << '\n';
        if (p.closed_disagreement && *p.closed_disagreement > 1e-9)
            std::fprintf(stderr, "lambda=%g: combined closed sigma %.12g differs from 4J+8K by %.3g\n", l,
                         *p.closed_sigma, *p.closed_disagreement);
    }
    return 0;
}

int run_singular(std::uint64_t h, std::optional<std::uint64_t> truncate) {
    const auto s = singular::singular_series(arith::factorize(h), truncate);
    std::cout << "p,nu_p,sigma_p\n";
    for (const auto& ld : s.local)
        std::printf("%llu,%u,%s\n", static_cast<unsigned long long>(ld.p), ld.nu, ld.value.str().c_str());
    std::printf("divisor_sum,%s\n", s.divisor_sum.str().c_str());
    std::printf("S_h,%.15g\n", s.value);
    if (s.truncation)
        std::printf("S_h_product_P%llu,%.15g,tail_bound,%.3g\n", static_cast<unsigned long long>(s.truncation->P),
                    s.truncation->product, s.truncation->tail_bound);
    return 0;
}

int run_scan(const std::string& path, std::optional<unsigned> workers) {
    auto config = harness::load_scan_config(path);
    if (workers) config.workers = *workers;
    const auto records = harness::scan(config);
    if (config.output_path.empty()) harness::write_records(std::cout, records, config.format);
    std::size_t failed = 0;
    for (const auto& r : records) failed += r.ok() ? 0 : 1;
    std::fprintf(stderr, "%zu points, %zu failed\n", records.size(), failed);
    return failed ? kFailure : 0;
}

int run_fit(const std::string& input, const std::string& select, const std::string& aggregate) {
    const auto records = harness::read_records(input);
    harness::Aggregate agg;
    if (aggregate == "none") agg = harness::Aggregate::none;
    else if (aggregate == "median") agg = harness::Aggregate::median;
    else throw PreconditionError("--aggregate must be none or median");
    const auto fit = harness::fit_exponent(records, harness::parse_filter(select), agg);
    std::printf("slope,intercept,r_squared,n_points,excluded_zero_E\n%.12g,%.12g,%.12g,%zu,%zu\n", fit.slope,
                fit.intercept, fit.r_squared, fit.n_points, fit.excluded_zero_E);
    return 0;
}

int run_verify(const std::string& suite, std::uint64_t seed, bool as_json) {
    std::vector<std::string> suites;
    if (suite == "all") suites = harness::suite_names();
    else suites.push_back(suite);
    bool ok = true;
    for (const auto& name : suites) {
        const auto report = harness::verify(name, seed);
        ok = ok && report.passed();
        if (as_json) {
            std::cout << report.to_json() << '\n';
            continue;
        }
        std::printf("%s: %s (%zu checks, %zu failures)\n", name.c_str(), report.passed() ? "PASS" : "FAIL",
                    report.checks, report.failures.size());
        for (const auto& line : report.table) std::printf("  %s\n", line.c_str());
        for (std::size_t i = 0; i < report.failures.size() && i < 20; ++i)
            std::printf("  counterexample: %s\n", report.failures[i].c_str());
    }
    return ok ? 0 : kFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact counts and asymptotic checks for x1 x2 - x3 x4 = h"};
    app.require_subcommand(1);
    // "--h" is a data option, so help is long-form only.
    app.set_help_flag("--help", "Print this help message and exit");

    std::uint64_t h = 0, N = 0;
    std::string algorithm = "decomposition";
    bool breakdown = false;
    auto* count = app.add_subcommand("count", "Exact T(h, N) with its decomposition");
    count->add_option("--h", h, "Right-hand side")->required();
    count->add_option("--N", N, "Box half-width")->required();
    count->add_option("--algorithm", algorithm, "brute|convolution|decomposition|lattice")
        ->check(CLI::IsMember({"brute", "convolution", "decomposition", "lattice"}));
    count->add_flag("--breakdown", breakdown, "Print the lattice per-divisor breakdown as JSON");

    std::vector<double> lambdas;
    std::string method = "quadrature";
    double eta = 1e-3, tol = 1e-8;
    auto* dens = app.add_subcommand("density", "J, K and sigma_inf at lambda");
    dens->add_option("--lambda", lambdas, "One or more lambda values")->required();
    dens->add_option("--method", method, "quadrature|closed|mollified")
        ->check(CLI::IsMember({"quadrature", "closed", "closed_form", "mollified"}));
    dens->add_option("--eta", eta, "Slab half-width for the mollified method");
    dens->add_option("--tol", tol, "Quadrature tolerance (>= 1e-8)");

    std::uint64_t sh = 0;
    std::optional<std::uint64_t> truncate;
    auto* sing = app.add_subcommand("singular", "Local densities and the singular series");
    sing->add_option("--h", sh, "Positive integer")->required();
    sing->add_option("--truncate", truncate, "Also report the Euler product over p <= P");

    std::string config;
    std::optional<unsigned> workers;
    auto* scan = app.add_subcommand("scan", "Run a grid scan described by a JSON config");
    scan->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);
    scan->add_option("--workers", workers, "Override the worker count");

    std::string input, select, aggregate = "none";
    auto* fit = app.add_subcommand("fit", "Fit log|E| against log N");
    fit->add_option("--input", input, "CSV or JSON-lines scan output")->required()->check(CLI::ExistingFile);
    fit->add_option("--select", select, "Comma-separated conditions, e.g. \"lambda=0.5,N>=256\"");
    fit->add_option("--aggregate", aggregate, "none|median (median |E| per N)");

    std::string suite;
    std::uint64_t seed = 20240601;
    bool as_json = false;
    auto* ver = app.add_subcommand("verify", "Run a verification suite");
    ver->add_option("--suite", suite, "Suite name or 'all'")->required();
    ver->add_option("--seed", seed, "Seed for sampled checks");
    ver->add_flag("--json", as_json, "Emit the report as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }

    try {
        if (*count) return run_count(h, N, algorithm, breakdown);
        if (*dens) return run_density(lambdas, method, eta, tol);
        if (*sing) return run_singular(sh, truncate);
        if (*scan) return run_scan(config, workers);
        if (*fit) return run_fit(input, select, aggregate);
        if (*ver) return run_verify(suite, seed, as_json);
    } catch (const PreconditionError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kFailure;
    }
    return kUsage;
}
