#pragma once

// Experiment plumbing: predicted main terms, error records E(h, N), grid
// scans with deterministic output, exponent fits and verification suites.

#include "detcount/counting.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace detcount::harness {

enum class MainSource { thm13_constant, sigma_quadrature, sigma_closed };
std::string_view to_string(MainSource s);
MainSource parse_main_source(std::string_view name);

struct MainTermOptions {
    /// Lift the |h - N^2| <= N guard on the constant main term.
    bool allow_out_of_regime = false;
    double tol = 1e-8;
};

struct MainTerm {
    double value;
    bool out_of_regime = false;
};

/// thm13_constant: (8/zeta(2) - 4) N^2 sum_{d|h} 1/d, only for |h - N^2| <= N.
/// sigma_*: sigma_inf(h/N^2) S_h N^2 with the density taken by quadrature or closed form.
MainTerm main_term_predict(std::uint64_t h, std::uint64_t N, MainSource source, const MainTermOptions& opts = {});

struct ErrorRecord {
    std::uint64_t N = 0;
    std::uint64_t h = 0;
    double lambda = 0;
    std::int64_t Delta = 0;
    std::uint64_t T = 0;
    std::uint64_t T_plus = 0;
    std::uint64_t T_minus = 0;
    std::uint64_t Z = 0;
    double main_term = 0;
    double E = 0;
    MainSource main_source = MainSource::sigma_quadrature;
    double elapsed_ms = 0;
    bool out_of_regime = false;
    /// Non-empty when the point failed; the numeric fields after Delta are then meaningless.
    std::string error;

    bool ok() const { return error.empty(); }
};

/// Assembles an ErrorRecord from an exact count and a predicted main term.
ErrorRecord make_record(const counting::CountRecord& count, const MainTerm& main, MainSource source);

ErrorRecord error_E(std::uint64_t h, std::uint64_t N, MainSource source,
                    counting::Algorithm algorithm = counting::Algorithm::decomposition,
                    const MainTermOptions& opts = {});

// ---------------------------------------------------------------------------
// Scans

enum class OutputFormat { csv, jsonl };

struct HRule {
    enum class Kind { fixed_lambda, fixed_delta, explicit_list } kind = Kind::fixed_delta;
    double lambda = 0;
    /// h = N^2 + delta + delta_per_N * N
    std::int64_t delta = 0;
    std::int64_t delta_per_N = 0;
    std::vector<std::uint64_t> values;
    /// Number of adjacent h per N centred on the rule's value (odd).
    unsigned window = 1;
};

struct ScanConfig {
    std::vector<std::uint64_t> N_values;
    HRule h_rule;
    std::vector<counting::Algorithm> algorithms{counting::Algorithm::decomposition};
    MainSource main_source = MainSource::sigma_quadrature;
    unsigned workers = 1;
    std::string output_path;
    OutputFormat format = OutputFormat::csv;
    std::uint64_t rng_seed = 0;
    bool allow_out_of_regime = false;
    bool record_timing = false;
};

/// Parses the JSON schema; unknown or mistyped fields throw PreconditionError.
ScanConfig parse_scan_config(std::string_view json);
ScanConfig load_scan_config(const std::string& path);

struct ScanPoint {
    std::uint64_t N;
    std::uint64_t h;
    /// lambda N^2 (or N^2 + Delta) before rounding, and whether it was a tie.
    double target;
    bool tie;
};

struct PointPlan {
    std::vector<ScanPoint> points; // sorted by (N, h), no duplicates
    std::vector<ScanPoint> skipped; // outside 1 <= h <= 2 N^2
};

PointPlan plan_points(const ScanConfig& config);

/// Evaluates every point; the result is (N, h)-sorted whatever the worker count.
std::vector<ErrorRecord> scan_records(const ScanConfig& config);

/// scan_records plus the output file and its "<path>.meta.json" sidecar.
std::vector<ErrorRecord> scan(const ScanConfig& config);

std::string_view csv_header();
std::string to_csv_row(const ErrorRecord& r);
std::string to_jsonl_row(const ErrorRecord& r);
void write_records(std::ostream& out, const std::vector<ErrorRecord>& records, OutputFormat format);

/// Reads records back from CSV or JSON lines (detected from the first line).
std::vector<ErrorRecord> read_records(const std::string& path);

// ---------------------------------------------------------------------------
// Exponent fits

struct FitResult {
    double slope = 0;
    double intercept = 0;
    double r_squared = 0;
    std::size_t n_points = 0;
    std::size_t excluded_zero_E = 0;
};

enum class Aggregate { none, median };

using RecordFilter = std::function<bool(const ErrorRecord&)>;

/// "field OP value[,field OP value...]" with OP in = == != < <= > >=; fields are
/// the CSV column names. An empty expression selects everything.
RecordFilter parse_filter(std::string_view expr);

/// Least squares of log|E| against log N over selected records with E != 0.
/// With Aggregate::median, |E| is first replaced by its median per N.
/// Throws PreconditionError with fewer than three usable points.
FitResult fit_exponent(const std::vector<ErrorRecord>& records, const RecordFilter& filter = {},
                       Aggregate aggregate = Aggregate::none);

/// The same fit on raw (N, |value|) pairs.
FitResult fit_power_law(const std::vector<std::pair<double, double>>& points);

// ---------------------------------------------------------------------------
// Verification suites

struct VerifyReport {
    std::string suite;
    std::size_t checks = 0;
    std::vector<std::string> failures;
    /// Suite-specific table, one CSV line per entry (may be empty).
    std::vector<std::string> table;

    bool passed() const { return failures.empty(); }
    std::string to_json() const;
};

/// oracle_equivalence, ramanujan, kloosterman, sawtooth, local_density,
/// density_oracles, split_identity, error_components.
const std::vector<std::string>& suite_names();
VerifyReport verify(std::string_view suite, std::uint64_t seed = 20240601);

} // namespace detcount::harness
