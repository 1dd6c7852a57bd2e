#include "detcount/harness.hpp"

#include "detcount/arith.hpp"
#include "detcount/density.hpp"
#include "detcount/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace detcount::harness {

using json = nlohmann::ordered_json;

std::string_view to_string(MainSource s) {
    switch (s) {
    case MainSource::thm13_constant: return "thm13_constant";
    case MainSource::sigma_quadrature: return "sigma_quadrature";
    case MainSource::sigma_closed: return "sigma_closed";
    }
    return "?";
}

MainSource parse_main_source(std::string_view name) {
    if (name == "thm13_constant") return MainSource::thm13_constant;
    if (name == "sigma_quadrature") return MainSource::sigma_quadrature;
    if (name == "sigma_closed") return MainSource::sigma_closed;
    throw PreconditionError("unknown main_source '" + std::string(name) + "'");
}

MainTerm main_term_predict(std::uint64_t h, std::uint64_t N, MainSource source, const MainTermOptions& opts) {
    const auto q = counting::CountQuery::make(h, N);
    const double N2 = static_cast<double>(q.N2());
    const auto f = arith::factorize(h);
    const double divisor_sum = arith::divisor_reciprocal_sum(f).to_double();
    MainTerm out{0, false};
    if (source == MainSource::thm13_constant) {
        const auto delta = static_cast<std::int64_t>(h) - static_cast<std::int64_t>(q.N2());
        if (static_cast<std::uint64_t>(delta < 0 ? -delta : delta) > N) {
            if (!opts.allow_out_of_regime)
                throw PreconditionError("thm13_constant needs |h - N^2| <= N (h=" + std::to_string(h) +
                                        ", N=" + std::to_string(N) + ")");
            out.out_of_regime = true;
        }
        out.value = (8.0 / density::kZeta2 - 4.0) * N2 * divisor_sum;
        return out;
    }
    const double lambda = static_cast<double>(h) / N2;
    const auto method = source == MainSource::sigma_quadrature ? density::Method::quadrature
                                                                : density::Method::closed_form;
    const double sigma = density::sigma_infinity(lambda, method, {opts.tol, 1e-3}).sigma_inf;
    out.value = sigma * (divisor_sum / density::kZeta2) * N2;
    return out;
}

ErrorRecord make_record(const counting::CountRecord& count, const MainTerm& main, MainSource source) {
    ErrorRecord r;
    r.N = count.query.N;
    r.h = count.query.h;
    r.lambda = static_cast<double>(r.h) / static_cast<double>(count.query.N2());
    r.Delta = static_cast<std::int64_t>(r.h) - static_cast<std::int64_t>(count.query.N2());
    r.T = count.T;
    r.T_plus = count.T_plus;
    r.T_minus = count.T_minus;
    r.Z = count.Z_zero;
    r.main_term = main.value;
    r.E = static_cast<double>(r.T) - r.main_term;
    r.main_source = source;
    r.elapsed_ms = count.elapsed.count();
    r.out_of_regime = main.out_of_regime;
    return r;
}

ErrorRecord error_E(std::uint64_t h, std::uint64_t N, MainSource source, counting::Algorithm algorithm,
                    const MainTermOptions& opts) {
    const MainTerm main = main_term_predict(h, N, source, opts);
    return make_record(counting::count_T(counting::CountQuery::make(h, N), algorithm), main, source);
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

std::string fmt_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

} // namespace

std::string_view csv_header() { return "N,h,lambda,Delta,T,T_plus,T_minus,Z,main_term,E,main_source,elapsed_ms"; }

std::string to_csv_row(const ErrorRecord& r) {
    std::ostringstream os;
    os << r.N << ',' << r.h << ',' << fmt_double(r.lambda) << ',' << r.Delta << ',';
    if (r.ok()) {
        os << r.T << ',' << r.T_plus << ',' << r.T_minus << ',' << r.Z << ',' << fmt_double(r.main_term) << ','
           << fmt_double(r.E);
    } else {
        os << ",,,,,";
    }
    os << ',' << to_string(r.main_source) << ',' << fmt_double(r.elapsed_ms);
    return os.str();
}

std::string to_jsonl_row(const ErrorRecord& r) {
    json j;
    j["N"] = r.N;
    j["h"] = r.h;
    j["lambda"] = r.lambda;
    j["Delta"] = r.Delta;
    if (r.ok()) {
        j["T"] = r.T;
        j["T_plus"] = r.T_plus;
        j["T_minus"] = r.T_minus;
        j["Z"] = r.Z;
        j["main_term"] = r.main_term;
        j["E"] = r.E;
    } else {
        for (const char* k : {"T", "T_plus", "T_minus", "Z", "main_term", "E"}) j[k] = nullptr;
    }
    j["main_source"] = std::string(to_string(r.main_source));
    j["elapsed_ms"] = r.elapsed_ms;
    if (!r.ok()) j["error"] = r.error;
    return j.dump();
}

void write_records(std::ostream& out, const std::vector<ErrorRecord>& records, OutputFormat format) {
    if (format == OutputFormat::csv) out << csv_header() << '\n';
    for (const auto& r : records) out << (format == OutputFormat::csv ? to_csv_row(r) : to_jsonl_row(r)) << '\n';
}

namespace {

ErrorRecord record_from_fields(const std::map<std::string, std::string>& f) {
    auto get = [&](const char* k) -> const std::string& {
        static const std::string empty;
        const auto it = f.find(k);
        return it == f.end() ? empty : it->second;
    };
    ErrorRecord r;
    r.N = std::stoull(get("N"));
    r.h = std::stoull(get("h"));
    r.lambda = std::stod(get("lambda"));
    r.Delta = std::stoll(get("Delta"));
    if (get("T").empty()) {
        r.error = get("error").empty() ? "failed point" : get("error");
    } else {
        r.T = std::stoull(get("T"));
        r.T_plus = std::stoull(get("T_plus"));
        r.T_minus = std::stoull(get("T_minus"));
        r.Z = std::stoull(get("Z"));
        r.main_term = std::stod(get("main_term"));
        r.E = std::stod(get("E"));
    }
    r.main_source = parse_main_source(get("main_source"));
    if (!get("elapsed_ms").empty()) r.elapsed_ms = std::stod(get("elapsed_ms"));
    return r;
}

} // namespace

std::vector<ErrorRecord> read_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::vector<ErrorRecord> out;
    std::string line;
    if (!std::getline(in, line)) return out;
    if (!line.empty() && line.front() == '{') {
        do {
            if (trim(line).empty()) continue;
            const json j = json::parse(line);
            std::map<std::string, std::string> f;
            for (const auto& [k, v] : j.items()) {
                if (v.is_null()) f[k] = "";
                else if (v.is_string()) f[k] = v.get<std::string>();
                else if (v.is_number_float()) f[k] = fmt_double(v.get<double>());
                else f[k] = v.dump();
            }
            out.push_back(record_from_fields(f));
        } while (std::getline(in, line));
        return out;
    }
    const auto header = split(trim(line), ',');
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto cells = split(trim(line), ',');
        if (cells.size() != header.size()) throw Error("malformed CSV row in '" + path + "': " + line);
        std::map<std::string, std::string> f;
        for (std::size_t i = 0; i < header.size(); ++i) f[header[i]] = cells[i];
        out.push_back(record_from_fields(f));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fits

namespace {

struct Condition {
    std::string field;
    std::string op;
    std::string value;
};

bool compare_numbers(double a, const std::string& op, double b) {
    if (op == "=" || op == "==") return a == b;
    if (op == "!=") return a != b;
    if (op == "<") return a < b;
    if (op == "<=") return a <= b;
    if (op == ">") return a > b;
    if (op == ">=") return a >= b;
    return false;
}

double numeric_field(const ErrorRecord& r, const std::string& field) {
    if (field == "N") return static_cast<double>(r.N);
    if (field == "h") return static_cast<double>(r.h);
    if (field == "lambda") return r.lambda;
    if (field == "Delta") return static_cast<double>(r.Delta);
    if (field == "T") return static_cast<double>(r.T);
    if (field == "T_plus") return static_cast<double>(r.T_plus);
    if (field == "T_minus") return static_cast<double>(r.T_minus);
    if (field == "Z") return static_cast<double>(r.Z);
    if (field == "main_term") return r.main_term;
    if (field == "E") return r.E;
    if (field == "elapsed_ms") return r.elapsed_ms;
    throw PreconditionError("unknown field '" + field + "' in select expression");
}

} // namespace

RecordFilter parse_filter(std::string_view expr) {
    std::vector<Condition> conds;
    for (const auto& part : split(expr, ',')) {
        const std::string term = trim(part);
        if (term.empty()) continue;
        const auto pos = term.find_first_of("=!<>");
        if (pos == std::string::npos || pos == 0) throw PreconditionError("bad select term '" + term + "'");
        std::size_t end = pos + 1;
        if (end < term.size() && term[end] == '=') ++end;
        Condition c{trim(term.substr(0, pos)), term.substr(pos, end - pos), trim(term.substr(end))};
        if (c.op == "!" || c.value.empty()) throw PreconditionError("bad select term '" + term + "'");
        if (c.field == "main_source") {
            if (c.op != "=" && c.op != "==" && c.op != "!=")
                throw PreconditionError("main_source supports only = and !=");
            parse_main_source(c.value);
        } else {
            numeric_field(ErrorRecord{}, c.field);
            std::size_t used = 0;
            try {
                (void)std::stod(c.value, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != c.value.size()) throw PreconditionError("non-numeric value in '" + term + "'");
        }
        conds.push_back(std::move(c));
    }
    return [conds](const ErrorRecord& r) {
        for (const auto& c : conds) {
            if (c.field == "main_source") {
                const bool eq = to_string(r.main_source) == c.value;
                if (eq != (c.op != "!=")) return false;
            } else {
                const double want = std::stod(c.value);
                const double have = numeric_field(r, c.field);
                // lambda is stored rounded; compare it at a tolerance.
                if (c.field == "lambda" && (c.op == "=" || c.op == "==")) {
                    if (std::abs(have - want) > 1e-9 * std::max(1.0, std::abs(want))) return false;
                } else if (!compare_numbers(have, c.op, want)) {
                    return false;
                }
            }
        }
        return true;
    };
}

FitResult fit_power_law(const std::vector<std::pair<double, double>>& points) {
    FitResult out;
    std::vector<std::pair<double, double>> logs;
    for (const auto& [n, e] : points) {
        if (e == 0) {
            ++out.excluded_zero_E;
            continue;
        }
        if (!(n > 0)) throw PreconditionError("fit: N must be positive");
        logs.emplace_back(std::log(n), std::log(std::abs(e)));
    }
    out.n_points = logs.size();
    if (logs.size() < 3) throw PreconditionError("fit: need at least three points with E != 0");
    long double sx = 0, sy = 0;
    for (const auto& [x, y] : logs) {
        sx += x;
        sy += y;
    }
    const long double n = static_cast<long double>(logs.size());
    const long double mx = sx / n, my = sy / n;
    long double sxx = 0, sxy = 0, syy = 0;
    for (const auto& [x, y] : logs) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (sxx == 0) throw PreconditionError("fit: all points share one N");
    const long double slope = sxy / sxx;
    out.slope = static_cast<double>(slope);
    out.intercept = static_cast<double>(my - slope * mx);
    out.r_squared = syy == 0 ? 1.0 : static_cast<double>(sxy * sxy / (sxx * syy));
    return out;
}

FitResult fit_exponent(const std::vector<ErrorRecord>& records, const RecordFilter& filter, Aggregate aggregate) {
    std::vector<const ErrorRecord*> chosen;
    for (const auto& r : records)
        if (r.ok() && (!filter || filter(r))) chosen.push_back(&r);
    std::vector<std::pair<double, double>> points;
    if (aggregate == Aggregate::none) {
        for (const auto* r : chosen) points.emplace_back(static_cast<double>(r->N), r->E);
    } else {
        std::map<std::uint64_t, std::vector<double>> by_N;
        for (const auto* r : chosen) by_N[r->N].push_back(std::abs(r->E));
        for (auto& [N, v] : by_N) {
            std::sort(v.begin(), v.end());
            const std::size_t m = v.size();
            const double med = m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
            points.emplace_back(static_cast<double>(N), med);
        }
    }
    return fit_power_law(points);
}

std::string VerifyReport::to_json() const {
    json j;
    j["suite"] = suite;
    j["passed"] = passed();
    j["checks"] = checks;
    j["failures"] = failures;
    j["table"] = table;
    return j.dump(2);
}

} // namespace detcount::harness
