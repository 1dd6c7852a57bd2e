#include "detcount/harness.hpp"

#include "detcount/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace detcount::harness {

using json = nlohmann::ordered_json;

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            throw PreconditionError("scan config: unknown field '" + key + "' in " + where);
    }
}

template <typename T>
T field(const json& obj, const char* key, const std::string& where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw PreconditionError("scan config: bad or missing '" + std::string(key) + "' in " + where + ": " + e.what());
    }
}

std::vector<std::uint64_t> parse_N_values(const json& j) {
    std::vector<std::uint64_t> out;
    if (j.is_array()) {
        for (const auto& v : j) {
            if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0)
                throw PreconditionError("scan config: N_values entries must be positive integers");
            out.push_back(v.get<std::uint64_t>());
        }
    } else if (j.is_object() && j.size() == 1 && j.contains("geometric")) {
        const json& g = j["geometric"];
        reject_unknown(g, {"start", "stop", "ratio"}, "N_values.geometric");
        const auto start = field<double>(g, "start", "N_values.geometric");
        const auto stop = field<double>(g, "stop", "N_values.geometric");
        const auto ratio = field<double>(g, "ratio", "N_values.geometric");
        if (!(start >= 1) || !(ratio > 1) || !(stop >= start))
            throw PreconditionError("scan config: geometric range needs 1 <= start <= stop and ratio > 1");
        for (int k = 0;; ++k) {
            const double x = start * std::pow(ratio, k);
            if (x > stop * (1 + 1e-12)) break;
            out.push_back(static_cast<std::uint64_t>(std::nearbyint(x)));
        }
    } else if (j.is_object() && j.size() == 1 && j.contains("range")) {
        const json& r = j["range"];
        reject_unknown(r, {"start", "stop", "step"}, "N_values.range");
        const auto start = field<std::uint64_t>(r, "start", "N_values.range");
        const auto stop = field<std::uint64_t>(r, "stop", "N_values.range");
        const auto step = r.contains("step") ? field<std::uint64_t>(r, "step", "N_values.range") : 1;
        if (start == 0 || step == 0 || stop < start)
            throw PreconditionError("scan config: range needs 1 <= start <= stop and step >= 1");
        for (std::uint64_t n = start; n <= stop; n += step) out.push_back(n);
    } else {
        throw PreconditionError("scan config: N_values must be a list, {geometric: ...} or {range: ...}");
    }
    if (out.empty()) throw PreconditionError("scan config: N_values is empty");
    return out;
}

HRule parse_h_rule(const json& j) {
    if (!j.is_object()) throw PreconditionError("scan config: h_rule must be an object");
    reject_unknown(j, {"fixed_lambda", "fixed_delta", "fixed_delta_per_N", "explicit", "window"}, "h_rule");
    HRule rule;
    const bool delta = j.contains("fixed_delta") || j.contains("fixed_delta_per_N");
    const int kinds = int(j.contains("fixed_lambda")) + int(delta) + int(j.contains("explicit"));
    if (kinds != 1)
        throw PreconditionError("scan config: h_rule needs exactly one of fixed_lambda, fixed_delta[_per_N], explicit");
    if (j.contains("fixed_lambda")) {
        rule.kind = HRule::Kind::fixed_lambda;
        rule.lambda = field<double>(j, "fixed_lambda", "h_rule");
        if (!(rule.lambda > 0 && rule.lambda <= 2)) throw PreconditionError("scan config: fixed_lambda must lie in (0, 2]");
    } else if (delta) {
        rule.kind = HRule::Kind::fixed_delta;
        if (j.contains("fixed_delta")) rule.delta = field<std::int64_t>(j, "fixed_delta", "h_rule");
        if (j.contains("fixed_delta_per_N")) rule.delta_per_N = field<std::int64_t>(j, "fixed_delta_per_N", "h_rule");
    } else {
        rule.kind = HRule::Kind::explicit_list;
        rule.values = field<std::vector<std::uint64_t>>(j, "explicit", "h_rule");
        if (rule.values.empty()) throw PreconditionError("scan config: explicit h list is empty");
    }
    if (j.contains("window")) {
        if (rule.kind == HRule::Kind::explicit_list)
            throw PreconditionError("scan config: window does not apply to an explicit h list");
        rule.window = field<unsigned>(j, "window", "h_rule");
        if (rule.window == 0 || rule.window % 2 == 0) throw PreconditionError("scan config: window must be odd");
    }
    return rule;
}

} // namespace

ScanConfig parse_scan_config(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw PreconditionError(std::string("scan config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw PreconditionError("scan config: top level must be an object");
    reject_unknown(j,
                   {"N_values", "h_rule", "algorithms", "main_source", "workers", "output", "rng_seed",
                    "allow_out_of_regime", "record_timing"},
                   "config");
    ScanConfig c;
    if (!j.contains("N_values") || !j.contains("h_rule"))
        throw PreconditionError("scan config: N_values and h_rule are required");
    c.N_values = parse_N_values(j["N_values"]);
    c.h_rule = parse_h_rule(j["h_rule"]);
    if (j.contains("algorithms")) {
        c.algorithms.clear();
        for (const auto& a : field<std::vector<std::string>>(j, "algorithms", "config"))
            c.algorithms.push_back(counting::parse_algorithm(a));
        if (c.algorithms.empty()) throw PreconditionError("scan config: algorithms is empty");
    }
    if (j.contains("main_source")) c.main_source = parse_main_source(field<std::string>(j, "main_source", "config"));
    if (j.contains("workers")) {
        c.workers = field<unsigned>(j, "workers", "config");
        if (c.workers == 0) throw PreconditionError("scan config: workers must be positive");
    }
    if (j.contains("output")) {
        const json& o = j["output"];
        if (!o.is_object()) throw PreconditionError("scan config: output must be an object");
        reject_unknown(o, {"path", "format"}, "output");
        c.output_path = field<std::string>(o, "path", "output");
        if (o.contains("format")) {
            const auto f = field<std::string>(o, "format", "output");
            if (f == "csv") c.format = OutputFormat::csv;
            else if (f == "jsonl") c.format = OutputFormat::jsonl;
            else throw PreconditionError("scan config: output.format must be csv or jsonl");
        }
    }
    if (j.contains("rng_seed")) c.rng_seed = field<std::uint64_t>(j, "rng_seed", "config");
    if (j.contains("allow_out_of_regime")) c.allow_out_of_regime = field<bool>(j, "allow_out_of_regime", "config");
    if (j.contains("record_timing")) c.record_timing = field<bool>(j, "record_timing", "config");
    return c;
}

ScanConfig load_scan_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open scan config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scan_config(ss.str());
}

PointPlan plan_points(const ScanConfig& config) {
    std::set<std::uint64_t> Ns(config.N_values.begin(), config.N_values.end());
    std::vector<ScanPoint> all;
    for (std::uint64_t N : Ns) {
        const auto N2 = static_cast<std::int64_t>(N * N);
        const HRule& rule = config.h_rule;
        if (rule.kind == HRule::Kind::explicit_list) {
            for (std::uint64_t h : rule.values) all.push_back({N, h, static_cast<double>(h), false});
            continue;
        }
        double target;
        std::int64_t centre;
        bool tie = false;
        if (rule.kind == HRule::Kind::fixed_lambda) {
            target = rule.lambda * static_cast<double>(N2);
            centre = static_cast<std::int64_t>(std::nearbyint(target)); // ties to even
            tie = target - std::floor(target) == 0.5;
        } else {
            centre = N2 + rule.delta + rule.delta_per_N * static_cast<std::int64_t>(N);
            target = static_cast<double>(centre);
        }
        const auto half = static_cast<std::int64_t>(rule.window / 2);
        for (std::int64_t h = centre - half; h <= centre + half; ++h)
            all.push_back({N, static_cast<std::uint64_t>(std::max<std::int64_t>(h, 0)), target, tie && h == centre});
    }
    PointPlan plan;
    std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
    for (const auto& p : all) {
        if (p.h < 1 || p.h > 2 * p.N * p.N) {
            plan.skipped.push_back(p);
            continue;
        }
        if (seen.insert({p.N, p.h}).second) plan.points.push_back(p);
    }
    std::sort(plan.points.begin(), plan.points.end(),
              [](const ScanPoint& a, const ScanPoint& b) { return std::tie(a.N, a.h) < std::tie(b.N, b.h); });
    return plan;
}

namespace {

bool needs_table(counting::Algorithm a) {
    return a == counting::Algorithm::decomposition || a == counting::Algorithm::convolution;
}

// One shared product table per N, built on first use and dropped after the last point.
struct SharedCounter {
    std::once_flag built;
    std::unique_ptr<counting::Counter> counter;
    std::atomic<std::size_t> remaining{0};
    std::mutex release;
};

counting::CountRecord count_with(const counting::CountQuery& q, counting::Algorithm a, SharedCounter& shared) {
    if (!needs_table(a)) return counting::count_T(q, a);
    std::call_once(shared.built, [&] { shared.counter = std::make_unique<counting::Counter>(q.N); });
    return shared.counter->count(q.h, a);
}

ErrorRecord evaluate(const ScanConfig& config, const ScanPoint& p, SharedCounter& shared) {
    ErrorRecord rec;
    rec.N = p.N;
    rec.h = p.h;
    rec.lambda = static_cast<double>(p.h) / static_cast<double>(p.N * p.N);
    rec.Delta = static_cast<std::int64_t>(p.h) - static_cast<std::int64_t>(p.N * p.N);
    rec.main_source = config.main_source;
    try {
        const auto q = counting::CountQuery::make(p.h, p.N);
        MainTermOptions mopts;
        mopts.allow_out_of_regime = config.allow_out_of_regime;
        const MainTerm main = main_term_predict(p.h, p.N, config.main_source, mopts);
        const counting::CountRecord primary = count_with(q, config.algorithms.front(), shared);
        for (std::size_t i = 1; i < config.algorithms.size(); ++i) {
            const auto other = count_with(q, config.algorithms[i], shared);
            if (other.T != primary.T)
                throw Error("algorithms disagree: " + std::string(to_string(config.algorithms.front())) + " gives " +
                            std::to_string(primary.T) + ", " + std::string(to_string(config.algorithms[i])) +
                            " gives " + std::to_string(other.T));
        }
        rec = make_record(primary, main, config.main_source);
        if (!config.record_timing) rec.elapsed_ms = 0;
    } catch (const std::exception& e) {
        rec.error = e.what();
        if (rec.error.empty()) rec.error = "failed";
    }
    return rec;
}

} // namespace

std::vector<ErrorRecord> scan_records(const ScanConfig& config) {
    const PointPlan plan = plan_points(config);
    const auto& pts = plan.points;
    std::vector<ErrorRecord> results(pts.size());

    std::map<std::uint64_t, std::unique_ptr<SharedCounter>> shared;
    for (const auto& p : pts) {
        auto& slot = shared[p.N];
        if (!slot) slot = std::make_unique<SharedCounter>();
        ++slot->remaining;
    }

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < pts.size(); i = next++) {
            SharedCounter& s = *shared.at(pts[i].N);
            results[i] = evaluate(config, pts[i], s);
            if (--s.remaining == 0) {
                std::lock_guard lock(s.release);
                s.counter.reset();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(config.workers, static_cast<unsigned>(pts.size())));
    if (n == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(work);
    }
    return results;
}

std::vector<ErrorRecord> scan(const ScanConfig& config) {
    auto records = scan_records(config);
    if (config.output_path.empty()) return records;
    {
        std::ofstream out(config.output_path, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + config.output_path + "'");
        write_records(out, records, config.format);
        if (!out) throw Error("write failed for '" + config.output_path + "'");
    }
    const PointPlan plan = plan_points(config);
    json meta;
    meta["h_rule_rounding"] = "round half to even";
    meta["window"] = config.h_rule.window;
    meta["median_of"] = config.h_rule.window > 1 ? json(config.h_rule.window) : json(nullptr);
    meta["main_source"] = std::string(to_string(config.main_source));
    json algos = json::array();
    for (auto a : config.algorithms) algos.push_back(std::string(to_string(a)));
    meta["algorithms"] = algos;
    meta["rng_seed"] = config.rng_seed;
    json points = json::array();
    for (const auto& p : plan.points) points.push_back({{"N", p.N}, {"h", p.h}, {"target", p.target}, {"tie", p.tie}});
    meta["points"] = points;
    json skipped = json::array();
    for (const auto& p : plan.skipped) skipped.push_back({{"N", p.N}, {"h", p.h}});
    meta["skipped"] = skipped;
    json errors = json::array();
    json regime = json::array();
    for (const auto& r : records) {
        if (!r.ok()) errors.push_back({{"N", r.N}, {"h", r.h}, {"error", r.error}});
        if (r.out_of_regime) regime.push_back({{"N", r.N}, {"h", r.h}});
    }
    meta["errors"] = errors;
    meta["out_of_regime"] = regime;
    std::ofstream m(config.output_path + ".meta.json", std::ios::binary | std::ios::trunc);
    if (!m) throw Error("cannot write '" + config.output_path + ".meta.json'");
    m << meta.dump(2) << '\n';
    return records;
}

} // namespace detcount::harness
