#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpme/estimates/checks.hpp"

namespace fpme {

using ojson = nlohmann::ordered_json;

inline constexpr int report_schema_version = 1;

struct EstimateReport {
    std::string run_id;
    ModelParams params;
    ojson config = ojson::object(); // effective configuration, defaults filled in
    std::vector<CheckResult> checks;
    ojson tables = ojson::object(); // sweep aggregates, keyed by name

    bool all_passed() const
    {
        for (const auto& c : checks) {
            if (!c.passed()) {
                return false;
            }
        }
        return true;
    }
};

inline ojson params_json(const ModelParams& p)
{
    ojson j;
    j["m1"] = p.m1;
    j["m2"] = p.m2;
    j["s"] = p.s;
    j["delta"] = p.delta;
    j["varpi"] = p.varpi;
    j["kappa1"] = p.kappa1;
    j["kappa2"] = p.kappa2;
    j["use_mollified"] = p.use_mollified;
    j["pressure"] = p.pressure == PressureMode::exact ? "exact" : "truncated";
    j["eps"] = p.eps;
    j["transport"] = p.transport;
    j["gamma"] = p.gamma();
    return j;
}

inline ojson fit_json(const ExponentFit& f)
{
    ojson j;
    j["t_min"] = f.t_min;
    j["t_max"] = f.t_max;
    j["slope"] = f.slope;
    j["intercept"] = f.intercept;
    j["r2"] = f.r2;
    j["theoretical_slope"] = f.theoretical_slope;
    j["rel_error"] = f.rel_error;
    j["points"] = f.points;
    j["inconclusive"] = f.inconclusive;
    return j;
}

inline ojson check_json(const CheckResult& c)
{
    ojson j;
    j["id"] = c.id;
    j["reference"] = c.ref;
    j["status"] = to_string(c.status);
    ojson res = ojson::object();
    for (const auto& [k, v] : c.residuals) {
        res[k] = v;
    }
    j["residuals"] = res;
    j["fit"] = c.fit ? fit_json(*c.fit) : ojson(nullptr);
    if (!c.note.empty()) {
        j["note"] = c.note;
    }
    return j;
}

inline ojson to_json(const EstimateReport& r)
{
    ojson j;
    j["schema_version"] = report_schema_version;
    j["run_id"] = r.run_id;
    j["params"] = params_json(r.params);
    j["config"] = r.config;
    ojson checks = ojson::array();
    for (const auto& c : r.checks) {
        checks.push_back(check_json(c));
    }
    j["checks"] = checks;
    if (!r.tables.empty()) {
        j["tables"] = r.tables;
    }
    j["status"] = r.all_passed() ? "pass" : "fail";
    return j;
}

/// 64-bit FNV-1a digest in hex; used for content-derived run ids.
inline std::string fnv1a_hex(const std::string& s)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace fpme
