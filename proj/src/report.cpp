#include "gfxlab/report.hpp"

#include <fstream>
#include <iomanip>

namespace gfx {

nlohmann::json to_json(const EstimateReport& r) {
    nlohmann::json j{{"name", r.name},     {"estimate", r.estimate}, {"n", r.n},
                     {"std_error", r.std_error}, {"ci_low", r.ci_low},     {"ci_high", r.ci_high},
                     {"seed", r.seed},     {"stream", r.stream}};
    if (!r.diagnostics.empty()) j["diagnostics"] = r.diagnostics;
    return j;
}

nlohmann::json to_json(const StatTestResult& r) {
    return {{"name", r.name},           {"statistic", r.statistic}, {"threshold", r.threshold},
            {"p_proxy", r.p_proxy},     {"pass", r.pass},           {"n", r.n}};
}

nlohmann::json to_json(const CheckItem& c) {
    nlohmann::json j{{"name", c.name}, {"identity", c.identity}, {"pass", c.pass}};
    if (c.estimate) j["estimate"] = to_json(*c.estimate);
    if (c.target) j["target"] = *c.target;
    if (c.tolerance) j["tolerance"] = *c.tolerance;
    if (c.test) j["test"] = to_json(*c.test);
    if (!c.extras.empty()) j["extras"] = c.extras;
    return j;
}

nlohmann::json to_json(const RunReport& r) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& c : r.items) items.push_back(to_json(c));
    return {{"subcommand", r.subcommand}, {"config", r.config},   {"seed", r.seed},
            {"threads", r.threads},       {"input_hash", r.input_hash},
            {"items", items},             {"pass", r.pass},       {"wall_seconds", r.wall_seconds}};
}

std::string content_hash(const nlohmann::json& j) {
    const std::string s = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

void finalize_report(RunReport& report, std::ostream& console, const std::string& out_path) {
    report.pass = true;
    for (const auto& item : report.items) report.pass = report.pass && item.pass;
    report.input_hash = content_hash(report.config);
    for (const auto& item : report.items) {
        console << (item.pass ? "PASS  " : "FAIL  ") << item.name << "  (" << item.identity << ")";
        if (item.estimate) {
            console << "  estimate=" << std::setprecision(10) << item.estimate->estimate
                    << " se=" << std::setprecision(3) << item.estimate->std_error;
            if (item.target) console << " target=" << std::setprecision(10) << *item.target;
        }
        if (item.test)
            console << "  stat=" << std::setprecision(4) << item.test->statistic
                    << " thr=" << item.test->threshold << " p~" << item.test->p_proxy;
        console << "\n";
    }
    if (!out_path.empty()) {
        std::ofstream f(out_path);
        f << to_json(report).dump(2) << "\n";
    }
}

} // namespace gfx
