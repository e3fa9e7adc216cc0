#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gfxlab/stats.hpp"

namespace gfx {

/// One verified identity inside a run: either a Monte-Carlo estimate checked
/// against a target, a statistical test, or both.
struct CheckItem {
    std::string name;       // e.g. "A1.level-0.3"
    std::string identity;   // what is being verified, in words
    bool pass = false;
    std::optional<EstimateReport> estimate;
    std::optional<double> target;
    std::optional<double> tolerance;
    std::optional<StatTestResult> test;
    std::map<std::string, double> extras;
};

struct RunReport {
    std::string subcommand;
    nlohmann::json config;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string input_hash;
    std::vector<CheckItem> items;
    bool pass = false;
    double wall_seconds = 0.0;
};

nlohmann::json to_json(const EstimateReport& r);
nlohmann::json to_json(const StatTestResult& r);
nlohmann::json to_json(const CheckItem& c);
nlohmann::json to_json(const RunReport& r);

/// FNV-1a hash of the canonical config serialization.
std::string content_hash(const nlohmann::json& j);

/// Finalize pass flag + hash, print one line per item, write the JSON file
/// when out_path is nonempty.
void finalize_report(RunReport& report, std::ostream& console, const std::string& out_path);

} // namespace gfx
