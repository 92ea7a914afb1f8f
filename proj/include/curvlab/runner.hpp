#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "curvlab/config.hpp"
#include "curvlab/verifier.hpp"

namespace curvlab::cli {

struct NamedProfile {
    std::string check;
    verify::ProfileReport profile;
};

struct RunResult {
    std::vector<verify::InequalityReport> records;
    std::vector<verify::ErrorRecord> errors;
    std::vector<NamedProfile> profiles;
    std::map<std::string, std::string> record_types;  // record name -> check type

    /// 0: no Fail; 1: some Fail; 2: any error or nothing checked.
    int exit_code() const;
    nlohmann::json to_json() const;
};

/// Runs the configured checks in order; grids are multiplied by 2^level.
/// `only` restricts the run to one check name.
RunResult run_checks(const RunConfig& cfg, int level = 0, const std::string& only = "");

/// Report JSON plus, when enabled, profile CSVs and SVG plots under cfg.output.dir.
void write_outputs(const RunConfig& cfg, const RunResult& result);

void write_profile_csvs(const std::filesystem::path& dir, const NamedProfile& p);

void print_summary(std::ostream& os, const RunResult& result);

struct RefineEntry {
    std::string name;
    std::string type;
    std::vector<std::vector<int>> grids;
    std::vector<double> errors;  // |residual| for identities, slack otherwise
    std::vector<double> orders;  // observed orders, one per usable level
    std::vector<std::string> verdicts;
};

/// Reruns the suite at levels 0..levels and estimates convergence orders.
std::vector<RefineEntry> refine(const RunConfig& cfg, int levels, std::vector<verify::ErrorRecord>* errors = nullptr);
nlohmann::json refine_json(const std::vector<RefineEntry>& entries);
void print_refine(std::ostream& os, const std::vector<RefineEntry>& entries);

} // namespace curvlab::cli
