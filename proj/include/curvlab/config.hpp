#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "curvlab/fixtures.hpp"
#include "curvlab/measure.hpp"
#include "curvlab/report.hpp"
#include "curvlab/test_functions.hpp"

// Run configuration: one JSON file describing the surface, the checks and the outputs.
namespace curvlab::cli {

using nlohmann::json;

struct OutputConfig {
    std::filesystem::path dir = ".";
    std::string report = "report.json";
    bool profiles = true;
    bool plots = true;
};

struct CheckConfig {
    std::string name;  // defaults to the type
    std::string type;
    json params;       // remaining keys, validated per type
    std::optional<std::vector<int>> grid;
};

struct RunConfig {
    json surface;
    json ambient;
    std::vector<int> grid;
    int workers = 1;
    std::uint64_t seed = 0;
    verify::Tolerances tol;
    surface::JetMode jets = surface::JetMode::Analytic;
    double fd_step = 1e-4;
    OutputConfig output;
    std::vector<CheckConfig> checks;
};

/// Validates the document; throws Error(Config) with the offending key path.
RunConfig parse_config(const json& doc);
RunConfig load_config(const std::filesystem::path& path);

/// CURVLAB_WORKERS, CURVLAB_OUTPUT_DIR and CURVLAB_REPORT.
void apply_environment(RunConfig& cfg);

ambient::SpaceForm build_ambient(const RunConfig& cfg, int m);
fixtures::Fixture build_surface(const RunConfig& cfg);

/// {"chart": [...]} (a point of M) or {"coords": [...]} (a model point).
ModelVec parse_point(const json& j, const surface::Immersion& M, const std::string& where);
measure::DomainSpec parse_domain(const json& j, const surface::Immersion& M, const std::string& where);
verify::TestFunction parse_test_function(const json& j, const surface::Immersion& M,
                                         const measure::DomainSpec& omega, const std::string& where);

/// Keys each check type accepts besides "type", "name" and "grid".
const std::vector<std::string>& check_keys(const std::string& type);
const std::vector<std::string>& check_types();

} // namespace curvlab::cli
