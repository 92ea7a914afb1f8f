#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "curvlab/config.hpp"
#include "curvlab/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kConfigs = CURVLAB_CONFIG_DIR;

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("curvlab_cli_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

// Runs the CLI with the given arguments; output goes to `log`.
int cli(const std::string& args, const fs::path& out_dir, const std::string& env = "") {
    const std::string cmd = "CURVLAB_OUTPUT_DIR=" + quote(out_dir.string()) + " " + env + " " +
                            quote(CURVLAB_CLI_PATH) + " " + args + " > " + quote((out_dir / "log.txt").string()) +
                            " 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json report(const fs::path& dir) { return json::parse(slurp(dir / "report.json")); }

fs::path write_config(const fs::path& dir, const json& doc) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << doc.dump(2);
    return p;
}

json small_sphere_config() {
    return {{"surface", {{"type", "sphere"}, {"m", 2}, {"radius", 1.0}}},
            {"grid", {32, 64}},
            {"checks", json::array({{{"type", "poincare"},
                                     {"domain", "full"},
                                     {"test_function", {{"kind", "constant"}, {"value", 1.0}}}}})}};
}

} // namespace

TEST_CASE("list-fixtures") {
    const auto d = scratch("list");
    CHECK(cli("list-fixtures", d) == 0);
    const std::string log = slurp(d / "log.txt");
    for (const char* n : {"sphere", "ellipsoid", "geodesic_sphere", "convex_graph", "torus"}) {
        CHECK(log.find(n) != std::string::npos);
    }
}

TEST_CASE("sphere equality suite exits 0 with three equality records") {
    const auto d = scratch("sphere_equality");
    CHECK(cli("run " + quote((kConfigs / "sphere_equality.json").string()), d) == 0);
    const json r = report(d);
    REQUIRE(r["records"].size() == 3);
    CHECK(r["errors"].empty());
    for (const auto& rec : r["records"]) {
        CHECK(rec["verdict"] == "equality_case");
        CHECK(rec.size() == 10);
        for (const char* k : {"name", "lhs", "rhs", "slack", "rel_slack", "tolerance", "verdict", "grid", "params",
                              "refinement_estimate"}) {
            CHECK(rec.contains(k));
        }
    }
}

TEST_CASE("a failing reading exits 1") {
    const auto d = scratch("volume");
    CHECK(cli("run " + quote((kConfigs / "volume_estimate_sphere.json").string()), d) == 1);
    const json r = report(d);
    int fails = 0;
    for (const auto& rec : r["records"]) fails += rec["verdict"] == "fail";
    CHECK(fails == 1);
}

TEST_CASE("hypothesis and precondition errors exit 2") {
    const auto d = scratch("forced");
    CHECK(cli("run " + quote((kConfigs / "shrinker_forced_lambda.json").string()), d) == 2);
    const json r = report(d);
    REQUIRE(r["errors"].size() == 1);
    CHECK(r["errors"][0]["kind"] == "hypothesis_violation");
    CHECK(r["records"].empty());

    const auto t = scratch("torus");
    CHECK(cli("run " + quote((kConfigs / "torus_hypothesis.json").string()), t) == 2);
    CHECK(report(t)["errors"][0]["kind"] == "hypothesis_violation");

    const auto g = scratch("radius");
    CHECK(cli("run " + quote((kConfigs / "radius_too_large.json").string()), g) == 2);
    CHECK(report(g)["errors"][0]["kind"] == "precondition");
}

TEST_CASE("configuration errors exit 2") {
    const auto d = scratch("config_errors");
    json empty = small_sphere_config();
    empty["checks"] = json::array();
    CHECK(cli("run " + quote(write_config(d, empty).string()), d) == 2);

    json unknown = small_sphere_config();
    unknown["gird"] = {32, 64};
    CHECK(cli("run " + quote(write_config(d, unknown).string()), d) == 2);
    CHECK(slurp(d / "log.txt").find("gird") != std::string::npos);

    json bad_check = small_sphere_config();
    bad_check["checks"][0]["type"] = "riemann_hypothesis";
    CHECK(cli("run " + quote(write_config(d, bad_check).string()), d) == 2);

    std::ofstream(d / "broken.json") << "{\"surface\": ";
    CHECK(cli("run " + quote((d / "broken.json").string()), d) == 2);
    CHECK(cli("run " + quote((d / "missing.json").string()), d) == 2);
    CHECK(cli("frobnicate", d) == 2);
    CHECK(cli("run " + quote(write_config(d, small_sphere_config()).string()), d, "CURVLAB_WORKERS=x") == 2);
}

TEST_CASE("reports do not depend on the worker count") {
    const auto a = scratch("w1"), b = scratch("w8");
    const std::string cfg = quote((kConfigs / "sphere_equality.json").string());
    REQUIRE(cli("run " + cfg, a, "CURVLAB_WORKERS=1") == 0);
    REQUIRE(cli("run " + cfg, b, "CURVLAB_WORKERS=8") == 0);
    CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
}

TEST_CASE("profiles, plots and export-profile") {
    const auto d = scratch("mono");
    const std::string cfg = quote((kConfigs / "monotonicity_sphere.json").string());
    REQUIRE(cli("run " + cfg, d) == 0);
    const std::string csv = slurp(d / "monotonicity_h_profile.csv");
    CHECK(csv.rfind("r,value,refinement_estimate\n", 0) == 0);
    CHECK(fs::exists(d / "monotonicity_h_monitor.csv"));
    CHECK(slurp(d / "monotonicity_h.svg").find("<svg") != std::string::npos);

    const auto e = scratch("export");
    CHECK(cli("export-profile " + cfg + " --check monotonicity_h --out " + quote((e / "csv").string()), e) == 0);
    CHECK(slurp(e / "csv" / "monotonicity_h_profile.csv") == csv);
    CHECK(cli("export-profile " + cfg + " --check nope", e) == 2);
}

TEST_CASE("refine reports convergence orders") {
    const auto d = scratch("refine");
    REQUIRE(cli("refine " + quote((kConfigs / "divergence_ellipsoid.json").string()) + " --levels 2", d) == 0);
    const json r = json::parse(slurp(d / "refine.json"))["refinement"];
    REQUIRE(r.is_array());
    bool found = false;
    for (const auto& e : r) {
        if (e["name"] != "divergence_identity") continue;
        found = true;
        REQUIRE(e["orders"].size() == 2);
        for (const auto& o : e["orders"]) CHECK(o.get<double>() >= 1.9);
    }
    CHECK(found);
    CHECK(fs::exists(d / "slack_vs_resolution.svg"));
}

TEST_CASE("config parsing in the library") {
    using curvlab::Error;
    using curvlab::cli::parse_config;
    const auto cfg = parse_config(small_sphere_config());
    CHECK(cfg.grid == std::vector<int>{32, 64});
    CHECK(cfg.checks.size() == 1);
    CHECK(cfg.checks[0].name == "poincare");

    json j = small_sphere_config();
    j["checks"][0]["domian"] = "full";
    CHECK_THROWS_AS(parse_config(j), Error);
    CHECK_THROWS_AS(curvlab::cli::build_surface(parse_config(json{{"surface", {{"type", "klein_bottle"}}},
                                                                    {"grid", {8, 8}},
                                                                    {"checks", json::array()}})),
                    Error);
    for (const char* t : {"poincare", "isoperimetric", "mean_curvature_integral", "diameter_bound",
                          "self_shrinker_volume", "volume_estimate", "mean_value", "divergence_identity",
                          "monotonicity_h", "monotonicity_phi_shrinker", "lp"}) {
        const auto& types = curvlab::cli::check_types();
        CHECK(std::find(types.begin(), types.end(), t) != types.end());
    }
}
