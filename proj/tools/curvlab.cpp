#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "curvlab/error.hpp"
#include "curvlab/fixtures.hpp"
#include "curvlab/runner.hpp"
#include "curvlab/svg.hpp"

using namespace curvlab;

namespace {

cli::RunConfig load(const std::string& path) {
    cli::RunConfig cfg = cli::load_config(path);
    cli::apply_environment(cfg);
    return cfg;
}

int cmd_run(const std::string& path) {
    const cli::RunConfig cfg = load(path);
    if (cfg.checks.empty()) {
        std::cerr << "config lists no checks\n";
        return 2;
    }
    const cli::RunResult res = cli::run_checks(cfg);
    cli::write_outputs(cfg, res);
    cli::print_summary(std::cout, res);
    return res.exit_code();
}

int cmd_refine(const std::string& path, int levels) {
    const cli::RunConfig cfg = load(path);
    if (cfg.checks.empty()) {
        std::cerr << "config lists no checks\n";
        return 2;
    }
    std::vector<verify::ErrorRecord> errors;
    const auto entries = cli::refine(cfg, levels, &errors);
    cli::print_refine(std::cout, entries);
    for (const auto& e : errors) std::cout << "error [" << e.check << "] " << e.kind << ": " << e.message << "\n";

    std::filesystem::create_directories(cfg.output.dir);
    std::ofstream(cfg.output.dir / "refine.json") << cli::refine_json(entries).dump(2) << "\n";
    if (cfg.output.plots) {
        std::vector<svg::Series> series;
        for (const auto& e : entries) {
            svg::Series s{e.name, {}, {}};
            for (std::size_t k = 0; k < e.grids.size(); ++k) {
                s.x.push_back(std::log2(double(e.grids[k].front())));
                s.y.push_back(e.errors[k]);
            }
            series.push_back(std::move(s));
        }
        std::ofstream(cfg.output.dir / "slack_vs_resolution.svg")
            << svg::line_plot("slack vs resolution", "log2 N (axis 0)", "slack or residual", series, true);
    }
    return errors.empty() ? 0 : 2;
}

int cmd_list() {
    for (const auto& e : fixtures::catalog()) {
        std::cout << e.name << "\n  parameters: " << e.parameters << "\n  " << e.description << "\n  tags:";
        for (const auto& t : e.tags) std::cout << " " << t;
        std::cout << "\n";
    }
    return 0;
}

int cmd_export(const std::string& path, const std::string& check, const std::string& out) {
    const cli::RunConfig cfg = load(path);
    const cli::RunResult res = cli::run_checks(cfg, 0, check);
    for (const auto& e : res.errors) std::cerr << "error [" << e.check << "] " << e.kind << ": " << e.message << "\n";
    if (!res.errors.empty()) return 2;
    if (res.profiles.empty()) {
        std::cerr << "check '" << check << "' has no radial profile\n";
        return 2;
    }
    const auto& p = res.profiles.front();
    if (out.empty()) {
        measure::write_profile_csv(std::cout, p.profile.integral);
    } else {
        const std::filesystem::path dir(out);
        std::filesystem::create_directories(dir);
        cli::write_profile_csvs(dir, p);
    }
    return res.exit_code();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"curvlab: numerical checks of curvature inequalities for hypersurfaces"};
    app.require_subcommand(1);

    std::string config, check, out;
    int levels = 2;
    auto* run = app.add_subcommand("run", "run every check of a config and write the report");
    run->add_option("config", config, "JSON config")->required()->check(CLI::ExistingFile);
    auto* ref = app.add_subcommand("refine", "rerun at doubling grids and print convergence orders");
    ref->add_option("config", config, "JSON config")->required()->check(CLI::ExistingFile);
    ref->add_option("--levels", levels, "number of grid doublings")->check(CLI::Range(1, 6));
    app.add_subcommand("list-fixtures", "list the built-in surfaces");
    auto* exp = app.add_subcommand("export-profile", "write the radial profile of one check as CSV");
    exp->add_option("config", config, "JSON config")->required()->check(CLI::ExistingFile);
    exp->add_option("--check", check, "check name")->required();
    exp->add_option("--out", out, "directory for profile and monitor CSVs (default: profile to stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        if (run->parsed()) return cmd_run(config);
        if (ref->parsed()) return cmd_refine(config, levels);
        if (exp->parsed()) return cmd_export(config, check, out);
        return cmd_list();
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
