#include "curvlab/runner.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "curvlab/error.hpp"
#include "curvlab/svg.hpp"

namespace curvlab::cli {

namespace {

using verify::InequalityReport;

double num(const json& p, const std::string& key, const std::string& where) {
    if (!p.contains(key) || !p.at(key).is_number()) {
        throw Error(ErrorKind::Config, where + ": missing number '" + key + "'");
    }
    return p.at(key).get<double>();
}

std::optional<double> lambda_param(const json& p, const std::string& where) {
    if (!p.contains("lambda") || p.at("lambda") == "fit") return std::nullopt;
    return num(p, "lambda", where);
}

std::vector<double> radii_param(const json& p, const std::string& where) {
    if (!p.contains("radii")) throw Error(ErrorKind::Config, where + ": missing 'radii'");
    const json& r = p.at("radii");
    std::vector<double> out;
    if (r.is_array()) {
        for (const auto& v : r) {
            if (!v.is_number()) throw Error(ErrorKind::Config, where + ".radii: expected numbers");
            out.push_back(v.get<double>());
        }
        return out;
    }
    if (!r.is_object()) throw Error(ErrorKind::Config, where + ".radii: expected an array or {from, to, count}");
    for (const auto& [k, v] : r.items()) {
        if (k != "from" && k != "to" && k != "count") {
            throw Error(ErrorKind::Config, where + ".radii: unknown key '" + k + "'");
        }
    }
    const double a = num(r, "from", where + ".radii"), b = num(r, "to", where + ".radii");
    const int n = static_cast<int>(num(r, "count", where + ".radii"));
    if (n < 2 || !(b > a)) throw Error(ErrorKind::Config, where + ".radii: need count >= 2 and to > from");
    for (int k = 0; k < n; ++k) out.push_back(a + (b - a) * k / (n - 1));
    return out;
}

ModelVec point_param(const json& p, const std::string& key, const surface::Immersion& M, const std::string& where) {
    if (!p.contains(key)) throw Error(ErrorKind::Config, where + ": missing '" + key + "'");
    return parse_point(p.at(key), M, where + "." + key);
}

std::string record_name(const std::string& check, const std::string& report) {
    const auto slash = report.find('/');
    return slash == std::string::npos ? check : check + report.substr(slash);
}

std::vector<int> scaled(std::vector<int> g, int level) {
    for (int& n : g) n <<= level;
    return g;
}

void run_one(const CheckConfig& c, const fixtures::Fixture& fx, const RunConfig& cfg, int level, RunResult& out) {
    const surface::Immersion& M = fx.M;
    const json& p = c.params;
    const std::string where = "check '" + c.name + "'";
    verify::CheckOptions opt;
    opt.grid = scaled(c.grid.value_or(cfg.grid), level);
    opt.workers = cfg.workers;
    opt.tol = cfg.tol;
    if (p.contains("radial_steps")) opt.radial_steps = static_cast<int>(num(p, "radial_steps", where));

    std::vector<InequalityReport> reports;
    auto domain = [&] { return p.contains("domain") ? parse_domain(p.at("domain"), M, where + ".domain")
                                                    : measure::DomainSpec::full_chart(); };
    auto test_fn = [&](const measure::DomainSpec& omega) {
        return parse_test_function(p.contains("test_function") ? p.at("test_function") : json(), M, omega,
                                   where + ".test_function");
    };
    const std::string& t = c.type;
    if (t == "poincare") {
        const auto omega = domain();
        reports.push_back(verify::verify_poincare(M, omega, test_fn(omega), opt));
    } else if (t == "isoperimetric") {
        reports.push_back(verify::verify_isoperimetric(M, domain(), opt));
    } else if (t == "mean_curvature_integral") {
        reports.push_back(verify::verify_mean_curvature_integral(M, opt));
    } else if (t == "diameter_bound") {
        reports.push_back(verify::verify_diameter_bound(M, opt));
    } else if (t == "self_shrinker_volume") {
        reports.push_back(verify::verify_self_shrinker_volume(M, opt));
    } else if (t == "volume_estimate") {
        reports = verify::verify_volume_estimate(M, opt);
    } else if (t == "mean_value") {
        const std::string mode = p.value("mode", std::string("general"));
        if (mode != "general" && mode != "convex") {
            throw Error(ErrorKind::Config, where + ".mode: expected general or convex");
        }
        reports.push_back(verify::verify_mean_value(
            M, test_fn(measure::DomainSpec::full_chart()), point_param(p, "x0", M, where), num(p, "s", where),
            num(p, "t", where), mode == "convex" ? verify::ExponentMode::Convex : verify::ExponentMode::General, opt));
    } else if (t == "divergence_identity") {
        reports.push_back(verify::verify_divergence_identity(M, test_fn(measure::DomainSpec::full_chart()),
                                                             point_param(p, "x0", M, where), opt));
    } else if (t == "monotonicity_h" || t == "monotonicity_phi_shrinker") {
        const ModelVec x0 = point_param(p, "x0", M, where);
        const std::vector<double> radii = radii_param(p, where);
        verify::ProfileReport prof =
            t == "monotonicity_h"
                ? verify::monotonicity_h(M, x0, lambda_param(p, where), p.contains("alpha") ? num(p, "alpha", where) : 1.0,
                                         num(p, "R0", where), radii, opt)
                : verify::monotonicity_phi_shrinker(M, x0, lambda_param(p, where), radii, opt);
        reports.push_back(prof.report);
        out.profiles.push_back({c.name, std::move(prof)});
    } else if (t == "lp") {
        reports = verify::verify_lp(M, point_param(p, "x0", M, where), num(p, "s", where), num(p, "t", where),
                                    num(p, "p", where), num(p, "c", where), lambda_param(p, where),
                                    num(p, "R0", where), opt);
    } else {
        throw Error(ErrorKind::Config, where + ": unknown type '" + t + "'");
    }
    for (auto& r : reports) {
        r.name = record_name(c.name, r.name);
        out.record_types[r.name] = t;
        out.records.push_back(std::move(r));
    }
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::Config, "cannot write " + path.string());
    os << text;
}

std::string file_stem(const std::string& name) {
    std::string s = name;
    for (char& ch : s) {
        if (ch == '/' || ch == ' ') ch = '_';
    }
    return s;
}

} // namespace

int RunResult::exit_code() const {
    if (!errors.empty() || records.empty()) return 2;
    for (const auto& r : records) {
        if (r.verdict == verify::Verdict::Fail) return 1;
    }
    return 0;
}

nlohmann::json RunResult::to_json() const { return verify::run_json(records, errors); }

RunResult run_checks(const RunConfig& cfg, int level, const std::string& only) {
    RunResult out;
    std::optional<fixtures::Fixture> fx;
    try {
        fx.emplace(build_surface(cfg));
    } catch (const Error& e) {
        out.errors.push_back({"surface", to_string(e.kind()), e.what(), e.details()});
        return out;
    }
    bool matched = only.empty();
    for (const auto& c : cfg.checks) {
        if (!only.empty() && c.name != only) continue;
        matched = true;
        try {
            run_one(c, *fx, cfg, level, out);
        } catch (const Error& e) {
            out.errors.push_back({c.name, to_string(e.kind()), e.what(), e.details()});
        } catch (const nlohmann::json::exception& e) {
            out.errors.push_back({c.name, to_string(ErrorKind::Config), e.what(), {}});
        }
    }
    if (!matched) out.errors.push_back({only, to_string(ErrorKind::Config), "no check named '" + only + "'", {}});
    return out;
}

void write_profile_csvs(const std::filesystem::path& dir, const NamedProfile& p) {
    const std::string stem = file_stem(p.check);
    {
        std::ostringstream os;
        measure::write_profile_csv(os, p.profile.integral);
        write_file(dir / (stem + "_profile.csv"), os.str());
    }
    measure::RadialProfile mon = p.profile.integral;
    mon.values = p.profile.monitor;
    // monitor refinement: scale the integral estimate by the monitor/integral ratio
    for (std::size_t j = 0; j < mon.values.size(); ++j) {
        const double base = p.profile.integral.values[j];
        mon.refinement_estimate[j] = base != 0.0 ? std::abs(mon.values[j] / base) * mon.refinement_estimate[j] : 0.0;
    }
    mon.integrand = p.profile.monitor_name;
    std::ostringstream os;
    measure::write_profile_csv(os, mon);
    write_file(dir / (stem + "_monitor.csv"), os.str());
}

void write_outputs(const RunConfig& cfg, const RunResult& result) {
    std::filesystem::create_directories(cfg.output.dir);
    std::filesystem::path report = cfg.output.report;
    if (report.is_relative()) report = cfg.output.dir / report;
    write_file(report, result.to_json().dump(2) + "\n");
    for (const auto& p : result.profiles) {
        if (cfg.output.profiles) write_profile_csvs(cfg.output.dir, p);
        if (cfg.output.plots) {
            const auto& prof = p.profile;
            write_file(cfg.output.dir / (file_stem(p.check) + ".svg"),
                       svg::line_plot(p.check + ": " + prof.monitor_name + "(r)", "r", prof.monitor_name,
                                      {{prof.monitor_name, prof.integral.radii, prof.monitor}}));
        }
    }
}

void print_summary(std::ostream& os, const RunResult& result) {
    os << std::left << std::setw(36) << "check" << std::setw(16) << "verdict" << std::setw(16) << "lhs"
       << std::setw(16) << "rhs" << "rel_slack\n";
    for (const auto& r : result.records) {
        os << std::left << std::setw(36) << r.name << std::setw(16) << verify::to_string(r.verdict)
           << std::setprecision(9) << std::setw(16) << r.lhs << std::setw(16) << r.rhs << r.rel_slack << "\n";
    }
    for (const auto& e : result.errors) os << "error [" << e.check << "] " << e.kind << ": " << e.message << "\n";
}

std::vector<RefineEntry> refine(const RunConfig& cfg, int levels, std::vector<verify::ErrorRecord>* errors) {
    if (levels < 1) throw Error(ErrorKind::Config, "refine needs at least one level");
    std::vector<RefineEntry> entries;
    std::map<std::string, std::size_t> index;
    for (int level = 0; level <= levels; ++level) {
        const RunResult res = run_checks(cfg, level);
        if (errors) {
            for (const auto& e : res.errors) errors->push_back(e);
        }
        for (const auto& r : res.records) {
            auto [it, fresh] = index.try_emplace(r.name, entries.size());
            if (fresh) entries.push_back({r.name, res.record_types.at(r.name), {}, {}, {}, {}});
            RefineEntry& e = entries[it->second];
            e.grids.push_back(r.grid);
            e.errors.push_back(e.type == "divergence_identity" ? std::abs(verify::param_number(r, "residual"))
                                                               : r.slack);
            e.verdicts.push_back(verify::to_string(r.verdict));
        }
    }
    for (auto& e : entries) {
        const auto& v = e.errors;
        if (e.type == "divergence_identity") {
            for (std::size_t k = 1; k < v.size(); ++k) e.orders.push_back(std::log2(v[k - 1] / v[k]));
        } else {
            for (std::size_t k = 2; k < v.size(); ++k) {
                e.orders.push_back(std::log2(std::abs(v[k - 1] - v[k - 2]) / std::abs(v[k] - v[k - 1])));
            }
        }
    }
    return entries;
}

nlohmann::json refine_json(const std::vector<RefineEntry>& entries) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& e : entries) {
        out.push_back({{"name", e.name},
                       {"type", e.type},
                       {"grids", e.grids},
                       {"errors", e.errors},
                       {"orders", e.orders},
                       {"verdicts", e.verdicts}});
    }
    return {{"refinement", out}};
}

void print_refine(std::ostream& os, const std::vector<RefineEntry>& entries) {
    for (const auto& e : entries) {
        os << e.name << (e.type == "divergence_identity" ? "  (|residual|)" : "  (slack)") << "\n";
        for (std::size_t k = 0; k < e.grids.size(); ++k) {
            std::string g;
            for (int n : e.grids[k]) g += (g.empty() ? "" : "x") + std::to_string(n);
            os << "  " << std::left << std::setw(14) << g << std::setprecision(10) << std::setw(20) << e.errors[k]
               << e.verdicts[k];
            const std::size_t first = e.type == "divergence_identity" ? 1 : 2;
            if (k >= first && k - first < e.orders.size()) os << "  order " << std::setprecision(4) << e.orders[k - first];
            os << "\n";
        }
    }
}

} // namespace curvlab::cli
