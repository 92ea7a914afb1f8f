#include "curvlab/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>

#include "curvlab/error.hpp"

namespace curvlab::cli {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
    throw Error(ErrorKind::Config, where + ": " + msg);
}

void require_object(const json& j, const std::string& where) {
    if (!j.is_object()) fail(where, "expected an object");
}

void only_keys(const json& j, const std::vector<std::string>& allowed, const std::string& where) {
    require_object(j, where);
    for (const auto& [k, v] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) fail(where, "unknown key '" + k + "'");
    }
}

double number(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) fail(where, "missing '" + key + "'");
    if (!j.at(key).is_number()) fail(where + "." + key, "expected a number");
    return j.at(key).get<double>();
}

double number_or(const json& j, const std::string& key, double fallback, const std::string& where) {
    return j.contains(key) ? number(j, key, where) : fallback;
}

double positive(const json& j, const std::string& key, const std::string& where) {
    const double v = number(j, key, where);
    if (!(v > 0.0)) fail(where + "." + key, "must be positive");
    return v;
}

int integer(const json& j, const std::string& where) {
    if (!j.is_number_integer()) fail(where, "expected an integer");
    return j.get<int>();
}

std::vector<double> number_array(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) fail(where, "expected an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::vector<int> parse_grid(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of node counts");
    std::vector<int> out;
    for (const auto& v : j) {
        const int n = integer(v, where);
        if (n < 4) fail(where, "node counts must be at least 4");
        out.push_back(n);
    }
    return out;
}

template <class V = Coords>
V to_vec(const std::vector<double>& v, const std::string& where) {
    if (static_cast<Eigen::Index>(v.size()) > V::MaxRowsAtCompileTime) fail(where, "too many coordinates");
    V c(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) c(static_cast<Eigen::Index>(i)) = v[i];
    return c;
}

const std::map<std::string, std::vector<std::string>>& surface_keys() {
    static const std::map<std::string, std::vector<std::string>> keys = {
        {"sphere", {"type", "m", "radius", "center"}},
        {"ellipsoid", {"type", "axes"}},
        {"geodesic_sphere", {"type", "radius"}},
        {"convex_graph", {"type", "epsilon", "l_max", "seed"}},
        {"radial_graph", {"type", "terms"}},
        {"torus", {"type", "R", "r"}},
    };
    return keys;
}

const std::map<std::string, std::vector<std::string>>& all_check_keys() {
    static const std::map<std::string, std::vector<std::string>> keys = {
        {"poincare", {"domain", "test_function"}},
        {"isoperimetric", {"domain"}},
        {"mean_curvature_integral", {}},
        {"diameter_bound", {}},
        {"self_shrinker_volume", {}},
        {"volume_estimate", {}},
        {"mean_value", {"test_function", "x0", "s", "t", "mode", "radial_steps"}},
        {"divergence_identity", {"test_function", "x0"}},
        {"monotonicity_h", {"x0", "lambda", "alpha", "R0", "radii"}},
        {"monotonicity_phi_shrinker", {"x0", "lambda", "radii"}},
        {"lp", {"x0", "s", "t", "p", "c", "lambda", "R0"}},
    };
    return keys;
}

} // namespace

const std::vector<std::string>& check_keys(const std::string& type) {
    const auto it = all_check_keys().find(type);
    if (it == all_check_keys().end()) fail("checks", "unknown check type '" + type + "'");
    return it->second;
}

const std::vector<std::string>& check_types() {
    static const std::vector<std::string> types = [] {
        std::vector<std::string> t;
        for (const auto& [k, v] : all_check_keys()) t.push_back(k);
        return t;
    }();
    return types;
}

RunConfig parse_config(const json& doc) {
    only_keys(doc,
              {"surface", "ambient", "grid", "workers", "seed", "tolerances", "jets", "fd_step", "output", "checks"},
              "config");
    RunConfig cfg;
    if (!doc.contains("surface")) fail("config", "missing 'surface'");
    cfg.surface = doc.at("surface");
    require_object(cfg.surface, "surface");
    if (!cfg.surface.contains("type") || !cfg.surface.at("type").is_string()) fail("surface", "missing 'type'");
    const std::string stype = cfg.surface.at("type").get<std::string>();
    const auto sk = surface_keys().find(stype);
    if (sk == surface_keys().end()) fail("surface.type", "unknown surface '" + stype + "'");
    only_keys(cfg.surface, sk->second, "surface");

    cfg.ambient = doc.value("ambient", json{{"type", "euclidean"}});
    only_keys(cfg.ambient, {"type", "kappa"}, "ambient");

    if (!doc.contains("grid")) fail("config", "missing 'grid'");
    cfg.grid = parse_grid(doc.at("grid"), "grid");
    if (doc.contains("workers")) {
        cfg.workers = integer(doc.at("workers"), "workers");
        if (cfg.workers < 0) fail("workers", "must be >= 0 (0 = all cores)");
    }
    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_unsigned()) fail("seed", "expected a non-negative integer");
        cfg.seed = doc.at("seed").get<std::uint64_t>();
    }
    if (doc.contains("tolerances")) {
        const json& t = doc.at("tolerances");
        only_keys(t, {"abs", "equality_rel", "identity_rel", "monotone"}, "tolerances");
        cfg.tol.abs = number_or(t, "abs", cfg.tol.abs, "tolerances");
        cfg.tol.equality_rel = number_or(t, "equality_rel", cfg.tol.equality_rel, "tolerances");
        cfg.tol.identity_rel = number_or(t, "identity_rel", cfg.tol.identity_rel, "tolerances");
        cfg.tol.monotone = number_or(t, "monotone", cfg.tol.monotone, "tolerances");
        if (cfg.tol.abs < 0 || cfg.tol.equality_rel < 0 || cfg.tol.identity_rel < 0 || cfg.tol.monotone < 0) {
            fail("tolerances", "tolerances must be non-negative");
        }
    }
    if (doc.contains("jets")) {
        const json& j = doc.at("jets");
        if (j == "analytic") {
            cfg.jets = surface::JetMode::Analytic;
        } else if (j == "finite_difference") {
            cfg.jets = surface::JetMode::FiniteDifference;
        } else {
            fail("jets", "expected \"analytic\" or \"finite_difference\"");
        }
    }
    if (doc.contains("fd_step")) cfg.fd_step = positive(doc, "fd_step", "config");
    if (doc.contains("output")) {
        const json& o = doc.at("output");
        only_keys(o, {"dir", "report", "profiles", "plots"}, "output");
        if (o.contains("dir")) cfg.output.dir = o.at("dir").get<std::string>();
        if (o.contains("report")) cfg.output.report = o.at("report").get<std::string>();
        if (o.contains("profiles")) cfg.output.profiles = o.at("profiles").get<bool>();
        if (o.contains("plots")) cfg.output.plots = o.at("plots").get<bool>();
    }
    if (!doc.contains("checks") || !doc.at("checks").is_array()) fail("config", "missing 'checks' array");
    std::vector<std::string> names;
    for (std::size_t i = 0; i < doc.at("checks").size(); ++i) {
        const json& c = doc.at("checks").at(i);
        const std::string where = "checks[" + std::to_string(i) + "]";
        require_object(c, where);
        if (!c.contains("type") || !c.at("type").is_string()) fail(where, "missing 'type'");
        CheckConfig cc;
        cc.type = c.at("type").get<std::string>();
        std::vector<std::string> allowed = check_keys(cc.type);
        allowed.insert(allowed.end(), {"type", "name", "grid"});
        only_keys(c, allowed, where);
        cc.name = c.value("name", cc.type);
        if (std::find(names.begin(), names.end(), cc.name) != names.end()) {
            fail(where, "duplicate check name '" + cc.name + "'");
        }
        names.push_back(cc.name);
        if (c.contains("grid")) cc.grid = parse_grid(c.at("grid"), where + ".grid");
        cc.params = json::object();
        for (const auto& [k, v] : c.items()) {
            if (k != "type" && k != "name" && k != "grid") cc.params[k] = v;
        }
        cfg.checks.push_back(std::move(cc));
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Config, "cannot read config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Config, path.string() + ": " + e.what());
    }
    try {
        return parse_config(doc);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Config, path.string() + ": " + e.what());
    }
}

void apply_environment(RunConfig& cfg) {
    if (const char* w = std::getenv("CURVLAB_WORKERS"); w && *w) {
        try {
            cfg.workers = std::stoi(w);
        } catch (const std::exception&) {
            throw Error(ErrorKind::Config, "CURVLAB_WORKERS is not an integer");
        }
        if (cfg.workers < 0) throw Error(ErrorKind::Config, "CURVLAB_WORKERS must be >= 0");
    }
    if (const char* d = std::getenv("CURVLAB_OUTPUT_DIR"); d && *d) cfg.output.dir = d;
    if (const char* r = std::getenv("CURVLAB_REPORT"); r && *r) cfg.output.report = r;
}

ambient::SpaceForm build_ambient(const RunConfig& cfg, int m) {
    const json& a = cfg.ambient;
    const std::string type = a.value("type", std::string("euclidean"));
    if (type == "euclidean") {
        if (a.contains("kappa") && number(a, "kappa", "ambient") != 0.0) fail("ambient.kappa", "must be 0");
        return ambient::SpaceForm::euclidean(m + 1);
    }
    if (type == "sphere") return ambient::SpaceForm::sphere(m + 1, number(a, "kappa", "ambient"));
    if (type == "hyperbolic") return ambient::SpaceForm::hyperbolic(m + 1, number(a, "kappa", "ambient"));
    fail("ambient.type", "unknown ambient '" + type + "'");
}

fixtures::Fixture build_surface(const RunConfig& cfg) {
    const json& s = cfg.surface;
    const std::string type = s.at("type").get<std::string>();
    const std::string ambient_type = cfg.ambient.value("type", std::string("euclidean"));
    if (type != "geodesic_sphere" && ambient_type != "euclidean") {
        fail("ambient", "surface '" + type + "' lives in Euclidean space");
    }
    auto fx = [&]() -> fixtures::Fixture {
        if (type == "sphere") {
            const int m = s.contains("m") ? integer(s.at("m"), "surface.m") : 2;
            const double r = s.contains("radius") ? positive(s, "radius", "surface") : 1.0;
            ModelVec center;
            if (s.contains("center")) center = to_vec<ModelVec>(number_array(s.at("center"), "surface.center"), "surface.center");
            return fixtures::make_sphere(m, r, center);
        }
        if (type == "ellipsoid") {
            const std::vector<double> ax = number_array(s.at("axes"), "surface.axes");
            if (ax.size() != 3) fail("surface.axes", "expected three semi-axes");
            return fixtures::make_ellipsoid(ax[0], ax[1], ax[2]);
        }
        if (type == "geodesic_sphere") {
            return fixtures::make_geodesic_sphere(build_ambient(cfg, 2), positive(s, "radius", "surface"));
        }
        if (type == "convex_graph") {
            const int l_max = s.contains("l_max") ? integer(s.at("l_max"), "surface.l_max") : 4;
            std::uint64_t seed = cfg.seed;
            if (s.contains("seed")) seed = s.at("seed").get<std::uint64_t>();
            return fixtures::make_convex_graph(number(s, "epsilon", "surface"), l_max, seed);
        }
        if (type == "radial_graph") {
            if (!s.contains("terms") || !s.at("terms").is_array()) fail("surface.terms", "expected an array");
            std::vector<fixtures::Monomial> terms;
            for (const auto& t : s.at("terms")) {
                only_keys(t, {"coef", "powers"}, "surface.terms");
                fixtures::Monomial mono;
                mono.coef = number(t, "coef", "surface.terms");
                const std::vector<double> p = number_array(t.at("powers"), "surface.terms.powers");
                if (p.size() != 3) fail("surface.terms.powers", "expected three exponents");
                for (int i = 0; i < 3; ++i) mono.powers[i] = static_cast<int>(p[i]);
                terms.push_back(mono);
            }
            return fixtures::make_radial_graph(terms);
        }
        return fixtures::make_torus(positive(s, "R", "surface"), positive(s, "r", "surface"));
    }();
    if (cfg.jets == surface::JetMode::FiniteDifference) fx.M = fx.M.with_jets(cfg.jets, cfg.fd_step);
    return fx;
}

ModelVec parse_point(const json& j, const surface::Immersion& M, const std::string& where) {
    only_keys(j, {"chart", "coords"}, where);
    if (j.contains("chart") == j.contains("coords")) fail(where, "give exactly one of 'chart' or 'coords'");
    if (j.contains("chart")) {
        const std::vector<double> u = number_array(j.at("chart"), where + ".chart");
        if (static_cast<int>(u.size()) != M.m()) fail(where + ".chart", "wrong number of chart coordinates");
        return M.point(to_vec(u, where));
    }
    const std::vector<double> x = number_array(j.at("coords"), where + ".coords");
    const ModelVec p = to_vec<ModelVec>(x, where);
    M.space().check_on_model(p);
    return p;
}

measure::DomainSpec parse_domain(const json& j, const surface::Immersion& M, const std::string& where) {
    if (j.is_string()) {
        if (j == "full") return measure::DomainSpec::full_chart();
        fail(where, "unknown domain '" + j.get<std::string>() + "'");
    }
    require_object(j, where);
    const std::string type = j.value("type", std::string());
    if (type == "full") {
        only_keys(j, {"type"}, where);
        return measure::DomainSpec::full_chart();
    }
    if (type == "cap") {
        only_keys(j, {"type", "theta0", "sublevel"}, where);
        return fixtures::make_cap_domain(M, positive(j, "theta0", where), j.value("sublevel", false));
    }
    if (type == "rectangle") {
        only_keys(j, {"type", "lo", "hi"}, where);
        const Coords lo = to_vec(number_array(j.at("lo"), where + ".lo"), where);
        const Coords hi = to_vec(number_array(j.at("hi"), where + ".hi"), where);
        if (lo.size() != M.m() || hi.size() != M.m()) fail(where, "rectangle corners need m coordinates");
        for (int i = 0; i < M.m(); ++i) {
            if (!(lo(i) < hi(i)) || lo(i) < M.box().lo(i) || hi(i) > M.box().hi(i)) {
                fail(where, "rectangle must be a non-empty sub-box of the chart");
            }
        }
        return measure::DomainSpec::sub_rectangle(lo, hi);
    }
    fail(where, "domain type must be full, cap or rectangle");
}

verify::TestFunction parse_test_function(const json& j, const surface::Immersion& M,
                                         const measure::DomainSpec& omega, const std::string& where) {
    if (j.is_null()) return verify::TestFunction::constant_value(1.0);
    require_object(j, where);
    const std::string kind = j.value("kind", std::string());
    if (kind == "constant") {
        only_keys(j, {"kind", "value"}, where);
        return verify::TestFunction::constant_value(number_or(j, "value", 1.0, where));
    }
    if (kind == "tent") {
        only_keys(j, {"kind", "eps"}, where);
        return verify::TestFunction::tent(omega, positive(j, "eps", where));
    }
    if (kind == "radial_bump") {
        only_keys(j, {"kind", "center", "r_in", "r_out"}, where);
        return verify::TestFunction::radial_bump(parse_point(j.at("center"), M, where + ".center"),
                                                 number(j, "r_in", where), positive(j, "r_out", where));
    }
    if (kind == "smooth_bump") {
        only_keys(j, {"kind", "margin"}, where);
        return verify::TestFunction::smooth_bump(omega, positive(j, "margin", where));
    }
    fail(where, "test function kind must be constant, tent, radial_bump or smooth_bump");
}

} // namespace curvlab::cli
