// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "curvlab/error.hpp"
#include "curvlab/fixtures.hpp"
#include "curvlab/runner.hpp"
#include "curvlab/verifier.hpp"

using namespace curvlab;
using namespace curvlab::verify;
using measure::DomainSpec;

namespace {

constexpr double pi = std::numbers::pi;

std::string config_dir() {
    if (const char* d = std::getenv("CURVLAB_CONFIG_DIR"); d && *d) return d;
    return CURVLAB_CONFIG_DIR;
}

cli::RunConfig load(const std::string& name) { return cli::load_config(config_dir() + "/" + name); }

CheckOptions opts(std::vector<int> grid, int workers = 1) {
    CheckOptions o;
    o.grid = std::move(grid);
    o.workers = workers;
    return o;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const InequalityReport* find(const std::vector<InequalityReport>& rs, const std::string& name) {
    for (const auto& r : rs) {
        if (r.name == name) return &r;
    }
    return nullptr;
}

// Collects sub-conditions of one criterion; any false one fails it.
struct Criterion {
    std::ostringstream notes;
    bool ok = true;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            notes << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void run(int id, const std::string& title, const std::function<void(Criterion&)>& body) {
    Criterion c;
    c.notes << std::setprecision(6);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const Error& e) {
        c.ok = false;
        c.notes << " [error " << to_string(e.kind()) << ": " << e.what() << "]";
    } catch (const std::exception& e) {
        c.ok = false;
        c.notes << " [exception: " << e.what() << "]";
    }
    if (!c.ok) ++failures;
    std::cout << (c.ok ? "PASS" : "FAIL") << "  criterion " << std::setw(2) << id << "  " << title << ":"
              << c.notes.str() << " (" << std::fixed << std::setprecision(1) << seconds_since(t0) << " s)"
              << std::defaultfloat << std::endl;
}

// |<P1 U, V>| <= 2 S1 |U| |V|, the trace lower bound and |A|^2 + 2 S2 = S1^2 on random samples.
struct PropertyStats {
    double worst_p1 = 1e300;     // min slack of the P1 bound
    double worst_trace = 1e300;  // min slack of the trace bound
    double worst_identity = 0.0; // max relative identity error
    long samples = 0;
    long trace_samples = 0;
};

PropertyStats property_suite(const fixtures::Fixture& fx, long n, std::uint64_t seed) {
    const auto& M = fx.M;
    const auto& sp = M.space();
    const int m = M.m();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto random_u = [&] {
        Coords u(m);
        for (int i = 0; i < m; ++i) {
            const double pad = M.box().periodic[i] ? 0.0 : 1e-3 * M.box().extent(i);
            std::uniform_real_distribution<double> d(M.box().lo(i) + pad, M.box().hi(i) - pad);
            u(i) = d(rng);
        }
        return u;
    };
    PropertyStats st;
    for (long k = 0; k < n; ++k) {
        const surface::CurvatureFrame f = surface::curvature_frame(M, random_u());
        Coords U(m), V(m);
        for (int i = 0; i < m; ++i) U(i) = normal(rng), V(i) = normal(rng);
        U /= std::sqrt(f.metric(U, U));
        V /= std::sqrt(f.metric(V, V));
        const double pv = std::abs(f.metric(surface::newton_apply(f, U), V));
        st.worst_p1 = std::min(st.worst_p1, 2.0 * f.S1 - pv);
        st.worst_identity =
            std::max(st.worst_identity, std::abs(f.norm_A_squared() + 2.0 * f.S2 - f.S1 * f.S1) / (f.S1 * f.S1));

        // Center: another point of M, or a point off M along a random model direction.
        ModelVec x0 = M.point(random_u());
        if (k % 2 == 1) {
            ModelVec dir(x0.size());
            for (int i = 0; i < dir.size(); ++i) dir(i) = normal(rng);
            dir = sp.tangent_part(x0, dir);
            const double nd = sp.norm(dir);
            if (nd > 0) x0 = sp.project_to_model(sp.geodesic(x0, dir / nd, 0.3 * std::abs(normal(rng))));
        }
        const double rho = ambient::distance_unchecked(sp, x0, f.x);
        if (sp.kappa() > 0.0 && rho >= pi / (2.0 * std::sqrt(sp.kappa()))) continue;
        const double trace = surface::p1_trace_term(f, sp, surface::FieldSpec::radial(x0));
        const double bound = (m - 1) * f.S1 * ambient::comparison_G(rho, sp).Gprime;
        st.worst_trace = std::min(st.worst_trace, trace - bound);
        ++st.trace_samples;
        ++st.samples;
    }
    return st;
}

} // namespace

int main() {
    std::cout << "curvlab acceptance suite\n";

    run(1, "sphere Poincare equality", [](Criterion& c) {
        const auto s = fixtures::make_sphere(2, 1.0);
        const auto t0 = std::chrono::steady_clock::now();
        const auto r = verify_poincare(s.M, DomainSpec::full_chart(), TestFunction::constant_value(1.0),
                                       opts({256, 512}, 1));
        const double secs = seconds_since(t0);
        c.notes << " lhs=" << r.lhs << " rhs=" << r.rhs << " rel_slack=" << r.rel_slack << " time=" << secs << "s";
        c.expect(std::abs(r.lhs - 8 * pi) <= 1e-6 * 8 * pi, "lhs = 8 pi");
        c.expect(std::abs(r.rhs - 8 * pi) <= 1e-6 * 8 * pi, "rhs = 8 pi");
        c.expect(std::abs(r.rel_slack) <= 1e-6, "|rel slack| <= 1e-6");
        c.expect(r.verdict == Verdict::EqualityCase, "verdict equality_case");
        c.expect(secs <= 5.0, "runtime <= 5 s");
    });

    run(2, "sphere integral of H against 2 pi diam", [](Criterion& c) {
        const auto s = fixtures::make_sphere(2, 1.0);
        const std::vector<int> grid{256, 512};
        const auto samples = measure::domain_points(s.M, DomainSpec::full_chart(), grid).size();
        const auto r = verify_mean_curvature_integral(s.M, opts(grid, 4));
        c.notes << " int_H=" << r.lhs << " 2pi_diam=" << r.rhs << " rel_slack=" << r.rel_slack
                << " samples=" << samples;
        c.expect(samples >= 10000, ">= 1e4 diameter samples");
        c.expect(std::abs(r.lhs - 4 * pi) <= 1e-6 * 4 * pi, "int H = 4 pi");
        c.expect(std::abs(r.rhs - 4 * pi) <= 1e-6 * 4 * pi, "2 pi diam = 4 pi");
        c.expect(std::abs(r.rel_slack) <= 1e-6, "|rel slack| <= 1e-6");
        c.expect(r.verdict == Verdict::EqualityCase, "verdict equality_case");
    });

    run(3, "shrinker volume equality", [](Criterion& c) {
        const auto s2 = fixtures::make_sphere(2, 2.0);
        const double res2 = shrinker_residual(s2.M, {256, 512}, 4);
        const auto r2 = verify_self_shrinker_volume(s2.M, opts({256, 512}, 4));
        c.notes << " m=2: vol=" << r2.lhs << " rhs=" << r2.rhs << " rel=" << r2.rel_slack << " residual=" << res2;
        c.expect(std::abs(r2.lhs - 32 * pi / 3) <= 1e-6 * 32 * pi / 3, "vol(K) = 32 pi/3");
        c.expect(std::abs(r2.rhs - 32 * pi / 3) <= 1e-6 * 32 * pi / 3, "rhs = 32 pi/3");
        c.expect(std::abs(r2.rel_slack) <= 1e-6, "m=2 |rel slack| <= 1e-6");
        c.expect(res2 <= 1e-10, "shrinker residual <= 1e-10");
        const auto s3 = fixtures::make_sphere(3, std::sqrt(6.0));
        const auto r3 = verify_self_shrinker_volume(s3.M, opts({48, 48, 96}, 4));
        c.notes << "; m=3: rel=" << r3.rel_slack;
        c.expect(std::abs(r3.rel_slack) <= 1e-5, "m=3 |rel slack| <= 1e-5");
    });

    run(4, "divergence identity on the ellipsoid (1.3, 1, 0.8)", [](Criterion& c) {
        auto cfg = load("divergence_ellipsoid.json");
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<ErrorRecord> errors;
        const auto entries = cli::refine(cfg, 2, &errors);
        const double secs = seconds_since(t0);
        c.expect(errors.empty(), "no errors");
        const cli::RefineEntry* e = nullptr;
        for (const auto& x : entries) {
            if (x.type == "divergence_identity") e = &x;
        }
        c.expect(e != nullptr, "divergence entry present");
        if (!e) return;
        const auto& g = e->grids.back();
        const auto rel = param_number(
            verify_divergence_identity(fixtures::make_ellipsoid(1.3, 1.0, 0.8).M,
                                       TestFunction::radial_bump([] {
                                           ModelVec v(3);
                                           v << 1.3, 0.0, 0.0;
                                           return v;
                                       }(),
                                                                 0.2, 0.8),
                                       ModelVec::Zero(3), [&] {
                                           auto o = opts(g, 4);
                                           o.refinement = false;
                                           return o;
                                       }()),
            "relative_residual");
        c.notes << " finest grid=" << g[0] << "x" << g[1] << " relative residual=" << rel << " orders=";
        for (double o : e->orders) c.notes << o << " ";
        c.notes << "refine time=" << secs << "s";
        c.expect(g[0] >= 512 && g[1] >= 512, "finest grid 512^2");
        c.expect(rel <= 1e-5, "relative residual <= 1e-5");
        c.expect(e->orders.size() == 2, "two refinements");
        for (double o : e->orders) c.expect(o >= 1.9, "order >= 1.9");
        c.expect(secs <= 60.0, "refine <= 60 s");
    });

    run(5, "mean value inequality", [](Criterion& c) {
        const auto s = fixtures::make_sphere(2, 1.0);
        const double a = 0.5, b = 1.2;
        const auto r = verify_mean_value(s.M, TestFunction::constant_value(1.0), fixtures::north_pole(s), a, b,
                                         ExponentMode::General, opts({256, 512}, 4));
        const double closed = 2 * pi * (std::pow(b, 1.5) - std::pow(a, 1.5));
        const double diff = param_number(r, "ball_difference");
        c.notes << " sphere: ball difference=" << diff << " closed form=" << closed
                << " rel err=" << std::abs(diff - closed) / closed << " slack=" << r.slack
                << " refinement=" << r.refinement_estimate;
        c.expect(std::abs(diff - closed) <= 1e-4 * closed, "closed form within 1e-4");
        c.expect(r.slack >= -r.refinement_estimate, "slack >= -refinement estimate");
        c.expect(r.verdict != Verdict::Fail, "sphere verdict");

        const auto res = cli::run_checks(load("mean_value_geodesic.json"));
        const auto* g = find(res.records, "mean_value");
        c.expect(res.errors.empty() && g != nullptr, "geodesic run produced a record");
        if (!g) return;
        // Regression value recorded at 256^2.
        constexpr double kSlack = 2.7121029319459296;
        c.notes << "; geodesic sphere: slack=" << g->slack << " (regression " << kSlack << ")";
        c.expect(g->verdict == Verdict::Pass, "geodesic verdict pass");
        c.expect(std::abs(g->slack - kSlack) <= 1e-8 * kSlack, "slack matches regression value");
    });

    run(6, "monotonicity of h on the unit sphere", [](Criterion& c) {
        const auto s = fixtures::make_sphere(2, 1.0);
        std::vector<double> radii;
        for (int j = 0; j < 19; ++j) radii.push_back(0.1 + (1.9 - 0.1) * j / 18);
        const auto p = monotonicity_h(s.M, fixtures::north_pole(s), 0.5, 1.0, 1.9, radii, opts({256, 512}, 4));
        double worst = 0;
        for (std::size_t j = 0; j < radii.size(); ++j) {
            const double r = radii[j], h = 2 * pi * std::exp(r / 2) * std::pow(r, 1.5);
            worst = std::max(worst, std::abs(p.monitor[j] - h) / h);
        }
        const auto fit = monotonicity_h(s.M, fixtures::north_pole(s), std::nullopt, 1.0, 1.9, radii,
                                        opts({256, 512}, 4));
        const double lam = param_number(fit.report, "lambda");
        c.notes << " max rel err of h=" << worst << " max relative drop=" << p.report.lhs
                << " tolerance=" << p.report.tolerance << " fitted lambda=" << lam;
        c.expect(worst <= 1e-4, "h within 1e-4");
        c.expect(p.report.verdict != Verdict::Fail && fit.report.verdict != Verdict::Fail, "non-decreasing");
        c.expect(std::abs(p.report.tolerance - 1e-8) < 1e-20, "monotone tolerance 1e-8");
        c.expect(std::abs(lam - 0.5) <= 1e-3, "lambda = 0.5 +- 1e-3");
    });

    run(7, "shrinker monotonicity and forced lambda", [](Criterion& c) {
        const auto ok = cli::run_checks(load("shrinker_sphere.json"));
        const InequalityReport* r = nullptr;
        for (const auto& x : ok.records) {
            if (x.name.rfind("monotonicity_phi_shrinker", 0) == 0) r = &x;
        }
        c.expect(r != nullptr, "phi report present");
        if (r) {
            const double lam = param_number(*r, "lambda"), e = param_number(*r, "exponent");
            c.notes << " lambda=" << lam << " exponent=" << e << " verdict=" << to_string(r->verdict);
            c.expect(std::abs(lam - 0.25) <= 1e-10, "lambda = 1/4");
            c.expect(std::abs(e) <= 1e-10, "exponent 0");
            c.expect(r->verdict != Verdict::Fail, "phi non-decreasing");
        }
        c.expect(ok.exit_code() == 0, "exit 0");
        const auto forced = cli::run_checks(load("shrinker_forced_lambda.json"));
        const bool hv = forced.errors.size() == 1 && forced.errors[0].kind == "hypothesis_violation";
        int fails = 0;
        for (const auto& x : forced.records) fails += x.verdict == Verdict::Fail;
        c.notes << "; forced lambda=1/8: exit " << forced.exit_code()
                << (hv ? " hypothesis_violation" : " unexpected outcome");
        c.expect(hv, "hypothesis violation recorded");
        c.expect(fails == 0, "no fail verdict");
        c.expect(forced.exit_code() == 2, "exit 2");
    });

    run(8, "property suites", [](Criterion& c) {
        std::vector<fixtures::Fixture> fxs;
        fxs.push_back(fixtures::make_sphere(2, 1.0));
        fxs.push_back(fixtures::make_sphere(3, 1.3));
        fxs.push_back(fixtures::make_ellipsoid(1.2, 1.0, 0.9));
        fxs.push_back(fixtures::make_ellipsoid(1.3, 1.0, 0.8));
        fxs.push_back(fixtures::make_convex_graph(0.05, 4, 7));
        fxs.push_back(fixtures::make_geodesic_sphere(ambient::SpaceForm::sphere(3, 1.0), pi / 4));
        fxs.push_back(fixtures::make_geodesic_sphere(ambient::SpaceForm::hyperbolic(3, -1.0), 1.0));
        constexpr long kSamples = 100000;
        std::uint64_t seed = 1;
        for (const auto& fx : fxs) {
            const PropertyStats st = property_suite(fx, kSamples, seed++);
            c.notes << " " << fx.M.name() << "(P1 " << st.worst_p1 << ", trace " << st.worst_trace << ", id "
                    << st.worst_identity << ", n=" << st.trace_samples << ")";
            c.expect(st.worst_p1 >= -1e-8, fx.M.name() + " P1 bound");
            c.expect(st.worst_trace >= -1e-8, fx.M.name() + " trace bound");
            c.expect(st.worst_identity <= 1e-10, fx.M.name() + " |A|^2 + 2 S2 = S1^2");
            c.expect(st.trace_samples >= kSamples / 2, fx.M.name() + " trace sample count");
        }
        const auto base = fixtures::make_ellipsoid(1.2, 1.0, 0.9);
        const auto r1 = verify_poincare(base.M, DomainSpec::full_chart(), TestFunction::constant_value(1.0),
                                        opts({128, 256}, 4));
        for (double lam : {0.5, 2.0}) {
            const auto e = fixtures::make_ellipsoid(1.2 * lam, lam, 0.9 * lam);
            const auto r = verify_poincare(e.M, DomainSpec::full_chart(), TestFunction::constant_value(1.0),
                                           opts({128, 256}, 4));
            c.notes << " scale " << lam << ": lhs ratio " << r.lhs / r1.lhs << " rhs ratio " << r.rhs / r1.rhs;
            c.expect(std::abs(r.lhs / r1.lhs - lam) <= 1e-10 * lam, "lhs scales by lambda");
            c.expect(std::abs(r.rhs / r1.rhs - lam) <= 1e-10 * lam, "rhs scales by lambda");
            c.expect(std::abs(r.rel_slack - r1.rel_slack) <= 1e-10, "relative slack invariant");
            c.expect(r.verdict == r1.verdict, "verdict invariant");
        }
    });

    run(9, "L^p corollary, proof-form constant", [](Criterion& c) {
        const auto res = cli::run_checks(load("lp_sphere.json"));
        const auto* proof = find(res.records, "lp");
        const auto* stmt = find(res.records, "lp/statement");
        c.expect(proof && stmt, "both constant conventions reported");
        if (!proof || !stmt) return;
        c.notes << " proof: " << proof->lhs << " <= " << proof->rhs << " (" << to_string(proof->verdict)
                << "); statement: " << stmt->lhs << " <= " << stmt->rhs << " (" << to_string(stmt->verdict) << ")";
        c.expect(proof->verdict == Verdict::Pass, "proof form pass");
        c.expect(param_number(*proof, "s") == 0.3 && param_number(*proof, "t") == 0.9, "(s, t) = (0.3, 0.9)");
        c.expect(param_number(*proof, "p") == 2.0, "p = 2");
    });

    run(10, "determinism across worker counts", [](Criterion& c) {
        std::string first;
        std::size_t records = 0;
        for (int w : {1, 4, 8}) {
            auto cfg = load("full_suite.json");
            cfg.workers = w;
            const auto res = cli::run_checks(cfg);
            const std::string bytes = res.to_json().dump(2);
            records = res.records.size();
            if (w == 1) {
                first = bytes;
            } else {
                c.expect(bytes == first, "identical report with " + std::to_string(w) + " workers");
            }
        }
        c.notes << " records=" << records << " bytes=" << first.size();
        c.expect(records >= 10, "full suite ran");
    });

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << "\n";
    return failures == 0 ? 0 : 1;
}
