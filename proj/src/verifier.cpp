#include "curvlab/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "curvlab/ambient.hpp"
#include "curvlab/error.hpp"
#include "curvlab/quadrature.hpp"

namespace curvlab::verify {

namespace {

using measure::DomainSpec;
using measure::LevelSpec;
using measure::NodeSamples;
using surface::CurvatureFrame;

constexpr double kS2Floor = -1e-10;
constexpr double kSupportTol = 1e-12;

struct Sides {
    double lhs = 0.0;
    double rhs = 0.0;
    Params params;
};

// Evaluates on opt.grid and, if requested, on the coarsened grid for the refinement estimate.
InequalityReport evaluate(const std::string& name, const CheckOptions& opt,
                          const std::function<Sides(const std::vector<int>&)>& eval) {
    Sides fine = eval(opt.grid);
    InequalityReport r;
    r.name = name;
    r.lhs = fine.lhs;
    r.rhs = fine.rhs;
    r.grid = opt.grid;
    r.params = std::move(fine.params);
    if (opt.refinement) {
        const Sides coarse = eval(quad::coarsen(opt.grid));
        r.refinement_estimate = std::abs((fine.rhs - fine.lhs) - (coarse.rhs - coarse.lhs));
    }
    finalize(r, opt.tol);
    return r;
}

void require_grid(const Immersion& M, const CheckOptions& opt) {
    if (static_cast<int>(opt.grid.size()) != M.m()) {
        throw Error(ErrorKind::Config, "grid needs one node count per chart axis");
    }
}

// Samples a domain; sublevel domains keep their level for masking at 0.
struct DomainSamples {
    NodeSamples s;
    bool masked = false;

    double sum(int ch) const { return masked ? measure::sum_below(s, ch, 0.0) : measure::sum_full(s, ch); }
    bool inside(std::size_t i) const { return !masked || s.level[i] <= 0.0; }
};

DomainSamples sample_domain(const Immersion& M, const DomainSpec& omega, const std::vector<int>& grid, int channels,
                            const measure::MultiIntegrand& fn, int workers, bool normalized = false) {
    const quad::Grid g = measure::domain_grid(M, omega, grid);
    const bool masked = omega.kind == DomainSpec::Kind::Sublevel;
    LevelSpec level = masked ? LevelSpec::function(omega.level, normalized) : LevelSpec::none();
    return {measure::sample(M, g, channels, fn, level, workers), masked};
}

struct Extrema {
    double min_S1 = std::numeric_limits<double>::infinity();
    double min_S2 = std::numeric_limits<double>::infinity();
};

Extrema extrema(const DomainSamples& d, int ch_S1, int ch_S2) {
    Extrema e;
    for (std::size_t i = 0; i < d.s.grid.size(); ++i) {
        if (!d.inside(i)) continue;
        e.min_S1 = std::min(e.min_S1, d.s.value(i, ch_S1));
        e.min_S2 = std::min(e.min_S2, d.s.value(i, ch_S2));
    }
    return e;
}

void require_convexity_hypotheses(const Extrema& e, const std::string& where) {
    if (!(e.min_S1 > 0.0) || e.min_S2 < kS2Floor) {
        throw Error(ErrorKind::HypothesisViolation, where + " needs S1 > 0 and S2 >= 0",
                    {{"min_S1", e.min_S1}, {"min_S2", e.min_S2}});
    }
}

bool is_pole_face(const Immersion& M, int axis, double value) {
    const auto& box = M.box();
    return M.closed() && !box.periodic[axis] && (value == box.lo(axis) || value == box.hi(axis));
}

// f must vanish on the non-periodic faces of `rect` that are genuine boundary, and a
// chart-defined f must be single valued on the faces that collapse to a pole.
void check_faces(const Immersion& M, const surface::ParameterBox& rect, const TestFunction& f,
                 const std::vector<int>& grid) {
    const int m = M.m();
    const quad::Grid g(rect, grid);
    for (int j = 0; j < m; ++j) {
        if (rect.periodic[j]) continue;
        for (const double face : {rect.lo(j), rect.hi(j)}) {
            const bool pole = is_pole_face(M, j, face);
            if (pole && !f.chart_defined()) continue;
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (std::size_t i = 0; i < g.size(); ++i) {
                Coords u = g.node(i);
                if (u(j) != g.node(0)(j)) continue;  // one node per face line
                u(j) = face;
                const double v = f.value_at(M, u);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (pole && hi - lo > kSupportTol) {
                throw Error(ErrorKind::Support, "chart-defined test function is not single valued at a pole",
                            {{"axis", j}, {"spread", hi - lo}});
            }
            if (!pole && hi > kSupportTol) {
                throw Error(ErrorKind::Support, "test function does not vanish on the domain boundary",
                            {{"axis", j}, {"face", face}, {"max_value", hi}});
            }
        }
    }
}

// Admissibility of f for a domain: f >= 0 and f = 0 outside it.
void check_support(const Immersion& M, const DomainSpec& omega, const TestFunction& f, const std::vector<int>& grid) {
    if (f.kind == TestFunction::Kind::Constant) {
        if (f.constant == 0.0) return;
        if (!M.closed() || omega.kind != DomainSpec::Kind::FullChart) {
            throw Error(ErrorKind::Support, "a nonzero constant is only admissible on the whole of a closed surface");
        }
        return;
    }
    switch (omega.kind) {
    case DomainSpec::Kind::FullChart:
        check_faces(M, M.box(), f, grid);
        break;
    case DomainSpec::Kind::SubRectangle:
        check_faces(M, quad::sub_box(M.box(), omega.lo, omega.hi), f, grid);
        break;
    case DomainSpec::Kind::Sublevel: {
        const quad::Grid g(M.box(), grid);
        double worst = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const Coords u = g.node(i);
            if (omega.level(u).value > 0.0) worst = std::max(worst, f.value_at(M, u));
        }
        if (worst > kSupportTol) {
            throw Error(ErrorKind::Support, "test function does not vanish outside the domain", {{"max_value", worst}});
        }
        check_faces(M, M.box(), f, grid);
        break;
    }
    }
}

double grad_norm(const CurvatureFrame& fr, const Coords& df) {
    return std::sqrt(std::max(0.0, df.dot(fr.g_inv * df)));
}

// w(r) with exponent e: r^e, or sin(sqrt(kappa) r)^e on the sphere.
double radial_weight(double r, double e, double kappa) {
    if (kappa > 0.0) return std::pow(std::sin(std::sqrt(kappa) * r), e);
    return std::pow(r, e);
}

void check_radii(const std::vector<double>& radii) {
    if (radii.empty()) throw Error(ErrorKind::Config, "radius grid is empty");
    for (std::size_t j = 0; j < radii.size(); ++j) {
        if (!(radii[j] > 0.0) || (j > 0 && !(radii[j] > radii[j - 1]))) {
            throw Error(ErrorKind::Config, "radii must be positive and increasing");
        }
    }
}

double diam_of(const Immersion& M, const DomainSpec& omega, const std::vector<int>& grid) {
    return domain_ball(M, omega, grid).diam();
}

// Ball samples about x0 with channels from fn.
NodeSamples sample_ball(const Immersion& M, const ModelVec& x0, const std::vector<int>& grid, int channels,
                        const measure::MultiIntegrand& fn, int workers) {
    return measure::sample(M, quad::Grid(M.box(), grid), channels, fn, LevelSpec::distance(x0), workers);
}

Extrema ball_extrema(const NodeSamples& s, double r, int ch_S1, int ch_S2) {
    Extrema e;
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
        if (s.level[i] > r) continue;
        e.min_S1 = std::min(e.min_S1, s.value(i, ch_S1));
        e.min_S2 = std::min(e.min_S2, s.value(i, ch_S2));
    }
    return e;
}

void check_shrinker(const Immersion& M, const std::vector<int>& grid, int workers, double* residual) {
    if (!M.space().flat()) throw Error(ErrorKind::Precondition, "self-shrinkers live in Euclidean space");
    if (!M.closed()) throw Error(ErrorKind::Precondition, "self-shrinker checks need a closed surface");
    const double res = shrinker_residual(M, grid, workers);
    if (!(res <= 1e-8)) {
        throw Error(ErrorKind::NotAShrinker, "H + <X, eta>/(2m) does not vanish", {{"residual", res}});
    }
    if (residual) *residual = res;
}

InequalityReport monotone_report(const std::string& name, const std::vector<double>& values,
                                 const std::vector<double>& coarse, const CheckOptions& opt) {
    InequalityReport r;
    r.name = name;
    r.grid = opt.grid;
    double drop = -std::numeric_limits<double>::infinity();
    double ref = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (j + 1 < values.size()) {
            const double scale = std::abs(values[j]) > 0.0 ? std::abs(values[j]) : 1.0;
            drop = std::max(drop, (values[j] - values[j + 1]) / scale);
        }
        if (!coarse.empty()) {
            const double scale = std::abs(values[j]) > 0.0 ? std::abs(values[j]) : 1.0;
            ref = std::max(ref, std::abs(values[j] - coarse[j]) / scale);
        }
    }
    if (values.size() < 2) drop = 0.0;
    r.lhs = drop;
    r.rhs = 0.0;
    r.slack = -drop;
    r.rel_slack = r.slack;
    r.tolerance = opt.tol.monotone;
    r.refinement_estimate = ref;
    if (r.slack == 0.0) {
        r.verdict = Verdict::EqualityCase;
    } else {
        r.verdict = r.slack >= -r.tolerance ? Verdict::Pass : Verdict::Fail;
    }
    return r;
}

} // namespace

double unit_sphere_area(int m) {
    const double a = 0.5 * (m + 1);
    return 2.0 * std::pow(std::numbers::pi, a) / std::tgamma(a);
}

double poincare_constant(double diam, double kappa, int m) {
    if (m < 2) throw Error(ErrorKind::Precondition, "dimension must be at least 2");
    if (!(diam >= 0.0)) throw Error(ErrorKind::Precondition, "diameter must be non-negative");
    if (kappa <= 0.0) return diam / (m - 1);
    const double sk = std::sqrt(kappa);
    if (!(diam < std::numbers::pi / sk)) {
        throw Error(ErrorKind::Precondition, "diameter must stay below pi/sqrt(kappa)",
                    {{"diam", diam}, {"limit", std::numbers::pi / sk}});
    }
    return 2.0 / (sk * (m - 1)) * std::tan(0.5 * sk * diam);
}

measure::EnclosingBall domain_ball(const Immersion& M, const DomainSpec& omega, const std::vector<int>& grid) {
    return measure::min_enclosing_ball(M.space(), measure::domain_points(M, omega, grid));
}

double shrinker_residual(const Immersion& M, const std::vector<int>& grid, int workers) {
    const quad::Grid g(M.box(), grid);
    const int m = M.m();
    const NodeSamples s = measure::sample(
        M, g, 1, [&](const CurvatureFrame& fr, double* out) { out[0] = fr.H + fr.x.dot(fr.eta) / (2.0 * m); },
        LevelSpec::none(), workers);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(s.value(i, 0)));
    return worst;
}

InequalityReport verify_poincare(const Immersion& M, const DomainSpec& omega, const TestFunction& f,
                                 const CheckOptions& opt) {
    require_grid(M, opt);
    check_support(M, omega, f, opt.grid);
    const int m = M.m();
    const double kappa = M.space().kappa();

    if (f.kind == TestFunction::Kind::TentEps) {
        // f_eps = (1/eps) int_{-eps}^0 1[l <= tau] dtau with l the metric-normalized level.
        return evaluate("poincare", opt, [&](const std::vector<int>& grid) {
            const DomainSamples d = sample_domain(
                M, f.omega, grid, 2,
                [](const CurvatureFrame& fr, double* out) {
                    out[0] = fr.S1;
                    out[1] = fr.S2;
                },
                opt.workers, true);
            require_convexity_hypotheses(extrema(d, 0, 1), "poincare");
            constexpr int kIntervals = 16;
            std::vector<double> taus(kIntervals + 1);
            for (int k = 0; k <= kIntervals; ++k) taus[k] = -f.eps + f.eps * k / kIntervals;
            const std::vector<double> a1 = measure::sum_below(d.s, 0, taus, opt.workers);
            const std::vector<double> a2 = measure::sum_below(d.s, 1, taus, opt.workers);
            auto simpson = [&](const std::vector<double>& a) {
                double acc = a.front() + a.back();
                for (int k = 1; k < kIntervals; ++k) acc += (k % 2 ? 4.0 : 2.0) * a[k];
                return acc * (f.eps / kIntervals) / 3.0;
            };
            const double int_fS1 = simpson(a1) / f.eps;
            const double int_fS2 = simpson(a2) / f.eps;
            const double int_gradS1 = (a1.back() - a1.front()) / f.eps;
            const double diam = diam_of(M, f.omega, grid);
            const double C = poincare_constant(diam, kappa, m);
            return Sides{int_fS1, C * (int_gradS1 + int_fS2),
                         {{"C", C}, {"diam", diam}, {"eps", f.eps}, {"test_function", f.name()},
                          {"domain", f.omega.label}}};
        });
    }

    return evaluate("poincare", opt, [&](const std::vector<int>& grid) {
        const DomainSamples d = sample_domain(
            M, omega, grid, 4,
            [&](const CurvatureFrame& fr, double* out) {
                Coords df;
                const double v = f.eval(M, fr, &df);
                out[0] = v * fr.S1;
                out[1] = grad_norm(fr, df) * fr.S1 + fr.S2 * v;
                out[2] = fr.S1;
                out[3] = fr.S2;
            },
            opt.workers);
        require_convexity_hypotheses(extrema(d, 2, 3), "poincare");
        const double lhs = d.sum(0);
        const double integral = d.sum(1);
        const double diam = diam_of(M, omega, grid);
        const double C = poincare_constant(diam, kappa, m);
        return Sides{lhs, C * integral,
                     {{"C", C}, {"diam", diam}, {"test_function", f.name()}, {"domain", omega.label}}};
    });
}

InequalityReport verify_isoperimetric(const Immersion& M, const DomainSpec& omega, const CheckOptions& opt) {
    require_grid(M, opt);
    const int m = M.m();
    const double kappa = M.space().kappa();
    const bool whole = omega.kind == DomainSpec::Kind::FullChart;
    if (whole && !M.closed()) {
        throw Error(ErrorKind::Precondition, "the domain must stay away from the boundary of the surface");
    }
    if (!whole && m != 2) {
        throw Error(ErrorKind::Precondition, "boundary terms are only available for surfaces (m = 2)");
    }
    return evaluate("isoperimetric", opt, [&](const std::vector<int>& grid) {
        const DomainSamples d = sample_domain(
            M, omega, grid, 2,
            [](const CurvatureFrame& fr, double* out) {
                out[0] = fr.S1;
                out[1] = fr.S2;
            },
            opt.workers);
        require_convexity_hypotheses(extrema(d, 0, 1), "isoperimetric");
        const double int_S1 = d.sum(0);
        const double int_S2 = d.sum(1);
        double boundary = 0.0;
        if (!whole) {
            boundary = measure::boundary_integral(M, omega, [](const CurvatureFrame& fr) { return fr.S1; },
                                                  {grid, opt.workers});
        }
        const double diam = diam_of(M, omega, grid);
        const double C = poincare_constant(diam, kappa, m);
        return Sides{int_S1, C * (boundary + int_S2),
                     {{"C", C}, {"diam", diam}, {"boundary_S1", boundary}, {"domain", omega.label}}};
    });
}

InequalityReport verify_mean_curvature_integral(const Immersion& M, const CheckOptions& opt) {
    require_grid(M, opt);
    if (!M.closed()) throw Error(ErrorKind::Precondition, "mean curvature integral check needs a closed surface");
    const int m = M.m();
    const double kappa = M.space().kappa();
    const bool gauss_bonnet = m == 2 && M.space().flat();
    return evaluate("mean_curvature_integral", opt, [&](const std::vector<int>& grid) {
        const DomainSamples d = sample_domain(
            M, DomainSpec::full_chart(), grid, 4,
            [&](const CurvatureFrame& fr, double* out) {
                out[0] = fr.H;
                out[1] = fr.R - kappa;
                out[2] = fr.S1;
                out[3] = fr.S2;
            },
            opt.workers);
        require_convexity_hypotheses(extrema(d, 2, 3), "mean_curvature_integral");
        const double int_H = d.sum(0);
        const double int_R = d.sum(1);
        const double diam = diam_of(M, DomainSpec::full_chart(), grid);
        double rhs;
        if (gauss_bonnet) {
            rhs = 2.0 * std::numbers::pi * diam;
        } else if (kappa <= 0.0) {
            rhs = 0.5 * diam * int_R;
        } else {
            const double sk = std::sqrt(kappa);
            if (!(diam < std::numbers::pi / sk)) {
                throw Error(ErrorKind::Precondition, "diameter must stay below pi/sqrt(kappa)", {{"diam", diam}});
            }
            rhs = std::tan(0.5 * sk * diam) / sk * int_R;
        }
        return Sides{int_H, rhs,
                     {{"diam", diam},
                      {"int_R_minus_kappa", int_R},
                      {"two_pi_diam", 2.0 * std::numbers::pi * diam},
                      {"form", std::string(gauss_bonnet ? "two_pi_diam" : "curvature_integral")}}};
    });
}

InequalityReport verify_diameter_bound(const Immersion& M, const CheckOptions& opt) {
    require_grid(M, opt);
    if (!M.closed()) throw Error(ErrorKind::Precondition, "diameter bound needs a closed surface");
    const double kappa = M.space().kappa();
    if (kappa > 0.0) throw Error(ErrorKind::Precondition, "diameter bound is stated for kappa <= 0");
    InequalityReport r = evaluate("diameter_bound", opt, [&](const std::vector<int>& grid) {
        const DomainSamples d = sample_domain(
            M, DomainSpec::full_chart(), grid, 2,
            [](const CurvatureFrame& fr, double* out) {
                out[0] = fr.H;
                out[1] = fr.R;
            },
            opt.workers);
        double min_H = std::numeric_limits<double>::infinity();
        double max_R = -min_H, min_R = min_H;
        for (std::size_t i = 0; i < d.s.grid.size(); ++i) {
            min_H = std::min(min_H, d.s.value(i, 0));
            max_R = std::max(max_R, d.s.value(i, 1));
            min_R = std::min(min_R, d.s.value(i, 1));
        }
        if (!(min_H > 0.0) || min_R - kappa < kS2Floor) {
            throw Error(ErrorKind::HypothesisViolation, "diameter bound needs H > 0 and R >= kappa",
                        {{"min_H", min_H}, {"min_R", min_R}});
        }
        const double diam = diam_of(M, DomainSpec::full_chart(), grid);
        const double gap = max_R - kappa;
        Sides s{0.0, diam, {{"min_H", min_H}, {"max_R", max_R}, {"diam", diam}}};
        if (gap <= 1e-14) {
            s.params["note"] = std::string("vacuous: max R equals kappa");
        } else {
            s.lhs = 2.0 * min_H / gap;
        }
        return s;
    });
    return r;
}

InequalityReport verify_self_shrinker_volume(const Immersion& M, const CheckOptions& opt) {
    require_grid(M, opt);
    double residual = 0.0;
    check_shrinker(M, opt.grid, opt.workers, &residual);
    const int m = M.m();
    InequalityReport r = evaluate("self_shrinker_volume", opt, [&](const std::vector<int>& grid) {
        const DomainSamples d = sample_domain(
            M, DomainSpec::full_chart(), grid, 3,
            [](const CurvatureFrame& fr, double* out) {
                out[0] = -fr.x.dot(fr.eta);
                out[1] = fr.R;
                out[2] = fr.H;
            },
            opt.workers);
        double min_H = std::numeric_limits<double>::infinity(), min_R = min_H;
        for (std::size_t i = 0; i < d.s.grid.size(); ++i) {
            min_H = std::min(min_H, d.s.value(i, 2));
            min_R = std::min(min_R, d.s.value(i, 1));
        }
        if (!(min_H > 0.0) || min_R < kS2Floor) {
            throw Error(ErrorKind::HypothesisViolation, "shrinker volume bound needs H > 0 and R >= 0",
                        {{"min_H", min_H}, {"min_R", min_R}});
        }
        const double vol = d.sum(0) / (m + 1);
        const double int_R = d.sum(1);
        const double int_H = d.sum(2);
        const double diam = diam_of(M, DomainSpec::full_chart(), grid);
        return Sides{vol, double(m) / (m + 1) * diam * int_R,
                     {{"volume", vol},
                      {"diam", diam},
                      {"int_R", int_R},
                      {"int_H", int_H},
                      {"identity", (m + 1.0) / (2.0 * m) * vol}}};
    });
    r.params["shrinker_residual"] = residual;
    return r;
}

std::vector<InequalityReport> verify_volume_estimate(const Immersion& M, const CheckOptions& opt) {
    require_grid(M, opt);
    if (!M.closed()) throw Error(ErrorKind::Precondition, "volume estimate needs a closed surface");
    const double kappa = M.space().kappa();
    if (kappa > 0.0) throw Error(ErrorKind::Precondition, "volume estimate is stated for kappa <= 0");
    const int m = M.m();
    const double omega_m = unit_sphere_area(m);
    const double K = std::pow(2.0, m - 1) * std::pow(m + 1.0, 1.0 + 1.0 / m) /
                     (m * double((m - 1) * (m - 1)) * std::pow(omega_m, 1.0 / m));
    std::vector<InequalityReport> out;
    for (const bool proof : {false, true}) {
        const double e = proof ? double(m) / (m - 1) : double(m - 1) / m;
        out.push_back(evaluate(proof ? "volume_estimate/proof_exponent" : "volume_estimate", opt,
                               [&](const std::vector<int>& grid) {
                                   const DomainSamples d = sample_domain(
                                       M, DomainSpec::full_chart(), grid, 3,
                                       [](const CurvatureFrame& fr, double* o) {
                                           o[0] = 1.0;
                                           o[1] = fr.S1;
                                           o[2] = fr.S2;
                                       },
                                       opt.workers);
                                   require_convexity_hypotheses(extrema(d, 1, 2), "volume_estimate");
                                   const double vol = d.sum(0);
                                   const double int_S2 = d.sum(2);
                                   const double diam = diam_of(M, DomainSpec::full_chart(), grid);
                                   return Sides{std::pow(vol, e), K * diam * int_S2,
                                                {{"volume", vol},
                                                 {"exponent", e},
                                                 {"constant", K},
                                                 {"omega_m", omega_m},
                                                 {"diam", diam},
                                                 {"int_S2", int_S2}}};
                               }));
    }
    return out;
}

InequalityReport verify_mean_value(const Immersion& M, const TestFunction& f, const ModelVec& x0, double s, double t,
                                   ExponentMode mode, const CheckOptions& opt) {
    require_grid(M, opt);
    const auto& space = M.space();
    space.check_on_model(x0);
    const int m = M.m();
    const double kappa = space.kappa();
    if (!(s > 0.0) || !(t > s)) throw Error(ErrorKind::Config, "mean value radii need 0 < s < t");
    if (kappa > 0.0 && !(t < 0.5 * std::numbers::pi / std::sqrt(kappa))) {
        throw Error(ErrorKind::Precondition, "outer radius must stay below pi/(2 sqrt(kappa))", {{"t", t}});
    }
    measure::check_ball(M, x0, t, opt.grid);
    if (f.chart_defined()) check_faces(M, M.box(), f, opt.grid);
    const bool convex = mode == ExponentMode::Convex;
    const double e_w = convex ? m - 1.0 : 0.5 * (m - 1);
    const double e_W = convex ? double(m) : 0.5 * (m + 1);
    const double factor = convex ? 1.0 : 0.5;
    const double sk = kappa > 0.0 ? std::sqrt(kappa) : 0.0;
    const int N = std::max(2, opt.radial_steps);

    return evaluate("mean_value", opt, [&](const std::vector<int>& grid) {
        const NodeSamples smp = sample_ball(
            M, x0, grid, 5,
            [&](const CurvatureFrame& fr, double* out) {
                Coords df;
                const double v = f.eval(M, fr, &df);
                const double rho = ambient::distance_unchecked(space, x0, fr.x);
                const ModelVec n = ambient::grad_distance_unchecked(space, x0, fr.x);
                Coords a(m);
                for (int j = 0; j < m; ++j) a(j) = space.inner(n, fr.tangents.col(j));
                const Coords p1 = surface::newton_apply(fr, fr.g_inv * df);
                const double n_eta = space.inner(n, fr.eta);
                // ric(grad rho, eta) = m kappa <(grad rho)^T, eta> vanishes for the tangential part
                const ModelVec nT = n - n_eta * fr.eta;
                const double ric = m * kappa * space.inner(nT, fr.eta);
                const double w = kappa > 0.0 ? std::sin(sk * rho) : rho;
                out[0] = v * fr.S1;
                out[1] = w * (a.dot(p1) + 2.0 * fr.S2 * v * n_eta + v * ric);
                out[2] = fr.S1;
                out[3] = fr.S2;
                out[4] = fr.k.minCoeff();
            },
            opt.workers);
        const Extrema ex = ball_extrema(smp, t, 2, 3);
        require_convexity_hypotheses(ex, "mean_value");
        if (convex) {
            double min_k = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < smp.grid.size(); ++i) {
                if (smp.level[i] <= t) min_k = std::min(min_k, smp.value(i, 4));
            }
            if (min_k < kS2Floor) {
                throw Error(ErrorKind::HypothesisViolation, "convex exponents need A >= 0", {{"min_k", min_k}});
            }
        }
        std::vector<double> radii(N + 1);
        for (int k = 0; k <= N; ++k) radii[k] = s + (t - s) * k / N;
        const std::vector<double> psi = measure::sum_below(smp, 1, radii, opt.workers);
        const std::vector<double> phi = measure::sum_below(smp, 0, {s, t}, opt.workers);
        std::vector<double> g(N + 1);
        for (int k = 0; k <= N; ++k) g[k] = psi[k] / radial_weight(radii[k], e_W, kappa);
        double integral = 0.5 * (g.front() + g.back());
        for (int k = 1; k < N; ++k) integral += g[k];
        integral *= (t - s) / N;
        const double lower = factor * integral;
        const double difference = phi[1] / radial_weight(t, e_w, kappa) - phi[0] / radial_weight(s, e_w, kappa);
        return Sides{lower, difference,
                     {{"s", s},
                      {"t", t},
                      {"ball_difference", difference},
                      {"bracket_integral", lower},
                      {"Phi_s", phi[0]},
                      {"Phi_t", phi[1]},
                      {"exponent", e_w},
                      {"mode", std::string(convex ? "convex" : "general")},
                      {"radial_steps", double(N)},
                      {"test_function", f.name()}}};
    });
}

InequalityReport verify_divergence_identity(const Immersion& M, const TestFunction& f, const ModelVec& x0,
                                            const CheckOptions& opt) {
    require_grid(M, opt);
    const auto& space = M.space();
    space.check_on_model(x0);
    check_support(M, DomainSpec::full_chart(), f, opt.grid);
    const int m = M.m();
    const surface::FieldSpec field = surface::FieldSpec::radial(x0);

    auto parts = [&](const std::vector<int>& grid) {
        const DomainSamples d = sample_domain(
            M, DomainSpec::full_chart(), grid, 2,
            [&](const CurvatureFrame& fr, double* out) {
                Coords df;
                const double v = f.eval(M, fr, &df);
                const ModelVec X = ambient::radial_field_unchecked(space, x0, fr.x);
                const Coords XT = fr.tangential_coords(space, X);
                out[0] = df.dot(surface::newton_apply(fr, XT));
                if (v == 0.0) {
                    out[1] = 0.0;
                    return;
                }
                const double X_eta = space.inner(X, fr.eta);
                const double ric = m * space.kappa() * space.inner(fr.push_forward(XT), fr.eta);
                out[1] = v * (surface::p1_trace_term(fr, space, field) + ric + 2.0 * fr.S2 * X_eta);
            },
            opt.workers);
        return std::pair{d.sum(0), d.sum(1)};
    };

    const auto [p1, p2] = parts(opt.grid);
    InequalityReport r;
    r.name = "divergence_identity";
    r.lhs = p1;
    r.rhs = -p2;
    r.slack = r.rhs - r.lhs;
    const double scale = std::abs(p1) + std::abs(p2);
    r.rel_slack = scale > 0.0 ? r.slack / scale : 0.0;
    r.tolerance = opt.tol.identity_rel;
    r.grid = opt.grid;
    if (opt.refinement) {
        const auto [c1, c2] = parts(quad::coarsen(opt.grid));
        r.refinement_estimate = std::abs((p1 + p2) - (c1 + c2));
    }
    // Both parts can vanish pointwise (sphere about its center): then only roundoff is left.
    const bool tiny = std::abs(p1 + p2) <= opt.tol.abs;
    r.verdict = tiny || std::abs(r.rel_slack) <= r.tolerance ? Verdict::EqualityCase : Verdict::Fail;
    r.params = {{"part_gradient", p1},
                {"part_divergence", p2},
                {"residual", p1 + p2},
                {"relative_residual", std::abs(r.rel_slack)},
                {"test_function", f.name()}};
    return r;
}

ProfileReport monotonicity_h(const Immersion& M, const ModelVec& x0, std::optional<double> lambda, double alpha,
                             double R0, const std::vector<double>& radii, const CheckOptions& opt) {
    require_grid(M, opt);
    const auto& space = M.space();
    space.check_on_model(x0);
    check_radii(radii);
    const int m = M.m();
    const double kappa = space.kappa();
    if (!(alpha > 0.0) || alpha > 1.0) throw Error(ErrorKind::Config, "alpha must lie in (0, 1]");
    if (!(R0 > 0.0) || !(R0 < space.injectivity_radius())) {
        throw Error(ErrorKind::Precondition, "R0 must lie in (0, injectivity radius)", {{"R0", R0}});
    }
    if (kappa > 0.0 && kappa * R0 * R0 > std::numbers::pi * std::numbers::pi) {
        throw Error(ErrorKind::Precondition, "kappa R0^2 must not exceed pi^2", {{"R0", R0}});
    }
    if (radii.back() > R0) throw Error(ErrorKind::Precondition, "radii must not exceed R0", {{"R0", R0}});
    if (lambda && !(*lambda >= 0.0)) throw Error(ErrorKind::Config, "lambda must be non-negative");
    measure::check_ball(M, x0, radii.back(), opt.grid);

    auto profiles = [&](const std::vector<int>& grid) {
        const NodeSamples smp = sample_ball(
            M, x0, grid, 2,
            [](const CurvatureFrame& fr, double* out) {
                out[0] = fr.S1;
                out[1] = fr.S2;
            },
            opt.workers);
        return std::pair{measure::sum_below(smp, 0, radii, opt.workers),
                         measure::sum_below(smp, 1, radii, opt.workers)};
    };
    const auto [int_S1, int_S2] = profiles(opt.grid);

    double lambda_min = 0.0;
    for (std::size_t j = 0; j < radii.size(); ++j) {
        const double denom = std::pow(radii[j] / R0, alpha - 1.0) * int_S1[j];
        if (!(denom > 0.0)) {
            throw Error(ErrorKind::HypothesisViolation, "ball integral of S1 must be positive", {{"r", radii[j]}});
        }
        lambda_min = std::max(lambda_min, int_S2[j] / (alpha * denom));
    }
    const double L = lambda.value_or(lambda_min);
    if (L < lambda_min * (1.0 - 1e-9) - 1e-12) {
        throw Error(ErrorKind::HypothesisViolation, "lambda is below the minimal admissible value",
                    {{"minimal_lambda", lambda_min}, {"lambda", L}});
    }
    auto monitor = [&](const std::vector<double>& integral) {
        std::vector<double> h(radii.size());
        for (std::size_t j = 0; j < radii.size(); ++j) {
            h[j] = std::exp(L * std::pow(R0, 1.0 - alpha) * std::pow(radii[j], alpha)) /
                   radial_weight(radii[j], 0.5 * (m - 1), kappa) * integral[j];
        }
        return h;
    };
    ProfileReport out;
    out.monitor = monitor(int_S1);
    out.monitor_name = "h";
    out.integral = {x0, radii, int_S1, std::vector<double>(radii.size(), 0.0), "S1"};
    std::vector<double> coarse_h;
    if (opt.refinement) {
        const auto coarse = profiles(quad::coarsen(opt.grid)).first;
        for (std::size_t j = 0; j < radii.size(); ++j) {
            out.integral.refinement_estimate[j] = std::abs(int_S1[j] - coarse[j]);
        }
        coarse_h = monitor(coarse);
    }
    out.report = monotone_report("monotonicity_h", out.monitor, coarse_h, opt);
    out.report.params = {{"lambda", L}, {"minimal_lambda", lambda_min}, {"alpha", alpha}, {"R0", R0},
                         {"r_min", radii.front()}, {"r_max", radii.back()}, {"radii", double(radii.size())},
                         {"lambda_source", std::string(lambda ? "given" : "fitted")}};
    return out;
}

ProfileReport monotonicity_phi_shrinker(const Immersion& M, const ModelVec& x0, std::optional<double> lambda,
                                        const std::vector<double>& radii, const CheckOptions& opt) {
    require_grid(M, opt);
    check_shrinker(M, opt.grid, opt.workers, nullptr);
    M.space().check_on_model(x0);
    check_radii(radii);
    measure::check_ball(M, x0, radii.back(), opt.grid);
    const int m = M.m();

    auto sampled = [&](const std::vector<int>& grid) {
        return sample_ball(
            M, x0, grid, 2,
            [](const CurvatureFrame& fr, double* out) {
                out[0] = fr.H;
                out[1] = fr.R;
            },
            opt.workers);
    };
    const NodeSamples smp = sampled(opt.grid);
    double min_H = std::numeric_limits<double>::infinity(), min_R = min_H, max_R = -min_H;
    for (std::size_t i = 0; i < smp.grid.size(); ++i) {
        min_H = std::min(min_H, smp.value(i, 0));
        min_R = std::min(min_R, smp.value(i, 1));
        max_R = std::max(max_R, smp.value(i, 1));
    }
    if (!(min_H > 0.0) || min_R < kS2Floor) {
        throw Error(ErrorKind::HypothesisViolation, "shrinker monotonicity needs H > 0 and R >= 0",
                    {{"min_H", min_H}, {"min_R", min_R}});
    }
    const double L = lambda.value_or(max_R);
    if (L < max_R * (1.0 - 1e-9) - 1e-12) {
        throw Error(ErrorKind::HypothesisViolation, "lambda is below max R", {{"lambda", L}, {"max_R", max_R}});
    }
    const double e = (m - 1) * (0.5 - m * L);
    auto monitor = [&](const std::vector<double>& integral) {
        std::vector<double> phi(radii.size());
        for (std::size_t j = 0; j < radii.size(); ++j) phi[j] = std::pow(radii[j], -e) * integral[j];
        return phi;
    };
    const std::vector<double> int_H = measure::sum_below(smp, 0, radii, opt.workers);
    ProfileReport out;
    out.monitor = monitor(int_H);
    out.monitor_name = "phi";
    out.integral = {x0, radii, int_H, std::vector<double>(radii.size(), 0.0), "H"};
    std::vector<double> coarse_phi;
    if (opt.refinement) {
        const auto coarse = measure::sum_below(sampled(quad::coarsen(opt.grid)), 0, radii, opt.workers);
        for (std::size_t j = 0; j < radii.size(); ++j) {
            out.integral.refinement_estimate[j] = std::abs(int_H[j] - coarse[j]);
        }
        coarse_phi = monitor(coarse);
    }
    out.report = monotone_report("monotonicity_phi_shrinker", out.monitor, coarse_phi, opt);
    out.report.params = {{"lambda", L},
                         {"max_R", max_R},
                         {"exponent", e},
                         {"divergence_regime", L < 1.0 / (2.0 * m) ? 1.0 : 0.0},
                         {"r_min", radii.front()},
                         {"r_max", radii.back()}};
    return out;
}

std::vector<InequalityReport> verify_lp(const Immersion& M, const ModelVec& x0, double s, double t, double p, double c,
                                        std::optional<double> lambda, double R0, const CheckOptions& opt) {
    require_grid(M, opt);
    const auto& space = M.space();
    space.check_on_model(x0);
    const int m = M.m();
    const double kappa = space.kappa();
    if (!(p > 1.0)) throw Error(ErrorKind::Config, "p must exceed 1");
    if (!(c > 0.0)) throw Error(ErrorKind::Config, "c must be positive");
    if (!(s > 0.0) || s > t || t > R0) throw Error(ErrorKind::Config, "L^p radii need 0 < s <= t <= R0");
    if (kappa > 0.0 && R0 > 0.5 * std::numbers::pi / std::sqrt(kappa)) {
        throw Error(ErrorKind::Precondition, "R0 must not exceed pi/(2 sqrt(kappa))", {{"R0", R0}});
    }
    measure::check_ball(M, x0, R0, opt.grid);
    const double e = 0.5 * (m - 1);
    const double cp = std::pow(c, 1.0 - 1.0 / p);

    // int_s^t w(r)^{-1/p} dr
    double radial_int = 0.0;
    if (t > s) {
        const quad::Rule1D rule = quad::gauss_legendre(64, s, t);
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            radial_int += rule.weights[k] * std::pow(radial_weight(rule.nodes[k], e, kappa), -1.0 / p);
        }
    }

    double fitted = 0.0;
    double L = 0.0;
    auto sides = [&](const std::vector<int>& grid) {
        const NodeSamples smp = sample_ball(
            M, x0, grid, 3,
            [&](const CurvatureFrame& fr, double* out) {
                out[0] = fr.S1;
                out[1] = std::pow(std::max(fr.S2, 0.0), p);
                out[2] = fr.S2;
            },
            opt.workers);
        const Extrema ex = ball_extrema(smp, R0, 0, 2);
        if (ex.min_S1 < c * (1.0 - 1e-10) || ex.min_S2 < kS2Floor) {
            throw Error(ErrorKind::HypothesisViolation, "L^p bound needs S1 >= c and S2 >= 0",
                        {{"min_S1", ex.min_S1}, {"c", c}, {"min_S2", ex.min_S2}});
        }
        const double lam_min = std::pow(measure::sum_below(smp, 1, R0), 1.0 / p);
        const std::vector<double> phi = measure::sum_below(smp, 0, {s, t}, opt.workers);
        const double Qs = std::pow(phi[0] / radial_weight(s, e, kappa), 1.0 / p);
        const double Qt = std::pow(phi[1] / radial_weight(t, e, kappa), 1.0 / p);
        return std::tuple{lam_min, Qs, Qt};
    };

    std::vector<InequalityReport> out;
    for (const bool statement : {false, true}) {
        double K_factor;
        if (!statement) {
            K_factor = 1.0 / (p * cp);
        } else {
            const double d = m - 1 - 2.0 * p;
            if (d == 0.0) break;
            K_factor = (kappa > 0.0 ? (m - 1.0) : 2.0) / (cp * d);
        }
        out.push_back(evaluate(statement ? "lp/statement" : "lp", opt, [&](const std::vector<int>& grid) {
            const auto [lam_min, Qs, Qt] = sides(grid);
            if (grid == opt.grid) {
                fitted = lam_min;
                L = lambda.value_or(lam_min);
                if (L < lam_min * (1.0 - 1e-9) - 1e-12) {
                    throw Error(ErrorKind::HypothesisViolation, "lambda is below the L^p norm of S2",
                                {{"minimal_lambda", lam_min}, {"lambda", L}});
                }
            }
            const double K = L * K_factor;
            return Sides{Qs, Qt + K * radial_int,
                         {{"p", p},
                          {"c", c},
                          {"lambda", L},
                          {"minimal_lambda", fitted},
                          {"R0", R0},
                          {"s", s},
                          {"t", t},
                          {"constant", K},
                          {"radial_integral", radial_int},
                          {"constant_form", std::string(statement ? "statement" : "proof")}}};
        }));
    }
    if (out.size() == 1) out.front().params["statement_form"] = std::string("skipped: m - 1 - 2p = 0");
    return out;
}

} // namespace curvlab::verify
