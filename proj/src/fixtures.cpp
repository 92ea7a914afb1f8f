#include "curvlab/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "curvlab/autodiff.hpp"
#include "curvlab/error.hpp"

namespace curvlab::fixtures {

namespace {

using ambient::SpaceForm;
using surface::ImmersionSpec;
using surface::ParameterBox;

constexpr double kPi = std::numbers::pi;

// Unit vector in R^{m+1} in hyperspherical angles; the last angle is the periodic longitude.
template <class S>
void unit_direction(int m, const S* u, S* n) {
    using std::cos;
    using std::sin;
    if (m == 2) {
        n[0] = sin(u[0]) * cos(u[1]);
        n[1] = sin(u[0]) * sin(u[1]);
        n[2] = cos(u[0]);
    } else {
        n[0] = sin(u[0]) * sin(u[1]) * cos(u[2]);
        n[1] = sin(u[0]) * sin(u[1]) * sin(u[2]);
        n[2] = sin(u[0]) * cos(u[1]);
        n[3] = cos(u[0]);
    }
}

ParameterBox angle_box(int m) {
    ParameterBox b;
    b.lo = Coords::Zero(m);
    b.hi = Coords::Constant(m, kPi);
    b.hi(m - 1) = 2.0 * kPi;
    b.periodic.assign(m, false);
    b.periodic[m - 1] = true;
    return b;
}

// Chart and exact jet from one templated evaluator f(const S* u, S* x).
template <class F>
ImmersionSpec spec_from(std::string name, const SpaceForm& space, ParameterBox box, bool closed, F f) {
    ImmersionSpec spec;
    spec.name = std::move(name);
    spec.space = space;
    spec.m = box.dim();
    spec.box = std::move(box);
    spec.closed = closed;
    const int m = spec.m;
    const int n = space.model_dim();
    spec.chart = [f, m, n](const Coords& u) {
        double uu[kMaxIntrinsicDim];
        double x[kMaxModelDim] = {};
        for (int i = 0; i < m; ++i) uu[i] = u(i);
        f(uu, x);
        ModelVec out(n);
        for (int k = 0; k < n; ++k) out(k) = x[k];
        return out;
    };
    spec.jet = [f, m, n](const Coords& u) {
        ad::D2 uu[kMaxIntrinsicDim];
        ad::D2 x[kMaxModelDim];
        for (int i = 0; i < m; ++i) uu[i] = ad::D2::variable(u(i), i);
        f(uu, x);
        surface::Jet j;
        j.x.resize(n);
        j.d1.resize(n, m);
        for (int a = 0; a < m; ++a) {
            for (int b = 0; b < m; ++b) j.second(a, b).resize(n);
        }
        for (int k = 0; k < n; ++k) {
            j.x(k) = x[k].v;
            for (int a = 0; a < m; ++a) {
                j.d1(k, a) = x[k].g[a];
                for (int b = 0; b < m; ++b) j.second(a, b)(k) = x[k].h[a * kMaxIntrinsicDim + b];
            }
        }
        return j;
    };
    return spec;
}

double unit_sphere_area(int m) {
    return 2.0 * std::pow(kPi, 0.5 * (m + 1)) / std::tgamma(0.5 * (m + 1));
}

std::pair<double, double> sampled_min_s1_s2(const Immersion& M) {
    std::vector<int> counts(M.m(), 24);
    counts.back() = 48;
    const quad::Grid g(M.box(), counts);
    double s1 = std::numeric_limits<double>::infinity();
    double s2 = s1;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto f = surface::curvature_frame(M, g.node(i));
        s1 = std::min(s1, f.S1);
        s2 = std::min(s2, f.S2);
    }
    return {s1, s2};
}

} // namespace

bool Fixture::has_tag(const std::string& t) const { return std::find(tags.begin(), tags.end(), t) != tags.end(); }

Fixture make_sphere(int m, double r, const ModelVec& center) {
    if (m != 2 && m != 3) throw Error(ErrorKind::Config, "sphere fixture needs m in {2, 3}");
    if (!(r > 0.0)) throw Error(ErrorKind::Config, "sphere radius must be positive");
    ModelVec c = center.size() == 0 ? ModelVec::Zero(m + 1) : center;
    if (c.size() != m + 1) throw Error(ErrorKind::Config, "sphere center has the wrong dimension");
    std::array<double, kMaxModelDim> cc{};
    for (int k = 0; k <= m; ++k) cc[k] = c(k);
    auto f = [m, r, cc](const auto* u, auto* x) {
        unit_direction(m, u, x);
        for (int k = 0; k <= m; ++k) x[k] = cc[k] + r * x[k];
    };
    ImmersionSpec spec = spec_from("sphere", SpaceForm::euclidean(m + 1), angle_box(m), true, f);
    Fixture fx{Immersion(std::move(spec)), {"closed", "equality_case"}, {}};
    fx.meta["radius"] = r;
    fx.meta["principal_curvature"] = 1.0 / r;
    fx.meta["area"] = unit_sphere_area(m) * std::pow(r, m);
    return fx;
}

Fixture make_ellipsoid(double a, double b, double c) {
    const double lo = std::min({a, b, c}), hi = std::max({a, b, c});
    if (!(lo > 0.0)) throw Error(ErrorKind::Config, "ellipsoid semi-axes must be positive");
    if (hi > 2.0 * lo) throw Error(ErrorKind::Config, "ellipsoid semi-axes must be within a factor 2 of each other");
    auto f = [a, b, c](const auto* u, auto* x) {
        unit_direction(2, u, x);
        x[0] = a * x[0];
        x[1] = b * x[1];
        x[2] = c * x[2];
    };
    Fixture fx{Immersion(spec_from("ellipsoid", SpaceForm::euclidean(3), angle_box(2), true, f)), {"closed"}, {}};
    fx.meta["a"] = a;
    fx.meta["b"] = b;
    fx.meta["c"] = c;
    return fx;
}

std::pair<double, double> ellipsoid_curvatures(double a, double b, double c, const ModelVec& x) {
    const double a2 = a * a, b2 = b * b, c2 = c * c;
    const double h2 = x(0) * x(0) / (a2 * a2) + x(1) * x(1) / (b2 * b2) + x(2) * x(2) / (c2 * c2);
    const double h = std::sqrt(h2);
    const double K = 1.0 / (a2 * b2 * c2 * h2 * h2);
    const double H = (a2 + b2 + c2 - x.squaredNorm()) / (2.0 * a2 * b2 * c2 * h2 * h);
    return {H, K};
}

Fixture make_geodesic_sphere(const SpaceForm& space, double a) {
    const int m = space.hypersurface_dim();
    if (space.flat()) throw Error(ErrorKind::Config, "geodesic spheres need a sphere or hyperbolic ambient");
    if (m != 2 && m != 3) throw Error(ErrorKind::Config, "geodesic sphere fixture needs m in {2, 3}");
    if (!(a > 0.0)) throw Error(ErrorKind::Config, "geodesic radius must be positive");
    ImmersionSpec spec;
    double k = 0.0;
    if (space.kind() == ambient::Kind::Sphere) {
        const double s = std::sqrt(space.kappa());
        if (!(a < kPi / (2.0 * s))) {
            throw Error(ErrorKind::Config, "geodesic radius must stay below pi/(2 sqrt(kappa))");
        }
        const double ca = std::cos(s * a) / s, sa = std::sin(s * a) / s;
        auto f = [m, ca, sa](const auto* u, auto* x) {
            unit_direction(m, u, x);
            for (int i = 0; i <= m; ++i) x[i] = sa * x[i];
            x[m + 1] = ca;
        };
        spec = spec_from("geodesic_sphere", space, angle_box(m), true, f);
        k = s / std::tan(s * a);
    } else {
        const double s = std::sqrt(-space.kappa());
        const double ca = std::cosh(s * a) / s, sa = std::sinh(s * a) / s;
        auto f = [m, ca, sa](const auto* u, auto* x) {
            unit_direction(m, u, x + 1);
            for (int i = 1; i <= m + 1; ++i) x[i] = sa * x[i];
            x[0] = ca;
        };
        spec = spec_from("geodesic_sphere", space, angle_box(m), true, f);
        k = s / std::tanh(s * a);
    }
    Fixture fx{Immersion(std::move(spec)), {}, {}};
    fx.meta["principal_curvature"] = k;
    fx.tags = {"closed"};
    fx.meta["radius"] = a;
    return fx;
}

Fixture make_radial_graph(const std::vector<Monomial>& terms, std::string name) {
    for (const Monomial& t : terms) {
        for (int p : t.powers) {
            if (p < 0 || p > 8) throw Error(ErrorKind::Config, "radial graph exponents must be in [0, 8]");
        }
    }
    auto f = [terms](const auto* u, auto* x) {
        unit_direction(2, u, x);
        using S = std::remove_cvref_t<decltype(x[0])>;
        S r = 1.0;
        for (const Monomial& t : terms) {
            S term = t.coef;
            for (int k = 0; k < 3; ++k) {
                for (int e = 0; e < t.powers[k]; ++e) term = term * x[k];
            }
            r = r + term;
        }
        for (int k = 0; k < 3; ++k) x[k] = r * x[k];
    };
    Fixture fx{Immersion(spec_from(std::move(name), SpaceForm::euclidean(3), angle_box(2), true, f)), {"closed"}, {}};
    const auto [s1, s2] = sampled_min_s1_s2(fx.M);
    fx.meta["min_S1"] = s1;
    fx.meta["min_S2"] = s2;
    return fx;
}

Fixture make_convex_graph(double eps, int l_max, std::uint64_t seed) {
    if (!(eps >= 0.0) || eps > 0.05) throw Error(ErrorKind::Config, "convex graph amplitude must be in [0, 0.05]");
    if (l_max < 1 || l_max > 6) throw Error(ErrorKind::Config, "convex graph degree must be in [1, 6]");
    std::vector<std::array<int, 3>> powers;
    for (int d = 1; d <= l_max; ++d) {
        for (int i = d; i >= 0; --i) {
            for (int j = d - i; j >= 0; --j) powers.push_back({i, j, d - i - j});
        }
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    constexpr int kMaxAttempts = 20;
    for (int attempt = 1; attempt <= kMaxAttempts; ++attempt) {
        std::vector<Monomial> terms;
        double l1 = 0.0;
        for (const auto& p : powers) {
            terms.push_back({coef(rng), p});
            l1 += std::abs(terms.back().coef);
        }
        for (Monomial& t : terms) t.coef *= eps / l1;
        Fixture fx = make_radial_graph(eps == 0.0 ? std::vector<Monomial>{} : terms, "convex_graph");
        if (fx.meta["min_S2"] > 0.0 && fx.meta["min_S1"] > 0.0) {
            fx.meta["attempts"] = attempt;
            fx.meta["epsilon"] = eps;
            return fx;
        }
    }
    throw Error(ErrorKind::Config, "no strictly convex draw after " + std::to_string(kMaxAttempts) + " attempts");
}

Fixture make_torus(double R, double r) {
    if (!(r > 0.0) || !(R > r)) throw Error(ErrorKind::Config, "torus needs R > r > 0");
    ParameterBox box;
    box.lo = Coords::Zero(2);
    box.hi = Coords::Constant(2, 2.0 * kPi);
    box.periodic = {true, true};
    auto f = [R, r](const auto* u, auto* x) {
        using std::cos;
        using std::sin;
        const auto w = R + r * cos(u[0]);
        x[0] = w * cos(u[1]);
        x[1] = w * sin(u[1]);
        x[2] = r * sin(u[0]);
    };
    return Fixture{Immersion(spec_from("torus", SpaceForm::euclidean(3), box, true, f)),
                   {"closed", "hypothesis-negative"},
                   {{"R", R}, {"r", r}}};
}

measure::DomainSpec make_cap_domain(const Immersion& M, double theta0, bool sublevel) {
    const auto& box = M.box();
    if (box.periodic[0] || !(theta0 > box.lo(0)) || !(theta0 < box.hi(0))) {
        throw Error(ErrorKind::Config, "cap angle must lie strictly inside the polar axis range");
    }
    if (sublevel) {
        const int m = M.m();
        return measure::DomainSpec::sublevel(
            [theta0, m](const Coords& u) {
                Coords g = Coords::Zero(m);
                g(0) = 1.0;
                return measure::LevelValue{u(0) - theta0, g};
            },
            "cap_sublevel");
    }
    Coords hi = box.hi;
    hi(0) = theta0;
    return measure::DomainSpec::sub_rectangle(box.lo, hi, "cap");
}

const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> entries = {
        {"sphere", "m in {2,3}, radius, center", "round sphere in Euclidean space, inward normal",
         {"closed", "equality_case"}},
        {"ellipsoid", "a, b, c (within factor 2)", "strictly convex ellipsoid in R^3", {"closed"}},
        {"geodesic_sphere", "ambient {kind, kappa, dim}, radius", "geodesic sphere about the model pole",
         {"closed"}},
        {"convex_graph", "epsilon <= 0.05, l_max <= 6, seed", "random convex radial graph over S^2", {"closed"}},
        {"radial_graph", "terms [{coef, powers[3]}]", "inline radial graph r = 1 + polynomial(n)", {"closed"}},
        {"torus", "R > r > 0", "torus of revolution; S2 < 0 on the inner half", {"closed", "hypothesis-negative"}},
    };
    return entries;
}

ModelVec north_pole(const Fixture& f) { return f.M.point(f.M.box().lo); }

} // namespace curvlab::fixtures
