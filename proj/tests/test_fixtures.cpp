#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "curvlab/error.hpp"
#include "curvlab/fixtures.hpp"
#include "curvlab/measure.hpp"

using namespace curvlab;
using namespace curvlab::fixtures;
using surface::CurvatureFrame;
using surface::curvature_frame;

namespace {

constexpr double pi = std::numbers::pi;

Coords uv(double a, double b) {
    Coords u(2);
    u << a, b;
    return u;
}

double min_over_grid(const Immersion& M, int n, double (*q)(const CurvatureFrame&)) {
    const quad::Grid g(M.box(), {n, 2 * n});
    double lo = 1e300;
    for (std::size_t i = 0; i < g.size(); ++i) lo = std::min(lo, q(curvature_frame(M, g.node(i))));
    return lo;
}

double area(const Immersion& M, std::vector<int> counts) {
    return measure::integrate(M, measure::DomainSpec::full_chart(), [](const CurvatureFrame&) { return 1.0; },
                              {std::move(counts), 4});
}

} // namespace

TEST_CASE("sphere fixtures") {
    const auto s = make_sphere(2, 1.0);
    CHECK(s.meta.at("area") == doctest::Approx(4 * pi));
    CHECK(area(s.M, {64, 128}) == doctest::Approx(4 * pi).epsilon(1e-12));
    CHECK(s.has_tag("closed"));
    CHECK(s.M.closed());

    const auto s3 = make_sphere(3, 2.0);
    CHECK(s3.meta.at("area") == doctest::Approx(2 * pi * pi * 8));
    CHECK(area(s3.M, {24, 24, 48}) == doctest::Approx(s3.meta.at("area")).epsilon(1e-10));

    ModelVec c(3);
    c << 1.0, -2.0, 0.5;
    const auto shifted = make_sphere(2, 0.7, c);
    const CurvatureFrame f = curvature_frame(shifted.M, uv(0.9, 2.2));
    CHECK((f.x - c).norm() == doctest::Approx(0.7));
    CHECK(f.S1 == doctest::Approx(2 / 0.7));
    CHECK((north_pole(shifted) - c - ModelVec::Unit(3, 2) * 0.7).norm() < 1e-14);

    CHECK_THROWS_AS(make_sphere(4, 1.0), Error);
    CHECK_THROWS_AS(make_sphere(2, -1.0), Error);
}

TEST_CASE("ellipsoid fixtures") {
    const auto unit = make_ellipsoid(1, 1, 1);
    const auto sph = make_sphere(2, 1.0);
    for (const Coords& u : {uv(0.4, 0.1), uv(2.0, 5.0)}) {
        const CurvatureFrame a = curvature_frame(unit.M, u), b = curvature_frame(sph.M, u);
        CHECK((a.x - b.x).norm() < 1e-14);
        CHECK(a.S1 == doctest::Approx(b.S1).epsilon(1e-12));
        CHECK(a.S2 == doctest::Approx(b.S2).epsilon(1e-12));
    }

    // Closed-form curvature oracle.
    const double A = 1.3, B = 1.0, C = 0.8;
    const auto e = make_ellipsoid(A, B, C);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> th(0.05, pi - 0.05), ph(0, 2 * pi);
    for (int k = 0; k < 200; ++k) {
        const CurvatureFrame f = curvature_frame(e.M, uv(th(rng), ph(rng)));
        const auto [H, K] = ellipsoid_curvatures(A, B, C, f.x);
        CHECK(f.H == doctest::Approx(H).epsilon(1e-10));
        CHECK(f.S2 == doctest::Approx(K).epsilon(1e-10));
    }

    const auto e2 = make_ellipsoid(1.2, 1.0, 0.9);
    CHECK(min_over_grid(e2.M, 64, [](const CurvatureFrame& f) { return f.S2; }) > 0.0);

    CHECK_THROWS_AS(make_ellipsoid(3, 1, 0.2), Error);
    CHECK_THROWS_AS(make_ellipsoid(1, 1, 0), Error);
}

TEST_CASE("geodesic sphere fixtures") {
    const auto g = make_geodesic_sphere(ambient::SpaceForm::sphere(3, 1.0), pi / 4);
    CHECK(g.meta.at("principal_curvature") == doctest::Approx(1.0));
    const auto h = make_geodesic_sphere(ambient::SpaceForm::hyperbolic(3, -1.0), 1.0);
    CHECK(h.meta.at("principal_curvature") == doctest::Approx(1.0 / std::tanh(1.0)));
    // Area of a geodesic sphere in S^3(kappa): 4 pi sin^2(sqrt(kappa) a)/kappa.
    const auto g4 = make_geodesic_sphere(ambient::SpaceForm::sphere(3, 4.0), 0.5);
    CHECK(area(g4.M, {64, 128}) == doctest::Approx(pi * std::pow(std::sin(1.0), 2)).epsilon(1e-10));
    CHECK(area(h.M, {64, 128}) == doctest::Approx(4 * pi * std::pow(std::sinh(1.0), 2)).epsilon(1e-10));
    // Points are on the model.
    const CurvatureFrame f = curvature_frame(h.M, uv(1.0, 1.0));
    CHECK_NOTHROW(h.M.space().check_on_model(f.x));

    CHECK_THROWS_AS(make_geodesic_sphere(ambient::SpaceForm::sphere(3, 1.0), pi / 2), Error);
    CHECK_THROWS_AS(make_geodesic_sphere(ambient::SpaceForm::euclidean(3), 1.0), Error);
}

TEST_CASE("convex graph fixtures") {
    const auto zero = make_convex_graph(0.0, 3, 1);
    const auto sph = make_sphere(2, 1.0);
    const CurvatureFrame a = curvature_frame(zero.M, uv(1.1, 0.3)), b = curvature_frame(sph.M, uv(1.1, 0.3));
    CHECK((a.x - b.x).norm() < 1e-14);
    CHECK(a.S1 == doctest::Approx(2.0));

    const auto g7 = make_convex_graph(0.05, 4, 7);
    REQUIRE(g7.meta.count("min_S2"));
    CHECK(g7.meta.at("min_S2") > 0.0);
    CHECK(g7.meta.at("attempts") >= 1);
    // Same seed, same surface.
    const auto again = make_convex_graph(0.05, 4, 7);
    CHECK(again.M.point(uv(0.7, 0.7)) == g7.M.point(uv(0.7, 0.7)));
    // |r - 1| <= eps
    const quad::Grid grid(g7.M.box(), {20, 40});
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(g7.M.point(grid.node(i)).norm() - 1.0) <= 0.05 + 1e-12);

    CHECK_THROWS_AS(make_convex_graph(0.5, 4, 7), Error);
    CHECK_THROWS_AS(make_convex_graph(0.05, 0, 7), Error);
}

TEST_CASE("radial graph and torus") {
    const auto rg = make_radial_graph({{0.02, {1, 1, 0}}, {-0.03, {0, 0, 2}}});
    CHECK(rg.meta.at("min_S2") > 0.0);
    CHECK_THROWS_AS(make_radial_graph({{0.1, {9, 0, 0}}}), Error);

    const auto t = make_torus(2.0, 0.7);
    CHECK(t.has_tag("hypothesis-negative"));
    CHECK(area(t.M, {32, 32}) == doctest::Approx(4 * pi * pi * 2.0 * 0.7).epsilon(1e-12));
    // inner equator: S2 = -1/(r (R - r))
    const CurvatureFrame f = curvature_frame(t.M, uv(pi, 0.3));
    CHECK(f.S2 == doctest::Approx(-1.0 / (0.7 * 1.3)).epsilon(1e-10));
    CHECK_THROWS_AS(make_torus(1.0, 2.0), Error);
}

TEST_CASE("cap domains") {
    const auto s = make_sphere(2, 1.0);
    const auto eq = make_cap_domain(s.M, pi / 2);
    CHECK(eq.kind == measure::DomainSpec::Kind::SubRectangle);
    CHECK(eq.hi(0) == doctest::Approx(pi / 2));
    const auto sub = make_cap_domain(s.M, pi / 3, true);
    CHECK(sub.kind == measure::DomainSpec::Kind::Sublevel);
    CHECK(sub.level(uv(pi / 3, 1.0)).value == doctest::Approx(0.0));
    CHECK(sub.level(uv(0.1, 1.0)).value < 0.0);
    CHECK_THROWS_AS(make_cap_domain(s.M, 4.0), Error);
    CHECK_THROWS_AS(make_cap_domain(make_torus(2, 0.5).M, 1.0), Error);
}

TEST_CASE("catalog") {
    const auto& cat = catalog();
    std::vector<std::string> names;
    for (const auto& e : cat) names.push_back(e.name);
    for (const char* n : {"sphere", "ellipsoid", "geodesic_sphere", "convex_graph", "radial_graph", "torus"}) {
        CHECK(std::find(names.begin(), names.end(), n) != names.end());
    }
}
