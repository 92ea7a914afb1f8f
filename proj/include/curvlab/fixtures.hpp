#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "curvlab/hypersurface.hpp"
#include "curvlab/measure.hpp"

namespace curvlab::fixtures {

using surface::Immersion;

/// An immersion plus whatever closed-form facts are known about it.
struct Fixture {
    Immersion M;
    std::vector<std::string> tags;
    std::map<std::string, double> meta;  // e.g. area, principal_curvature, radius, min_S2

    bool has_tag(const std::string& t) const;
};

/// Round sphere of radius r in R^{m+1}, m in {2, 3}. Chart axis 0 is the polar angle from the
/// +e_{m+1} pole; the last axis is the periodic longitude.
Fixture make_sphere(int m, double r, const ModelVec& center = {});

/// Ellipsoid x^2/a^2 + y^2/b^2 + z^2/c^2 = 1 with semi-axes within a factor 2 of each other.
Fixture make_ellipsoid(double a, double b, double c);

/// Mean curvature H = (k1 + k2)/2 and Gauss curvature K of the ellipsoid at a point on it.
std::pair<double, double> ellipsoid_curvatures(double a, double b, double c, const ModelVec& x);

/// Geodesic sphere of radius a about the model pole of S^{m+1}(kappa) or H^{m+1}(kappa).
Fixture make_geodesic_sphere(const ambient::SpaceForm& space, double a);

/// Radial graph r(n) = 1 + sum c * n1^i n2^j n3^k over the unit sphere in R^3.
struct Monomial {
    double coef = 0.0;
    std::array<int, 3> powers{};
};
Fixture make_radial_graph(const std::vector<Monomial>& terms, std::string name = "radial_graph");

/// Random strictly convex radial graph with |r - 1| <= eps; draws violating S2 > 0 are redrawn.
Fixture make_convex_graph(double eps, int l_max, std::uint64_t seed);

/// Torus of revolution (R, r). Has S2 < 0 on its inner half: tagged hypothesis-negative.
Fixture make_torus(double R, double r);

/// Polar cap {polar angle <= theta0} as a parameter rectangle or as the sublevel set of theta - theta0.
measure::DomainSpec make_cap_domain(const Immersion& M, double theta0, bool sublevel = false);

struct CatalogEntry {
    std::string name;
    std::string parameters;
    std::string description;
    std::vector<std::string> tags;
};
const std::vector<CatalogEntry>& catalog();

/// Model pole of the fixture charts (chart axis 0 = 0): +e_{m+1} scaled for spheres.
ModelVec north_pole(const Fixture& f);

} // namespace curvlab::fixtures
