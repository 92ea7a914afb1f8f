#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "curvlab/hypersurface.hpp"
#include "curvlab/quadrature.hpp"

namespace curvlab::measure {

using surface::CurvatureFrame;
using surface::Immersion;

struct LevelValue {
    double value = 0.0;
    Coords grad;  // chart gradient
};
using LevelFn = std::function<LevelValue(const Coords&)>;

/// Integration region in parameter space.
struct DomainSpec {
    enum class Kind { FullChart, SubRectangle, Sublevel };
    Kind kind = Kind::FullChart;
    Coords lo;
    Coords hi;
    LevelFn level;  // region level <= 0
    bool compact = true;
    std::string label = "full";

    static DomainSpec full_chart();
    static DomainSpec sub_rectangle(Coords lo, Coords hi, std::string label = "rectangle");
    static DomainSpec sublevel(LevelFn level, std::string label = "sublevel");
};

using Integrand = std::function<double(const CurvatureFrame&)>;
/// Writes one value per channel into out[0..channels).
using MultiIntegrand = std::function<void(const CurvatureFrame&, double* out)>;

struct Options {
    std::vector<int> grid;
    int workers = 1;
};

/// Level function sampled alongside the integrand: geodesic distance to a center, or a chart function.
struct LevelSpec {
    enum class Kind { None, Distance, Function };
    Kind kind = Kind::None;
    ModelVec center;
    LevelFn fn;
    bool metric_normalized = false;  // divide a chart level by its metric gradient norm

    static LevelSpec none() { return {}; }
    static LevelSpec distance(ModelVec center) { return {Kind::Distance, std::move(center), {}, false}; }
    static LevelSpec function(LevelFn fn, bool normalized = false) {
        return {Kind::Function, {}, std::move(fn), normalized};
    }
};

/// Integrand channels, area density and level data at every node of a grid.
struct NodeSamples {
    quad::Grid grid;
    int channels = 0;
    std::vector<double> raw;        // node-major, `channels` per node
    std::vector<double> density;    // sqrt(det g)
    std::vector<double> level;      // empty without a level spec
    std::vector<double> level_grad; // node-major, m per node

    double value(std::size_t node, int ch) const { return raw[node * channels + ch]; }
    bool has_level() const { return !level.empty(); }
};

NodeSamples sample(const Immersion& M, const quad::Grid& grid, int channels, const MultiIntegrand& fn,
                   const LevelSpec& level, int workers);

/// Tensor-product rule over the whole grid.
double sum_full(const NodeSamples& s, int ch);
/// Integral over {level <= threshold} with cut-cell treatment of the cells the level set crosses.
double sum_below(const NodeSamples& s, int ch, double threshold);
/// sum_below for several thresholds, evaluated in parallel, each with the same reduction tree.
std::vector<double> sum_below(const NodeSamples& s, int ch, const std::vector<double>& thresholds, int workers);

/// Grid covering the parameter region of a domain (sub-box for rectangles, full box otherwise).
quad::Grid domain_grid(const Immersion& M, const DomainSpec& omega, const std::vector<int>& counts);

double integrate(const Immersion& M, const DomainSpec& omega, const Integrand& phi, const Options& opt);
/// Several channels over one domain in a single pass.
std::vector<double> integrate(const Immersion& M, const DomainSpec& omega, int channels, const MultiIntegrand& phi,
                              const Options& opt);

struct BallIntegral {
    double value = 0.0;
    double refinement_estimate = 0.0;
};

/// Checks 0 < r < injectivity radius and, for surfaces with boundary, that B_r misses it.
void check_ball(const Immersion& M, const ModelVec& x0, double r, const std::vector<int>& counts);

BallIntegral integrate_ball(const Immersion& M, const ModelVec& x0, double r, const Integrand& phi,
                            const Options& opt);

/// Line integral over the boundary of a domain of a surface (m = 2).
double boundary_integral(const Immersion& M, const DomainSpec& omega, const Integrand& phi, const Options& opt);

struct RadialProfile {
    ModelVec center;
    std::vector<double> radii;
    std::vector<double> values;
    std::vector<double> refinement_estimate;
    std::string integrand;
};

RadialProfile radial_profile(const Immersion& M, const ModelVec& x0, const Integrand& phi,
                             const std::vector<double>& radii, const Options& opt, std::string label = "");

void write_profile_csv(std::ostream& os, const RadialProfile& p);

struct EnclosingBall {
    ModelVec center;
    double radius = 0.0;
    std::string method;
    double pairwise_diameter = 0.0;  // lower bound on the max pairwise distance

    double diam() const { return 2.0 * radius; }
};

EnclosingBall min_enclosing_ball(const ambient::SpaceForm& space, const std::vector<ModelVec>& samples);

/// Points of the domain used for its diameter: grid nodes plus boundary samples.
std::vector<ModelVec> domain_points(const Immersion& M, const DomainSpec& omega, const std::vector<int>& counts);

} // namespace curvlab::measure
