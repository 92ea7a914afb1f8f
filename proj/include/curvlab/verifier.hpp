#pragma once

#include <optional>
#include <string>
#include <vector>

#include "curvlab/hypersurface.hpp"
#include "curvlab/measure.hpp"
#include "curvlab/report.hpp"
#include "curvlab/test_functions.hpp"

// Checkers for the curvature inequalities. Every report is oriented so that lhs <= rhs is the
// claim; hypothesis failures throw Error(HypothesisViolation) instead of producing a verdict.
namespace curvlab::verify {

using surface::Immersion;

struct CheckOptions {
    std::vector<int> grid;
    int workers = 1;
    Tolerances tol;
    bool refinement = true;  // rerun on the coarsened grid to attach a refinement estimate
    int radial_steps = 256;  // r-grid intervals for double integrals
};

/// Unit m-sphere area 2 pi^{(m+1)/2} / Gamma((m+1)/2).
double unit_sphere_area(int m);

double poincare_constant(double diam, double kappa, int m);

/// Diameter of a domain from the minimal enclosing ball of its sample points.
measure::EnclosingBall domain_ball(const Immersion& M, const measure::DomainSpec& omega, const std::vector<int>& grid);

/// max |H + <X, eta>/(2m)| over the grid nodes.
double shrinker_residual(const Immersion& M, const std::vector<int>& grid, int workers = 1);

InequalityReport verify_poincare(const Immersion& M, const measure::DomainSpec& omega, const TestFunction& f,
                                 const CheckOptions& opt);

InequalityReport verify_isoperimetric(const Immersion& M, const measure::DomainSpec& omega, const CheckOptions& opt);

/// Integral of H against the diameter: 2 pi diam for closed surfaces in R^3, the curvature form otherwise.
InequalityReport verify_mean_curvature_integral(const Immersion& M, const CheckOptions& opt);

/// 2 min H / (max R - kappa) <= diam M.
InequalityReport verify_diameter_bound(const Immersion& M, const CheckOptions& opt);

InequalityReport verify_self_shrinker_volume(const Immersion& M, const CheckOptions& opt);

/// Two reports: "volume_estimate" (exponent (m-1)/m) and "volume_estimate/proof_exponent" (m/(m-1)).
std::vector<InequalityReport> verify_volume_estimate(const Immersion& M, const CheckOptions& opt);

enum class ExponentMode { General, Convex };

/// c int_s^t W(r)^{-1} int_{B_r} bracket dr <= Phi(t)/w(t) - Phi(s)/w(s).
InequalityReport verify_mean_value(const Immersion& M, const TestFunction& f, const ModelVec& x0, double s,
                                   double t, ExponentMode mode, const CheckOptions& opt);

/// Weak-form residual of the P1 divergence identity for the radial field about x0.
InequalityReport verify_divergence_identity(const Immersion& M, const TestFunction& f, const ModelVec& x0,
                                            const CheckOptions& opt);

struct ProfileReport {
    InequalityReport report;
    measure::RadialProfile integral;  // ball integrals behind the monitor
    std::vector<double> monitor;      // h(r) or phi(r)
    std::string monitor_name;
};

/// lambda unset: fit the minimal admissible value over the radii.
ProfileReport monotonicity_h(const Immersion& M, const ModelVec& x0, std::optional<double> lambda, double alpha,
                             double R0, const std::vector<double>& radii, const CheckOptions& opt);

/// lambda unset: max R over the nodes.
ProfileReport monotonicity_phi_shrinker(const Immersion& M, const ModelVec& x0, std::optional<double> lambda,
                                        const std::vector<double>& radii, const CheckOptions& opt);

/// Proof-form report, plus "<name>/statement" when the stated constant is defined.
std::vector<InequalityReport> verify_lp(const Immersion& M, const ModelVec& x0, double s, double t, double p,
                                        double c, std::optional<double> lambda, double R0, const CheckOptions& opt);

} // namespace curvlab::verify
