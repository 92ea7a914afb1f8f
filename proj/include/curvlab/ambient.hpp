#pragma once

#include <string>

#include "curvlab/linalg.hpp"

/// Space forms of constant curvature kappa and the distance geometry used by the
/// curvature checks. Non-flat spaces live in embedding models: the sphere of radius
/// 1/sqrt(kappa) in Euclidean R^{m+2}, and the upper sheet <x,x> = 1/kappa of the
/// hyperboloid in Minkowski R^{1,m+1} (time-like coordinate first).
namespace curvlab::ambient {

enum class Kind { Euclidean, Sphere, Hyperbolic };

class SpaceForm {
public:
    static SpaceForm euclidean(int ambient_dim);
    static SpaceForm sphere(int ambient_dim, double kappa);
    static SpaceForm hyperbolic(int ambient_dim, double kappa);

    Kind kind() const { return kind_; }
    double kappa() const { return kappa_; }
    /// Lower sectional curvature bound; equal to kappa for a space form.
    double kappa_lower() const { return kappa_; }
    /// m + 1.
    int ambient_dim() const { return ambient_dim_; }
    /// Dimension m of the hypersurfaces it hosts.
    int hypersurface_dim() const { return ambient_dim_ - 1; }
    int model_dim() const { return kind_ == Kind::Euclidean ? ambient_dim_ : ambient_dim_ + 1; }
    bool flat() const { return kind_ == Kind::Euclidean; }

    double injectivity_radius() const;
    std::string name() const;

    /// Model inner product: Euclidean, or Minkowski with signature (-,+,...,+).
    double inner(const ModelVec& a, const ModelVec& b) const;
    double norm(const ModelVec& v) const;

    /// Throws ModelConstraint if x is not on the model (relative tolerance 1e-9).
    void check_on_model(const ModelVec& x) const;
    /// Rescales x back onto the model. Identity for Euclidean space.
    ModelVec project_to_model(const ModelVec& x) const;
    /// Component of v tangent to the model at x.
    ModelVec tangent_part(const ModelVec& x, const ModelVec& v) const;
    /// Point at arclength t along the geodesic from x with unit initial velocity v.
    ModelVec geodesic(const ModelVec& x, const ModelVec& unit_v, double t) const;

private:
    SpaceForm(Kind kind, double kappa, int ambient_dim);

    Kind kind_;
    double kappa_;
    int ambient_dim_;
};

struct AmbientPoint {
    ModelVec coords;
};

/// Tangent vector carrying its base point.
struct AmbientVector {
    ModelVec base;
    ModelVec coords;
};

double geodesic_distance(const SpaceForm& space, const AmbientPoint& x0, const AmbientPoint& x);

/// Unit gradient of rho(x0, .) at x. Throws SingularGradient at rho = 0 or near the cut locus.
AmbientVector grad_distance(const SpaceForm& space, const AmbientPoint& x0, const AmbientPoint& x);

struct Comparison {
    double G;
    double Gprime;
};

/// G(rho) = rho for kappa <= 0 and sin(sqrt(kappa) rho)/sqrt(kappa) for kappa > 0.
Comparison comparison_G(double rho, const SpaceForm& space);

/// G(rho) grad rho at x; the position vector x - x0 in Euclidean space.
AmbientVector radial_field(const SpaceForm& space, const AmbientPoint& x0, const AmbientPoint& x);

/// (G'/G)(|Y|^2 - <Y, grad rho>^2). Exact Hessian of rho for Euclidean space and the
/// sphere; for hyperbolic space G = rho gives the Euclidean comparison lower bound.
double hessian_distance_quadform(const SpaceForm& space, const AmbientPoint& x0, const AmbientPoint& x,
                                 const AmbientVector& Y);

/// Space-form Ricci tensor m kappa <V, W>. Throws Precondition on mismatched base points.
double ricci(const SpaceForm& space, const AmbientVector& V, const AmbientVector& W);

// Unchecked kernels used inside quadrature loops. Inputs are assumed on-model.

double distance_unchecked(const SpaceForm& space, const ModelVec& x0, const ModelVec& x);
/// Unit gradient of rho, or the zero vector when rho == 0.
ModelVec grad_distance_unchecked(const SpaceForm& space, const ModelVec& x0, const ModelVec& x);
/// G(rho) grad rho, extended by its limit 0 at x = x0.
ModelVec radial_field_unchecked(const SpaceForm& space, const ModelVec& x0, const ModelVec& x);
/// Ambient covariant derivative of the radial field along the tangent vector E at x.
ModelVec radial_field_derivative(const SpaceForm& space, const ModelVec& x0, const ModelVec& x,
                                 const ModelVec& E);

} // namespace curvlab::ambient
