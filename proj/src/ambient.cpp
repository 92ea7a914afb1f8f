#include "curvlab/ambient.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "curvlab/error.hpp"

namespace curvlab::ambient {

namespace {

constexpr double kModelTol = 1e-9;
constexpr double kCutLocusGuard = 1e-8;

// 1/ct(rho) style factor: exact Hessian of rho is hf * (|Y|^2 - <Y,n>^2).
double exact_hessian_factor(const SpaceForm& space, double rho) {
    switch (space.kind()) {
    case Kind::Euclidean: return 1.0 / rho;
    case Kind::Sphere: {
        const double s = std::sqrt(space.kappa());
        return s / std::tan(s * rho);
    }
    case Kind::Hyperbolic: {
        const double s = std::sqrt(-space.kappa());
        return s / std::tanh(s * rho);
    }
    }
    return 0.0;
}

void check_base(const ModelVec& a, const ModelVec& b, const char* what) {
    if (a.size() != b.size() || (a - b).norm() > 1e-12 * (1.0 + a.norm())) {
        throw Error(ErrorKind::Precondition, std::string(what) + ": vectors have different base points");
    }
}

} // namespace

SpaceForm::SpaceForm(Kind kind, double kappa, int ambient_dim)
    : kind_(kind), kappa_(kappa), ambient_dim_(ambient_dim) {
    if (ambient_dim < 3 || ambient_dim > kMaxIntrinsicDim + 1) {
        throw Error(ErrorKind::Config, "ambient dimension must be in [3, " +
                                           std::to_string(kMaxIntrinsicDim + 1) + "]");
    }
    const bool ok = (kind == Kind::Euclidean && kappa == 0.0) || (kind == Kind::Sphere && kappa > 0.0) ||
                    (kind == Kind::Hyperbolic && kappa < 0.0);
    if (!ok || !std::isfinite(kappa)) {
        throw Error(ErrorKind::Config, "curvature sign does not match the space form kind");
    }
}

SpaceForm SpaceForm::euclidean(int ambient_dim) { return SpaceForm(Kind::Euclidean, 0.0, ambient_dim); }
SpaceForm SpaceForm::sphere(int ambient_dim, double kappa) { return SpaceForm(Kind::Sphere, kappa, ambient_dim); }
SpaceForm SpaceForm::hyperbolic(int ambient_dim, double kappa) {
    return SpaceForm(Kind::Hyperbolic, kappa, ambient_dim);
}

double SpaceForm::injectivity_radius() const {
    if (kind_ == Kind::Sphere) return std::numbers::pi / std::sqrt(kappa_);
    return std::numeric_limits<double>::infinity();
}

std::string SpaceForm::name() const {
    std::ostringstream os;
    switch (kind_) {
    case Kind::Euclidean: os << "R^" << ambient_dim_; break;
    case Kind::Sphere: os << "S^" << ambient_dim_ << "(" << kappa_ << ")"; break;
    case Kind::Hyperbolic: os << "H^" << ambient_dim_ << "(" << kappa_ << ")"; break;
    }
    return os.str();
}

double SpaceForm::inner(const ModelVec& a, const ModelVec& b) const {
    double s = a.dot(b);
    if (kind_ == Kind::Hyperbolic) s -= 2.0 * a(0) * b(0);
    return s;
}

double SpaceForm::norm(const ModelVec& v) const { return std::sqrt(std::max(0.0, inner(v, v))); }

void SpaceForm::check_on_model(const ModelVec& x) const {
    if (x.size() != model_dim()) {
        throw Error(ErrorKind::ModelConstraint, "point has " + std::to_string(x.size()) +
                                                    " coordinates, model needs " + std::to_string(model_dim()));
    }
    if (!x.allFinite()) throw Error(ErrorKind::ModelConstraint, "point has non-finite coordinates");
    if (flat()) return;
    const double defect = std::abs(kappa_ * inner(x, x) - 1.0);
    if (defect > kModelTol) {
        throw Error(ErrorKind::ModelConstraint, "point is off the " + name() + " model (defect " +
                                                    std::to_string(defect) + ")");
    }
    if (kind_ == Kind::Hyperbolic && x(0) <= 0.0) {
        throw Error(ErrorKind::ModelConstraint, "point is on the lower hyperboloid sheet");
    }
}

ModelVec SpaceForm::project_to_model(const ModelVec& x) const {
    if (flat()) return x;
    const double q = inner(x, x);
    if (kind_ == Kind::Sphere) {
        if (!(q > 0.0)) throw Error(ErrorKind::ModelConstraint, "cannot project the origin onto the sphere");
        return x * std::sqrt(1.0 / (kappa_ * q));
    }
    if (!(q < 0.0) || x(0) <= 0.0) {
        throw Error(ErrorKind::ModelConstraint, "point is not time-like future; cannot project onto hyperboloid");
    }
    return x * std::sqrt(1.0 / (kappa_ * q));
}

ModelVec SpaceForm::tangent_part(const ModelVec& x, const ModelVec& v) const {
    if (flat()) return v;
    return v - (kappa_ * inner(v, x)) * x;
}

ModelVec SpaceForm::geodesic(const ModelVec& x, const ModelVec& unit_v, double t) const {
    switch (kind_) {
    case Kind::Euclidean: return x + t * unit_v;
    case Kind::Sphere: {
        const double s = std::sqrt(kappa_);
        return std::cos(s * t) * x + (std::sin(s * t) / s) * unit_v;
    }
    case Kind::Hyperbolic: {
        const double s = std::sqrt(-kappa_);
        return std::cosh(s * t) * x + (std::sinh(s * t) / s) * unit_v;
    }
    }
    return x;
}

double distance_unchecked(const SpaceForm& space, const ModelVec& x0, const ModelVec& x) {
    const ModelVec d = x - x0;
    switch (space.kind()) {
    case Kind::Euclidean: return d.norm();
    case Kind::Sphere: {
        // Chordal form of arccos(kappa <x, x0>); the arcsine argument is clamped to [0, 1].
        const double s = std::sqrt(space.kappa());
        const double half_chord = 0.5 * s * d.norm();
        return 2.0 / s * std::asin(std::min(1.0, half_chord));
    }
    case Kind::Hyperbolic: {
        // Chordal form of arccosh(kappa <x, x0>_L); the Minkowski square is clamped to >= 0.
        const double s = std::sqrt(-space.kappa());
        const double chord = std::sqrt(std::max(0.0, space.inner(d, d)));
        return 2.0 / s * std::asinh(0.5 * s * chord);
    }
    }
    return 0.0;
}

ModelVec grad_distance_unchecked(const SpaceForm& space, const ModelVec& x0, const ModelVec& x) {
    ModelVec t = space.tangent_part(x, x - x0);
    const double n = space.norm(t);
    if (n == 0.0) return ModelVec::Zero(x.size());
    return t / n;
}

ModelVec radial_field_unchecked(const SpaceForm& space, const ModelVec& x0, const ModelVec& x) {
    // In every model the tangent part of x - x0 has norm G_true(rho), with G_true the exact
    // Jacobi field length; only the hyperbolic case needs rescaling to G = rho.
    ModelVec t = space.tangent_part(x, x - x0);
    if (space.kind() != Kind::Hyperbolic) return t;
    const double s = std::sqrt(-space.kappa());
    const double sr = s * distance_unchecked(space, x0, x);
    const double factor = sr < 1e-8 ? 1.0 : sr / std::sinh(sr);
    return factor * t;
}

ModelVec radial_field_derivative(const SpaceForm& space, const ModelVec& x0, const ModelVec& x,
                                 const ModelVec& E) {
    const double rho = distance_unchecked(space, x0, x);
    switch (space.kind()) {
    case Kind::Euclidean: return E;
    case Kind::Sphere: return std::cos(std::sqrt(space.kappa()) * rho) * E;
    case Kind::Hyperbolic: {
        if (rho == 0.0) return E;
        const ModelVec n = grad_distance_unchecked(space, x0, x);
        const double en = space.inner(E, n);
        const double lateral = rho * exact_hessian_factor(space, rho);
        return en * n + lateral * (E - en * n);
    }
    }
    return E;
}

double geodesic_distance(const SpaceForm& space, const AmbientPoint& x0, const AmbientPoint& x) {
    space.check_on_model(x0.coords);
    space.check_on_model(x.coords);
    return distance_unchecked(space, x0.coords, x.coords);
}

AmbientVector grad_distance(const SpaceForm& space, const AmbientPoint& x0, const AmbientPoint& x) {
    const double rho = geodesic_distance(space, x0, x);
    if (rho == 0.0) throw Error(ErrorKind::SingularGradient, "distance gradient is undefined at rho = 0");
    if (space.kind() == Kind::Sphere && rho > space.injectivity_radius() - kCutLocusGuard) {
        throw Error(ErrorKind::SingularGradient, "point is within the cut-locus guard of the antipode");
    }
    return {x.coords, grad_distance_unchecked(space, x0.coords, x.coords)};
}

Comparison comparison_G(double rho, const SpaceForm& space) {
    if (space.kappa() <= 0.0) return {rho, 1.0};
    const double s = std::sqrt(space.kappa());
    return {std::sin(s * rho) / s, std::cos(s * rho)};
}

AmbientVector radial_field(const SpaceForm& space, const AmbientPoint& x0, const AmbientPoint& x) {
    const AmbientVector n = grad_distance(space, x0, x);
    const double rho = distance_unchecked(space, x0.coords, x.coords);
    return {x.coords, comparison_G(rho, space).G * n.coords};
}

double hessian_distance_quadform(const SpaceForm& space, const AmbientPoint& x0, const AmbientPoint& x,
                                 const AmbientVector& Y) {
    check_base(x.coords, Y.base, "hessian_distance_quadform");
    const AmbientVector n = grad_distance(space, x0, x);
    const double rho = distance_unchecked(space, x0.coords, x.coords);
    const Comparison c = comparison_G(rho, space);
    const double yn = space.inner(Y.coords, n.coords);
    return c.Gprime / c.G * (space.inner(Y.coords, Y.coords) - yn * yn);
}

double ricci(const SpaceForm& space, const AmbientVector& V, const AmbientVector& W) {
    check_base(V.base, W.base, "ricci");
    if (space.kappa() == 0.0) return 0.0;
    const double vw = space.inner(V.coords, W.coords);
    if (std::abs(vw) <= 1e-14 * space.norm(V.coords) * space.norm(W.coords)) return 0.0;
    return space.hypersurface_dim() * space.kappa() * vw;
}

} // namespace curvlab::ambient
