#include "curvlab/test_functions.hpp"

#include <algorithm>
#include <cmath>

#include "curvlab/ambient.hpp"
#include "curvlab/error.hpp"
#include "curvlab/quadrature.hpp"

namespace curvlab::verify {

namespace {

using measure::DomainSpec;

// Faces of a closed chart that collapse to a point (spherical-coordinate poles) are not boundary.
bool is_pole_face(const surface::Immersion& M, int axis, double value) {
    const auto& box = M.box();
    if (!M.closed() || box.periodic[axis]) return false;
    return value == box.lo(axis) || value == box.hi(axis);
}

// Product of edge ramps of a parameter rectangle, and its differential.
double rectangle_ramp(const surface::Immersion& M, const surface::ParameterBox& rect, double margin, const Coords& u,
                      Coords* df) {
    const int m = M.m();
    double f = 1.0;
    Coords factors = Coords::Ones(m);
    Coords derivs = Coords::Zero(m);
    for (int j = 0; j < m; ++j) {
        if (rect.periodic[j]) continue;
        double v = 1.0, dv = 0.0;
        if (!is_pole_face(M, j, rect.lo(j))) {
            const double t = (u(j) - rect.lo(j)) / margin;
            v = smoothstep(t);
            dv = smoothstep_derivative(t) / margin;
        }
        if (!is_pole_face(M, j, rect.hi(j))) {
            const double t = (rect.hi(j) - u(j)) / margin;
            const double w = smoothstep(t), dw = -smoothstep_derivative(t) / margin;
            dv = dv * w + v * dw;
            v *= w;
        }
        factors(j) = v;
        derivs(j) = dv;
        f *= v;
    }
    if (df) {
        df->setZero(m);
        for (int j = 0; j < m; ++j) {
            double d = derivs(j);
            for (int k = 0; k < m; ++k) {
                if (k != j) d *= factors(k);
            }
            (*df)(j) = d;
        }
    }
    return f;
}

} // namespace

double smoothstep(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double smoothstep_derivative(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double s = t * (1.0 - t);
    return 30.0 * s * s;
}

TestFunction TestFunction::constant_value(double c) {
    if (!(c >= 0.0)) throw Error(ErrorKind::Config, "test functions must be non-negative");
    TestFunction f;
    f.constant = c;
    return f;
}

TestFunction TestFunction::tent(DomainSpec omega, double eps) {
    if (omega.kind != DomainSpec::Kind::Sublevel) throw Error(ErrorKind::Config, "tent function needs a sublevel domain");
    if (!(eps > 0.0)) throw Error(ErrorKind::Config, "tent width must be positive");
    TestFunction f;
    f.kind = Kind::TentEps;
    f.omega = std::move(omega);
    f.eps = eps;
    return f;
}

TestFunction TestFunction::radial_bump(ModelVec center, double r_in, double r_out) {
    if (!(r_in >= 0.0) || !(r_out > r_in)) throw Error(ErrorKind::Config, "radial bump needs 0 <= r_in < r_out");
    TestFunction f;
    f.kind = Kind::RadialBump;
    f.center = std::move(center);
    f.r_in = r_in;
    f.r_out = r_out;
    return f;
}

TestFunction TestFunction::smooth_bump(DomainSpec omega, double margin) {
    if (!(margin > 0.0)) throw Error(ErrorKind::Config, "bump margin must be positive");
    TestFunction f;
    f.kind = Kind::SmoothBump;
    f.omega = std::move(omega);
    f.margin = margin;
    return f;
}

std::string TestFunction::name() const {
    switch (kind) {
    case Kind::Constant: return "constant";
    case Kind::TentEps: return "tent";
    case Kind::RadialBump: return "radial_bump";
    case Kind::SmoothBump: return "smooth_bump";
    }
    return "unknown";
}

double TestFunction::eval(const surface::Immersion& M, const surface::CurvatureFrame& frame, Coords* df) const {
    const int m = M.m();
    if (df) df->setZero(m);
    switch (kind) {
    case Kind::Constant: return constant;
    case Kind::RadialBump: {
        const auto& space = M.space();
        const double rho = ambient::distance_unchecked(space, center, frame.x);
        const double w = r_out - r_in;
        const double t = (r_out - rho) / w;
        if (df && t > 0.0 && t < 1.0) {
            const ModelVec n = ambient::grad_distance_unchecked(space, center, frame.x);
            const double d = -smoothstep_derivative(t) / w;
            for (int j = 0; j < m; ++j) (*df)(j) = d * space.inner(n, frame.tangents.col(j));
        }
        return smoothstep(t);
    }
    case Kind::TentEps: {
        const measure::LevelValue lv = omega.level(frame.u);
        const double gnorm = std::sqrt(std::max(0.0, lv.grad.dot(frame.g_inv * lv.grad)));
        if (!(gnorm > 1e-8)) throw Error(ErrorKind::Tracing, "tent level function has a vanishing gradient");
        const double depth = -lv.value / gnorm;
        if (depth <= 0.0) return 0.0;
        if (depth >= eps) return 1.0;
        if (df) *df = -lv.grad / (eps * gnorm);
        return depth / eps;
    }
    case Kind::SmoothBump: return value_and_grad_bump(M, frame.u, df);
    }
    return 0.0;
}

double TestFunction::value_at(const surface::Immersion& M, const Coords& u) const {
    switch (kind) {
    case Kind::Constant: return constant;
    case Kind::RadialBump:
        return smoothstep((r_out - ambient::distance_unchecked(M.space(), center, M.point(u))) / (r_out - r_in));
    case Kind::TentEps: return omega.level(u).value < 0.0 ? 1.0 : 0.0;
    case Kind::SmoothBump: return value_and_grad_bump(M, u, nullptr);
    }
    return 0.0;
}

double TestFunction::value_and_grad_bump(const surface::Immersion& M, const Coords& u, Coords* df) const {
    switch (omega.kind) {
    case DomainSpec::Kind::Sublevel: {
        const measure::LevelValue lv = omega.level(u);
        const double t = -lv.value / margin;
        if (df) *df = -smoothstep_derivative(t) / margin * lv.grad;
        return smoothstep(t);
    }
    case DomainSpec::Kind::SubRectangle:
        return rectangle_ramp(M, quad::sub_box(M.box(), omega.lo, omega.hi), margin, u, df);
    case DomainSpec::Kind::FullChart: return rectangle_ramp(M, M.box(), margin, u, df);
    }
    return 0.0;
}

} // namespace curvlab::verify
