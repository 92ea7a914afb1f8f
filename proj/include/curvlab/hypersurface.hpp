#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "curvlab/ambient.hpp"
#include "curvlab/linalg.hpp"

namespace curvlab::surface {

using ambient::SpaceForm;

/// Point, first and second parameter derivatives of a chart, in model coordinates.
struct Jet {
    ModelVec x;
    TangentMat d1;
    std::array<ModelVec, kMaxIntrinsicDim * kMaxIntrinsicDim> d2;

    const ModelVec& second(int i, int j) const { return d2[i * kMaxIntrinsicDim + j]; }
    ModelVec& second(int i, int j) { return d2[i * kMaxIntrinsicDim + j]; }
};

using ChartFn = std::function<ModelVec(const Coords&)>;
using JetFn = std::function<Jet(const Coords&)>;

struct ParameterBox {
    Coords lo;
    Coords hi;
    std::vector<bool> periodic;

    int dim() const { return static_cast<int>(lo.size()); }
    double extent(int axis) const { return hi(axis) - lo(axis); }
};

enum class JetMode { Analytic, FiniteDifference };

struct ImmersionSpec {
    std::string name;
    SpaceForm space = SpaceForm::euclidean(3);
    int m = 2;
    ParameterBox box;
    ChartFn chart;
    JetFn jet;                  // required for JetMode::Analytic
    JetMode mode = JetMode::Analytic;
    double fd_step = 1e-4;      // relative to each axis extent
    bool closed = false;
    int orientation = 0;        // +1/-1 forces the normal; 0 picks it so that mean S1 > 0
};

/// Parametric hypersurface of a space form. Immutable once constructed.
class Immersion {
public:
    explicit Immersion(ImmersionSpec spec);

    const std::string& name() const { return spec_.name; }
    const SpaceForm& space() const { return spec_.space; }
    int m() const { return spec_.m; }
    const ParameterBox& box() const { return spec_.box; }
    bool closed() const { return spec_.closed; }
    JetMode jet_mode() const { return spec_.mode; }
    double fd_step() const { return spec_.fd_step; }
    int orientation() const { return orientation_; }

    ModelVec point(const Coords& u) const;
    Jet jet(const Coords& u) const;

    /// Same surface with a different jet oracle (and the already selected orientation).
    Immersion with_jets(JetMode mode, double fd_step = 1e-4) const;

private:
    Jet finite_difference_jet(const Coords& u) const;

    ImmersionSpec spec_;
    int orientation_ = 1;
};

/// Pointwise curvature package. Principal curvatures are sorted ascending; `basis` holds
/// g-orthonormal eigenvectors of A (columns, chart coordinates) matching `k`.
struct CurvatureFrame {
    Coords u;
    ModelVec x;
    TangentMat tangents;
    FormMat g;
    FormMat g_inv;
    FormMat b;
    FormMat A;
    Coords k;
    FormMat basis;
    double S1 = 0.0;
    double S2 = 0.0;
    double H = 0.0;
    double R = 0.0;
    Coords theta;
    ModelVec eta;
    double area_density = 0.0;

    int m() const { return static_cast<int>(k.size()); }
    /// |A|^2 = sum k_i^2.
    double norm_A_squared() const { return k.squaredNorm(); }
    /// g-inner product of chart-coordinate tangent vectors.
    double metric(const Coords& a, const Coords& c) const { return a.dot(g * c); }
    /// Chart-coordinate tangent vector as a model vector.
    ModelVec push_forward(const Coords& v) const { return tangents * v; }
    /// Chart coordinates of the tangential part of an ambient vector.
    Coords tangential_coords(const SpaceForm& space, const ModelVec& v) const;
};

/// Builds the frame from a jet. `orientation` multiplies the canonical normal.
CurvatureFrame frame_from_jet(const SpaceForm& space, const Jet& jet, int orientation, const Coords& u);

CurvatureFrame curvature_frame(const Immersion& M, const Coords& u);

/// (S1 I - A) v in chart coordinates.
Coords newton_apply(const CurvatureFrame& frame, const Coords& v);

/// Vector field X-bar entering the divergence identity.
struct FieldSpec {
    enum class Kind { Zero, Radial };
    Kind kind = Kind::Zero;
    ModelVec center;

    static FieldSpec zero() { return {}; }
    static FieldSpec radial(ModelVec center) { return {Kind::Radial, std::move(center)}; }
};

/// tr_M(E -> P1((D_E X)^T)) at one point.
double p1_trace_term(const CurvatureFrame& frame, const SpaceForm& space, const FieldSpec& field);
double p1_trace_term(const Immersion& M, const Coords& u, const FieldSpec& field);

} // namespace curvlab::surface
