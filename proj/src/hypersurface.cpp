#include "curvlab/hypersurface.hpp"

#include <cmath>
#include <sstream>

#include "curvlab/error.hpp"

namespace curvlab::surface {

namespace {

constexpr double kMaxMetricCondition = 1e14;  // numerical rank loss; GL pole nodes reach ~1e9

std::string where(const Coords& u) {
    std::ostringstream os;
    os << "u = (";
    for (int i = 0; i < u.size(); ++i) os << (i ? ", " : "") << u(i);
    os << ")";
    return os.str();
}

// Unit normal in the model, J-orthogonal to the tangents (and to x for non-flat models),
// with det[x?, t_1..t_m, eta] > 0.
ModelVec canonical_normal(const SpaceForm& space, const ModelVec& x, const TangentMat& t) {
    const int n = space.model_dim();
    const int m = static_cast<int>(t.cols());
    const int cols = space.flat() ? m : m + 1;
    ModelMat B(n, cols);
    if (space.flat()) {
        B = t;
    } else {
        B.col(0) = x;
        B.rightCols(m) = t;
    }
    ModelMat JB = B;
    if (space.kind() == ambient::Kind::Hyperbolic) JB.row(0) *= -1.0;
    const ModelMat gram = B.transpose() * JB;
    const auto solver = gram.fullPivLu();
    auto project = [&](const ModelVec& v) -> ModelVec {
        const ModelVec rhs = JB.transpose() * v;
        return v - B * solver.solve(rhs);
    };
    ModelVec best;
    double best_q = -1.0;
    for (int e = 0; e < n; ++e) {
        ModelVec v = ModelVec::Zero(n);
        v(e) = 1.0;
        ModelVec p = project(v);
        const double q = space.inner(p, p);
        if (q > best_q) {
            best_q = q;
            best = p;
        }
    }
    best = project(best);
    const double q = space.inner(best, best);
    if (!(q > 0.0)) throw Error(ErrorKind::Degenerate, "normal space is degenerate");
    best /= std::sqrt(q);
    ModelMat full(n, n);
    full.leftCols(cols) = B;
    full.col(cols) = best;
    if (full.determinant() < 0.0) best = -best;
    return best;
}

} // namespace

Immersion::Immersion(ImmersionSpec spec) : spec_(std::move(spec)) {
    if (spec_.m != spec_.space.hypersurface_dim()) {
        throw Error(ErrorKind::Config, "intrinsic dimension does not match the ambient space");
    }
    if (spec_.m < 2 || spec_.m > kMaxIntrinsicDim) throw Error(ErrorKind::Config, "m must be in [2, 4]");
    if (spec_.box.dim() != spec_.m || spec_.box.hi.size() != spec_.m ||
        static_cast<int>(spec_.box.periodic.size()) != spec_.m) {
        throw Error(ErrorKind::Config, "parameter box has the wrong dimension");
    }
    for (int i = 0; i < spec_.m; ++i) {
        if (!(spec_.box.hi(i) > spec_.box.lo(i))) throw Error(ErrorKind::Config, "empty parameter box");
    }
    if (!spec_.chart) throw Error(ErrorKind::Config, "immersion has no chart");
    if (spec_.mode == JetMode::Analytic && !spec_.jet) {
        throw Error(ErrorKind::Config, "analytic jets requested but no jet oracle supplied");
    }
    if (!(spec_.fd_step > 0.0)) throw Error(ErrorKind::Config, "finite-difference step must be positive");

    if (spec_.orientation == 1 || spec_.orientation == -1) {
        orientation_ = spec_.orientation;
        return;
    }
    // Mean S1 over a coarse cell-centred probe grid decides the normal.
    constexpr int probes = 5;
    int total = 1;
    for (int i = 0; i < spec_.m; ++i) total *= probes;
    double sum = 0.0;
    orientation_ = 1;
    for (int idx = 0; idx < total; ++idx) {
        Coords u(spec_.m);
        int rest = idx;
        for (int i = 0; i < spec_.m; ++i) {
            u(i) = spec_.box.lo(i) + (rest % probes + 0.5) / probes * spec_.box.extent(i);
            rest /= probes;
        }
        try {
            sum += frame_from_jet(spec_.space, jet(u), 1, u).S1;
        } catch (const Error&) {
        }
    }
    orientation_ = sum >= 0.0 ? 1 : -1;
}

ModelVec Immersion::point(const Coords& u) const { return spec_.space.project_to_model(spec_.chart(u)); }

Jet Immersion::jet(const Coords& u) const {
    if (spec_.mode == JetMode::Analytic) return spec_.jet(u);
    return finite_difference_jet(u);
}

Jet Immersion::finite_difference_jet(const Coords& u) const {
    const int m = spec_.m;
    const int n = spec_.space.model_dim();
    Jet j;
    j.x = point(u);
    j.d1.resize(n, m);
    Coords h(m);
    for (int i = 0; i < m; ++i) h(i) = spec_.fd_step * spec_.box.extent(i);
    auto probe = [&](int a, double sa, int b, double sb) {
        Coords v = u;
        v(a) += sa * h(a);
        if (b >= 0) v(b) += sb * h(b);
        return point(v);
    };
    for (int i = 0; i < m; ++i) {
        const ModelVec p = probe(i, 1.0, -1, 0.0);
        const ModelVec q = probe(i, -1.0, -1, 0.0);
        j.d1.col(i) = (p - q) / (2.0 * h(i));
        j.second(i, i) = (p - 2.0 * j.x + q) / (h(i) * h(i));
    }
    for (int a = 0; a < m; ++a) {
        for (int b = a + 1; b < m; ++b) {
            const ModelVec mixed =
                (probe(a, 1, b, 1) - probe(a, 1, b, -1) - probe(a, -1, b, 1) + probe(a, -1, b, -1)) /
                (4.0 * h(a) * h(b));
            j.second(a, b) = mixed;
            j.second(b, a) = mixed;
        }
    }
    return j;
}

Immersion Immersion::with_jets(JetMode mode, double fd_step) const {
    ImmersionSpec spec = spec_;
    spec.mode = mode;
    spec.fd_step = fd_step;
    spec.orientation = orientation_;
    return Immersion(std::move(spec));
}

Coords CurvatureFrame::tangential_coords(const SpaceForm& space, const ModelVec& v) const {
    Coords c(m());
    for (int j = 0; j < m(); ++j) c(j) = space.inner(v, tangents.col(j));
    return g_inv * c;
}

CurvatureFrame frame_from_jet(const SpaceForm& space, const Jet& jet, int orientation, const Coords& u) {
    const int m = static_cast<int>(jet.d1.cols());
    CurvatureFrame f;
    f.u = u;
    f.x = jet.x;
    f.tangents = jet.d1;
    f.g.resize(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) f.g(i, j) = space.inner(jet.d1.col(i), jet.d1.col(j));
    }
    Eigen::SelfAdjointEigenSolver<FormMat> metric(f.g);
    const auto& lam = metric.eigenvalues();
    if (!(lam(0) > 0.0) || lam(m - 1) / lam(0) > kMaxMetricCondition) {
        throw Error(ErrorKind::Degenerate, "first fundamental form is degenerate at " + where(u));
    }
    const FormMat& Q = metric.eigenvectors();
    const Coords inv_sqrt = lam.cwiseSqrt().cwiseInverse();
    const FormMat g_m12 = Q * inv_sqrt.asDiagonal() * Q.transpose();
    f.g_inv = Q * lam.cwiseInverse().asDiagonal() * Q.transpose();
    f.area_density = std::sqrt(lam.prod());

    f.eta = static_cast<double>(orientation) * canonical_normal(space, jet.x, jet.d1);

    f.b.resize(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = i; j < m; ++j) {
            f.b(i, j) = space.inner(f.eta, jet.second(i, j));
            f.b(j, i) = f.b(i, j);
        }
    }
    f.A = f.g_inv * f.b;

    FormMat sym = g_m12 * f.b * g_m12;
    sym = 0.5 * (sym + sym.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<FormMat> shape(sym);
    f.k = shape.eigenvalues();
    f.basis = g_m12 * shape.eigenvectors();

    f.S1 = f.k.sum();
    f.S2 = 0.0;
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) f.S2 += f.k(i) * f.k(j);
    }
    f.H = f.S1 / m;
    f.R = space.kappa() + 2.0 * f.S2 / (m * (m - 1.0));
    f.theta = Coords::Constant(m, f.S1) - f.k;
    return f;
}

CurvatureFrame curvature_frame(const Immersion& M, const Coords& u) {
    return frame_from_jet(M.space(), M.jet(u), M.orientation(), u);
}

Coords newton_apply(const CurvatureFrame& frame, const Coords& v) { return frame.S1 * v - frame.A * v; }

double p1_trace_term(const CurvatureFrame& frame, const SpaceForm& space, const FieldSpec& field) {
    if (field.kind == FieldSpec::Kind::Zero) return 0.0;
    double sum = 0.0;
    for (int i = 0; i < frame.m(); ++i) {
        const ModelVec e = frame.push_forward(frame.basis.col(i));
        const ModelVec d = ambient::radial_field_derivative(space, field.center, frame.x, e);
        sum += frame.theta(i) * space.inner(d, e);
    }
    return sum;
}

double p1_trace_term(const Immersion& M, const Coords& u, const FieldSpec& field) {
    return p1_trace_term(curvature_frame(M, u), M.space(), field);
}

} // namespace curvlab::surface
