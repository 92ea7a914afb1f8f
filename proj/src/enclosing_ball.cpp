#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <random>

#include "curvlab/error.hpp"
#include "curvlab/measure.hpp"

namespace curvlab::measure {

namespace {

using Vec = Eigen::VectorXd;

struct Ball {
    Vec c;
    double r2 = -1.0;
};

// Move-to-front minimal ball (Welzl / Gaertner). Recursion depth is bounded by dim + 1.
// With lorentz_kappa < 0 the points lie on the hyperboloid and balls are the caps
// {x : -<c, x>_L <= tau}; r2 then holds tau.
class Miniball {
public:
    explicit Miniball(const std::vector<Vec>& pts, double lorentz_kappa = 0.0)
        : pts_(pts), dim_(pts.empty() ? 0 : pts[0].size()), lk_(lorentz_kappa) {
        std::vector<int> order(pts.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
        std::mt19937_64 rng(0x5eedULL);
        std::shuffle(order.begin(), order.end(), rng);
        list_.assign(order.begin(), order.end());
        mtf(list_.end());
        // A second sweep catches points rejected by rounding in the first.
        for (int pass = 0; pass < 3; ++pass) {
            bool ok = true;
            for (int i : list_) ok = ok && contains(pts_[i]);
            if (ok) break;
            mtf(list_.end());
        }
    }

    const Ball& ball() const { return ball_; }
    const std::vector<int>& support() const { return last_support_; }

private:
    double lorentz(const Vec& a, const Vec& b) const { return a.dot(b) - 2.0 * a(0) * b(0); }

    bool contains(const Vec& p) const {
        if (ball_.r2 < 0.0) return false;
        if (lk_ < 0.0) return ball_.c.size() == 0 || -lorentz(ball_.c, p) <= ball_.r2 * (1.0 + 2e-12);
        const double d2 = (p - ball_.c).squaredNorm();
        return d2 <= ball_.r2 * (1.0 + 2e-12) + 1e-300;
    }

    void from_support() {
        if (support_.empty()) {
            ball_.r2 = -1.0;
            return;
        }
        if (lk_ < 0.0) {
            lorentz_from_support();
            return;
        }
        const Vec& q0 = pts_[support_[0]];
        const int k = static_cast<int>(support_.size()) - 1;
        if (k == 0) {
            ball_ = {q0, 0.0};
            return;
        }
        Eigen::MatrixXd V(dim_, k);
        for (int j = 0; j < k; ++j) V.col(j) = pts_[support_[j + 1]] - q0;
        const Eigen::MatrixXd G = V.transpose() * V;
        const Vec rhs = 0.5 * G.diagonal();
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(G);
        cod.setThreshold(1e-14);
        const Vec lambda = cod.solve(rhs);
        const Vec c = q0 + V * lambda;
        double r2 = 0.0;
        for (int i : support_) r2 = std::max(r2, (pts_[i] - c).squaredNorm());
        ball_ = {c, r2};
    }

    // Center c = sum mu_i q_i with <c, q_i>_L = -1 on the support. Support sets that bound no
    // ball (horocycles, hypercycles) give an empty center, which contains everything.
    void lorentz_from_support() {
        const int k = static_cast<int>(support_.size());
        Eigen::MatrixXd G(k, k);
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < k; ++j) G(i, j) = lorentz(pts_[support_[i]], pts_[support_[j]]);
        }
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(G);
        cod.setThreshold(1e-14);
        const Vec mu = cod.solve(Vec::Constant(k, -1.0));
        Vec c = Vec::Zero(dim_);
        for (int i = 0; i < k; ++i) c += mu(i) * pts_[support_[i]];
        const double nn = -lorentz(c, c);
        if (!(nn > 0.0) || !(c(0) > 0.0)) {
            ball_ = {Vec(), std::numeric_limits<double>::infinity()};
            return;
        }
        c /= std::sqrt(-nn * lk_);
        double tau = 0.0;
        for (int i : support_) tau = std::max(tau, -lorentz(c, pts_[i]));
        ball_ = {c, tau};
    }

    void mtf(std::list<int>::iterator end) {
        from_support();
        last_support_ = support_;
        if (static_cast<int>(support_.size()) == dim_ + 1) return;
        for (auto it = list_.begin(); it != end;) {
            auto next = std::next(it);
            if (!contains(pts_[*it])) {
                support_.push_back(*it);
                mtf(it);
                support_.pop_back();
                list_.splice(list_.begin(), list_, it);
            }
            it = next;
        }
    }

    const std::vector<Vec>& pts_;
    int dim_;
    double lk_;
    std::list<int> list_;
    std::vector<int> support_;
    std::vector<int> last_support_;
    Ball ball_;
};

double pairwise_lower_bound(const ambient::SpaceForm& space, const std::vector<ModelVec>& s,
                            const std::vector<int>& extra) {
    std::vector<int> cand = extra;
    const std::size_t stride = std::max<std::size_t>(1, s.size() / 256);
    for (std::size_t i = 0; i < s.size(); i += stride) cand.push_back(static_cast<int>(i));
    double best = 0.0;
    for (int c : cand) {
        for (const ModelVec& p : s) best = std::max(best, ambient::distance_unchecked(space, s[c], p));
    }
    return best;
}

int farthest(const ambient::SpaceForm& space, const ModelVec& c, const std::vector<ModelVec>& s) {
    int best = 0;
    double d = -1.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double di = ambient::distance_unchecked(space, c, s[i]);
        if (di > d) {
            d = di;
            best = static_cast<int>(i);
        }
    }
    return best;
}

} // namespace

EnclosingBall min_enclosing_ball(const ambient::SpaceForm& space, const std::vector<ModelVec>& samples) {
    if (samples.empty()) throw Error(ErrorKind::Precondition, "enclosing ball of an empty sample set");
    for (const ModelVec& p : samples) space.check_on_model(p);
    EnclosingBall out;

    if (space.kind() != ambient::Kind::Hyperbolic) {
        std::vector<Vec> pts;
        pts.reserve(samples.size());
        for (const ModelVec& p : samples) pts.emplace_back(p);
        const Miniball mb(pts);
        std::vector<int> support = mb.support();
        if (space.flat()) {
            out.center = mb.ball().c;
            double r = 0.0;
            for (const ModelVec& p : samples) r = std::max(r, (p - out.center).norm());
            out.radius = r;
            out.method = "welzl";
        } else {
            // Minimal caps on the sphere are cut out by the minimal Euclidean ball of the embedding.
            const Vec c = mb.ball().c;
            const double s = std::sqrt(space.kappa());
            const double scale = 1.0 / s;
            if (c.norm() <= 1e-12 * scale) {
                throw Error(ErrorKind::Precondition, "samples are not contained in an open hemisphere");
            }
            out.center = ModelVec(c / (c.norm() * s));
            double min_dot = std::numeric_limits<double>::infinity();
            double r = 0.0;
            for (const ModelVec& p : samples) {
                min_dot = std::min(min_dot, space.kappa() * p.dot(out.center));
                r = std::max(r, ambient::distance_unchecked(space, out.center, p));
            }
            if (!(min_dot > 1e-12)) {
                throw Error(ErrorKind::Precondition, "samples are not contained in an open hemisphere");
            }
            out.radius = r;
            out.method = "welzl_embedding";
        }
        out.pairwise_diameter = pairwise_lower_bound(space, samples, support);
        return out;
    }

    // Hyperbolic space: geodesic pull towards the farthest sample with step 1/(k+1).
    std::vector<ModelVec> thin;
    const std::size_t stride = std::max<std::size_t>(1, samples.size() / 2000);
    for (std::size_t i = 0; i < samples.size(); i += stride) thin.push_back(samples[i]);
    ModelVec c = thin[0];
    for (int k = 1; k <= 20000; ++k) {
        const ModelVec& p = thin[farthest(space, c, thin)];
        const double d = ambient::distance_unchecked(space, c, p);
        const double step = d / (k + 1);
        if (step < 1e-10) break;
        const ModelVec v = ambient::grad_distance_unchecked(space, p, c);  // points away from p
        c = space.project_to_model(space.geodesic(c, -v, step));
    }
    out.center = c;
    int far = farthest(space, c, samples);
    out.radius = ambient::distance_unchecked(space, c, samples[far]);
    out.method = "geodesic_pull";

    // The pull converges slowly; the hyperboloid move-to-front solve is exact when it succeeds.
    std::vector<Vec> pts;
    pts.reserve(samples.size());
    for (const ModelVec& p : samples) pts.emplace_back(p);
    const Miniball mb(pts, space.kappa());
    if (mb.ball().c.size() == space.model_dim()) {
        const ModelVec cm = space.project_to_model(ModelVec(mb.ball().c));
        const int f2 = farthest(space, cm, samples);
        const double r2 = ambient::distance_unchecked(space, cm, samples[f2]);
        if (r2 < out.radius) {
            out.center = cm;
            out.radius = r2;
            out.method = "geodesic_pull+welzl_hyperboloid";
            far = f2;
        }
    }
    out.pairwise_diameter = pairwise_lower_bound(space, samples, {far});
    return out;
}

} // namespace curvlab::measure
