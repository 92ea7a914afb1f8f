#include "curvlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include "curvlab/error.hpp"

namespace curvlab::measure {

namespace {

constexpr int kSubSamples = 8;

std::string where(const Coords& u) {
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < u.size(); ++i) os << (i ? ", " : "") << u(i);
    os << ")";
    return os.str();
}

struct Deriv {
    double d1 = 0.0;
    double d2 = 0.0;
};

// Quadratic through three (offset, value) pairs; derivatives at offset 0.
Deriv quadratic_derivs(double t0, double f0, double t1, double f1, double t2, double f2) {
    const double f01 = (f1 - f0) / (t1 - t0);
    const double f12 = (f2 - f1) / (t2 - t1);
    const double f012 = (f12 - f01) / (t2 - t0);
    return {f01 - f012 * (t0 + t1), 2.0 * f012};
}

class Stencils {
public:
    explicit Stencils(const quad::Grid& g) : grid_(g), stride_(g.dim(), 1) {
        for (int j = g.dim() - 2; j >= 0; --j) stride_[j] = stride_[j + 1] * g.axis(j + 1).size();
    }

    // First and second derivative along axis j of a node array, at the node with multi-index `mi`.
    template <class Get>
    Deriv along(int j, std::size_t idx, const int* mi, const Get& get) const {
        const quad::Axis& ax = grid_.axis(j);
        const int n = ax.size();
        const int k = mi[j];
        auto node_at = [&](int kk) { return idx + (static_cast<long>(kk) - k) * static_cast<long>(stride_[j]); };
        const double u = ax.nodes[k];
        if (ax.periodic) {
            const int km = (k - 1 + n) % n;
            const int kp = (k + 1) % n;
            const double tm = k == 0 ? ax.nodes[km] - ax.period() - u : ax.nodes[km] - u;
            const double tp = k == n - 1 ? ax.nodes[kp] + ax.period() - u : ax.nodes[kp] - u;
            return quadratic_derivs(tm, get(node_at(km)), 0.0, get(idx), tp, get(node_at(kp)));
        }
        const int a = std::clamp(k - 1, 0, n - 3);
        return quadratic_derivs(ax.nodes[a] - u, get(node_at(a)), ax.nodes[a + 1] - u, get(node_at(a + 1)),
                                ax.nodes[a + 2] - u, get(node_at(a + 2)));
    }

private:
    const quad::Grid& grid_;
    std::vector<std::size_t> stride_;
};

// Sub-intervals of [l, h] where c0 + c1 t + c2 t^2 <= 0.
int below_intervals(double c0, double c1, double c2, double l, double h, double (&out)[4]) {
    double pts[4];
    int np = 0;
    pts[np++] = l;
    const double scale = std::abs(c1) * (h - l) + std::abs(c0) + 1e-300;
    if (std::abs(c2) * (h - l) * (h - l) <= 1e-12 * scale) {
        if (c1 != 0.0) {
            const double r = -c0 / c1;
            if (r > l && r < h) pts[np++] = r;
        }
    } else {
        const double disc = c1 * c1 - 4.0 * c2 * c0;
        if (disc > 0.0) {
            const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
            double r1 = q / c2;
            double r2 = q != 0.0 ? c0 / q : r1;
            if (r1 > r2) std::swap(r1, r2);
            if (r1 > l && r1 < h) pts[np++] = r1;
            if (r2 > l && r2 < h && r2 != r1) pts[np++] = r2;
        }
    }
    pts[np++] = h;
    int n = 0;
    for (int i = 0; i + 1 < np; ++i) {
        const double m = 0.5 * (pts[i] + pts[i + 1]);
        if (c0 + m * (c1 + m * c2) <= 0.0) {
            if (n > 0 && out[2 * (n / 2) - 1] == pts[i]) {
                out[2 * (n / 2) - 1] = pts[i + 1];
            } else {
                out[n++] = pts[i];
                out[n++] = pts[i + 1];
            }
        }
    }
    return n / 2;
}

class CutCellSum {
public:
    CutCellSum(const NodeSamples& s, int ch) : s_(s), st_(s.grid), D_(s.grid.size()) {
        for (std::size_t i = 0; i < D_.size(); ++i) D_[i] = s.value(i, ch) * s.density[i];
    }

    double operator()(double threshold) const {
        const quad::Grid& g = s_.grid;
        const int m = g.dim();
        const std::size_t N = g.size();
        std::vector<double> contrib(N, 0.0);
        bool all_full = true;
        int mi[kMaxIntrinsicDim];
        for (std::size_t i = 0; i < N; ++i) {
            g.unravel(i, mi);
            const double L = s_.level[i] - threshold;
            const double* a = &s_.level_grad[i * m];
            double lo[kMaxIntrinsicDim], hi[kMaxIntrinsicDim], p[kMaxIntrinsicDim];
            double delta = 0.0;
            for (int j = 0; j < m; ++j) {
                const quad::Axis& ax = g.axis(j);
                lo[j] = ax.cell_lo[mi[j]] - ax.nodes[mi[j]];
                hi[j] = ax.cell_hi[mi[j]] - ax.nodes[mi[j]];
                p[j] = st_.along(j, i, mi, [&](std::size_t k) { return s_.level[k]; }).d2;
                const double e = std::max(-lo[j], hi[j]);
                delta += std::abs(a[j]) * e + 0.5 * std::abs(p[j]) * e * e;
            }
            if (L - delta >= 0.0) {
                all_full = false;
                continue;
            }
            double s1[kMaxIntrinsicDim], s2[kMaxIntrinsicDim];
            for (int j = 0; j < m; ++j) {
                const Deriv d = st_.along(j, i, mi, [&](std::size_t k) { return D_[k]; });
                s1[j] = d.d1;
                s2[j] = d.d2;
            }
            if (L + delta <= 0.0) {
                double v = D_[i];
                double w = 1.0;
                for (int j = 0; j < m; ++j) {
                    const double width = hi[j] - lo[j];
                    const double c = 0.5 * (hi[j] + lo[j]);
                    v += s1[j] * c + 0.5 * s2[j] * (c * c + width * width / 12.0);
                    w *= width;
                }
                contrib[i] = w * v;
                continue;
            }
            all_full = false;
            contrib[i] = cut_cell(L, a, p, lo, hi, D_[i], s1, s2, m);
        }
        if (all_full) return sum_full_density();
        return quad::tree_sum(contrib);
    }

    double sum_full_density() const {
        std::vector<double> c(D_.size());
        for (std::size_t i = 0; i < D_.size(); ++i) c[i] = s_.grid.weight(i) * D_[i];
        return quad::tree_sum(c);
    }

private:
    // Integrates the quadratic integrand model over {quadratic level model <= 0} inside one cell:
    // exactly along the axis where the level varies most, midpoint samples across the others.
    static double cut_cell(double L, const double* a, const double* p, const double* lo, const double* hi, double D,
                           const double* s1, const double* s2, int m) {
        int k = 0;
        double best = -1.0;
        for (int j = 0; j < m; ++j) {
            const double v = std::abs(a[j]) * (hi[j] - lo[j]);
            if (v > best) {
                best = v;
                k = j;
            }
        }
        int others[kMaxIntrinsicDim];
        int no = 0;
        double sub_vol = 1.0;
        for (int j = 0; j < m; ++j) {
            if (j == k) continue;
            others[no++] = j;
            sub_vol *= (hi[j] - lo[j]) / kSubSamples;
        }
        int total = 1;
        for (int q = 0; q < no; ++q) total *= kSubSamples;
        double sum = 0.0;
        for (int idx = 0; idx < total; ++idx) {
            int rest = idx;
            double c0 = L;
            double base = D;
            for (int q = 0; q < no; ++q) {
                const int j = others[q];
                const double y = lo[j] + (rest % kSubSamples + 0.5) * (hi[j] - lo[j]) / kSubSamples;
                rest /= kSubSamples;
                c0 += a[j] * y + 0.5 * p[j] * y * y;
                base += s1[j] * y + 0.5 * s2[j] * y * y;
            }
            double iv[4];
            const int n = below_intervals(c0, a[k], 0.5 * p[k], lo[k], hi[k], iv);
            for (int r = 0; r < n; ++r) {
                const double t0 = iv[2 * r], t1 = iv[2 * r + 1];
                sum += (t1 - t0) * base + s1[k] * (t1 * t1 - t0 * t0) / 2.0 +
                       s2[k] * (t1 * t1 * t1 - t0 * t0 * t0) / 6.0;
            }
        }
        return sum * sub_vol;
    }

    const NodeSamples& s_;
    Stencils st_;
    std::vector<double> D_;
};

std::vector<Coords> face_coords(const surface::ParameterBox& box, const std::vector<int>& counts, bool skip_seams) {
    std::vector<Coords> out;
    const quad::Grid g(box, counts);
    const int m = g.dim();
    for (int axis = 0; axis < m; ++axis) {
        if (skip_seams && box.periodic[axis]) continue;
        for (double face : {box.lo(axis), box.hi(axis)}) {
            int mi[kMaxIntrinsicDim];
            for (std::size_t i = 0; i < g.size(); ++i) {
                g.unravel(i, mi);
                if (mi[axis] != 0) continue;
                Coords u = g.node(i);
                u(axis) = face;
                out.push_back(u);
            }
        }
    }
    return out;
}

// Marching squares over the node grid of a 2-parameter box; returns segment endpoints in
// unwrapped parameter coordinates.
std::vector<std::pair<Coords, Coords>> trace_level(const quad::Grid& g, const LevelFn& level) {
    const int n0 = g.axis(0).size(), n1 = g.axis(1).size();
    std::vector<double> psi(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) psi[i] = level(g.node(i)).value;
    auto coord = [&](int axis, int k) {
        const quad::Axis& ax = g.axis(axis);
        const int n = ax.size();
        const int wrapped = ((k % n) + n) % n;
        return ax.nodes[wrapped] + (k >= n ? ax.period() : 0.0);
    };
    auto value = [&](int a, int b) { return psi[static_cast<std::size_t>(a % n0) * n1 + (b % n1)]; };
    std::vector<std::pair<Coords, Coords>> segs;
    const int c0 = g.axis(0).periodic ? n0 : n0 - 1;
    const int c1 = g.axis(1).periodic ? n1 : n1 - 1;
    for (int a = 0; a < c0; ++a) {
        for (int b = 0; b < c1; ++b) {
            const double v[4] = {value(a, b), value(a + 1, b), value(a + 1, b + 1), value(a, b + 1)};
            const int ca[4] = {a, a + 1, a + 1, a};
            const int cb[4] = {b, b, b + 1, b + 1};
            Coords pts[4];
            int np = 0;
            for (int e = 0; e < 4; ++e) {
                const int f = (e + 1) % 4;
                if ((v[e] <= 0.0) == (v[f] <= 0.0)) continue;
                const double t = v[e] / (v[e] - v[f]);
                Coords u(2);
                u(0) = coord(0, ca[e]) + t * (coord(0, ca[f]) - coord(0, ca[e]));
                u(1) = coord(1, cb[e]) + t * (coord(1, cb[f]) - coord(1, cb[e]));
                pts[np++] = u;
            }
            if (np == 2) {
                segs.emplace_back(pts[0], pts[1]);
            } else if (np == 4) {
                // Saddle: the centre value decides which corners connect.
                const double centre = 0.25 * (v[0] + v[1] + v[2] + v[3]);
                const bool join_first = (centre <= 0.0) == (v[0] <= 0.0);
                if (join_first) {
                    segs.emplace_back(pts[0], pts[1]);
                    segs.emplace_back(pts[2], pts[3]);
                } else {
                    segs.emplace_back(pts[0], pts[3]);
                    segs.emplace_back(pts[1], pts[2]);
                }
            }
        }
    }
    return segs;
}

} // namespace

DomainSpec DomainSpec::full_chart() { return {}; }

DomainSpec DomainSpec::sub_rectangle(Coords lo, Coords hi, std::string label) {
    DomainSpec d;
    d.kind = Kind::SubRectangle;
    d.lo = std::move(lo);
    d.hi = std::move(hi);
    d.label = std::move(label);
    return d;
}

DomainSpec DomainSpec::sublevel(LevelFn level, std::string label) {
    DomainSpec d;
    d.kind = Kind::Sublevel;
    d.level = std::move(level);
    d.label = std::move(label);
    return d;
}

NodeSamples sample(const Immersion& M, const quad::Grid& grid, int channels, const MultiIntegrand& fn,
                   const LevelSpec& level, int workers) {
    NodeSamples s{grid, channels, {}, {}, {}, {}};
    const std::size_t N = grid.size();
    const int m = grid.dim();
    s.raw.assign(N * channels, 0.0);
    s.density.assign(N, 0.0);
    if (level.kind != LevelSpec::Kind::None) {
        s.level.assign(N, 0.0);
        s.level_grad.assign(N * m, 0.0);
    }
    const auto& space = M.space();
    quad::parallel_for(N, workers, [&](std::size_t i) {
        const Coords u = grid.node(i);
        const CurvatureFrame f = surface::curvature_frame(M, u);
        double* out = &s.raw[i * channels];
        if (channels > 0) fn(f, out);
        for (int c = 0; c < channels; ++c) {
            if (!std::isfinite(out[c])) {
                throw Error(ErrorKind::Evaluation, "integrand is not finite at u = " + where(u));
            }
        }
        s.density[i] = f.area_density;
        if (level.kind == LevelSpec::Kind::Distance) {
            s.level[i] = ambient::distance_unchecked(space, level.center, f.x);
            const ModelVec n = ambient::grad_distance_unchecked(space, level.center, f.x);
            for (int j = 0; j < m; ++j) s.level_grad[i * m + j] = space.inner(n, f.tangents.col(j));
        } else if (level.kind == LevelSpec::Kind::Function) {
            const LevelValue lv = level.fn(u);
            double scale = 1.0;
            if (level.metric_normalized) {
                const double gn = std::sqrt(std::max(0.0, lv.grad.dot(f.g_inv * lv.grad)));
                if (!(gn > 1e-8)) throw Error(ErrorKind::Tracing, "level function has a vanishing gradient at u = " + where(u));
                scale = 1.0 / gn;
            }
            s.level[i] = lv.value * scale;
            for (int j = 0; j < m; ++j) s.level_grad[i * m + j] = lv.grad(j) * scale;
        }
    });
    return s;
}

double sum_full(const NodeSamples& s, int ch) {
    std::vector<double> c(s.grid.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = s.grid.weight(i) * s.density[i] * s.value(i, ch);
    return quad::tree_sum(c);
}

double sum_below(const NodeSamples& s, int ch, double threshold) {
    if (!s.has_level()) throw Error(ErrorKind::Precondition, "masked sum needs sampled level data");
    return CutCellSum(s, ch)(threshold);
}

std::vector<double> sum_below(const NodeSamples& s, int ch, const std::vector<double>& thresholds, int workers) {
    if (!s.has_level()) throw Error(ErrorKind::Precondition, "masked sum needs sampled level data");
    const CutCellSum sum(s, ch);
    std::vector<double> out(thresholds.size());
    quad::parallel_for(thresholds.size(), workers, [&](std::size_t k) { out[k] = sum(thresholds[k]); });
    return out;
}

quad::Grid domain_grid(const Immersion& M, const DomainSpec& omega, const std::vector<int>& counts) {
    if (omega.kind == DomainSpec::Kind::SubRectangle) return quad::Grid(quad::sub_box(M.box(), omega.lo, omega.hi), counts);
    if (omega.kind == DomainSpec::Kind::Sublevel && !omega.level) {
        throw Error(ErrorKind::Config, "sublevel domain without a level function");
    }
    return quad::Grid(M.box(), counts);
}

std::vector<double> integrate(const Immersion& M, const DomainSpec& omega, int channels, const MultiIntegrand& phi,
                              const Options& opt) {
    const quad::Grid g = domain_grid(M, omega, opt.grid);
    const bool masked = omega.kind == DomainSpec::Kind::Sublevel;
    const NodeSamples s =
        sample(M, g, channels, phi, masked ? LevelSpec::function(omega.level) : LevelSpec::none(), opt.workers);
    std::vector<double> out;
    for (int c = 0; c < channels; ++c) out.push_back(masked ? sum_below(s, c, 0.0) : sum_full(s, c));
    return out;
}

double integrate(const Immersion& M, const DomainSpec& omega, const Integrand& phi, const Options& opt) {
    return integrate(M, omega, 1, [&](const CurvatureFrame& f, double* out) { out[0] = phi(f); }, opt)[0];
}

void check_ball(const Immersion& M, const ModelVec& x0, double r, const std::vector<int>& counts) {
    M.space().check_on_model(x0);
    if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorKind::Precondition, "ball radius must be positive");
    if (r >= M.space().injectivity_radius()) {
        throw Error(ErrorKind::Precondition, "ball radius " + std::to_string(r) + " reaches the injectivity radius");
    }
    if (M.closed()) return;
    for (const Coords& u : face_coords(M.box(), counts, true)) {
        if (ambient::distance_unchecked(M.space(), x0, M.point(u)) <= r) {
            throw Error(ErrorKind::Precondition, "ball of radius " + std::to_string(r) +
                                                     " meets the boundary of the surface at u = " + where(u));
        }
    }
}

BallIntegral integrate_ball(const Immersion& M, const ModelVec& x0, double r, const Integrand& phi,
                            const Options& opt) {
    check_ball(M, x0, r, opt.grid);
    const MultiIntegrand fn = [&](const CurvatureFrame& f, double* out) { out[0] = phi(f); };
    auto at = [&](const std::vector<int>& counts) {
        const NodeSamples s = sample(M, quad::Grid(M.box(), counts), 1, fn, LevelSpec::distance(x0), opt.workers);
        return sum_below(s, 0, r);
    };
    const double fine = at(opt.grid);
    const double coarse = at(quad::coarsen(opt.grid));
    return {fine, std::abs(fine - coarse)};
}

double boundary_integral(const Immersion& M, const DomainSpec& omega, const Integrand& phi, const Options& opt) {
    if (M.m() != 2) throw Error(ErrorKind::Precondition, "boundary integrals are implemented for surfaces (m = 2) only");
    const auto& space = M.space();
    std::vector<double> parts;
    if (omega.kind == DomainSpec::Kind::Sublevel) {
        if (!omega.level) throw Error(ErrorKind::Config, "sublevel domain without a level function");
        const quad::Grid g(M.box(), opt.grid);
        for (const auto& [p, q] : trace_level(g, omega.level)) {
            const Coords mid = 0.5 * (p + q);
            for (const Coords* end : {&p, &q}) {
                if (omega.level(*end).grad.norm() < 1e-8) {
                    throw Error(ErrorKind::Tracing, "level set is not regular near u = " + where(*end));
                }
            }
            const CurvatureFrame f = surface::curvature_frame(M, mid);
            const Coords d = q - p;
            parts.push_back(phi(f) * std::sqrt(std::max(0.0, f.metric(d, d))));
        }
        return quad::tree_sum(parts);
    }
    const surface::ParameterBox box =
        omega.kind == DomainSpec::Kind::SubRectangle ? quad::sub_box(M.box(), omega.lo, omega.hi) : M.box();
    for (int axis = 0; axis < 2; ++axis) {
        if (box.periodic[axis]) continue;  // seam, not boundary
        const int other = 1 - axis;
        const int n = opt.grid.at(other);
        const quad::Rule1D rule = box.periodic[other] ? quad::periodic_trapezoid(n, box.lo(other), box.hi(other))
                                                      : quad::gauss_legendre(n, box.lo(other), box.hi(other));
        for (double face : {box.lo(axis), box.hi(axis)}) {
            for (int k = 0; k < n; ++k) {
                Coords u(2);
                u(axis) = face;
                u(other) = rule.nodes[k];
                const surface::Jet jet = M.jet(u);
                const double len = space.norm(jet.d1.col(other));
                if (len <= 1e-12 * (1.0 + space.norm(jet.x))) {
                    parts.push_back(0.0);
                    continue;
                }
                const CurvatureFrame f = surface::frame_from_jet(space, jet, M.orientation(), u);
                parts.push_back(rule.weights[k] * len * phi(f));
            }
        }
    }
    return quad::tree_sum(parts);
}

RadialProfile radial_profile(const Immersion& M, const ModelVec& x0, const Integrand& phi,
                             const std::vector<double>& radii, const Options& opt, std::string label) {
    if (radii.empty()) throw Error(ErrorKind::Config, "radial profile needs at least one radius");
    for (std::size_t j = 0; j < radii.size(); ++j) {
        if (!(radii[j] > 0.0) || (j > 0 && !(radii[j] > radii[j - 1]))) {
            throw Error(ErrorKind::Config, "profile radii must be positive and strictly increasing");
        }
    }
    check_ball(M, x0, radii.back(), opt.grid);
    const MultiIntegrand fn = [&](const CurvatureFrame& f, double* out) { out[0] = phi(f); };
    auto at = [&](const std::vector<int>& counts) {
        const NodeSamples s = sample(M, quad::Grid(M.box(), counts), 1, fn, LevelSpec::distance(x0), opt.workers);
        return sum_below(s, 0, radii, opt.workers);
    };
    RadialProfile p;
    p.center = x0;
    p.radii = radii;
    p.values = at(opt.grid);
    const std::vector<double> coarse = at(quad::coarsen(opt.grid));
    for (std::size_t j = 0; j < radii.size(); ++j) p.refinement_estimate.push_back(std::abs(p.values[j] - coarse[j]));
    p.integrand = std::move(label);
    return p;
}

void write_profile_csv(std::ostream& os, const RadialProfile& p) {
    os << "r,value,refinement_estimate\n";
    os << std::setprecision(17);
    for (std::size_t j = 0; j < p.radii.size(); ++j) {
        os << p.radii[j] << ',' << p.values[j] << ',' << p.refinement_estimate[j] << '\n';
    }
}

std::vector<ModelVec> domain_points(const Immersion& M, const DomainSpec& omega, const std::vector<int>& counts) {
    std::vector<Coords> us;
    const quad::Grid g = domain_grid(M, omega, counts);
    switch (omega.kind) {
    case DomainSpec::Kind::FullChart:
    case DomainSpec::Kind::SubRectangle: {
        for (std::size_t i = 0; i < g.size(); ++i) us.push_back(g.node(i));
        const surface::ParameterBox box =
            omega.kind == DomainSpec::Kind::SubRectangle ? quad::sub_box(M.box(), omega.lo, omega.hi) : M.box();
        for (Coords& u : face_coords(box, counts, true)) us.push_back(std::move(u));
        break;
    }
    case DomainSpec::Kind::Sublevel: {
        for (std::size_t i = 0; i < g.size(); ++i) {
            Coords u = g.node(i);
            if (omega.level(u).value <= 0.0) us.push_back(std::move(u));
        }
        for (Coords& u : face_coords(M.box(), counts, true)) {
            if (omega.level(u).value <= 0.0) us.push_back(std::move(u));
        }
        if (M.m() == 2) {
            for (const auto& [p, q] : trace_level(g, omega.level)) {
                us.push_back(p);
                us.push_back(q);
            }
        }
        break;
    }
    }
    std::vector<ModelVec> pts;
    pts.reserve(us.size());
    for (const Coords& u : us) pts.push_back(M.point(u));
    return pts;
}

} // namespace curvlab::measure
