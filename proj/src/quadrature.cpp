#include "curvlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "curvlab/error.hpp"

namespace curvlab::quad {

Rule1D gauss_legendre(int n, double a, double b) {
    if (n < 1) throw Error(ErrorKind::Config, "quadrature needs at least one node");
    Rule1D r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged root.
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = mid - half * x;
        r.nodes[n - 1 - i] = mid + half * x;
        r.weights[i] = r.weights[n - 1 - i] = half * w;
    }
    if (n % 2 == 1) r.nodes[n / 2] = mid;
    return r;
}

Rule1D periodic_trapezoid(int n, double a, double b) {
    if (n < 1) throw Error(ErrorKind::Config, "quadrature needs at least one node");
    Rule1D r;
    const double h = (b - a) / n;
    for (int i = 0; i < n; ++i) {
        r.nodes.push_back(a + (i + 0.5) * h);
        r.weights.push_back(h);
    }
    return r;
}

double tree_sum(std::span<const double> v) {
    if (v.empty()) return 0.0;
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return tree_sum(v.first(half)) + tree_sum(v.subspan(half));
}

int resolve_workers(int workers) {
    if (workers > 0) return workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body) {
    const std::size_t w = std::min<std::size_t>(std::max(1, resolve_workers(workers)), std::max<std::size_t>(n, 1));
    if (w <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(w);
    const std::size_t chunk = (n + w - 1) / w;
    for (std::size_t t = 0; t < w; ++t) {
        pool.emplace_back([&, t] {
            try {
                const std::size_t end = std::min(n, (t + 1) * chunk);
                for (std::size_t i = t * chunk; i < end; ++i) body(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    // First failing chunk in index order, so the reported error does not depend on timing.
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

Grid::Grid(const surface::ParameterBox& box, const std::vector<int>& counts) {
    if (static_cast<int>(counts.size()) != box.dim()) {
        throw Error(ErrorKind::Config, "grid has " + std::to_string(counts.size()) + " axes, surface has " +
                                           std::to_string(box.dim()));
    }
    for (int i = 0; i < box.dim(); ++i) {
        if (counts[i] < 3) throw Error(ErrorKind::Config, "grid needs at least 3 nodes per axis");
        Axis a;
        a.lo = box.lo(i);
        a.hi = box.hi(i);
        a.periodic = box.periodic[i];
        Rule1D r = a.periodic ? periodic_trapezoid(counts[i], a.lo, a.hi) : gauss_legendre(counts[i], a.lo, a.hi);
        a.nodes = std::move(r.nodes);
        a.weights = std::move(r.weights);
        double edge = a.lo;
        for (int k = 0; k < counts[i]; ++k) {
            a.cell_lo.push_back(edge);
            edge += a.weights[k];
            a.cell_hi.push_back(k + 1 == counts[i] ? a.hi : edge);
        }
        size_ *= counts[i];
        axes_.push_back(std::move(a));
    }
}

std::vector<int> Grid::counts() const {
    std::vector<int> c;
    for (const auto& a : axes_) c.push_back(a.size());
    return c;
}

void Grid::unravel(std::size_t index, int* multi) const {
    for (int i = dim() - 1; i >= 0; --i) {
        const std::size_t n = axes_[i].nodes.size();
        multi[i] = static_cast<int>(index % n);
        index /= n;
    }
}

std::size_t Grid::ravel(const int* multi) const {
    std::size_t idx = 0;
    for (int i = 0; i < dim(); ++i) idx = idx * axes_[i].nodes.size() + multi[i];
    return idx;
}

Coords Grid::node(std::size_t index) const {
    int multi[kMaxIntrinsicDim];
    unravel(index, multi);
    Coords u(dim());
    for (int i = 0; i < dim(); ++i) u(i) = axes_[i].nodes[multi[i]];
    return u;
}

double Grid::weight(std::size_t index) const {
    int multi[kMaxIntrinsicDim];
    unravel(index, multi);
    double w = 1.0;
    for (int i = 0; i < dim(); ++i) w *= axes_[i].weights[multi[i]];
    return w;
}

surface::ParameterBox sub_box(const surface::ParameterBox& box, const Coords& lo, const Coords& hi) {
    if (lo.size() != box.dim() || hi.size() != box.dim()) {
        throw Error(ErrorKind::Config, "sub-rectangle has the wrong dimension");
    }
    surface::ParameterBox out = box;
    for (int i = 0; i < box.dim(); ++i) {
        if (!(hi(i) > lo(i))) throw Error(ErrorKind::Config, "sub-rectangle is empty");
        const bool full = box.periodic[i] && std::abs((hi(i) - lo(i)) - box.extent(i)) <= 1e-12 * box.extent(i);
        if (!box.periodic[i] && (lo(i) < box.lo(i) - 1e-12 || hi(i) > box.hi(i) + 1e-12)) {
            throw Error(ErrorKind::Config, "sub-rectangle leaves the parameter box");
        }
        out.lo(i) = lo(i);
        out.hi(i) = hi(i);
        out.periodic[i] = full;
    }
    return out;
}

std::vector<int> coarsen(const std::vector<int>& counts) {
    std::vector<int> c;
    for (int n : counts) c.push_back(std::max(4, n / 2));
    return c;
}

} // namespace curvlab::quad
