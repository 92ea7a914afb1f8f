#pragma once

#include <functional>
#include <span>
#include <vector>

#include "curvlab/hypersurface.hpp"

namespace curvlab::quad {

struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b].
Rule1D gauss_legendre(int n, double a, double b);
/// n-point periodic trapezoid rule on [a, b), nodes at cell midpoints.
Rule1D periodic_trapezoid(int n, double a, double b);

/// Pairwise sum with a split pattern that depends only on the length.
double tree_sum(std::span<const double> values);

/// Runs body(i) for i in [0, n) on up to `workers` threads with static chunking.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body);

/// Worker count after applying the default (0 -> hardware concurrency).
int resolve_workers(int workers);

struct Axis {
    double lo = 0.0;
    double hi = 0.0;
    bool periodic = false;
    std::vector<double> nodes;
    std::vector<double> weights;
    // Cell around node i is [cell_lo[i], cell_hi[i]]; widths equal the weights.
    std::vector<double> cell_lo;
    std::vector<double> cell_hi;

    int size() const { return static_cast<int>(nodes.size()); }
    double period() const { return hi - lo; }
};

/// Tensor-product grid over a parameter box. Node index is row-major with axis 0 slowest.
class Grid {
public:
    /// counts[i] nodes on axis i. Periodic flags come from `box`.
    Grid(const surface::ParameterBox& box, const std::vector<int>& counts);

    int dim() const { return static_cast<int>(axes_.size()); }
    std::size_t size() const { return size_; }
    const Axis& axis(int i) const { return axes_[i]; }
    std::vector<int> counts() const;

    void unravel(std::size_t index, int* multi) const;
    std::size_t ravel(const int* multi) const;
    Coords node(std::size_t index) const;
    double weight(std::size_t index) const;

private:
    std::vector<Axis> axes_;
    std::size_t size_ = 1;
};

/// Box restricted to [lo, hi]; an axis stays periodic only when the restriction spans a full period.
surface::ParameterBox sub_box(const surface::ParameterBox& box, const Coords& lo, const Coords& hi);

/// Halves every axis count (minimum 4).
std::vector<int> coarsen(const std::vector<int>& counts);

} // namespace curvlab::quad
