#pragma once

#include <array>
#include <cmath>

#include "curvlab/linalg.hpp"

// Second-order forward-mode scalars: value, gradient and Hessian with respect to at most
// kMaxIntrinsicDim chart parameters. Used to produce exact chart jets for the fixtures.
namespace curvlab::ad {

struct D2 {
    double v = 0.0;
    std::array<double, kMaxIntrinsicDim> g{};
    std::array<double, kMaxIntrinsicDim * kMaxIntrinsicDim> h{};

    D2() = default;
    D2(double c) : v(c) {}  // NOLINT: constants promote implicitly

    static D2 variable(double value, int index) {
        D2 d(value);
        d.g[index] = 1.0;
        return d;
    }
};

// f(a) given f(v), f'(v), f''(v).
inline D2 chain(const D2& a, double f, double f1, double f2) {
    D2 r(f);
    for (int i = 0; i < kMaxIntrinsicDim; ++i) r.g[i] = f1 * a.g[i];
    for (int i = 0; i < kMaxIntrinsicDim; ++i) {
        for (int j = 0; j < kMaxIntrinsicDim; ++j) {
            const int k = i * kMaxIntrinsicDim + j;
            r.h[k] = f1 * a.h[k] + f2 * a.g[i] * a.g[j];
        }
    }
    return r;
}

inline D2 operator+(const D2& a, const D2& b) {
    D2 r(a.v + b.v);
    for (int i = 0; i < kMaxIntrinsicDim; ++i) r.g[i] = a.g[i] + b.g[i];
    for (std::size_t k = 0; k < r.h.size(); ++k) r.h[k] = a.h[k] + b.h[k];
    return r;
}

inline D2 operator-(const D2& a) { return chain(a, -a.v, -1.0, 0.0); }
inline D2 operator-(const D2& a, const D2& b) { return a + (-b); }

inline D2 operator*(const D2& a, const D2& b) {
    D2 r(a.v * b.v);
    for (int i = 0; i < kMaxIntrinsicDim; ++i) r.g[i] = a.v * b.g[i] + b.v * a.g[i];
    for (int i = 0; i < kMaxIntrinsicDim; ++i) {
        for (int j = 0; j < kMaxIntrinsicDim; ++j) {
            const int k = i * kMaxIntrinsicDim + j;
            r.h[k] = a.v * b.h[k] + b.v * a.h[k] + a.g[i] * b.g[j] + b.g[i] * a.g[j];
        }
    }
    return r;
}

inline D2 inverse(const D2& a) { return chain(a, 1.0 / a.v, -1.0 / (a.v * a.v), 2.0 / (a.v * a.v * a.v)); }
inline D2 operator/(const D2& a, const D2& b) { return a * inverse(b); }

inline D2& operator+=(D2& a, const D2& b) { return a = a + b; }
inline D2& operator*=(D2& a, const D2& b) { return a = a * b; }

inline D2 sin(const D2& a) { return chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline D2 cos(const D2& a) { return chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
inline D2 sinh(const D2& a) { return chain(a, std::sinh(a.v), std::cosh(a.v), std::sinh(a.v)); }
inline D2 cosh(const D2& a) { return chain(a, std::cosh(a.v), std::sinh(a.v), std::cosh(a.v)); }
inline D2 sqrt(const D2& a) {
    const double s = std::sqrt(a.v);
    return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}

inline double value(double x) { return x; }
inline double value(const D2& x) { return x.v; }

} // namespace curvlab::ad
