#pragma once

#include <Eigen/Dense>

namespace curvlab {

// Intrinsic dimension m is at most 4 and the embedding model has at most m+2 coordinates.
inline constexpr int kMaxIntrinsicDim = 4;
inline constexpr int kMaxModelDim = kMaxIntrinsicDim + 2;

/// Coordinates of a point or vector in the embedding model of the ambient space.
using ModelVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxModelDim, 1>;
/// Chart parameters, or tangent vectors expressed in the chart basis.
using Coords = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxIntrinsicDim, 1>;
/// m x m forms (g, b, A, ...).
using FormMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxIntrinsicDim, kMaxIntrinsicDim>;
/// Columns are the chart tangent vectors dX/du_i in model coordinates.
using TangentMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxModelDim, kMaxIntrinsicDim>;
using ModelMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxModelDim, kMaxModelDim>;

} // namespace curvlab
