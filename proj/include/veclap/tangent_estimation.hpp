#pragma once

#include <Eigen/Dense>

#include "veclap/frame.hpp"
#include "veclap/geometry.hpp"
#include "veclap/knn.hpp"

namespace veclap {

/// First-pass tangent estimate at one point: leading left singular
/// vectors of the stencil difference matrix.
struct CoarseFrame {
    Eigen::MatrixXd T;       // n x d tangent estimate
    Eigen::MatrixXd normals; // n x (n-d) trailing singular vectors
    bool unreliable = false; // no clear singular-value gap at dimension d
};

/// stencil_points is K x n with the base point in row 0. Each singular
/// vector's sign is fixed so its largest-magnitude entry is positive,
/// making the result independent of the SVD backend.
CoarseFrame coarse_frame_svd(const Eigen::MatrixXd& stencil_points, int d);

/// Surface case (d=2, n=3): fit the normal deviation as a polynomial
/// height over the coarse tangent plane, tilt the tangents by the fitted
/// linear slopes, then orthonormalize.
Eigen::MatrixXd refine_frame_2d(const Eigen::MatrixXd& stencil_points,
                                const CoarseFrame& coarse, int l);

/// General case (d < n): fit every ambient deviation coordinate over the
/// coarse tangent coordinates and read the degree-1 rows as tangent
/// vectors; never builds normal vectors, so the cost stays linear in n.
Eigen::MatrixXd refine_frame_general(const Eigen::MatrixXd& stencil_points,
                                     const CoarseFrame& coarse, int l);

/// Frames for every cloud point: coarse SVD then GMLS refinement on each
/// K-point stencil. Points whose refinement degenerates keep their coarse
/// frame and are flagged.
FrameField estimate_frames(const PointCloud& cloud, const NeighborIndex& index, int K, int l);

/// Frames from the originating surface's parametrization (requires
/// sampled parameter coordinates); the ground truth for error studies.
FrameField analytic_frames(const PointCloud& cloud);

} // namespace veclap
