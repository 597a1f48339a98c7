#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace veclap {

/// One tangent frame per cloud point: an n-by-d matrix with orthonormal
/// columns spanning the (estimated or analytic) tangent space.
struct FrameField {
    std::vector<Eigen::MatrixXd> T;
    /// Set when the local SVD offered no clear dimension gap at this
    /// point; frames are still produced, results there are suspect.
    std::vector<std::uint8_t> unreliable;

    int N() const { return static_cast<int>(T.size()); }
    int n() const { return T.empty() ? 0 : static_cast<int>(T[0].rows()); }
    int d() const { return T.empty() ? 0 : static_cast<int>(T[0].cols()); }
};

/// Orthogonal projection onto the span of the frame columns, T T^t.
Eigen::MatrixXd projection(const Eigen::MatrixXd& T);

/// Modified Gram-Schmidt on the columns; throws ValidationError when the
/// columns are numerically dependent (residual below 1e-10 of the
/// leading-column scale).
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& columns);

/// CSV round-trip: header `point_index,t11,...`, entries row-major over
/// (ambient row, tangent column), full double precision.
void save_frames_csv(const std::string& path, const FrameField& frames);
FrameField load_frames_csv(const std::string& path, int n, int d);

} // namespace veclap
