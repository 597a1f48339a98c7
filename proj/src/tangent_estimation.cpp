#include "veclap/tangent_estimation.hpp"

#include <cmath>

#include "veclap/common.hpp"
#include "veclap/gmls.hpp"

namespace veclap {

namespace {

constexpr double kGapThreshold = 0.9;

void fix_signs(Eigen::MatrixXd& U) {
    for (Eigen::Index j = 0; j < U.cols(); ++j) {
        Eigen::Index imax = 0;
        U.col(j).cwiseAbs().maxCoeff(&imax);
        if (U(imax, j) < 0.0) U.col(j) *= -1.0;
    }
}

} // namespace

CoarseFrame coarse_frame_svd(const Eigen::MatrixXd& stencil_points, int d) {
    const int K = static_cast<int>(stencil_points.rows());
    const int n = static_cast<int>(stencil_points.cols());
    if (d < 1 || d >= n) throw ValidationError("coarse_frame_svd: need 1 <= d < n");
    if (K < d + 1) throw ValidationError("coarse_frame_svd: stencil too small");

    Eigen::MatrixXd diffs(n, K);
    for (int k = 0; k < K; ++k)
        diffs.col(k) = (stencil_points.row(k) - stencil_points.row(0)).transpose();

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(diffs, Eigen::ComputeFullU);
    Eigen::MatrixXd U = svd.matrixU();
    fix_signs(U);

    CoarseFrame out;
    out.T = U.leftCols(d);
    out.normals = U.rightCols(n - d);
    const auto& sv = svd.singularValues();
    // sv has min(n, K) entries sorted descending; a missing entry counts
    // as an exact zero (clean gap). Two failure modes: the stencil spans
    // fewer than d directions (sigma_d ~ 0), or it spreads into a
    // (d+1)-th direction almost as much as the d-th (no gap).
    const double s1 = sv(0);
    const double sd = d - 1 < sv.size() ? sv(d - 1) : 0.0;
    const double snext = d < sv.size() ? sv(d) : 0.0;
    out.unreliable = !(sd > 1e-12 * s1) || (snext / sd > kGapThreshold);
    return out;
}

Eigen::MatrixXd refine_frame_2d(const Eigen::MatrixXd& stencil_points,
                                const CoarseFrame& coarse, int l) {
    if (stencil_points.cols() != 3 || coarse.T.cols() != 2)
        throw ValidationError("refine_frame_2d: needs a surface in 3-space");
    const Eigen::VectorXd base = stencil_points.row(0).transpose();
    const Eigen::VectorXd normal = coarse.normals.col(0);

    const Eigen::MatrixXd theta = local_coordinates(stencil_points, coarse.T, base);
    Eigen::VectorXd height(stencil_points.rows());
    for (Eigen::Index k = 0; k < stencil_points.rows(); ++k)
        height(k) = normal.dot(stencil_points.row(k).transpose() - base);

    const MultiIndexSet idx = MultiIndexSet::full(2, l);
    const LocalFit fit = build_local_fit(theta, idx, WeightScheme::BaseEmphasis);
    const Eigen::VectorXd a = fit_values(fit, height);

    Eigen::MatrixXd tilted(3, 2);
    tilted.col(0) = coarse.T.col(0) + a(idx.find(Alpha{1, 0, 0, 0})) * normal;
    tilted.col(1) = coarse.T.col(1) + a(idx.find(Alpha{0, 1, 0, 0})) * normal;
    return orthonormalize(tilted);
}

Eigen::MatrixXd refine_frame_general(const Eigen::MatrixXd& stencil_points,
                                     const CoarseFrame& coarse, int l) {
    const int K = static_cast<int>(stencil_points.rows());
    const int n = static_cast<int>(stencil_points.cols());
    const int d = static_cast<int>(coarse.T.cols());
    const Eigen::VectorXd base = stencil_points.row(0).transpose();

    const Eigen::MatrixXd theta = local_coordinates(stencil_points, coarse.T, base);
    Eigen::MatrixXd deviations(K, n);
    for (int k = 0; k < K; ++k)
        deviations.row(k) = stencil_points.row(k) - stencil_points.row(0);

    const MultiIndexSet idx = MultiIndexSet::full(d, l);
    const LocalFit fit = build_local_fit(theta, idx, WeightScheme::BaseEmphasis);
    const Eigen::MatrixXd coeffs = fit.phi_dagger * deviations; // m x n, one fit per column

    Eigen::MatrixXd tilted(n, d);
    for (int k = 0; k < d; ++k) {
        Alpha ek{};
        ek[static_cast<std::size_t>(k)] = 1;
        tilted.col(k) = coeffs.row(idx.find(ek)).transpose();
    }
    return orthonormalize(tilted);
}

FrameField estimate_frames(const PointCloud& cloud, const NeighborIndex& index, int K, int l) {
    if (K > cloud.N()) throw ValidationError("estimate_frames: K exceeds cloud size");
    if (cloud.d < 1 || cloud.d >= cloud.n)
        throw ValidationError("estimate_frames: cloud lacks a valid intrinsic dimension");
    FrameField frames;
    frames.T.resize(cloud.N());
    frames.unreliable.assign(cloud.N(), 0);

    Eigen::MatrixXd stencil(K, cloud.n);
    for (int i = 0; i < cloud.N(); ++i) {
        const std::vector<int> nb = index.neighbors_of(i, K);
        for (int k = 0; k < K; ++k) stencil.row(k) = cloud.points.row(nb[k]);

        CoarseFrame coarse = coarse_frame_svd(stencil, cloud.d);
        if (coarse.unreliable) frames.unreliable[i] = 1;
        try {
            frames.T[i] = (cloud.d == 2 && cloud.n == 3)
                              ? refine_frame_2d(stencil, coarse, l)
                              : refine_frame_general(stencil, coarse, l);
        } catch (const ValidationError&) {
            // Near-parallel refined tangents: keep the coarse frame.
            frames.T[i] = coarse.T;
            frames.unreliable[i] = 1;
        }
    }
    return frames;
}

FrameField analytic_frames(const PointCloud& cloud) {
    if (!cloud.origin || !cloud.param_coords)
        throw ValidationError("analytic_frames: cloud was not sampled from a known surface");
    FrameField frames;
    frames.T.resize(cloud.N());
    frames.unreliable.assign(cloud.N(), 0);
    for (int i = 0; i < cloud.N(); ++i)
        frames.T[i] = cloud.origin->analytic_frame(cloud.param_coords->row(i).transpose());
    return frames;
}

} // namespace veclap
