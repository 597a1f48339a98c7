#include "veclap/intrinsic.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "veclap/common.hpp"
#include "veclap/knn.hpp"

namespace veclap {

namespace {

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& points,
                            const std::vector<int>& rows) {
    Eigen::MatrixXd out(static_cast<int>(rows.size()), points.cols());
    for (size_t k = 0; k < rows.size(); ++k)
        out.row(static_cast<int>(k)) = points.row(rows[k]);
    return out;
}

void check_cloud_frames(const PointCloud& cloud, const FrameField& frames,
                        int K) {
    if (frames.N() != cloud.N())
        throw ValidationError("frame count " + std::to_string(frames.N()) +
                              " does not match cloud size " +
                              std::to_string(cloud.N()));
    if (frames.n() != cloud.n || frames.d() != cloud.d)
        throw ValidationError("frame dimensions do not match the cloud");
    if (K < 1 || K > cloud.N())
        throw ValidationError("stencil size " + std::to_string(K) +
                              " invalid for a cloud of " +
                              std::to_string(cloud.N()) + " points");
}

} // namespace

Eigen::MatrixXd laplacian_local_weights(const MongePatch& patch,
                                        const LocalFit& field_fit,
                                        LaplacianKind kind) {
    const int d = patch.d();
    const int K = field_fit.K();
    if (patch.K() != K)
        throw ValidationError("patch and field fit cover different stencils");
    if (static_cast<int>(field_fit.theta.cols()) != d)
        throw ValidationError("patch and field fit disagree on the tangent "
                              "dimension");

    Alpha zero{};
    const Eigen::RowVectorXd value_row = derivative_row(field_fit, zero);
    Eigen::RowVectorXd lap_row = Eigen::RowVectorXd::Zero(K);
    for (int k = 0; k < d; ++k) {
        Alpha delta{};
        delta[k] = 2;
        if (field_fit.idx.find(delta) < 0)
            throw ValidationError("field fit degree too low to carry second "
                                  "derivatives");
        lap_row += derivative_row(field_fit, delta);
    }
    const Eigen::MatrixXd C = coupling_matrix(patch, kind);

    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(d, d * K);
    for (int i = 0; i < d; ++i)
        for (int l = 0; l < d; ++l) {
            Eigen::RowVectorXd row = C(i, l) * value_row;
            if (i == l)
                row += lap_row;
            if (kind == LaplacianKind::LLaplacian) {
                Alpha mix{};
                mix[i] += 1;
                mix[l] += 1;
                row += derivative_row(field_fit, mix);
            }
            for (int j = 0; j < K; ++j)
                W(i, j * d + l) = row(j);
        }
    return W;
}

Eigen::MatrixXd stencil_component_transform(const MongePatch& patch,
                                            const Eigen::VectorXd& theta_row,
                                            const Eigen::MatrixXd& point_frame,
                                            int neighbor_index) {
    if (point_frame.rows() != patch.n() || point_frame.cols() != patch.d())
        throw ValidationError("point frame shape does not match the patch");
    const Eigen::MatrixXd basis = local_tangent_basis(patch, theta_row);
    const Eigen::MatrixXd gram = basis.transpose() * basis;
    if (!gram.allFinite())
        throw NumericalError("nonfinite tangent basis at stencil point " +
                             std::to_string(neighbor_index));
    // The Gram matrix is the identity plus the outer product of the graph
    // slopes, so it stays at least as large as the identity; a failed
    // factorization means corrupted input rather than a thin basis.
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success)
        throw NumericalError("tangent Gram factorization failed at stencil "
                             "point " + std::to_string(neighbor_index));
    return llt.solve(basis.transpose() * point_frame);
}

Eigen::MatrixXd globalize_local_weights(const Eigen::MatrixXd& local_weights,
                                        const MongePatch& patch,
                                        const FrameField& frames,
                                        const std::vector<int>& stencil) {
    const int d = patch.d();
    const int K = static_cast<int>(stencil.size());
    if (local_weights.rows() != d || local_weights.cols() != d * K)
        throw ValidationError("local weight shape does not match the stencil");
    if (patch.K() != K)
        throw ValidationError("stencil list does not match the patch");
    Eigen::MatrixXd out(d, d * K);
    for (int j = 0; j < K; ++j) {
        const Eigen::MatrixXd M = stencil_component_transform(
            patch, patch.theta.row(j).transpose(), frames.T[stencil[j]],
            stencil[j]);
        out.block(0, j * d, d, d) =
            local_weights.block(0, j * d, d, d) * M;
    }
    return out;
}

BlockOperator assemble_intrinsic(const PointCloud& cloud,
                                 const FrameField& frames, LaplacianKind kind,
                                 int K, int l_field, int l_patch) {
    check_cloud_frames(cloud, frames, K);
    if (l_field < 2)
        throw ValidationError("field fit degree must be at least 2 for a "
                              "Laplacian");
    if (l_patch < 2)
        throw ValidationError("patch degree must be at least 2");

    const int N = cloud.N();
    const int d = cloud.d;
    const NeighborIndex index(cloud.points);
    const MultiIndexSet field_idx = MultiIndexSet::full(d, l_field);

    BlockOperator op;
    op.N = N;
    op.d = d;
    op.K = K;
    op.cols.resize(N);
    op.blocks.resize(N);

    for (int i = 0; i < N; ++i) {
        const std::vector<int> stencil = index.neighbors_of(i, K);
        const Eigen::MatrixXd pts = gather_rows(cloud.points, stencil);
        const MongePatch patch = fit_monge_patch(pts, frames.T[i], l_patch, i);
        const LocalFit fit = build_local_fit(patch.theta, field_idx,
                                             WeightScheme::BaseEmphasis, i);
        const Eigen::MatrixXd local = laplacian_local_weights(patch, fit, kind);
        const Eigen::MatrixXd global =
            globalize_local_weights(local, patch, frames, stencil);

        std::vector<int> order(K);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&stencil](int a, int b) {
            return stencil[a] < stencil[b];
        });
        op.cols[i].resize(K);
        op.blocks[i].resize(K);
        for (int q = 0; q < K; ++q) {
            const int p = order[q];
            op.cols[i][q] = stencil[p];
            op.blocks[i][q] = global.block(0, p * d, d, d);
        }
    }
    op.validate();
    return op;
}

IntrinsicCovariant::IntrinsicCovariant(const PointCloud& cloud,
                                       const FrameField& frames, int K,
                                       int l_field, int l_patch) {
    check_cloud_frames(cloud, frames, K);
    if (l_field < 1)
        throw ValidationError("field fit degree must be at least 1 for an "
                              "advection term");
    if (l_patch < 2)
        throw ValidationError("patch degree must be at least 2");

    N_ = cloud.N();
    d_ = cloud.d;
    K_ = K;
    const NeighborIndex index(cloud.points);
    const MultiIndexSet field_idx = MultiIndexSet::full(d_, l_field);

    stencils_.resize(N_);
    transforms_.resize(N_);
    value_rows_.resize(N_);
    deriv_rows_.resize(N_);
    for (int i = 0; i < N_; ++i) {
        stencils_[i] = index.neighbors_of(i, K);
        const Eigen::MatrixXd pts = gather_rows(cloud.points, stencils_[i]);
        const MongePatch patch =
            fit_monge_patch(pts, frames.T[i], l_patch, i);
        const LocalFit fit = build_local_fit(patch.theta, field_idx,
                                             WeightScheme::Uniform, i);
        Alpha zero{};
        value_rows_[i] = derivative_row(fit, zero);
        deriv_rows_[i].resize(d_, K);
        for (int k = 0; k < d_; ++k) {
            Alpha delta{};
            delta[k] = 1;
            deriv_rows_[i].row(k) = derivative_row(fit, delta);
        }
        transforms_[i].reserve(K);
        for (int j = 0; j < K; ++j)
            transforms_[i].push_back(stencil_component_transform(
                patch, patch.theta.row(j).transpose(),
                frames.T[stencils_[i][j]], stencils_[i][j]));
    }
}

Eigen::VectorXd IntrinsicCovariant::apply(const Eigen::VectorXd& u) const {
    if (u.size() != dim())
        throw ValidationError("advection input length does not match the "
                              "operator");
    Eigen::VectorXd out(dim());
    Eigen::MatrixXd local(K_, d_);
    for (int i = 0; i < N_; ++i) {
        for (int j = 0; j < K_; ++j)
            local.row(j) =
                (transforms_[i][j] * u.segment(stencils_[i][j] * d_, d_))
                    .transpose();
        const Eigen::RowVectorXd at_base = value_rows_[i] * local;   // 1 x d
        const Eigen::MatrixXd grad = deriv_rows_[i] * local;         // d x d
        out.segment(i * d_, d_) = grad.transpose() * at_base.transpose();
    }
    return out;
}

} // namespace veclap
