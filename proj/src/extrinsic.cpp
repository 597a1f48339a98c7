#include "veclap/extrinsic.hpp"

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

StencilDifferentials build_stencil_differentials(
    const LocalFit& fit, const Eigen::MatrixXd& base_frame,
    const FrameField& frames, const std::vector<int>& stencil) {
    const int K = fit.K();
    const int d = static_cast<int>(base_frame.cols());
    const int n = static_cast<int>(base_frame.rows());
    if (static_cast<int>(stencil.size()) != K)
        throw ValidationError("stencil list does not match the fit");
    if (fit.theta.cols() != d)
        throw ValidationError("fit coordinates do not match the base frame");
    if (frames.n() != n || frames.d() != d)
        throw ValidationError("frame dimensions do not match the base frame");

    StencilDifferentials out;
    out.G.assign(n, Eigen::MatrixXd(K, K));
    for (int i = 0; i < K; ++i) {
        const Eigen::MatrixXd grad =
            monomial_gradient_matrix(fit.idx, fit.theta.row(i).transpose());
        // Column j of A holds the ambient direction of the j-th basis
        // monomial's gradient, pushed through the base tangent vectors.
        const Eigen::MatrixXd A = base_frame * grad.transpose(); // n x m
        const Eigen::MatrixXd& Ti = frames.T[stencil[i]];
        const Eigen::MatrixXd rows =
            Ti * ((Ti.transpose() * A) * fit.phi_dagger); // n x K
        for (int s = 0; s < n; ++s)
            out.G[s].row(i) = rows.row(s);
        if (i == 0)
            out.D_base = A * fit.phi_dagger; // n x K
    }
    return out;
}

Eigen::MatrixXd extrinsic_local_weights(const StencilDifferentials& diffs,
                                        const FrameField& frames,
                                        const std::vector<int>& stencil,
                                        LaplacianKind kind) {
    const int n = static_cast<int>(diffs.G.size());
    if (n == 0)
        throw ValidationError("empty differential set");
    const int K = static_cast<int>(diffs.G[0].rows());
    const int d = frames.d();
    if (static_cast<int>(stencil.size()) != K)
        throw ValidationError("stencil list does not match the differentials");

    const Eigen::MatrixXd& T0 = frames.T[stencil[0]];

    // Per stencil point r: Pbar_r = T0^t P_r (d x n) and the base-row
    // gradient vector gbase.col(r), whose component s is (G_s)_{0r}.
    std::vector<Eigen::MatrixXd> Pbar(K);
    Eigen::MatrixXd gbase(n, K);
    for (int r = 0; r < K; ++r) {
        const Eigen::MatrixXd& Tr = frames.T[stencil[r]];
        Pbar[r] = (T0.transpose() * Tr) * Tr.transpose();
        for (int s = 0; s < n; ++s)
            gbase(s, r) = diffs.G[s](0, r);
    }

    // Second-order composition, folded into one product per ambient
    // direction: row t of Zf is the flattened d x n matrix
    // sum_r (G_l)_{0r} (G_l)_{rt} Pbar_r, and the weight block of stencil
    // point t gains unflatten(row t) * T_t.
    Eigen::MatrixXd Pf(K, d * n);
    for (int r = 0; r < K; ++r)
        Pf.row(r) = Eigen::Map<const Eigen::VectorXd>(Pbar[r].data(), d * n);
    Eigen::MatrixXd Zf = Eigen::MatrixXd::Zero(K, d * n);
    for (int l = 0; l < n; ++l)
        Zf.noalias() += diffs.G[l].transpose() *
                        (gbase.row(l).transpose().asDiagonal() * Pf);

    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(d, d * K);
    Eigen::VectorXd zrow(d * n);
    for (int t = 0; t < K; ++t) {
        zrow = Zf.row(t).transpose();
        const Eigen::Map<const Eigen::MatrixXd> Zt(zrow.data(), d, n);
        W.block(0, t * d, d, d) = Zt * frames.T[stencil[t]];
    }
    if (kind == LaplacianKind::Bochner)
        return W;

    // Divergence-gradient blocks. The sums over the ambient index
    // collapse analytically: c_r = P_r gbase_r carries the projected
    // base-row gradient and e_r = T0^t gbase_r its base components.
    const double sign = (kind == LaplacianKind::LLaplacian) ? 1.0 : -1.0;
    std::vector<Eigen::VectorXd> c(K);
    std::vector<Eigen::VectorXd> e(K);
    for (int r = 0; r < K; ++r) {
        const Eigen::MatrixXd& Tr = frames.T[stencil[r]];
        c[r] = Tr * (Tr.transpose() * gbase.col(r));
        if (kind == LaplacianKind::Hodge)
            e[r] = T0.transpose() * gbase.col(r);
    }
    Eigen::VectorXd grt(n);
    for (int t = 0; t < K; ++t) {
        Eigen::MatrixXd Zm = Eigen::MatrixXd::Zero(d, n);
        Eigen::MatrixXd Zj;
        if (kind == LaplacianKind::Hodge)
            Zj = Eigen::MatrixXd::Zero(d, n);
        for (int r = 0; r < K; ++r) {
            for (int s = 0; s < n; ++s)
                grt(s) = diffs.G[s](r, t);
            Zm.noalias() += (Pbar[r] * grt) * c[r].transpose();
            if (kind == LaplacianKind::Hodge)
                Zj.noalias() += e[r] * grt.transpose();
        }
        W.block(0, t * d, d, d) += sign * (Zm * frames.T[stencil[t]]);
        if (kind == LaplacianKind::Hodge)
            W.block(0, t * d, d, d) += Zj * frames.T[stencil[t]];
    }
    return W;
}

BlockOperator assemble_extrinsic(const PointCloud& cloud,
                                 const FrameField& frames, LaplacianKind kind,
                                 int K, int l_field) {
    check_cloud_frames(cloud, frames, K);
    if (l_field < 2)
        throw ValidationError("field fit degree must be at least 2 for a "
                              "Laplacian");

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
        const Eigen::MatrixXd theta = local_coordinates(
            pts, frames.T[i], cloud.points.row(i).transpose());
        const LocalFit fit = build_local_fit(theta, field_idx,
                                             WeightScheme::BaseEmphasis, i);
        const StencilDifferentials diffs =
            build_stencil_differentials(fit, frames.T[i], frames, stencil);
        const Eigen::MatrixXd W =
            extrinsic_local_weights(diffs, frames, stencil, kind);

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
            op.blocks[i][q] = W.block(0, p * d, d, d);
        }
    }
    op.validate();
    return op;
}

ExtrinsicCovariant::ExtrinsicCovariant(const PointCloud& cloud,
                                       const FrameField& frames, int K,
                                       int l_field) {
    check_cloud_frames(cloud, frames, K);
    if (l_field < 1)
        throw ValidationError("field fit degree must be at least 1 for an "
                              "advection term");

    N_ = cloud.N();
    d_ = cloud.d;
    n_ = cloud.n;
    K_ = K;
    frames_ = frames.T;
    const NeighborIndex index(cloud.points);
    const MultiIndexSet field_idx = MultiIndexSet::full(d_, l_field);

    stencils_.resize(N_);
    base_rows_.resize(N_);
    for (int i = 0; i < N_; ++i) {
        stencils_[i] = index.neighbors_of(i, K);
        const Eigen::MatrixXd pts = gather_rows(cloud.points, stencils_[i]);
        const Eigen::MatrixXd theta = local_coordinates(
            pts, frames.T[i], cloud.points.row(i).transpose());
        const LocalFit fit =
            build_local_fit(theta, field_idx, WeightScheme::Uniform, i);
        const StencilDifferentials diffs =
            build_stencil_differentials(fit, frames.T[i], frames,
                                        stencils_[i]);
        base_rows_[i] = diffs.D_base;
    }
}

Eigen::VectorXd ExtrinsicCovariant::apply(const Eigen::VectorXd& u) const {
    if (u.size() != dim())
        throw ValidationError("advection input length does not match the "
                              "operator");
    Eigen::VectorXd out(dim());
    Eigen::MatrixXd ambient(K_, n_);
    for (int i = 0; i < N_; ++i) {
        for (int j = 0; j < K_; ++j) {
            const int p = stencils_[i][j];
            ambient.row(j) =
                (frames_[p] * u.segment(p * d_, d_)).transpose();
        }
        // Row s of B approximates the ambient gradient row d_s U at the
        // base; contracting with the base value gives (U . grad) U there.
        const Eigen::MatrixXd B = base_rows_[i] * ambient; // n x n
        const Eigen::VectorXd at_base =
            frames_[i] * u.segment(i * d_, d_);
        out.segment(i * d_, d_) =
            frames_[i].transpose() * (B.transpose() * at_base);
    }
    return out;
}

} // namespace veclap
