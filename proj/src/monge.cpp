#include "veclap/monge.hpp"

#include <cmath>

#include "veclap/common.hpp"

namespace veclap {

LaplacianKind laplacian_kind_from_name(const std::string& name) {
    if (name == "bochner") return LaplacianKind::Bochner;
    if (name == "l") return LaplacianKind::LLaplacian;
    if (name == "hodge") return LaplacianKind::Hodge;
    throw ValidationError("unknown laplacian kind: " + name + " (expected bochner, l, hodge)");
}

std::string laplacian_kind_name(LaplacianKind kind) {
    switch (kind) {
        case LaplacianKind::Bochner: return "bochner";
        case LaplacianKind::LLaplacian: return "l";
        case LaplacianKind::Hodge: return "hodge";
    }
    throw ValidationError("unreachable laplacian kind");
}

MongePatch fit_monge_patch(const Eigen::MatrixXd& stencil_points,
                           const Eigen::MatrixXd& frame, int l_patch, int point_index) {
    if (l_patch < 2) throw ValidationError("fit_monge_patch: patch degree must be at least 2");
    const int K = static_cast<int>(stencil_points.rows());
    const int n = static_cast<int>(frame.rows());
    const int d = static_cast<int>(frame.cols());
    if (stencil_points.cols() != n)
        throw ValidationError("fit_monge_patch: stencil/frame dimension mismatch");

    MongePatch patch;
    patch.base = stencil_points.row(0).transpose();
    patch.frame = frame;
    patch.idx = MultiIndexSet::curvature(d, l_patch);
    patch.theta = local_coordinates(stencil_points, frame, patch.base);

    const LocalFit fit =
        build_local_fit(patch.theta, patch.idx, WeightScheme::BaseEmphasis, point_index);

    if (d == 2 && n == 3) {
        // Height path: one graph over the tangent plane along the normal.
        Eigen::Vector3d t1 = frame.col(0), t2 = frame.col(1);
        patch.normal = t1.cross(t2);
        Eigen::VectorXd height(K);
        for (int k = 0; k < K; ++k)
            height(k) = patch.normal.dot(stencil_points.row(k).transpose() - patch.base);
        patch.coeffs = fit_values(fit, height);
    } else {
        // Ambient path: fit what remains of each ambient coordinate after
        // subtracting the tangential linear part, so the tangential
        // quadratic content is identically zero and the curvature
        // information lands in the coefficients directly.
        Eigen::MatrixXd residual(K, n);
        for (int k = 0; k < K; ++k)
            residual.row(k) = stencil_points.row(k) - patch.base.transpose() -
                              patch.theta.row(k) * frame.transpose();
        patch.coeffs = fit.phi_dagger * residual;
    }

    const int cols = static_cast<int>(patch.coeffs.cols());
    patch.c.assign(cols, Eigen::MatrixXd::Zero(d, d));
    for (int s = 0; s < cols; ++s) {
        for (int i = 0; i < d; ++i) {
            for (int k = i; k < d; ++k) {
                Alpha a{};
                a[static_cast<std::size_t>(i)] += 1;
                a[static_cast<std::size_t>(k)] += 1;
                const double b = patch.coeffs(patch.idx.find(a), s);
                const double cik = (i == k) ? b : 0.5 * b;
                patch.c[s](i, k) = cik;
                patch.c[s](k, i) = cik;
            }
        }
    }
    return patch;
}

ChristoffelDerivatives christoffel_derivatives(const MongePatch& patch) {
    const int d = patch.d();
    ChristoffelDerivatives out;
    out.d = d;
    out.v.assign(static_cast<std::size_t>(d) * d * d * d, 0.0);
    for (const Eigen::MatrixXd& c : patch.c)
        for (int r = 0; r < d; ++r)
            for (int i = 0; i < d; ++i)
                for (int k = 0; k < d; ++k)
                    for (int l = 0; l < d; ++l)
                        out.v[static_cast<std::size_t>(((r * d + i) * d + k) * d + l)] +=
                            4.0 * c(i, r) * c(k, l);
    return out;
}

Eigen::MatrixXd coupling_matrix(const MongePatch& patch, LaplacianKind kind) {
    const int d = patch.d();
    Eigen::MatrixXd cc_sum = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd trc_sum = Eigen::MatrixXd::Zero(d, d);
    for (const Eigen::MatrixXd& c : patch.c) {
        cc_sum += c * c;
        trc_sum += c.trace() * c;
    }
    switch (kind) {
        case LaplacianKind::Bochner: return 4.0 * cc_sum;
        case LaplacianKind::LLaplacian: return 4.0 * cc_sum + 4.0 * trc_sum;
        case LaplacianKind::Hodge: return 8.0 * cc_sum - 4.0 * trc_sum;
    }
    throw ValidationError("unreachable laplacian kind");
}

Eigen::MatrixXd local_tangent_basis(const MongePatch& patch,
                                    const Eigen::VectorXd& theta_row) {
    const int d = patch.d();
    if (theta_row.size() != d)
        throw ValidationError("local_tangent_basis: coordinate dimension mismatch");

    const Eigen::MatrixXd G = monomial_gradient_matrix(patch.idx, theta_row);
    const Eigen::MatrixXd slopes = G.transpose() * patch.coeffs; // d x (1 or n)
    Eigen::MatrixXd basis = patch.frame;
    if (patch.ambient_path()) {
        basis += slopes.transpose();
    } else {
        basis += patch.normal * slopes.transpose();
    }
    return basis;
}

} // namespace veclap
