#pragma once

#include <vector>

#include <Eigen/Dense>

#include "veclap/block_operator.hpp"
#include "veclap/frame.hpp"
#include "veclap/geometry.hpp"
#include "veclap/gmls.hpp"
#include "veclap/monge.hpp"

namespace veclap {

/// Weight rows of one Laplacian stencil in patch-local components.
///
/// The result W is d x (d*K); column j*d + l multiplies component l of
/// stencil point j, and row i yields component i of (L u) at the base.
/// Row structure: the sum of pure second-derivative rows on the diagonal,
/// the mixed-derivative row for the divergence-gradient variant, and the
/// patch's curvature coupling matrix times the value row.
Eigen::MatrixXd laplacian_local_weights(const MongePatch& patch,
                                        const LocalFit& field_fit,
                                        LaplacianKind kind);

/// Change of components for one stencil point: maps the components a
/// vector has in the point's own frame to its components in the patch's
/// coordinate basis at that point's local coordinates. At theta = 0 with
/// the point's frame equal to the patch frame this is the identity.
Eigen::MatrixXd stencil_component_transform(const MongePatch& patch,
                                            const Eigen::VectorXd& theta_row,
                                            const Eigen::MatrixXd& point_frame,
                                            int neighbor_index = -1);

/// Right-multiply each neighbor's d x d weight block by that neighbor's
/// component transform, turning patch-local rows into rows that act on
/// the global per-point degrees of freedom.
Eigen::MatrixXd globalize_local_weights(const Eigen::MatrixXd& local_weights,
                                        const MongePatch& patch,
                                        const FrameField& frames,
                                        const std::vector<int>& stencil);

/// Assemble the chosen vector Laplacian over the whole cloud from local
/// graph patches: one stencil, one patch fit, and one field fit per point.
/// l_field controls the field fit degree (needs at least 2), l_patch the
/// patch degree (at least 2).
BlockOperator assemble_intrinsic(const PointCloud& cloud,
                                 const FrameField& frames, LaplacianKind kind,
                                 int K, int l_field, int l_patch);

/// Pointwise advection term grad_u u evaluated from cached fit rows.
///
/// For each base point the stencil data is rotated into patch components,
/// the field fit (uniform weights) supplies the value and the first
/// derivatives at the base, and the output component i is
/// sum_k u~^k(0) d_k u~^i(0). Patch components at the base coincide with
/// the point's own frame components, so input and output share one layout.
class IntrinsicCovariant {
public:
    IntrinsicCovariant(const PointCloud& cloud, const FrameField& frames,
                       int K, int l_field, int l_patch);

    Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
    int dim() const { return N_ * d_; }

private:
    int N_ = 0;
    int d_ = 0;
    int K_ = 0;
    std::vector<std::vector<int>> stencils_;
    std::vector<std::vector<Eigen::MatrixXd>> transforms_;
    std::vector<Eigen::RowVectorXd> value_rows_;
    std::vector<Eigen::MatrixXd> deriv_rows_;
};

} // namespace veclap
