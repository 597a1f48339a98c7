#pragma once

#include <vector>

#include <Eigen/Dense>

#include "veclap/block_operator.hpp"
#include "veclap/frame.hpp"
#include "veclap/geometry.hpp"
#include "veclap/gmls.hpp"
#include "veclap/monge.hpp"

namespace veclap {

/// Ambient-direction differential matrices of one stencil.
///
/// For each ambient direction s, G[s] is K x K: it maps samples of a
/// scalar function on the stencil to estimates of the s-th ambient
/// component of its tangentially projected gradient at every stencil
/// point, using each point's own tangent projection on the output side.
/// D_base holds the base row of the unprojected variants: row s applied
/// to samples estimates the plain s-th ambient derivative at the base.
/// Every G[s] annihilates constants.
struct StencilDifferentials {
    std::vector<Eigen::MatrixXd> G;
    Eigen::MatrixXd D_base;
};

StencilDifferentials build_stencil_differentials(
    const LocalFit& fit, const Eigen::MatrixXd& base_frame,
    const FrameField& frames, const std::vector<int>& stencil);

/// Weight rows of one Laplacian stencil acting directly on per-point
/// frame components: W is d x (d*K) with column j*d + c multiplying
/// component c of stencil point j. Built by composing the projected
/// differentials twice, re-expressing intermediate fields in the stencil
/// frames between the applications, plus the kind-specific
/// divergence-gradient blocks.
Eigen::MatrixXd extrinsic_local_weights(const StencilDifferentials& diffs,
                                        const FrameField& frames,
                                        const std::vector<int>& stencil,
                                        LaplacianKind kind);

/// Assemble the chosen vector Laplacian over the whole cloud through the
/// projected ambient-derivative route. No graph patch is involved; the
/// field fit degree l_field needs to be at least 2.
BlockOperator assemble_extrinsic(const PointCloud& cloud,
                                 const FrameField& frames, LaplacianKind kind,
                                 int K, int l_field);

/// Advection term grad_u u through the unprojected base-row differentials:
/// the ambient directional derivative sum_s U^s(x0) d_s of the ambient
/// extension, projected back onto the base tangent plane.
class ExtrinsicCovariant {
public:
    ExtrinsicCovariant(const PointCloud& cloud, const FrameField& frames,
                       int K, int l_field);

    Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
    int dim() const { return N_ * d_; }

private:
    int N_ = 0;
    int d_ = 0;
    int n_ = 0;
    int K_ = 0;
    std::vector<Eigen::MatrixXd> frames_;
    std::vector<std::vector<int>> stencils_;
    std::vector<Eigen::MatrixXd> base_rows_; // n x K per point
};

} // namespace veclap
