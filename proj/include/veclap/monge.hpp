#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "veclap/gmls.hpp"
#include "veclap/multi_index.hpp"

namespace veclap {

enum class LaplacianKind { Bochner, LLaplacian, Hodge };

LaplacianKind laplacian_kind_from_name(const std::string& name);
std::string laplacian_kind_name(LaplacianKind kind);

/// Local polynomial graph of the surface over its tangent plane at one
/// base point, with constant and linear terms excluded from the basis so
/// that, at the base, the induced metric is exactly the identity and all
/// Christoffel symbols vanish.
///
/// Two parametrizations share this type. A surface in 3-space stores one
/// height function over the tangent plane (coeffs has one column, the
/// normal is kept). Every other (d, n) stores one graph per ambient
/// coordinate of the residual x - x0 - T theta (coeffs has n columns, no
/// normals are ever built).
struct MongePatch {
    Eigen::VectorXd base;  // n
    Eigen::MatrixXd frame; // n x d, orthonormal
    Eigen::VectorXd normal; // 3-vector on the height path, empty otherwise
    MultiIndexSet idx;     // degrees 2..l_patch
    Eigen::MatrixXd coeffs; // m' x (1 or n)
    Eigen::MatrixXd theta; // K x d stencil coordinates in `frame`
    /// Quadratic coefficient matrices: c[s](i,k) with diagonals taken
    /// directly from the degree-2 coefficients and off-diagonals halved,
    /// so the graph's Hessian at the base is 2 c[s].
    std::vector<Eigen::MatrixXd> c;

    int d() const { return static_cast<int>(frame.cols()); }
    int n() const { return static_cast<int>(frame.rows()); }
    int K() const { return static_cast<int>(theta.rows()); }
    bool ambient_path() const { return normal.size() == 0; }
};

/// Fit the local graph of the stencil over the frame's tangent plane.
/// stencil_points is K x n with the base in row 0; l_patch >= 2.
MongePatch fit_monge_patch(const Eigen::MatrixXd& stencil_points,
                           const Eigen::MatrixXd& frame, int l_patch,
                           int point_index = -1);

/// First derivatives of the Christoffel symbols at the base point,
/// entry(r, i, k, l) = d_r Gamma^i_{kl}|_0 = sum_s 4 c^s_{ir} c^s_{kl}.
struct ChristoffelDerivatives {
    int d = 0;
    std::vector<double> v; // d^4, indexed ((r d + i) d + k) d + l

    double operator()(int r, int i, int k, int l) const {
        return v[static_cast<std::size_t>(((r * d + i) * d + k) * d + l)];
    }
};

ChristoffelDerivatives christoffel_derivatives(const MongePatch& patch);

/// Zeroth-order curvature coupling of each Laplacian at the base point:
/// the d x d matrix C with (L u)^i|_0 = (second-derivative rows) + C_{il} u^l|_0.
Eigen::MatrixXd coupling_matrix(const MongePatch& patch, LaplacianKind kind);

/// Tangent vectors of the fitted graph at local coordinates `theta_row`:
/// column k is t_k plus the graph's k-th partial slopes pushed along the
/// normal directions. At theta = 0 this is exactly the base frame.
Eigen::MatrixXd local_tangent_basis(const MongePatch& patch,
                                    const Eigen::VectorXd& theta_row);

} // namespace veclap
