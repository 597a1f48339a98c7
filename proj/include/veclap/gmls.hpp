#pragma once

#include <Eigen/Dense>

#include "veclap/multi_index.hpp"

namespace veclap {

/// Per-sample weights for the local least-squares fit.
///
/// BaseEmphasis puts weight 1 on the base point and 1/K on every other
/// stencil point; it is the scheme used on the Laplacian path. Uniform
/// weights every sample equally and is used on the covariant-derivative
/// path.
enum class WeightScheme { BaseEmphasis, Uniform };

Eigen::VectorXd weight_vector(WeightScheme scheme, int K);

/// Local tangent-plane coordinates of a stencil: row k holds
/// theta(x_k) = T^t (x_k - base). Row 0 is the zero vector when the
/// stencil leads with its base point.
Eigen::MatrixXd local_coordinates(const Eigen::MatrixXd& stencil_points,
                                  const Eigen::MatrixXd& base_frame,
                                  const Eigen::VectorXd& base_point);

/// Vandermonde-style design matrix: entry (k, j) is the monomial
/// theta(x_k)^alpha(j).
Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& theta, const MultiIndexSet& idx);

/// One weighted polynomial least-squares system, factored once and reused
/// for every field fitted on the same stencil.
///
/// phi_dagger is the m-by-K solve operator: coefficients = phi_dagger * values.
/// cond is the condition estimate of the normal matrix; above 1e8 the
/// build switches to a rank-revealing QR, above 1e12 it throws
/// RankDeficientError.
struct LocalFit {
    MultiIndexSet idx;
    Eigen::MatrixXd theta;      // K x d
    Eigen::MatrixXd phi;        // K x m
    Eigen::MatrixXd phi_dagger; // m x K
    double cond = 0.0;

    int K() const { return static_cast<int>(theta.rows()); }
    int m() const { return idx.size(); }
};

LocalFit build_local_fit(const Eigen::MatrixXd& theta, const MultiIndexSet& idx,
                         WeightScheme scheme, int point_index = -1);

/// Coefficients of the weighted least-squares polynomial through `values`.
Eigen::VectorXd fit_values(const LocalFit& fit, const Eigen::VectorXd& values);

/// D^delta p(0) read off a coefficient vector: delta! * b_delta.
double derivative_at_base(const Eigen::VectorXd& coeffs, const MultiIndexSet& idx,
                          const Alpha& delta);

/// Row vector r such that r * values = D^delta p(0) for the fitted
/// polynomial, i.e. delta! times the corresponding row of phi_dagger.
/// This is the building block of every operator weight.
Eigen::RowVectorXd derivative_row(const LocalFit& fit, const Alpha& delta);

/// Gradient of every basis monomial at one coordinate point:
/// entry (j, k) is d_k theta^alpha(j) evaluated at theta_row.
Eigen::MatrixXd monomial_gradient_matrix(const MultiIndexSet& idx,
                                         const Eigen::VectorXd& theta_row);

} // namespace veclap
