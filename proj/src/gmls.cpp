#include "veclap/gmls.hpp"

#include <cmath>
#include <limits>

#include "veclap/common.hpp"

namespace veclap {

Eigen::VectorXd weight_vector(WeightScheme scheme, int K) {
    if (K <= 0) throw ValidationError("weight_vector: stencil size must be positive");
    Eigen::VectorXd w(K);
    switch (scheme) {
        case WeightScheme::BaseEmphasis:
            w.setConstant(1.0 / static_cast<double>(K));
            w(0) = 1.0;
            break;
        case WeightScheme::Uniform:
            w.setOnes();
            break;
    }
    return w;
}

Eigen::MatrixXd local_coordinates(const Eigen::MatrixXd& stencil_points,
                                  const Eigen::MatrixXd& base_frame,
                                  const Eigen::VectorXd& base_point) {
    const auto K = stencil_points.rows();
    if (stencil_points.cols() != base_frame.rows())
        throw ValidationError("local_coordinates: ambient dimension mismatch");
    if (base_point.size() != base_frame.rows())
        throw ValidationError("local_coordinates: base point dimension mismatch");
    Eigen::MatrixXd theta(K, base_frame.cols());
    for (Eigen::Index k = 0; k < K; ++k)
        theta.row(k) = (base_frame.transpose() * (stencil_points.row(k).transpose() - base_point)).transpose();
    return theta;
}

Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& theta, const MultiIndexSet& idx) {
    if (theta.cols() != idx.dim())
        throw ValidationError("design_matrix: coordinate dimension does not match index set");
    const auto K = theta.rows();
    const int m = idx.size();
    Eigen::MatrixXd phi(K, m);
    for (Eigen::Index k = 0; k < K; ++k) {
        for (int j = 0; j < m; ++j) {
            const Alpha& a = idx[j];
            double v = 1.0;
            for (int c = 0; c < idx.dim(); ++c) {
                const double t = theta(k, c);
                for (int p = 0; p < a[static_cast<std::size_t>(c)]; ++p) v *= t;
            }
            phi(k, j) = v;
        }
    }
    return phi;
}

namespace {

constexpr double kQrFallbackCond = 1e8;
constexpr double kRankDeficientCond = 1e12;

} // namespace

LocalFit build_local_fit(const Eigen::MatrixXd& theta, const MultiIndexSet& idx,
                         WeightScheme scheme, int point_index) {
    LocalFit fit{idx, theta, design_matrix(theta, idx), Eigen::MatrixXd(), 0.0};
    const int K = fit.K();
    const int m = fit.m();
    if (K < m)
        throw RankDeficientError(std::numeric_limits<double>::infinity(), point_index);

    // Fit in radius-normalized coordinates: dividing by the stencil radius
    // keeps the monomial columns comparably sized, which is what makes
    // high-degree fits on small stencils well conditioned. Coefficient
    // rows are unscaled afterwards so phi_dagger still maps values to
    // coefficients of the monomials in the original coordinates.
    double h = theta.rowwise().norm().maxCoeff();
    if (!(h > 0.0))
        h = 1.0;
    const Eigen::MatrixXd phi_s = design_matrix(theta / h, idx);

    const Eigen::VectorXd w = weight_vector(scheme, K);
    const Eigen::MatrixXd weighted_phi_t = phi_s.transpose() * w.asDiagonal(); // m x K
    const Eigen::MatrixXd normal = weighted_phi_t * phi_s;                     // m x m

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(normal, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    fit.cond = (lo > 0.0) ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(fit.cond < kRankDeficientCond))
        throw RankDeficientError(fit.cond, point_index);

    if (fit.cond < kQrFallbackCond) {
        fit.phi_dagger = normal.ldlt().solve(weighted_phi_t);
    } else {
        // Solve the weighted problem through a rank-revealing QR of
        // sqrt(W) * phi, which avoids squaring the condition number.
        const Eigen::VectorXd sw = w.array().sqrt().matrix();
        const Eigen::MatrixXd scaled = sw.asDiagonal() * phi_s;
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
        Eigen::MatrixXd rhs = Eigen::MatrixXd(sw.asDiagonal());
        fit.phi_dagger = qr.solve(rhs);
    }
    for (int j = 0; j < m; ++j)
        fit.phi_dagger.row(j) /= std::pow(h, idx.degree(j));
    return fit;
}

Eigen::VectorXd fit_values(const LocalFit& fit, const Eigen::VectorXd& values) {
    if (values.size() != fit.K())
        throw ValidationError("fit_values: value count does not match stencil size");
    return fit.phi_dagger * values;
}

double derivative_at_base(const Eigen::VectorXd& coeffs, const MultiIndexSet& idx,
                          const Alpha& delta) {
    const int j = idx.find(delta);
    if (j < 0) return 0.0;
    return MultiIndexSet::factorial(delta, idx.dim()) * coeffs(j);
}

Eigen::RowVectorXd derivative_row(const LocalFit& fit, const Alpha& delta) {
    const int j = fit.idx.find(delta);
    if (j < 0) return Eigen::RowVectorXd::Zero(fit.K());
    return MultiIndexSet::factorial(delta, fit.idx.dim()) * fit.phi_dagger.row(j);
}

Eigen::MatrixXd monomial_gradient_matrix(const MultiIndexSet& idx,
                                         const Eigen::VectorXd& theta_row) {
    const int d = idx.dim();
    if (theta_row.size() != d)
        throw ValidationError("monomial_gradient_matrix: coordinate dimension "
                              "mismatch");
    const int m = idx.size();
    Eigen::MatrixXd G(m, d);
    for (int j = 0; j < m; ++j) {
        const Alpha& a = idx[j];
        for (int k = 0; k < d; ++k) {
            const int ak = a[static_cast<std::size_t>(k)];
            if (ak == 0) {
                G(j, k) = 0.0;
                continue;
            }
            double v = static_cast<double>(ak);
            for (int c = 0; c < d; ++c) {
                int p = a[static_cast<std::size_t>(c)];
                if (c == k) --p;
                for (int e = 0; e < p; ++e) v *= theta_row(c);
            }
            G(j, k) = v;
        }
    }
    return G;
}

} // namespace veclap
