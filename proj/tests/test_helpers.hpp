#pragma once

#include <random>

#include <Eigen/Dense>

// Shared helpers for the unit and property tests. Each test binary defines
// DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN in exactly one translation unit before
// including doctest.h, so this header stays implementation-free.

namespace testutil {

/// Deterministic engine: every test that draws random data seeds one of
/// these explicitly so failures reproduce.
inline std::mt19937_64 rng(unsigned long long seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& eng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(eng);
}

inline Eigen::VectorXd random_vector(std::mt19937_64& eng, int n, double lo = -1.0,
                                     double hi = 1.0) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = uniform(eng, lo, hi);
    return v;
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& eng, int rows, int cols,
                                     double lo = -1.0, double hi = 1.0) {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = uniform(eng, lo, hi);
    return m;
}

/// Random orthonormal frame: Q factor of a random square matrix, with a
/// sign fix so the result is reproducible across BLAS builds.
inline Eigen::MatrixXd random_orthogonal(std::mt19937_64& eng, int n) {
    Eigen::MatrixXd a = random_matrix(eng, n, n);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::VectorXd diag = qr.matrixQR().diagonal();
    for (int j = 0; j < n; ++j)
        if (diag(j) < 0.0) q.col(j) *= -1.0;
    return q;
}

} // namespace testutil
