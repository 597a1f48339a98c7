#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "veclap/block_operator.hpp"

namespace veclap {

struct Spectrum {
    std::vector<std::complex<double>> values; // sorted by Re desc, then Im desc
    std::string method;
};

/// Full spectrum through LAPACK's general dense eigensolver (dgeev,
/// eigenvalues only). Refuses systems above 8000 scalar unknowns; use the
/// extremal routine there.
Spectrum dense_eigenvalues(const Eigen::MatrixXd& A);
Spectrum dense_eigenvalues(const BlockOperator& op);

struct ArnoldiOptions {
    double sigma = 0.1;  // shift, must lie strictly right of the spectrum
    double tol = 1e-8;   // relative residual bound for an accepted pair
    int max_subspace = 400;
};

/// The k eigenvalues with the largest real parts, through shift-invert
/// Arnoldi on a sparse LU factorization of (A - sigma*I).
///
/// With sigma strictly to the right of every eigenvalue (the default 0.1
/// suits operators whose spectra sit in or near the closed left half
/// plane), the eigenvalues nearest sigma dominate the inverted operator,
/// and those are the rightmost ones. Each returned value is verified
/// against the explicit residual ||A z - lambda z|| / ||z|| computed with
/// the original matrix; if fewer than k pairs pass the bound the subspace
/// is enlarged, and exhausting max_subspace raises NumericalError carrying
/// the worst residual seen.
Spectrum extremal_real_eigenvalues(const Eigen::SparseMatrix<double>& A,
                                   int k, const ArnoldiOptions& opts = {});
Spectrum extremal_real_eigenvalues(const BlockOperator& op, int k,
                                   const ArnoldiOptions& opts = {});

/// Clamp the rightmost real part to zero: estimate it, and when it exceeds
/// 1e-12 subtract it from the scalar diagonal. Returns the shift applied
/// (0 when the spectrum already qualifies), so a second call is a no-op.
double stabilize(BlockOperator& op);

/// Same threshold rule with a caller-supplied rightmost real part, for
/// tests and for reusing an already computed spectrum.
double stabilize_with(BlockOperator& op, double lambda0_real);

} // namespace veclap
