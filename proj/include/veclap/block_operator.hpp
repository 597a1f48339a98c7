#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace veclap {

/// Sparse dN-by-dN operator stored as block rows: block row i holds K
/// sorted neighbor column indices, each with a dense d-by-d block.
///
/// Scalar layout is point-major: the coefficient vector stacks the d
/// frame components of point 0, then point 1, and so on. Entry (i*d + a,
/// j*d + b) couples output component a at point i to input component b
/// at point j.
struct BlockOperator {
    int N = 0;
    int d = 0;
    int K = 0;
    std::vector<std::vector<int>> cols;              // per row, ascending
    std::vector<std::vector<Eigen::MatrixXd>> blocks; // aligned with cols

    int dim() const { return N * d; }

    Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
    Eigen::SparseMatrix<double> to_sparse() const;
    Eigen::MatrixXd dense() const;

    /// Subtract `shift` from the scalar diagonal (block (i,i) -= shift*I).
    void shift_diagonal(double shift);

    void validate() const;
};

/// Coordinate-triplet serialization: header `% dN <dN> K <K> kind <kind>`
/// then `row, col, value` lines sorted by (row, col), full precision.
/// Zero block entries are kept so every file has exactly d*d*K*N values.
void save_operator_coo(const std::string& path, const BlockOperator& op,
                       const std::string& kind);

/// The block structure is not recoverable from the scalar file (d is not
/// stored), so loading yields a plain sparse matrix plus the header data.
struct LoadedOperator {
    int dim = 0;
    int K = 0;
    std::string kind;
    Eigen::SparseMatrix<double> matrix;
};

LoadedOperator load_operator_coo(const std::string& path);

} // namespace veclap
