#pragma once

#include <memory>

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "veclap/block_operator.hpp"

namespace veclap {

enum class SolverMethod { Auto, Direct, Iterative };

/// Factorization cache for a sparse system matrix. Auto picks sparse LU
/// below 20000 unknowns and ILUT-preconditioned BiCGSTAB above. Every
/// solve is checked afterwards: a relative residual in the max norm above
/// 1e-8 raises NumericalError rather than returning a bad vector.
class VerifiedLinearSolver {
public:
    explicit VerifiedLinearSolver(const Eigen::SparseMatrix<double>& M,
                                  SolverMethod method = SolverMethod::Auto);
    ~VerifiedLinearSolver();
    VerifiedLinearSolver(VerifiedLinearSolver&&) noexcept;
    VerifiedLinearSolver& operator=(VerifiedLinearSolver&&) noexcept;

    Eigen::VectorXd solve(const Eigen::VectorXd& f) const;
    int dim() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Solve (a*I - L) u = f for a given scalar shift a.
Eigen::VectorXd solve_shifted(double a, const Eigen::SparseMatrix<double>& L,
                              const Eigen::VectorXd& f);
Eigen::VectorXd solve_shifted(double a, const BlockOperator& L,
                              const Eigen::VectorXd& f);

} // namespace veclap
