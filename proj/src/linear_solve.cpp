#include <limits>
#include "veclap/linear_solve.hpp"

#include <string>

#include "veclap/common.hpp"

namespace veclap {

namespace {
constexpr int kDirectCap = 20000;
constexpr double kResidualTol = 1e-8;
} // namespace

struct VerifiedLinearSolver::Impl {
    Eigen::SparseMatrix<double> M;
    std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu;
    std::unique_ptr<Eigen::BiCGSTAB<Eigen::SparseMatrix<double>,
                                    Eigen::IncompleteLUT<double>>>
        iterative;
};

VerifiedLinearSolver::VerifiedLinearSolver(const Eigen::SparseMatrix<double>& M,
                                           SolverMethod method)
    : impl_(std::make_unique<Impl>()) {
    if (M.rows() != M.cols())
        throw ValidationError("linear solver needs a square matrix");
    if (M.rows() == 0)
        throw ValidationError("linear solver on an empty matrix");
    impl_->M = M;
    impl_->M.makeCompressed();
    const bool direct = method == SolverMethod::Direct ||
                        (method == SolverMethod::Auto && M.rows() < kDirectCap);
    if (direct) {
        impl_->lu =
            std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
        impl_->lu->compute(impl_->M);
        if (impl_->lu->info() != Eigen::Success)
            throw NumericalError("sparse LU factorization failed; the system "
                                 "matrix looks singular");
    } else {
        impl_->iterative = std::make_unique<
            Eigen::BiCGSTAB<Eigen::SparseMatrix<double>,
                            Eigen::IncompleteLUT<double>>>();
        impl_->iterative->setTolerance(1e-12);
        impl_->iterative->setMaxIterations(5000);
        impl_->iterative->compute(impl_->M);
        if (impl_->iterative->info() != Eigen::Success)
            throw NumericalError("ILUT preconditioner construction failed");
    }
}

VerifiedLinearSolver::~VerifiedLinearSolver() = default;
VerifiedLinearSolver::VerifiedLinearSolver(VerifiedLinearSolver&&) noexcept =
    default;
VerifiedLinearSolver& VerifiedLinearSolver::operator=(
    VerifiedLinearSolver&&) noexcept = default;

int VerifiedLinearSolver::dim() const {
    return static_cast<int>(impl_->M.rows());
}

Eigen::VectorXd VerifiedLinearSolver::solve(const Eigen::VectorXd& f) const {
    if (f.size() != impl_->M.rows())
        throw ValidationError("right-hand side length does not match the "
                              "system matrix");
    Eigen::VectorXd u;
    if (impl_->lu)
        u = impl_->lu->solve(f);
    else
        u = impl_->iterative->solve(f);
    if (!u.allFinite())
        throw NumericalError("linear solve produced nonfinite values");
    const double rnorm = (impl_->M * u - f).lpNorm<Eigen::Infinity>();
    const double fnorm = f.lpNorm<Eigen::Infinity>();
    // The absolute floor keeps the relative test meaningful when f sits
    // in the denormal range, where one ulp already exceeds 1e-8 |f|.
    if (rnorm > kResidualTol * fnorm + std::numeric_limits<double>::min())
        throw NumericalError("linear solve residual " + format_full(rnorm) +
                             " exceeds " + format_full(kResidualTol) +
                             " relative to |f| = " + format_full(fnorm));
    return u;
}

Eigen::VectorXd solve_shifted(double a, const Eigen::SparseMatrix<double>& L,
                              const Eigen::VectorXd& f) {
    Eigen::SparseMatrix<double> M(L.rows(), L.cols());
    M.setIdentity();
    M = a * M - L;
    return VerifiedLinearSolver(M).solve(f);
}

Eigen::VectorXd solve_shifted(double a, const BlockOperator& L,
                              const Eigen::VectorXd& f) {
    return solve_shifted(a, L.to_sparse(), f);
}

} // namespace veclap
