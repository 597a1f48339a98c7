#include "veclap/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/SparseLU>
#include <lapacke.h>

#include "veclap/common.hpp"

namespace veclap {

namespace {

constexpr int kDenseCap = 8000;

void sort_spectrum(std::vector<std::complex<double>>& values) {
    std::sort(values.begin(), values.end(),
              [](const std::complex<double>& a, const std::complex<double>& b) {
                  if (a.real() != b.real())
                      return a.real() > b.real();
                  return a.imag() > b.imag();
              });
}

Eigen::VectorXd deterministic_unit_vector(int n) {
    std::mt19937_64 eng(0x7a6f2c91d4b85e33ULL);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i)
        v(i) = static_cast<double>(eng() >> 11) * 0x1.0p-53 - 0.5;
    const double norm = v.norm();
    if (norm == 0.0)
        v(0) = 1.0; // cannot happen, but keep the vector usable
    else
        v /= norm;
    return v;
}

struct RitzCandidate {
    std::complex<double> lambda;
    Eigen::VectorXcd y; // coefficients in the Arnoldi basis
};

double ritz_residual(const Eigen::SparseMatrix<double>& A,
                     const Eigen::MatrixXd& V, const RitzCandidate& cand) {
    const Eigen::VectorXd zr = V * cand.y.real();
    const Eigen::VectorXd zi = V * cand.y.imag();
    const double znorm = std::sqrt(zr.squaredNorm() + zi.squaredNorm());
    if (znorm == 0.0)
        return std::numeric_limits<double>::infinity();
    const double re = cand.lambda.real();
    const double im = cand.lambda.imag();
    const Eigen::VectorXd rr = A * zr - (re * zr - im * zi);
    const Eigen::VectorXd ri = A * zi - (re * zi + im * zr);
    return std::sqrt(rr.squaredNorm() + ri.squaredNorm()) / znorm;
}

} // namespace

Spectrum dense_eigenvalues(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols())
        throw ValidationError("dense eigensolve needs a square matrix");
    const int n = static_cast<int>(A.rows());
    if (n == 0)
        throw ValidationError("dense eigensolve on an empty matrix");
    if (n > kDenseCap)
        throw ValidationError("dense eigensolve capped at " +
                              std::to_string(kDenseCap) + " unknowns, got " +
                              std::to_string(n));
    Eigen::MatrixXd work = A; // dgeev overwrites its input
    std::vector<double> wr(n), wi(n);
    const lapack_int info = LAPACKE_dgeev(
        LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n, wr.data(), wi.data(),
        nullptr, 1, nullptr, 1);
    if (info < 0)
        throw NumericalError("dgeev rejected argument " +
                             std::to_string(-info));
    if (info > 0)
        throw NumericalError("dgeev QR iteration failed to converge past "
                             "eigenvalue " + std::to_string(info));
    Spectrum out;
    out.values.reserve(n);
    for (int i = 0; i < n; ++i)
        out.values.emplace_back(wr[i], wi[i]);
    sort_spectrum(out.values);
    out.method = "dense";
    return out;
}

Spectrum dense_eigenvalues(const BlockOperator& op) {
    if (op.dim() > kDenseCap)
        throw ValidationError("dense eigensolve capped at " +
                              std::to_string(kDenseCap) + " unknowns, got " +
                              std::to_string(op.dim()));
    return dense_eigenvalues(op.dense());
}

Spectrum extremal_real_eigenvalues(const Eigen::SparseMatrix<double>& A,
                                   int k, const ArnoldiOptions& opts) {
    if (A.rows() != A.cols())
        throw ValidationError("eigensolve needs a square matrix");
    const int n = static_cast<int>(A.rows());
    if (k <= 0)
        throw ValidationError("requested eigenvalue count must be positive");
    if (k > n)
        throw ValidationError("requested " + std::to_string(k) +
                              " eigenvalues from a " + std::to_string(n) +
                              "-dimensional operator");
    const int hard_cap = std::min(n, opts.max_subspace);
    if (k > hard_cap)
        throw ValidationError("requested eigenvalue count exceeds the "
                              "iterative subspace cap");

    Eigen::SparseMatrix<double> shifted = A;
    {
        Eigen::SparseMatrix<double> id(n, n);
        id.setIdentity();
        shifted -= opts.sigma * id;
        shifted.makeCompressed();
    }
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(shifted);
    if (lu.info() != Eigen::Success)
        throw NumericalError(
            "factorization of the shifted operator failed; the shift " +
            format_full(opts.sigma) + " may intersect the spectrum");

    const Eigen::VectorXd start = deterministic_unit_vector(n);
    int m = std::min(std::max(2 * k + 20, 40), hard_cap);

    while (true) {
        Eigen::MatrixXd V(n, m + 1);
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
        V.col(0) = start;
        int m_eff = m;
        bool broke_down = false;
        for (int j = 0; j < m; ++j) {
            Eigen::VectorXd w = lu.solve(V.col(j));
            if (!w.allFinite())
                throw NumericalError("shift-invert solve produced nonfinite "
                                     "values at Arnoldi step " +
                                     std::to_string(j));
            const double initial_norm = w.norm();
            for (int i = 0; i <= j; ++i) {
                const double h = V.col(i).dot(w);
                H(i, j) = h;
                w.noalias() -= h * V.col(i);
            }
            // A second orthogonalization pass keeps the basis clean when a
            // solve lands almost inside the current subspace.
            for (int i = 0; i <= j; ++i) {
                const double corr = V.col(i).dot(w);
                H(i, j) += corr;
                w.noalias() -= corr * V.col(i);
            }
            const double hnext = w.norm();
            if (hnext <= 1e-12 * std::max(initial_norm, 1.0)) {
                m_eff = j + 1; // invariant subspace reached
                broke_down = true;
                break;
            }
            H(j + 1, j) = hnext;
            V.col(j + 1) = w / hnext;
        }

        const Eigen::MatrixXd Hm = H.topLeftCorner(m_eff, m_eff);
        Eigen::EigenSolver<Eigen::MatrixXd> es(Hm);
        if (es.info() != Eigen::Success)
            throw NumericalError("eigendecomposition of the Arnoldi "
                                 "projection failed");

        std::vector<RitzCandidate> cands;
        cands.reserve(m_eff);
        for (int i = 0; i < m_eff; ++i) {
            const std::complex<double> mu = es.eigenvalues()(i);
            if (std::abs(mu) < 1e-300)
                continue; // numerically null direction, cannot invert
            RitzCandidate c;
            c.lambda = opts.sigma + 1.0 / mu;
            c.y = es.eigenvectors().col(i);
            cands.push_back(std::move(c));
        }
        std::sort(cands.begin(), cands.end(),
                  [](const RitzCandidate& a, const RitzCandidate& b) {
                      if (a.lambda.real() != b.lambda.real())
                          return a.lambda.real() > b.lambda.real();
                      return a.lambda.imag() > b.lambda.imag();
                  });

        const Eigen::MatrixXd Vm = V.leftCols(m_eff);
        std::vector<std::complex<double>> accepted;
        double worst = 0.0;
        for (const auto& cand : cands) {
            if (static_cast<int>(accepted.size()) == k)
                break;
            const double res = ritz_residual(A, Vm, cand);
            if (res <= opts.tol)
                accepted.push_back(cand.lambda);
            else
                worst = std::max(worst, res);
        }
        if (static_cast<int>(accepted.size()) == k) {
            Spectrum out;
            out.values = std::move(accepted);
            sort_spectrum(out.values);
            out.method = "shift_invert_arnoldi";
            return out;
        }
        if (broke_down)
            throw NumericalError(
                "Arnoldi reached an invariant subspace of dimension " +
                std::to_string(m_eff) + " holding only " +
                std::to_string(accepted.size()) + " of " + std::to_string(k) +
                " converged eigenvalues");
        const int next = std::min(2 * m, hard_cap);
        if (next == m)
            throw NumericalError(
                "Arnoldi failed to converge " + std::to_string(k) +
                " eigenvalues at subspace size " + std::to_string(m) +
                "; worst candidate residual " + format_full(worst));
        m = next;
    }
}

Spectrum extremal_real_eigenvalues(const BlockOperator& op, int k,
                                   const ArnoldiOptions& opts) {
    return extremal_real_eigenvalues(op.to_sparse(), k, opts);
}

double stabilize_with(BlockOperator& op, double lambda0_real) {
    if (lambda0_real <= 1e-12)
        return 0.0;
    op.shift_diagonal(lambda0_real);
    return lambda0_real;
}

double stabilize(BlockOperator& op) {
    const Spectrum top = extremal_real_eigenvalues(op, 1);
    return stabilize_with(op, top.values.front().real());
}

} // namespace veclap
