#include "veclap/block_operator.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <string>
#include <vector>

#include "veclap/common.hpp"

namespace veclap {

void BlockOperator::validate() const {
    if (N <= 0 || d <= 0 || K <= 0)
        throw ValidationError("operator dimensions must be positive");
    if (static_cast<int>(cols.size()) != N ||
        static_cast<int>(blocks.size()) != N)
        throw ValidationError("operator row count mismatch");
    for (int i = 0; i < N; ++i) {
        if (static_cast<int>(cols[i].size()) != K ||
            static_cast<int>(blocks[i].size()) != K)
            throw ValidationError("operator row " + std::to_string(i) +
                                  " does not hold exactly K blocks");
        for (int k = 0; k < K; ++k) {
            if (cols[i][k] < 0 || cols[i][k] >= N)
                throw ValidationError("operator column index out of range");
            if (k > 0 && cols[i][k] <= cols[i][k - 1])
                throw ValidationError("operator columns must be strictly "
                                      "ascending within each row");
            if (blocks[i][k].rows() != d || blocks[i][k].cols() != d)
                throw ValidationError("operator block has wrong shape");
        }
    }
}

Eigen::VectorXd BlockOperator::apply(const Eigen::VectorXd& u) const {
    if (u.size() != dim())
        throw ValidationError("operator apply: vector length " +
                              std::to_string(u.size()) + " does not match " +
                              std::to_string(dim()));
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim());
    for (int i = 0; i < N; ++i) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
        const auto& row_cols = cols[i];
        const auto& row_blocks = blocks[i];
        for (size_t k = 0; k < row_cols.size(); ++k)
            acc.noalias() += row_blocks[k] * u.segment(row_cols[k] * d, d);
        out.segment(i * d, d) = acc;
    }
    return out;
}

Eigen::SparseMatrix<double> BlockOperator::to_sparse() const {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<size_t>(N) * K * d * d);
    for (int i = 0; i < N; ++i)
        for (size_t k = 0; k < cols[i].size(); ++k) {
            const int j = cols[i][k];
            const Eigen::MatrixXd& b = blocks[i][k];
            for (int a = 0; a < d; ++a)
                for (int c = 0; c < d; ++c)
                    trips.emplace_back(i * d + a, j * d + c, b(a, c));
        }
    Eigen::SparseMatrix<double> s(dim(), dim());
    s.setFromTriplets(trips.begin(), trips.end());
    return s;
}

Eigen::MatrixXd BlockOperator::dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim(), dim());
    for (int i = 0; i < N; ++i)
        for (size_t k = 0; k < cols[i].size(); ++k)
            m.block(i * d, cols[i][k] * d, d, d) = blocks[i][k];
    return m;
}

void BlockOperator::shift_diagonal(double shift) {
    for (int i = 0; i < N; ++i) {
        auto it = std::lower_bound(cols[i].begin(), cols[i].end(), i);
        if (it == cols[i].end() || *it != i)
            throw ValidationError("operator row " + std::to_string(i) +
                                  " has no diagonal block to shift");
        const size_t k = static_cast<size_t>(it - cols[i].begin());
        blocks[i][k].diagonal().array() -= shift;
    }
}

void save_operator_coo(const std::string& path, const BlockOperator& op,
                       const std::string& kind) {
    op.validate();
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f)
        throw ValidationError("cannot open " + path + " for writing");
    std::fprintf(f, "%% dN %d K %d kind %s\n", op.dim(), op.K, kind.c_str());
    std::fprintf(f, "row, col, value\n");
    for (int i = 0; i < op.N; ++i)
        for (int a = 0; a < op.d; ++a)
            // Scalar row i*d+a: walk the sorted block columns in order so
            // scalar columns come out sorted too.
            for (size_t k = 0; k < op.cols[i].size(); ++k)
                for (int c = 0; c < op.d; ++c)
                    std::fprintf(f, "%d, %d, %.17g\n", i * op.d + a,
                                 op.cols[i][k] * op.d + c,
                                 op.blocks[i][k](a, c));
    if (std::fclose(f) != 0)
        throw ValidationError("write failure closing " + path);
}

LoadedOperator load_operator_coo(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "r");
    if (!f)
        throw ValidationError("cannot open " + path);
    LoadedOperator out;
    char header[256];
    if (!std::fgets(header, sizeof(header), f)) {
        std::fclose(f);
        throw ValidationError("empty operator file " + path);
    }
    char kind_buf[64] = {0};
    if (std::sscanf(header, "%% dN %d K %d kind %63s", &out.dim, &out.K,
                    kind_buf) != 3) {
        std::fclose(f);
        throw ValidationError("malformed operator header in " + path);
    }
    out.kind = kind_buf;
    if (out.dim <= 0 || out.K <= 0) {
        std::fclose(f);
        throw ValidationError("nonpositive dimensions in header of " + path);
    }
    char line[256];
    if (!std::fgets(line, sizeof(line), f)) {
        std::fclose(f);
        throw ValidationError("missing column header in " + path);
    }
    std::vector<Eigen::Triplet<double>> trips;
    long lineno = 2;
    while (std::fgets(line, sizeof(line), f)) {
        ++lineno;
        int r = 0, c = 0;
        double v = 0.0;
        if (std::sscanf(line, "%d , %d , %lf", &r, &c, &v) != 3) {
            std::fclose(f);
            throw ValidationError("malformed triplet at line " +
                                  std::to_string(lineno) + " of " + path);
        }
        if (r < 0 || r >= out.dim || c < 0 || c >= out.dim) {
            std::fclose(f);
            throw ValidationError("triplet index out of range at line " +
                                  std::to_string(lineno) + " of " + path);
        }
        trips.emplace_back(r, c, v);
    }
    std::fclose(f);
    out.matrix.resize(out.dim, out.dim);
    out.matrix.setFromTriplets(trips.begin(), trips.end());
    return out;
}

} // namespace veclap
