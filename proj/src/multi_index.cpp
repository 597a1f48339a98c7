#include "veclap/multi_index.hpp"

#include "veclap/common.hpp"

namespace veclap {

namespace {

// Append all dim-tuples of total degree g in descending lexicographic order.
void enumerate_degree(int dim, int g, int pos, Alpha& work, std::vector<Alpha>& out) {
    if (pos == dim - 1) {
        work[pos] = g;
        out.push_back(work);
        return;
    }
    for (int a = g; a >= 0; --a) {
        work[pos] = a;
        enumerate_degree(dim, g - a, pos + 1, work, out);
    }
}

} // namespace

MultiIndexSet::MultiIndexSet(int dim, int lo, int hi) : dim_(dim), lo_(lo), hi_(hi) {
    if (dim < 1 || dim > kMaxDim)
        throw ValidationError("multi-index dimension must be in 1.." + std::to_string(kMaxDim));
    if (lo < 0 || hi < lo)
        throw ValidationError("invalid multi-index degree range");
    Alpha work{};
    for (int g = lo; g <= hi; ++g)
        enumerate_degree(dim, g, 0, work, alphas_);
    degrees_.reserve(alphas_.size());
    for (const Alpha& a : alphas_) {
        int g = 0;
        for (int i = 0; i < dim; ++i) g += a[i];
        degrees_.push_back(g);
    }
}

int MultiIndexSet::find(const Alpha& alpha) const {
    for (int j = 0; j < size(); ++j) {
        bool same = true;
        for (int i = 0; i < dim_; ++i)
            if (alphas_[j][i] != alpha[i]) { same = false; break; }
        if (same) return j;
    }
    return -1;
}

double MultiIndexSet::factorial(const Alpha& alpha, int dim) {
    double f = 1.0;
    for (int i = 0; i < dim; ++i)
        for (int k = 2; k <= alpha[i]; ++k) f *= k;
    return f;
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace veclap
