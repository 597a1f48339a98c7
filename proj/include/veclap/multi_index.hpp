#pragma once

#include <array>
#include <vector>

namespace veclap {

/// Maximum intrinsic dimension supported by the multi-index machinery.
inline constexpr int kMaxDim = 4;

using Alpha = std::array<int, kMaxDim>; // unused trailing entries are zero

/// Ordered set of d-dimensional multi-indices alpha with lo <= |alpha| <= hi.
///
/// The order is graded lexicographic and fixed for the process lifetime:
/// ascending total degree, and within one degree descending lexicographic
/// tuple order, so for d=2 the sequence runs
///   (0,0); (1,0),(0,1); (2,0),(1,1),(0,2); ...
/// matching the column convention used throughout the local-weight formulas.
class MultiIndexSet {
public:
    MultiIndexSet() = default;
    MultiIndexSet(int dim, int lo, int hi);

    /// All monomials of degree 0..l (the field-fit basis).
    static MultiIndexSet full(int dim, int l) { return MultiIndexSet(dim, 0, l); }
    /// Quadratic and higher monomials 2..l (the curvature-patch basis).
    static MultiIndexSet curvature(int dim, int l) { return MultiIndexSet(dim, 2, l); }

    int dim() const { return dim_; }
    int lo() const { return lo_; }
    int hi() const { return hi_; }
    int size() const { return static_cast<int>(alphas_.size()); }

    const Alpha& operator[](int j) const { return alphas_[j]; }
    int degree(int j) const { return degrees_[j]; }

    /// Position of alpha in the set, or -1 if absent.
    int find(const Alpha& alpha) const;

    /// factorial(alpha) = prod_i alpha_i!
    static double factorial(const Alpha& alpha, int dim);

private:
    int dim_ = 0;
    int lo_ = 0;
    int hi_ = 0;
    std::vector<Alpha> alphas_;
    std::vector<int> degrees_;
};

/// Binomial C(n, k) as an exact double for the small arguments used here.
double binomial(int n, int k);

} // namespace veclap
