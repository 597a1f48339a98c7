#pragma once

#include <vector>

#include <Eigen/Dense>

namespace veclap {

/// Exact k-nearest-neighbor search over a fixed point set (Euclidean
/// ambient distance), backed by a kd-tree built once at construction.
///
/// Determinism contract: equal distances are broken by ascending point
/// index, so stencils are reproducible across runs and platforms.
/// neighbors_of() additionally guarantees the base point leads its own
/// stencil even when duplicates of it exist under a smaller index.
class NeighborIndex {
public:
    explicit NeighborIndex(const Eigen::MatrixXd& points);

    int size() const { return static_cast<int>(points_.rows()); }

    /// Indices of the K points nearest to an arbitrary query location,
    /// ascending by (distance, index).
    std::vector<int> query(const Eigen::VectorXd& x, int K) const;

    /// Stencil of a cloud point: K indices with the base itself first.
    std::vector<int> neighbors_of(int base_index, int K) const;

    /// True when the cloud contains coincident points. Downstream fits on
    /// such stencils lose rank, so callers should surface this.
    bool has_duplicates() const { return has_duplicates_; }

private:
    struct Node {
        int left = -1;
        int right = -1;
        int axis = -1;
        double split = 0.0;
        int begin = 0; // leaf payload range in order_
        int end = 0;
    };

    int build(int begin, int end, Eigen::VectorXd& lo, Eigen::VectorXd& hi);
    void search(int node, const Eigen::VectorXd& x, int K,
                std::vector<std::pair<double, int>>& heap) const;

    Eigen::MatrixXd points_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
    int root_ = -1;
    bool has_duplicates_ = false;
};

} // namespace veclap
