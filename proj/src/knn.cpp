#include "veclap/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "veclap/common.hpp"

namespace veclap {

namespace {

constexpr int kLeafSize = 16;

// Heap ordering: the worst candidate (largest distance, then largest
// index among equals) sits on top so it can be evicted first.
bool worse(const std::pair<double, int>& a, const std::pair<double, int>& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second < b.second;
}

} // namespace

NeighborIndex::NeighborIndex(const Eigen::MatrixXd& points) : points_(points) {
    const int N = static_cast<int>(points_.rows());
    if (N < 1) throw ValidationError("NeighborIndex: empty point set");
    if (!points_.allFinite()) throw ValidationError("NeighborIndex: non-finite coordinates");

    order_.resize(N);
    std::iota(order_.begin(), order_.end(), 0);
    nodes_.reserve(2 * N / kLeafSize + 4);
    Eigen::VectorXd lo = points_.colwise().minCoeff();
    Eigen::VectorXd hi = points_.colwise().maxCoeff();
    root_ = build(0, N, lo, hi);

    // Duplicate detection via a lexicographic sort of the rows.
    std::vector<int> lex(order_);
    std::sort(lex.begin(), lex.end(), [this](int a, int b) {
        const int n = static_cast<int>(points_.cols());
        for (int c = 0; c < n; ++c) {
            if (points_(a, c) != points_(b, c)) return points_(a, c) < points_(b, c);
        }
        return a < b;
    });
    for (int i = 0; i + 1 < N; ++i) {
        if ((points_.row(lex[i]) - points_.row(lex[i + 1])).isZero(0.0)) {
            has_duplicates_ = true;
            break;
        }
    }
}

int NeighborIndex::build(int begin, int end, Eigen::VectorXd& lo, Eigen::VectorXd& hi) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    if (end - begin <= kLeafSize) return id;

    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    const int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [this, axis](int a, int b) {
                         if (points_(a, axis) != points_(b, axis))
                             return points_(a, axis) < points_(b, axis);
                         return a < b;
                     });
    const double split = points_(order_[mid], axis);

    const double save_hi = hi(axis);
    hi(axis) = split;
    const int left = build(begin, mid, lo, hi);
    hi(axis) = save_hi;

    const double save_lo = lo(axis);
    lo(axis) = split;
    const int right = build(mid, end, lo, hi);
    lo(axis) = save_lo;

    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

void NeighborIndex::search(int node, const Eigen::VectorXd& x, int K,
                           std::vector<std::pair<double, int>>& heap) const {
    const Node& nd = nodes_[node];
    if (nd.axis < 0) {
        for (int i = nd.begin; i < nd.end; ++i) {
            const int idx = order_[i];
            const double d2 = (points_.row(idx).transpose() - x).squaredNorm();
            const std::pair<double, int> cand(d2, idx);
            if (static_cast<int>(heap.size()) < K) {
                heap.push_back(cand);
                std::push_heap(heap.begin(), heap.end(), worse);
            } else if (worse(cand, heap.front())) {
                std::pop_heap(heap.begin(), heap.end(), worse);
                heap.back() = cand;
                std::push_heap(heap.begin(), heap.end(), worse);
            }
        }
        return;
    }

    const double delta = x(nd.axis) - nd.split;
    const int near = delta <= 0.0 ? nd.left : nd.right;
    const int far = delta <= 0.0 ? nd.right : nd.left;
    search(near, x, K, heap);
    // The far half-space can still hold closer points (or equal-distance
    // points with smaller indices, which the tie-break must see).
    if (static_cast<int>(heap.size()) < K || delta * delta <= heap.front().first)
        search(far, x, K, heap);
}

std::vector<int> NeighborIndex::query(const Eigen::VectorXd& x, int K) const {
    if (K < 1 || K > size()) throw ValidationError("NeighborIndex::query: K out of range");
    if (x.size() != points_.cols())
        throw ValidationError("NeighborIndex::query: dimension mismatch");
    std::vector<std::pair<double, int>> heap;
    heap.reserve(K + 1);
    search(root_, x, K, heap);
    std::sort(heap.begin(), heap.end(), worse);
    std::vector<int> out(heap.size());
    for (std::size_t i = 0; i < heap.size(); ++i) out[i] = heap[i].second;
    return out;
}

std::vector<int> NeighborIndex::neighbors_of(int base_index, int K) const {
    if (base_index < 0 || base_index >= size())
        throw ValidationError("NeighborIndex::neighbors_of: base index out of range");
    std::vector<int> idx = query(points_.row(base_index).transpose(), K);
    auto it = std::find(idx.begin(), idx.end(), base_index);
    if (it == idx.end()) {
        // Crowded out by coincident points with smaller indices; force the
        // base back in at the expense of the worst candidate.
        idx.back() = base_index;
        it = idx.end() - 1;
    }
    std::rotate(idx.begin(), it, it + 1);
    return idx;
}

} // namespace veclap
