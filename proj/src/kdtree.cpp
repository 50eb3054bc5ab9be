#include "recnetq/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace recnetq {

namespace {
constexpr std::uint32_t kLeafSize = 8;
}

KdTree::KdTree(std::span<const double> points, std::size_t dim) : points_(points), dim_(dim)
{
    if (dim == 0 || points.size() % dim != 0) throw std::invalid_argument("KdTree: bad point layout");
    const std::size_t n = points.size() / dim;
    if (n > std::numeric_limits<std::uint32_t>::max()) throw std::invalid_argument("KdTree: too many points");
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0u);
    nodes_.reserve(2 * (n / kLeafSize + 1));
    if (n > 0) build(0, static_cast<std::uint32_t>(n));
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end)
{
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({begin, end, -1, -1, 0, 0.0});
    if (end - begin <= kLeafSize) return id;

    std::uint32_t axis = 0;
    double widest = -1.0;
    for (std::size_t a = 0; a < dim_; ++a) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::uint32_t k = begin; k < end; ++k) {
            const double v = point(order_[k], a);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > widest) {
            widest = hi - lo;
            axis = static_cast<std::uint32_t>(a);
        }
    }
    if (widest <= 0.0) return id; // all points coincide; keep as a leaf

    const std::uint32_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](std::uint32_t x, std::uint32_t y) { return point(x, axis) < point(y, axis); });
    const double split = point(order_[mid], axis);
    const std::int32_t left = build(begin, mid);
    const std::int32_t right = build(mid, end);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
}

void KdTree::search(std::int32_t id, const double* q, std::size_t self, Hit& best) const
{
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    if (node.left < 0) {
        for (std::uint32_t k = node.begin; k < node.end; ++k) {
            const std::size_t i = order_[k];
            if (i == self) continue;
            double d2 = 0.0;
            const double* p = points_.data() + i * dim_;
            for (std::size_t a = 0; a < dim_; ++a) {
                const double diff = p[a] - q[a];
                d2 += diff * diff;
            }
            if (d2 < best.dist_sq || (d2 == best.dist_sq && i < best.index)) best = {i, d2};
        }
        return;
    }
    // Left holds values <= split, right holds values >= split.
    const double diff = q[node.axis] - node.split;
    const std::int32_t near = diff <= 0.0 ? node.left : node.right;
    const std::int32_t far = diff <= 0.0 ? node.right : node.left;
    search(near, q, self, best);
    if (diff * diff <= best.dist_sq) search(far, q, self, best);
}

KdTree::Hit KdTree::nearest_other(std::size_t self) const
{
    if (order_.size() < 2) throw std::invalid_argument("KdTree: need at least two points");
    Hit best{std::numeric_limits<std::size_t>::max(), std::numeric_limits<double>::infinity()};
    search(0, points_.data() + self * dim_, self, best);
    return best;
}

} // namespace recnetq
