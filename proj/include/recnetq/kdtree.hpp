#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace recnetq {

/// Static kd-tree over row-major points for exact nearest-neighbour queries.
/// Ties in distance resolve to the smaller point index.
class KdTree {
public:
    KdTree(std::span<const double> points, std::size_t dim);

    struct Hit {
        std::size_t index = 0;
        double dist_sq = 0.0;
    };

    /// Nearest point to point `self` other than itself. Needs at least two points.
    Hit nearest_other(std::size_t self) const;

private:
    struct Node {
        std::uint32_t begin = 0;
        std::uint32_t end = 0;
        std::int32_t left = -1;
        std::int32_t right = -1;
        std::uint32_t axis = 0;
        double split = 0.0;
    };

    std::int32_t build(std::uint32_t begin, std::uint32_t end);
    void search(std::int32_t node, const double* q, std::size_t self, Hit& best) const;
    double point(std::size_t i, std::size_t axis) const { return points_[i * dim_ + axis]; }

    std::span<const double> points_;
    std::size_t dim_;
    std::vector<std::uint32_t> order_;
    std::vector<Node> nodes_;
};

} // namespace recnetq
