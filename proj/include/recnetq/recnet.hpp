#pragma once

// epsilon-recurrence networks: nodes are delay vectors, edges join distinct
// vectors within Euclidean distance eps (closed ball). Neighbour search uses
// a uniform cell grid of side eps over the leading (up to three) coordinates;
// the full-dimensional distance is checked for every candidate pair.

#include "recnetq/embedding.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace recnetq {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

/// Simple undirected graph in compressed sparse row form; neighbour lists sorted.
class RecurrenceNetwork {
public:
    RecurrenceNetwork() = default;

    /// Edges may be given in any order and orientation; duplicates and
    /// self-loops are rejected with std::invalid_argument.
    RecurrenceNetwork(std::size_t nodes, std::span<const Edge> edges);

    std::size_t node_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t edge_count() const { return adjacency_.size() / 2; }
    std::size_t degree(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }
    std::span<const NodeId> neighbors(std::size_t i) const
    {
        return {adjacency_.data() + offsets_[i], adjacency_.data() + offsets_[i + 1]};
    }
    bool has_edge(std::size_t i, std::size_t j) const;

    /// Edges with i < j in lexicographic order.
    std::vector<Edge> edges() const;

private:
    std::vector<std::size_t> offsets_;
    std::vector<NodeId> adjacency_;
};

/// Calls visit(i, j) once for every pair i < j with ||x_i - x_j|| <= eps,
/// in increasing (i, j) order.
void for_each_recurrence(const StateVectorSet& vs, double eps, const std::function<void(NodeId, NodeId)>& visit);

/// All recurrence pairs (i < j, sorted). Work is split over `workers`
/// threads; the output does not depend on the worker count.
std::vector<Edge> recurrence_pairs(const StateVectorSet& vs, double eps, unsigned workers = 0);

/// Reference O(N'^2) pair enumeration.
std::vector<Edge> recurrence_pairs_brute_force(const StateVectorSet& vs, double eps);

RecurrenceNetwork build_network(const StateVectorSet& vs, double eps, unsigned workers = 0);

/// Breadth-first reachability from node 0. Graphs with fewer than two nodes count as connected.
bool is_connected(const RecurrenceNetwork& net);

/// Number of connected components (breadth-first).
std::size_t component_count(const RecurrenceNetwork& net);

/// Connectivity of the eps-network without materialising it (union-find over streamed pairs).
bool connected_at(const StateVectorSet& vs, double eps);

struct AlgebraicConnectivity {
    double l2 = 0.0;
    int iterations = 0;
    bool converged = false;
    double residual = 0.0;
};

struct L2Options {
    double tol = 1e-8;
    int max_iterations = 2000;
    int block_size = 4;
};

/**
 * Second-smallest Laplacian eigenvalue of L = D - A. Block inverse
 * iteration on L + shift I (sparse LDL^T factorisation), with the constant
 * vector projected out of every iterate and Rayleigh-Ritz on the block.
 * Needs at least two nodes.
 */
AlgebraicConnectivity laplacian_l2(const RecurrenceNetwork& net, const L2Options& opts = {});

struct EpsilonProbe {
    double eps = 0.0;
    bool connected = false;
};

struct EpsilonSearchResult {
    double epsilon_c = 0.0;
    long grid_index = 0;              ///< epsilon_c = grid_index * resolution
    double l2_at_c = 0.0;
    bool l2_converged = false;
    std::vector<EpsilonProbe> probes; ///< in probe order
};

struct EpsilonSearchOptions {
    double resolution = 0.005;
    bool certify = true;   ///< evaluate laplacian_l2 at the result
    unsigned workers = 0;
};

/**
 * Smallest eps on the grid {r, 2r, ...} whose network is connected.
 * Doubling search from r brackets the threshold, then bisection over grid
 * indices; connectivity is monotone in eps. The diameter of the unit
 * hypercube bounds the search.
 */
EpsilonSearchResult critical_epsilon(const StateVectorSet& vs, const EpsilonSearchOptions& opts = {});

} // namespace recnetq
