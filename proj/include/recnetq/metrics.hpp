#pragma once

#include "recnetq/recnet.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace recnetq {

class DisconnectedGraph : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// LD = sum_i k_i / (P (P - 1)); 0 for P < 2.
double link_density(const RecurrenceNetwork& net);

/// Triangles through each node, each triangle counted once per corner.
/// Sorted-neighbour-list intersection over edges i < j.
std::vector<std::uint64_t> triangles_per_node(const RecurrenceNetwork& net, unsigned workers = 0);

/// C_i = (#links among neighbours of i) / (k_i (k_i - 1) / 2); 0 when k_i <= 1.
double local_clustering(const RecurrenceNetwork& net, std::size_t i);
std::vector<double> local_clustering_all(const RecurrenceNetwork& net, unsigned workers = 0);

/// Arithmetic mean of the local coefficients over all nodes.
double global_clustering(const RecurrenceNetwork& net, unsigned workers = 0);

struct TriangleCensus {
    std::uint64_t triangles = 0;
    std::uint64_t connected_triples = 0; ///< sum_i k_i (k_i - 1) / 2
};

TriangleCensus triangle_census(const RecurrenceNetwork& net, unsigned workers = 0);

/// 3 * triangles / connected triples; 0 when there are no triples.
double transitivity(const RecurrenceNetwork& net, unsigned workers = 0);

/// degree -> number of nodes with that degree.
std::map<std::size_t, std::size_t> degree_distribution(const RecurrenceNetwork& net);

struct Assortativity {
    double value = 0.0;
    bool defined = false; ///< false when the edge-end degree variance is zero (or no edges)
};

/// Pearson correlation of the degrees at the two ends of each edge.
Assortativity assortativity(const RecurrenceNetwork& net);

struct PathLengthOptions {
    std::size_t exact_limit = 5000;     ///< all sources when P <= exact_limit
    std::size_t sample_sources = 1000;  ///< otherwise this many distinct random sources
    std::uint64_t seed = 20190101;
    unsigned workers = 0;
};

struct PathLengthResult {
    double apl = 0.0;
    bool exact = true;
    std::size_t sources = 0;
    std::uint64_t seed = 0;
};

/// Mean BFS distance over ordered pairs i != j. Throws DisconnectedGraph
/// when a source cannot reach every node.
PathLengthResult average_path_length(const RecurrenceNetwork& net, const PathLengthOptions& opts = {});

struct MetricsReport {
    std::size_t nodes = 0;
    std::size_t edges = 0;
    PathLengthResult apl;
    bool apl_defined = false; ///< false when the network is disconnected
    double link_density = 0.0;
    std::vector<double> local_cc;
    double global_cc = 0.0;
    TriangleCensus census;
    double transitivity = 0.0;
    std::map<std::size_t, std::size_t> degree_histogram;
    Assortativity assortativity;
};

MetricsReport compute_metrics(const RecurrenceNetwork& net, const PathLengthOptions& apl_opts = {});

} // namespace recnetq
