#include "recnetq/metrics.hpp"

#include "recnetq/parallel.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

namespace recnetq {

double link_density(const RecurrenceNetwork& net)
{
    const auto p = static_cast<double>(net.node_count());
    if (p < 2.0) return 0.0;
    return 2.0 * static_cast<double>(net.edge_count()) / (p * (p - 1.0));
}

std::vector<std::uint64_t> triangles_per_node(const RecurrenceNetwork& net, unsigned workers)
{
    const std::size_t n = net.node_count();
    if (workers == 0) workers = default_workers();
    const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(workers, n));
    std::vector<std::vector<std::uint64_t>> partial(chunks, std::vector<std::uint64_t>(n, 0));
    parallel_chunks(n, static_cast<unsigned>(chunks), [&](std::size_t c, std::size_t begin, std::size_t end) {
        auto& tri = partial[c];
        for (std::size_t a = begin; a < end; ++a) {
            const auto na = net.neighbors(a);
            // Only neighbours above a; every triangle a < b < c is seen once.
            const auto a_hi = std::upper_bound(na.begin(), na.end(), static_cast<NodeId>(a));
            for (auto bi = a_hi; bi != na.end(); ++bi) {
                const NodeId b = *bi;
                const auto nb = net.neighbors(b);
                auto x = bi + 1;
                auto y = std::upper_bound(nb.begin(), nb.end(), b);
                while (x != na.end() && y != nb.end()) {
                    if (*x < *y)
                        ++x;
                    else if (*y < *x)
                        ++y;
                    else {
                        ++tri[a];
                        ++tri[b];
                        ++tri[*x];
                        ++x;
                        ++y;
                    }
                }
            }
        }
    });
    std::vector<std::uint64_t> total(n, 0);
    for (const auto& part : partial)
        for (std::size_t i = 0; i < n; ++i) total[i] += part[i];
    return total;
}

namespace {

double clustering_from(std::uint64_t triangles, std::size_t degree)
{
    if (degree <= 1) return 0.0;
    const double k = static_cast<double>(degree);
    return 2.0 * static_cast<double>(triangles) / (k * (k - 1.0));
}

} // namespace

double local_clustering(const RecurrenceNetwork& net, std::size_t i)
{
    const auto ni = net.neighbors(i);
    std::uint64_t links = 0;
    for (auto j = ni.begin(); j != ni.end(); ++j) {
        const auto nj = net.neighbors(*j);
        // common neighbours of i and j above j
        auto x = j + 1;
        auto y = std::upper_bound(nj.begin(), nj.end(), *j);
        while (x != ni.end() && y != nj.end()) {
            if (*x < *y)
                ++x;
            else if (*y < *x)
                ++y;
            else {
                ++links;
                ++x;
                ++y;
            }
        }
    }
    return clustering_from(links, ni.size());
}

std::vector<double> local_clustering_all(const RecurrenceNetwork& net, unsigned workers)
{
    const auto tri = triangles_per_node(net, workers);
    std::vector<double> cc(net.node_count());
    for (std::size_t i = 0; i < cc.size(); ++i) cc[i] = clustering_from(tri[i], net.degree(i));
    return cc;
}

double global_clustering(const RecurrenceNetwork& net, unsigned workers)
{
    if (net.node_count() == 0) return 0.0;
    const auto cc = local_clustering_all(net, workers);
    return std::accumulate(cc.begin(), cc.end(), 0.0) / static_cast<double>(cc.size());
}

TriangleCensus triangle_census(const RecurrenceNetwork& net, unsigned workers)
{
    const auto tri = triangles_per_node(net, workers);
    TriangleCensus out;
    std::uint64_t corners = 0;
    for (std::size_t i = 0; i < net.node_count(); ++i) {
        corners += tri[i];
        const std::uint64_t k = net.degree(i);
        out.connected_triples += k * (k > 0 ? k - 1 : 0) / 2;
    }
    out.triangles = corners / 3;
    return out;
}

double transitivity(const RecurrenceNetwork& net, unsigned workers)
{
    const auto c = triangle_census(net, workers);
    if (c.connected_triples == 0) return 0.0;
    return 3.0 * static_cast<double>(c.triangles) / static_cast<double>(c.connected_triples);
}

std::map<std::size_t, std::size_t> degree_distribution(const RecurrenceNetwork& net)
{
    std::map<std::size_t, std::size_t> hist;
    for (std::size_t i = 0; i < net.node_count(); ++i) ++hist[net.degree(i)];
    return hist;
}

Assortativity assortativity(const RecurrenceNetwork& net)
{
    // Newman's edge form: sums over edges of j k, (j + k) / 2, (j^2 + k^2) / 2.
    double sum_prod = 0.0, sum_mean = 0.0, sum_sq = 0.0;
    const auto m = static_cast<double>(net.edge_count());
    if (m == 0.0) return {};
    for (std::size_t i = 0; i < net.node_count(); ++i) {
        const auto ki = static_cast<double>(net.degree(i));
        for (NodeId j : net.neighbors(i)) {
            if (j < i) continue;
            const auto kj = static_cast<double>(net.degree(j));
            sum_prod += ki * kj;
            sum_mean += 0.5 * (ki + kj);
            sum_sq += 0.5 * (ki * ki + kj * kj);
        }
    }
    const double mean = sum_mean / m;
    const double denom = sum_sq / m - mean * mean;
    if (!(denom > 1e-12 * std::max(1.0, sum_sq / m))) return {};
    return {std::clamp((sum_prod / m - mean * mean) / denom, -1.0, 1.0), true};
}

PathLengthResult average_path_length(const RecurrenceNetwork& net, const PathLengthOptions& opts)
{
    const std::size_t n = net.node_count();
    PathLengthResult out;
    out.seed = opts.seed;
    if (n < 2) throw std::invalid_argument("average_path_length: need at least two nodes");

    std::vector<NodeId> sources(n);
    std::iota(sources.begin(), sources.end(), NodeId{0});
    if (n > opts.exact_limit && opts.sample_sources < n) {
        std::mt19937_64 rng(opts.seed);
        std::shuffle(sources.begin(), sources.end(), rng);
        sources.resize(opts.sample_sources);
        std::sort(sources.begin(), sources.end());
        out.exact = false;
    }
    out.sources = sources.size();

    unsigned workers = opts.workers == 0 ? default_workers() : opts.workers;
    const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(workers, sources.size()));
    std::vector<std::uint64_t> sums(chunks, 0);
    std::vector<char> unreachable(chunks, 0);
    parallel_chunks(sources.size(), static_cast<unsigned>(chunks), [&](std::size_t c, std::size_t begin, std::size_t end) {
        std::vector<std::uint32_t> dist(n);
        std::vector<NodeId> queue;
        queue.reserve(n);
        for (std::size_t s = begin; s < end; ++s) {
            std::fill(dist.begin(), dist.end(), std::numeric_limits<std::uint32_t>::max());
            queue.assign(1, sources[s]);
            dist[sources[s]] = 0;
            std::uint64_t total = 0;
            for (std::size_t head = 0; head < queue.size(); ++head) {
                const NodeId v = queue[head];
                total += dist[v];
                for (NodeId w : net.neighbors(v))
                    if (dist[w] == std::numeric_limits<std::uint32_t>::max()) {
                        dist[w] = dist[v] + 1;
                        queue.push_back(w);
                    }
            }
            if (queue.size() != n) {
                unreachable[c] = 1;
                return;
            }
            sums[c] += total;
        }
    });
    if (std::any_of(unreachable.begin(), unreachable.end(), [](char u) { return u != 0; }))
        throw DisconnectedGraph("average_path_length: graph is disconnected (infinite distance)");
    const std::uint64_t total = std::accumulate(sums.begin(), sums.end(), std::uint64_t{0});
    out.apl = static_cast<double>(total) / (static_cast<double>(sources.size()) * static_cast<double>(n - 1));
    return out;
}

MetricsReport compute_metrics(const RecurrenceNetwork& net, const PathLengthOptions& apl_opts)
{
    MetricsReport r;
    r.nodes = net.node_count();
    r.edges = net.edge_count();
    r.link_density = link_density(net);
    const auto tri = triangles_per_node(net, apl_opts.workers);
    r.local_cc.resize(r.nodes);
    std::uint64_t corners = 0;
    for (std::size_t i = 0; i < r.nodes; ++i) {
        r.local_cc[i] = clustering_from(tri[i], net.degree(i));
        corners += tri[i];
        const std::uint64_t k = net.degree(i);
        r.census.connected_triples += k * (k > 0 ? k - 1 : 0) / 2;
    }
    r.census.triangles = corners / 3;
    r.global_cc = r.nodes == 0 ? 0.0 : std::accumulate(r.local_cc.begin(), r.local_cc.end(), 0.0) / static_cast<double>(r.nodes);
    r.transitivity = r.census.connected_triples == 0
                         ? 0.0
                         : 3.0 * static_cast<double>(r.census.triangles) / static_cast<double>(r.census.connected_triples);
    r.degree_histogram = degree_distribution(net);
    r.assortativity = assortativity(net);
    if (r.nodes >= 2 && is_connected(net)) {
        r.apl = average_path_length(net, apl_opts);
        r.apl_defined = true;
    }
    return r;
}

} // namespace recnetq
