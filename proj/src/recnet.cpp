#include "recnetq/recnet.hpp"

#include "recnetq/parallel.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <stdexcept>

namespace recnetq {

RecurrenceNetwork::RecurrenceNetwork(std::size_t nodes, std::span<const Edge> edges)
{
    if (nodes > std::numeric_limits<NodeId>::max()) throw std::invalid_argument("too many nodes");
    std::vector<std::size_t> degree(nodes, 0);
    for (const auto& [a, b] : edges) {
        if (a >= nodes || b >= nodes) throw std::invalid_argument("edge endpoint out of range");
        if (a == b) throw std::invalid_argument("self-loop in edge list");
        ++degree[a];
        ++degree[b];
    }
    offsets_.assign(nodes + 1, 0);
    for (std::size_t i = 0; i < nodes; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
    adjacency_.resize(offsets_[nodes]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& [a, b] : edges) {
        adjacency_[fill[a]++] = b;
        adjacency_[fill[b]++] = a;
    }
    for (std::size_t i = 0; i < nodes; ++i) {
        auto first = adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
        auto last = adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
        std::sort(first, last);
        if (std::adjacent_find(first, last) != last) throw std::invalid_argument("duplicate edge in edge list");
    }
}

bool RecurrenceNetwork::has_edge(std::size_t i, std::size_t j) const
{
    const auto nb = neighbors(i);
    return std::binary_search(nb.begin(), nb.end(), static_cast<NodeId>(j));
}

std::vector<Edge> RecurrenceNetwork::edges() const
{
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (std::size_t i = 0; i < node_count(); ++i)
        for (NodeId j : neighbors(i))
            if (j > i) out.emplace_back(static_cast<NodeId>(i), j);
    return out;
}

namespace {

constexpr std::size_t kMaxGridDims = 3;
using CellKey = std::array<std::int64_t, kMaxGridDims>;

/// Points bucketed by cell over the leading grid dimensions.
class CellIndex {
public:
    CellIndex(const StateVectorSet& vs, double eps) : vs_(vs), eps_sq_(eps * eps)
    {
        grid_dims_ = std::min(vs.dim(), kMaxGridDims);
        side_ = std::max(eps, 1e-9);
        const std::size_t n = vs.size();
        keyed_.resize(n);
        for (std::size_t i = 0; i < n; ++i) keyed_[i] = {key_of(i), static_cast<NodeId>(i)};
        std::sort(keyed_.begin(), keyed_.end());
        for (std::size_t k = 0; k < n; ++k)
            if (k == 0 || keyed_[k].first != keyed_[k - 1].first) {
                cells_.push_back(keyed_[k].first);
                starts_.push_back(k);
            }
        starts_.push_back(n);

        const std::size_t combos = static_cast<std::size_t>(std::pow(3, grid_dims_));
        for (std::size_t c = 0; c < combos; ++c) {
            CellKey off{};
            std::size_t rest = c;
            for (std::size_t a = 0; a < grid_dims_; ++a) {
                off[a] = static_cast<std::int64_t>(rest % 3) - 1;
                rest /= 3;
            }
            offsets_.push_back(off);
        }
    }

    /// visit(j) for every j > i with ||x_i - x_j||^2 <= eps^2, j unordered.
    /// Returns false if the visitor asked to stop.
    template <typename Visit>
    bool scan(std::size_t i, Visit&& visit) const
    {
        const CellKey home = key_of(i);
        const auto xi = vs_[i];
        const std::size_t dim = vs_.dim();
        for (const auto& off : offsets_) {
            CellKey key = home;
            for (std::size_t a = 0; a < grid_dims_; ++a) key[a] += off[a];
            const auto it = std::lower_bound(cells_.begin(), cells_.end(), key);
            if (it == cells_.end() || *it != key) continue;
            const auto c = static_cast<std::size_t>(it - cells_.begin());
            for (std::size_t p = starts_[c]; p < starts_[c + 1]; ++p) {
                const NodeId j = keyed_[p].second;
                if (j <= i) continue;
                const auto xj = vs_[j];
                double d2 = 0.0;
                for (std::size_t a = 0; a < dim; ++a) {
                    const double diff = xi[a] - xj[a];
                    d2 += diff * diff;
                }
                if (d2 <= eps_sq_ && !visit(j)) return false;
            }
        }
        return true;
    }

private:
    CellKey key_of(std::size_t i) const
    {
        CellKey key{};
        const auto x = vs_[i];
        for (std::size_t a = 0; a < grid_dims_; ++a) key[a] = static_cast<std::int64_t>(std::floor(x[a] / side_));
        return key;
    }

    const StateVectorSet& vs_;
    double eps_sq_;
    double side_ = 1.0;
    std::size_t grid_dims_ = 0;
    std::vector<std::pair<CellKey, NodeId>> keyed_;
    std::vector<CellKey> cells_;
    std::vector<std::size_t> starts_;
    std::vector<CellKey> offsets_;
};

void check_eps(double eps)
{
    if (!(eps >= 0.0) || !std::isfinite(eps)) throw std::invalid_argument("eps must be finite and non-negative");
}

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1), components_(n)
    {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x)
    {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
        --components_;
    }

    std::size_t components() const { return components_; }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
    std::size_t components_;
};

} // namespace

void for_each_recurrence(const StateVectorSet& vs, double eps, const std::function<void(NodeId, NodeId)>& visit)
{
    check_eps(eps);
    if (vs.size() < 2) return;
    const CellIndex index(vs, eps);
    std::vector<NodeId> row;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        row.clear();
        index.scan(i, [&](NodeId j) {
            row.push_back(j);
            return true;
        });
        std::sort(row.begin(), row.end());
        for (NodeId j : row) visit(static_cast<NodeId>(i), j);
    }
}

std::vector<Edge> recurrence_pairs(const StateVectorSet& vs, double eps, unsigned workers)
{
    check_eps(eps);
    const std::size_t n = vs.size();
    if (n < 2) return {};
    const CellIndex index(vs, eps);
    if (workers == 0) workers = default_workers();
    const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(workers, n));
    std::vector<std::vector<Edge>> parts(chunks);
    parallel_chunks(n, static_cast<unsigned>(chunks), [&](std::size_t c, std::size_t begin, std::size_t end) {
        std::vector<NodeId> row;
        auto& out = parts[c];
        for (std::size_t i = begin; i < end; ++i) {
            row.clear();
            index.scan(i, [&](NodeId j) {
                row.push_back(j);
                return true;
            });
            std::sort(row.begin(), row.end());
            for (NodeId j : row) out.emplace_back(static_cast<NodeId>(i), j);
        }
    });
    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    std::vector<Edge> edges;
    edges.reserve(total);
    for (auto& p : parts) edges.insert(edges.end(), p.begin(), p.end());
    return edges;
}

std::vector<Edge> recurrence_pairs_brute_force(const StateVectorSet& vs, double eps)
{
    check_eps(eps);
    std::vector<Edge> edges;
    const std::size_t n = vs.size();
    const double eps_sq = eps * eps;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double d2 = 0.0;
            for (std::size_t a = 0; a < vs.dim(); ++a) {
                const double diff = vs[i][a] - vs[j][a];
                d2 += diff * diff;
            }
            if (d2 <= eps_sq) edges.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
        }
    }
    return edges;
}

RecurrenceNetwork build_network(const StateVectorSet& vs, double eps, unsigned workers)
{
    const auto edges = recurrence_pairs(vs, eps, workers);
    return RecurrenceNetwork(vs.size(), edges);
}

std::size_t component_count(const RecurrenceNetwork& net)
{
    const std::size_t n = net.node_count();
    std::vector<char> seen(n, 0);
    std::vector<NodeId> queue;
    std::size_t components = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (seen[s]) continue;
        ++components;
        seen[s] = 1;
        queue.assign(1, static_cast<NodeId>(s));
        for (std::size_t head = 0; head < queue.size(); ++head)
            for (NodeId j : net.neighbors(queue[head]))
                if (!seen[j]) {
                    seen[j] = 1;
                    queue.push_back(j);
                }
    }
    return components;
}

bool is_connected(const RecurrenceNetwork& net)
{
    const std::size_t n = net.node_count();
    if (n < 2) return true;
    std::vector<char> seen(n, 0);
    std::vector<NodeId> queue{0};
    seen[0] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head)
        for (NodeId j : net.neighbors(queue[head]))
            if (!seen[j]) {
                seen[j] = 1;
                queue.push_back(j);
            }
    return queue.size() == n;
}

bool connected_at(const StateVectorSet& vs, double eps)
{
    check_eps(eps);
    const std::size_t n = vs.size();
    if (n < 2) return true;
    const CellIndex index(vs, eps);
    UnionFind uf(n);
    for (std::size_t i = 0; i < n && uf.components() > 1; ++i) {
        index.scan(i, [&](NodeId j) {
            uf.unite(i, j);
            return uf.components() > 1;
        });
    }
    return uf.components() == 1;
}

AlgebraicConnectivity laplacian_l2(const RecurrenceNetwork& net, const L2Options& opts)
{
    using SpMat = Eigen::SparseMatrix<double>;
    const std::size_t n = net.node_count();
    if (n < 2) throw std::invalid_argument("laplacian_l2: need at least two nodes");
    const auto nn = static_cast<Eigen::Index>(n);

    std::size_t max_degree = 0;
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(n + 2 * net.edge_count());
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        max_degree = std::max(max_degree, net.degree(i));
        trips.emplace_back(ii, ii, static_cast<double>(net.degree(i)));
        for (NodeId j : net.neighbors(i)) trips.emplace_back(ii, static_cast<Eigen::Index>(j), -1.0);
    }
    SpMat lap(nn, nn);
    lap.setFromTriplets(trips.begin(), trips.end());

    // Any positive shift keeps L + shift I definite; a small one keeps the
    // iteration focused on the bottom of the spectrum.
    const double shift = 1e-6 * std::max<double>(1.0, static_cast<double>(max_degree));
    SpMat shifted = lap;
    for (Eigen::Index i = 0; i < nn; ++i) shifted.coeffRef(i, i) += shift;
    Eigen::SimplicialLDLT<SpMat> solver(shifted);
    if (solver.info() != Eigen::Success) throw std::runtime_error("laplacian_l2: factorisation failed");

    const Eigen::Index block = std::min<Eigen::Index>(std::max(1, opts.block_size), nn - 1);
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd v(nn, block);
    for (Eigen::Index c = 0; c < block; ++c)
        for (Eigen::Index r = 0; r < nn; ++r) v(r, c) = normal(rng);

    auto deflate_and_orthonormalize = [&](Eigen::MatrixXd& m) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) m.col(c).array() -= m.col(c).mean();
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
        m = qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
        for (Eigen::Index c = 0; c < m.cols(); ++c) m.col(c).array() -= m.col(c).mean();
    };
    deflate_and_orthonormalize(v);

    AlgebraicConnectivity out;
    for (int it = 1; it <= opts.max_iterations; ++it) {
        Eigen::MatrixXd w(nn, block);
        for (Eigen::Index c = 0; c < block; ++c) w.col(c) = solver.solve(v.col(c));
        deflate_and_orthonormalize(w);
        const Eigen::MatrixXd lw = lap * w;
        Eigen::MatrixXd h = w.transpose() * lw;
        h = 0.5 * (h + h.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(h);
        v = w * ritz.eigenvectors();
        const double theta = ritz.eigenvalues()(0);
        const Eigen::VectorXd residual = lw * ritz.eigenvectors().col(0) - theta * v.col(0);
        out.l2 = theta;
        out.iterations = it;
        out.residual = residual.norm();
        if (out.residual <= opts.tol) {
            out.converged = true;
            break;
        }
    }
    return out;
}

EpsilonSearchResult critical_epsilon(const StateVectorSet& vs, const EpsilonSearchOptions& opts)
{
    if (!(opts.resolution > 0.0)) throw std::invalid_argument("critical_epsilon: resolution must be positive");
    EpsilonSearchResult out;
    const std::size_t n = vs.size();
    const double res = opts.resolution;

    // Upper bound from the bounding-box diagonal.
    double diag_sq = 0.0;
    for (std::size_t a = 0; a < vs.dim(); ++a) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t i = 0; i < n; ++i) {
            lo = std::min(lo, vs[i][a]);
            hi = std::max(hi, vs[i][a]);
        }
        if (n > 0) diag_sq += (hi - lo) * (hi - lo);
    }
    const long k_max = static_cast<long>(std::floor(std::sqrt(diag_sq) / res)) + 1;

    auto probe = [&](long k) {
        const double eps = static_cast<double>(k) * res;
        const bool ok = connected_at(vs, eps);
        out.probes.push_back({eps, ok});
        return ok;
    };

    long lo = 0; // largest index known disconnected (0 = none probed)
    long hi = 1;
    while (!probe(hi)) {
        lo = hi;
        if (hi >= k_max) throw std::logic_error("critical_epsilon: not connected at the diameter bound");
        hi = std::min(2 * hi, k_max);
    }
    while (hi - lo > 1) {
        const long mid = lo + (hi - lo) / 2;
        if (probe(mid))
            hi = mid;
        else
            lo = mid;
    }
    out.grid_index = hi;
    out.epsilon_c = static_cast<double>(hi) * res;

    if (opts.certify && n >= 2) {
        const auto net = build_network(vs, out.epsilon_c, opts.workers);
        const auto l2 = laplacian_l2(net);
        out.l2_at_c = l2.l2;
        out.l2_converged = l2.converged;
    }
    return out;
}

} // namespace recnetq
