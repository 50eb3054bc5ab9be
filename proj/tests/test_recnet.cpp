#include "doctest.h"
#include "oracles.hpp"

#include "recnetq/recnet.hpp"

#include <random>

using namespace recnetq;

namespace {

StateVectorSet random_vectors(std::mt19937_64& rng, std::size_t n, std::size_t dim, double grid = 0.0)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> data(n * dim);
    for (auto& v : data) v = grid > 0.0 ? std::round(unit(rng) / grid) * grid : unit(rng);
    return StateVectorSet(dim, std::move(data));
}

} // namespace

TEST_CASE("network construction rejects malformed edges")
{
    const std::vector<Edge> loop{{1, 1}};
    CHECK_THROWS_AS(RecurrenceNetwork(3, loop), std::invalid_argument);
    const std::vector<Edge> dup{{0, 1}, {1, 0}};
    CHECK_THROWS_AS(RecurrenceNetwork(3, dup), std::invalid_argument);
    const std::vector<Edge> out{{0, 3}};
    CHECK_THROWS_AS(RecurrenceNetwork(3, out), std::invalid_argument);
    const std::vector<Edge> ok{{2, 0}, {1, 2}};
    const RecurrenceNetwork net(3, ok);
    CHECK(net.edge_count() == 2);
    CHECK(net.has_edge(0, 2));
    CHECK_FALSE(net.has_edge(0, 1));
    CHECK(net.edges() == std::vector<Edge>{{0, 2}, {1, 2}});
}

TEST_CASE("cell-grid pairs equal brute force, including points on the ball boundary")
{
    std::mt19937_64 rng(17);
    for (std::size_t dim : {1u, 2u, 3u, 4u, 6u})
        for (double eps : {0.05, 0.1, 0.25, 0.7}) {
            // Quantised coordinates put many pairs exactly at distance eps.
            const auto vs = random_vectors(rng, 400, dim, 0.05);
            CHECK(recurrence_pairs(vs, eps, 1) == recurrence_pairs_brute_force(vs, eps));
            CHECK(recurrence_pairs(vs, eps, 3) == recurrence_pairs_brute_force(vs, eps));
        }
}

TEST_CASE("streamed pairs come in increasing order")
{
    std::mt19937_64 rng(2);
    const auto vs = random_vectors(rng, 300, 3);
    std::vector<Edge> seen;
    for_each_recurrence(vs, 0.2, [&](NodeId i, NodeId j) { seen.emplace_back(i, j); });
    CHECK(seen == recurrence_pairs_brute_force(vs, 0.2));
}

TEST_CASE("algebraic connectivity equals the dense eigenvalue")
{
    std::mt19937_64 rng(23);
    int checked = 0;
    while (checked < 60) {
        auto g = oracle::random_graph(rng, 120);
        if (g.nodes < 2) continue;
        const RecurrenceNetwork net(g.nodes, g.edges);
        const auto l2 = laplacian_l2(net);
        CHECK(l2.converged);
        CHECK(l2.l2 == doctest::Approx(oracle::dense_l2(g.adj)).scale(1.0).epsilon(1e-7));
        ++checked;
    }
}

TEST_CASE("connectivity, component count and l2 agree on random graphs")
{
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 200; ++trial) {
        auto g = oracle::random_graph(rng, 150);
        const RecurrenceNetwork net(g.nodes, g.edges);
        const std::size_t comps = oracle::components(g.adj);
        CHECK(component_count(net) == comps);
        CHECK(is_connected(net) == (comps <= 1));
        if (g.nodes >= 2) CHECK((laplacian_l2(net).l2 > 1e-8) == (comps == 1));
    }
}

TEST_CASE("critical epsilon on a line of three points")
{
    const StateVectorSet vs(1, {0.0, 0.1, 0.5});
    const auto r = critical_epsilon(vs, {0.005, true, 1});
    CHECK(r.grid_index == 80);
    CHECK(r.epsilon_c == doctest::Approx(0.4));
    CHECK(r.l2_at_c > 0.0);
    CHECK_FALSE(connected_at(vs, 0.395));
    CHECK(connected_at(vs, 0.4));
}

TEST_CASE("critical epsilon is the first connected grid point")
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const auto vs = random_vectors(rng, 250, 2 + trial % 3);
        const auto r = critical_epsilon(vs, {0.01, false, 1});
        CHECK(connected_at(vs, r.epsilon_c));
        CHECK_FALSE(connected_at(vs, (r.grid_index - 1) * 0.01));
        CHECK(is_connected(build_network(vs, r.epsilon_c, 1)));
        CHECK_FALSE(is_connected(build_network(vs, (r.grid_index - 1) * 0.01, 1)));
    }
}
