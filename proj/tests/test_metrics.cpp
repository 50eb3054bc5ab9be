#include "doctest.h"
#include "oracles.hpp"

#include "recnetq/metrics.hpp"

#include <random>

using namespace recnetq;

TEST_CASE("metrics equal brute-force enumeration on random graphs")
{
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 150; ++trial) {
        auto g = oracle::random_graph(rng, 120);
        const RecurrenceNetwork net(g.nodes, g.edges);
        const auto m = compute_metrics(net, {5000, 1000, 1, 1});
        CHECK(m.census.triangles == oracle::triangles(g.adj));
        CHECK(m.census.connected_triples == oracle::connected_triples(g.adj));
        CHECK(std::abs(m.global_cc - oracle::mean_local_clustering(g.adj)) < 1e-12);
        CHECK(std::abs(m.link_density - oracle::link_density(g.adj)) < 1e-12);
        CHECK(m.degree_histogram == oracle::degree_histogram(g.adj));
        const auto t = oracle::triangles(g.adj), c = oracle::connected_triples(g.adj);
        CHECK(std::abs(m.transitivity - (c ? 3.0 * t / c : 0.0)) < 1e-12);
        const auto apl = oracle::average_path_length(g.adj);
        CHECK(m.apl_defined == (apl.has_value() && g.nodes >= 2));
        if (m.apl_defined) CHECK(std::abs(m.apl.apl - *apl) < 1e-12);
        const auto r = oracle::assortativity(g.adj);
        CHECK(m.assortativity.defined == r.has_value());
        if (r && m.assortativity.defined) CHECK(std::abs(m.assortativity.value - *r) < 1e-12);
        for (std::size_t i = 0; i < g.nodes; ++i) CHECK(std::abs(local_clustering(net, i) - m.local_cc[i]) < 1e-15);
    }
}

TEST_CASE("complete graphs and trees")
{
    std::vector<Edge> k5;
    for (NodeId i = 0; i < 5; ++i)
        for (NodeId j = i + 1; j < 5; ++j) k5.emplace_back(i, j);
    const auto m = compute_metrics(RecurrenceNetwork(5, k5));
    CHECK(m.apl.apl == 1.0);
    CHECK(m.link_density == 1.0);
    CHECK(m.global_cc == 1.0);
    CHECK(m.transitivity == 1.0);
    CHECK_FALSE(m.assortativity.defined);

    const std::vector<Edge> star{{0, 1}, {0, 2}, {0, 3}, {3, 4}};
    const auto s = compute_metrics(RecurrenceNetwork(5, star));
    CHECK(s.global_cc == 0.0);
    CHECK(s.transitivity == 0.0);
}

TEST_CASE("average path length on a disconnected graph")
{
    const std::vector<Edge> e{{0, 1}, {2, 3}};
    const RecurrenceNetwork net(4, e);
    CHECK_THROWS_AS(average_path_length(net), DisconnectedGraph);
    CHECK_FALSE(compute_metrics(net).apl_defined);
}

TEST_CASE("sampled path length is reproducible for a seed")
{
    // Path graph: exact APL = (n + 1) / 3.
    const std::size_t n = 400;
    std::vector<Edge> e;
    for (NodeId i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    const RecurrenceNetwork net(n, e);
    const auto exact = average_path_length(net, {5000, 100, 9, 1});
    CHECK(exact.exact);
    CHECK(exact.apl == doctest::Approx((n + 1) / 3.0));
    const auto a = average_path_length(net, {100, 50, 9, 1});
    const auto b = average_path_length(net, {100, 50, 9, 3});
    CHECK_FALSE(a.exact);
    CHECK(a.sources == 50);
    CHECK(a.apl == b.apl);
    CHECK(a.apl == doctest::Approx(exact.apl).epsilon(0.2));
}

TEST_CASE("triangle counts do not depend on workers")
{
    std::mt19937_64 rng(43);
    auto g = oracle::random_graph(rng, 200);
    const RecurrenceNetwork net(g.nodes, g.edges);
    CHECK(triangles_per_node(net, 1) == triangles_per_node(net, 4));
}
