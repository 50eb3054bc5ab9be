#include "doctest.h"
#include "oracles.hpp"

#include "recnetq/embedding.hpp"
#include "recnetq/kdtree.hpp"

#include <cmath>
#include <random>

using namespace recnetq;

TEST_CASE("rescale maps onto [0, 1]")
{
    const std::vector<double> s{3.0, 5.0, 4.0, 7.0};
    const auto y = rescale(s);
    CHECK(y == std::vector<double>{0.0, 0.5, 0.25, 1.0});
    const std::vector<double> flat{2.0, 2.0, 2.0};
    CHECK_THROWS_AS(rescale(flat), DegenerateSeries);
}

TEST_CASE("uniform deviate ranks")
{
    const std::vector<double> y{0.3, 0.1, 0.9, 0.5};
    CHECK(uniform_deviate(y) == std::vector<double>{0.5, 0.25, 1.0, 0.75});
    const std::vector<double> ties{0.2, 0.2, 0.7};
    const auto u = uniform_deviate(ties);
    CHECK(u[0] == doctest::Approx(2.0 / 3.0));
    CHECK(u[1] == doctest::Approx(2.0 / 3.0));
    CHECK(u[2] == doctest::Approx(1.0));
}

TEST_CASE("mutual information of simple pairs")
{
    std::vector<double> x;
    for (int i = 1; i <= 64; ++i) x.push_back(i / 64.0);
    // Identical variables: MI = log(bins) when every cell is equally occupied.
    CHECK(mutual_information(x, x, 8) == doctest::Approx(std::log(8.0)));
    // Independent product layout: every joint cell equally filled.
    std::vector<double> a, b;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            a.push_back((i + 1) / 8.0);
            b.push_back((j + 1) / 8.0);
        }
    CHECK(mutual_information(a, b, 8) == doctest::Approx(0.0).scale(1.0));
    CHECK_THROWS(mutual_information(a, b, 1));
}

TEST_CASE("delayed mutual information lag limits")
{
    std::vector<double> u(100);
    for (int i = 0; i < 100; ++i) u[i] = ((i * 37) % 100 + 1) / 100.0;
    CHECK_NOTHROW(delayed_mutual_information(u, 25, 8));
    CHECK_THROWS(delayed_mutual_information(u, 26, 8));
    CHECK_THROWS(delayed_mutual_information(u, 0, 8));
}

namespace {

std::vector<double> sine(std::size_t n, double period)
{
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = std::sin(2.0 * M_PI * static_cast<double>(i) / period);
    return s;
}

} // namespace

TEST_CASE("first MI minimum of a noisy sine sits near a quarter period")
{
    auto s = sine(20000, 40.0 * std::sqrt(2.0));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> noise(0.0, 0.3);
    for (auto& v : s) v += noise(rng);
    const auto u = uniform_deviate(rescale(s));
    const auto sel = first_minimum_lag(u, 60, 16);
    CHECK(sel.clear_minimum);
    CHECK(std::abs(sel.t_d - 14) <= 2);
    CHECK(sel.mi[0] > sel.mi[sel.t_d]);
}

TEST_CASE("MI scan falls back to argmin without a minimum")
{
    // Monotone ramp: MI decreases with lag across the whole scan.
    std::vector<double> u(400);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = (static_cast<double>(i) + 1.0) / 400.0;
    const auto sel = first_minimum_lag(u, 20, 8);
    CHECK_FALSE(sel.clear_minimum);
    CHECK(sel.t_d >= 1);
    CHECK(sel.t_d <= 20);
}

TEST_CASE("FNN: a sine needs two dimensions, white noise never settles")
{
    const auto u = uniform_deviate(rescale(sine(4000, 40.0 * std::sqrt(2.0))));
    const auto dim = fnn_embedding_dimension(u, 14, 6);
    CHECK(dim.satisfied);
    CHECK(dim.d_emb == 2);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> noise(3000);
    for (auto& v : noise) v = unit(rng);
    const auto nd = fnn_embedding_dimension(uniform_deviate(rescale(noise)), 1, 4);
    CHECK_FALSE(nd.satisfied);
    CHECK(nd.d_emb == 4);
}

TEST_CASE("FNN fraction equals the brute-force oracle")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> s(700);
    double x = 0.3;
    for (auto& v : s) {
        x = 3.9 * x * (1.0 - x);
        v = x + 0.01 * unit(rng);
    }
    const auto u = uniform_deviate(rescale(s));
    for (int td : {1, 3})
        for (int d : {1, 2, 3, 4}) {
            const double got = false_neighbor_fraction(u, td, d);
            const double want = oracle::fnn_fraction(u, td, d, 10.0, 2.0);
            CHECK(got == doctest::Approx(want).epsilon(1e-15));
        }
}

TEST_CASE("kd-tree nearest neighbour equals linear scan")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t dim : {1u, 2u, 3u, 5u}) {
        std::vector<double> pts(300 * dim);
        for (auto& v : pts) v = std::round(unit(rng) * 20.0) / 20.0; // many exact ties
        const KdTree tree(pts, dim);
        for (std::size_t i = 0; i < 300; ++i) {
            double best = 1e300;
            std::size_t arg = 0;
            for (std::size_t j = 0; j < 300; ++j) {
                if (j == i) continue;
                double s = 0;
                for (std::size_t k = 0; k < dim; ++k) s += (pts[i * dim + k] - pts[j * dim + k]) * (pts[i * dim + k] - pts[j * dim + k]);
                if (s < best) {
                    best = s;
                    arg = j;
                }
            }
            const auto hit = tree.nearest_other(i);
            CHECK(hit.index == arg);
            CHECK(hit.dist_sq == best);
        }
    }
}

TEST_CASE("delay vectors")
{
    const std::vector<double> u{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
    const auto vs = embed(u, {2, 3});
    CHECK(vs.size() == 3);
    CHECK(vs.dim() == 3);
    CHECK(vs[0][0] == 0.1);
    CHECK(vs[0][1] == 0.3);
    CHECK(vs[0][2] == 0.5);
    CHECK(vs[2][2] == 0.7);
    CHECK_THROWS(embed(u, {3, 4}));
}
