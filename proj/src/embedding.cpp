#include "recnetq/embedding.hpp"

#include "recnetq/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace recnetq {

std::vector<double> rescale(std::span<const double> raw)
{
    if (raw.empty()) throw std::invalid_argument("rescale: empty series");
    const auto [lo_it, hi_it] = std::minmax_element(raw.begin(), raw.end());
    const double lo = *lo_it;
    const double range = *hi_it - lo;
    if (!(range > 0.0)) throw DegenerateSeries("series is constant (max == min); nothing to rescale");
    std::vector<double> y(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) y[i] = (raw[i] - lo) / range;
    return y;
}

std::vector<double> uniform_deviate(std::span<const double> y)
{
    const std::size_t n = y.size();
    std::vector<double> sorted(y.begin(), y.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> u(n);
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto count = std::upper_bound(sorted.begin(), sorted.end(), y[i]) - sorted.begin();
        u[i] = static_cast<double>(count) * inv;
    }
    return u;
}

namespace {

int bin_of(double v, int bins)
{
    const int b = static_cast<int>(std::ceil(v * bins)) - 1;
    return std::clamp(b, 0, bins - 1);
}

} // namespace

double mutual_information(std::span<const double> x, std::span<const double> y, int bins)
{
    if (bins < 2) throw std::invalid_argument("mutual_information: bins must be >= 2");
    if (x.size() != y.size() || x.empty()) throw std::invalid_argument("mutual_information: size mismatch");
    const auto b = static_cast<std::size_t>(bins);
    std::vector<std::size_t> joint(b * b, 0), px(b, 0), py(b, 0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto bx = static_cast<std::size_t>(bin_of(x[i], bins));
        const auto by = static_cast<std::size_t>(bin_of(y[i], bins));
        ++joint[bx * b + by];
        ++px[bx];
        ++py[by];
    }
    const double n = static_cast<double>(x.size());
    double mi = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
        for (std::size_t j = 0; j < b; ++j) {
            const std::size_t c = joint[i * b + j];
            if (c == 0) continue;
            const double cd = static_cast<double>(c);
            mi += cd / n * std::log(cd * n / (static_cast<double>(px[i]) * static_cast<double>(py[j])));
        }
    }
    return std::max(mi, 0.0);
}

double delayed_mutual_information(std::span<const double> u, int lag, int bins)
{
    const std::size_t n = u.size();
    if (lag < 1 || static_cast<std::size_t>(lag) > n / 4)
        throw std::invalid_argument("delayed_mutual_information: lag must be in [1, N/4], got " + std::to_string(lag));
    const auto l = static_cast<std::size_t>(lag);
    return mutual_information(u.subspan(0, n - l), u.subspan(l), bins);
}

DelaySelection first_minimum_lag(std::span<const double> u, int max_lag, int bins)
{
    if (max_lag < 3) throw std::invalid_argument("first_minimum_lag: max_lag must be >= 3");
    const int cap = static_cast<int>(u.size() / 4);
    const int last = std::min(max_lag + 1, cap);
    if (last < 2) throw std::invalid_argument("first_minimum_lag: series too short for a lag scan");
    const int top = last - 1; // largest lag that can be tested for a minimum

    DelaySelection out;
    out.mi.resize(static_cast<std::size_t>(last) + 1);
    out.mi[0] = mutual_information(u, u, bins);
    for (int l = 1; l <= last; ++l) out.mi[static_cast<std::size_t>(l)] = delayed_mutual_information(u, l, bins);

    for (int l = 1; l <= top; ++l) {
        const auto i = static_cast<std::size_t>(l);
        if (out.mi[i - 1] > out.mi[i] && out.mi[i] < out.mi[i + 1]) {
            out.t_d = l;
            out.clear_minimum = true;
            return out;
        }
    }
    int best = 1;
    for (int l = 2; l <= top; ++l)
        if (out.mi[static_cast<std::size_t>(l)] < out.mi[static_cast<std::size_t>(best)]) best = l;
    out.t_d = best;
    out.clear_minimum = false;
    return out;
}

double false_neighbor_fraction(std::span<const double> u, int t_d, int d, const FnnOptions& opts)
{
    if (t_d < 1 || d < 1) throw std::invalid_argument("false_neighbor_fraction: t_d and d must be >= 1");
    const std::size_t n = u.size();
    const auto td = static_cast<std::size_t>(t_d);
    const auto dim = static_cast<std::size_t>(d);
    if (dim * td + 2 > n) throw std::invalid_argument("false_neighbor_fraction: series too short");
    // Points that still have coordinate d+1 available.
    const std::size_t count = n - dim * td;

    std::vector<double> pts(count * dim);
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t k = 0; k < dim; ++k) pts[i * dim + k] = u[i + k * td];

    const double mean = std::accumulate(u.begin(), u.end(), 0.0) / static_cast<double>(n);
    double var = 0.0;
    for (double v : u) var += (v - mean) * (v - mean);
    const double r_a = std::sqrt(var / static_cast<double>(n));

    const KdTree tree(pts, dim);
    std::size_t false_count = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const auto hit = tree.nearest_other(i);
        const double r_d = std::sqrt(hit.dist_sq);
        const double extra = std::abs(u[i + dim * td] - u[hit.index + dim * td]);
        const bool distance_jump = r_d > 0.0 ? extra / r_d > opts.r_tol : extra > 0.0;
        const bool lonely = r_a > 0.0 && std::sqrt(hit.dist_sq + extra * extra) / r_a > opts.a_tol;
        if (distance_jump || lonely) ++false_count;
    }
    return static_cast<double>(false_count) / static_cast<double>(count);
}

DimensionSelection fnn_embedding_dimension(std::span<const double> u, int t_d, int d_max, const FnnOptions& opts)
{
    if (d_max < 2) throw std::invalid_argument("fnn_embedding_dimension: d_max must be >= 2");
    DimensionSelection out;
    for (int d = 1; d <= d_max; ++d) {
        if (static_cast<std::size_t>(d) * static_cast<std::size_t>(t_d) + 2 > u.size()) break;
        const double f = false_neighbor_fraction(u, t_d, d, opts);
        out.fnn_fraction.push_back(f);
        if (f < opts.threshold) {
            out.d_emb = d;
            out.satisfied = true;
            return out;
        }
    }
    out.d_emb = d_max;
    out.satisfied = false;
    return out;
}

StateVectorSet::StateVectorSet(std::size_t dim, std::vector<double> data) : dim_(dim), data_(std::move(data))
{
    if (dim_ == 0 || data_.size() % dim_ != 0) throw std::invalid_argument("StateVectorSet: bad layout");
}

StateVectorSet embed(std::span<const double> u, const EmbeddingParams& p)
{
    if (p.t_d < 1 || p.d_emb < 1) throw std::invalid_argument("embed: t_d and d_emb must be >= 1");
    const auto td = static_cast<std::size_t>(p.t_d);
    const auto dim = static_cast<std::size_t>(p.d_emb);
    if ((dim - 1) * td >= u.size()) throw std::invalid_argument("embed: (d_emb - 1) t_d must be < N");
    const std::size_t count = u.size() - (dim - 1) * td;
    std::vector<double> data(count * dim);
    for (std::size_t j = 0; j < count; ++j)
        for (std::size_t k = 0; k < dim; ++k) data[j * dim + k] = u[j + k * td];
    return StateVectorSet(dim, std::move(data));
}

} // namespace recnetq
