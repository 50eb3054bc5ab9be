#pragma once

// Scalar series -> delay vectors: rescale to [0,1], rank (uniform deviate)
// transform, delay from the first minimum of the delayed mutual information,
// dimension from false nearest neighbours, then the delay embedding itself.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace recnetq {

class DegenerateSeries : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// y(i) = (s(i) - min) / (max - min). Throws DegenerateSeries for a constant series.
std::vector<double> rescale(std::span<const double> raw);

/// u(i) = n(i) / N, n(i) = #{ j : y(j) <= y(i) }. Tied values share the larger rank.
std::vector<double> uniform_deviate(std::span<const double> y);

/// Mutual information (nats) of paired samples from the bins x bins
/// equal-width histogram on [0,1]^2. Cells are left-open, (k/bins, (k+1)/bins],
/// with 0 placed in the first cell.
double mutual_information(std::span<const double> x, std::span<const double> y, int bins);

/// MI between u(i) and u(i + lag). Requires 1 <= lag <= N/4, bins >= 2.
double delayed_mutual_information(std::span<const double> u, int lag, int bins);

struct DelaySelection {
    int t_d = 1;
    bool clear_minimum = true;   ///< false when the result is the argmin fallback
    std::vector<double> mi;      ///< mi[l] for l = 0..scanned_max_lag+1 (mi[0] is the self-information)
};

/**
 * Smallest lag l in [1, max_lag] with MI(l-1) > MI(l) < MI(l+1). The scan is
 * clipped so every evaluated lag satisfies lag <= N/4. Without an interior
 * minimum the argmin over [1, max_lag] is returned with clear_minimum = false.
 */
DelaySelection first_minimum_lag(std::span<const double> u, int max_lag, int bins);

struct FnnOptions {
    double r_tol = 10.0;
    double a_tol = 2.0;
    double threshold = 0.01;
};

struct DimensionSelection {
    int d_emb = 1;
    bool satisfied = true;            ///< false when d_max was returned without meeting the threshold
    std::vector<double> fnn_fraction; ///< fnn_fraction[d-1] for d = 1..evaluated
};

/// False nearest neighbours fraction for dimension d (1-based): the fraction
/// of d-dimensional neighbours that separate when coordinate d+1 is added.
double false_neighbor_fraction(std::span<const double> u, int t_d, int d, const FnnOptions& opts = {});

/// Smallest d in [1, d_max] whose false-neighbour fraction is below the
/// threshold; d_max with satisfied = false otherwise.
DimensionSelection fnn_embedding_dimension(std::span<const double> u, int t_d, int d_max,
                                           const FnnOptions& opts = {});

struct EmbeddingParams {
    int t_d = 1;
    int d_emb = 1;
};

/// N' = N - (d_emb - 1) t_d row-major vectors of dimension d_emb.
class StateVectorSet {
public:
    StateVectorSet() = default;
    StateVectorSet(std::size_t dim, std::vector<double> data);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
    std::span<const double> operator[](std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
    const std::vector<double>& data() const { return data_; }

private:
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

/// x_j = [u(j), u(j + t_d), ..., u(j + (d_emb - 1) t_d)].
StateVectorSet embed(std::span<const double> u, const EmbeddingParams& p);

} // namespace recnetq
