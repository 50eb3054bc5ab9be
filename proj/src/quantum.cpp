#include "recnetq/quantum.hpp"

#include "recnetq/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace recnetq {

void ModelParams::validate() const
{
    if (!(kappa >= 0.0 && kappa <= 1.0))
        throw std::invalid_argument("kappa must lie in [0, 1], got " + std::to_string(kappa));
    if (!(chi > 0.0)) throw std::invalid_argument("chi must be positive");
    if (lambda != 1.0) throw std::invalid_argument("lambda is fixed to 1 (scaled time)");
    if (kappa2 != 0.0) throw std::invalid_argument("kappa2 must be 0");
    if (detuning != 0.0) throw std::invalid_argument("only zero detuning is supported");
}

void InitialState::validate() const
{
    if (!(alpha_sq >= 0.0) || !std::isfinite(alpha_sq))
        throw std::invalid_argument("alpha_sq must be finite and non-negative");
}

namespace {

double poisson_pmf(double mean, int k)
{
    if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
    return std::exp(-mean + k * std::log(mean) - std::lgamma(k + 1.0));
}

} // namespace

double poisson_tail(double mean, int n_max)
{
    if (mean == 0.0) return 0.0;
    // Sum upward from n_max + 1; avoids the cancellation in 1 - CDF.
    double sum = 0.0;
    for (int k = n_max + 1;; ++k) {
        const double term = poisson_pmf(mean, k);
        sum += term;
        if (k > mean && term <= sum * 1e-18) break;
        if (k > n_max + 100000) break;
    }
    return sum;
}

FockTruncation truncation_bound(double alpha_sq, double tail_eps)
{
    if (!(alpha_sq >= 0.0)) throw std::invalid_argument("alpha_sq must be non-negative");
    if (!(tail_eps > 0.0 && tail_eps < 1.0)) throw std::invalid_argument("tail_eps must be in (0, 1)");
    int n = 0;
    while (poisson_tail(alpha_sq, n) >= tail_eps) ++n;
    return {n, tail_eps};
}

FockTruncation default_truncation(double alpha_sq, double tail_eps)
{
    FockTruncation t = truncation_bound(alpha_sq, tail_eps);
    const double root = std::sqrt(alpha_sq);
    const int floor_n = static_cast<int>(std::ceil(alpha_sq + 10.0 * root));
    const int cap_n = static_cast<int>(std::floor(alpha_sq + 12.0 * root + 20.0));
    t.n_max = std::min(std::max(t.n_max, floor_n), cap_n);
    return t;
}

BlockHamiltonian build_block(int n, int m, const ModelParams& params, const InitialState& init)
{
    if (n < 0 || m < 0) throw std::invalid_argument("photon numbers must be non-negative");
    BlockHamiltonian b;
    b.n = n;
    b.m = m;
    b.weight = poisson_pmf(init.alpha_sq, n) * poisson_pmf(init.alpha_sq, m);
    if (n == 0) {
        b.dim = 1;
        return b;
    }
    b.dim = 3;
    const double h13 = params.lambda * std::sqrt(n * (1.0 + params.kappa * n));
    const double h23 = params.lambda * std::sqrt(m + 1.0);
    b.matrix[0][0] = 2.0 * params.chi * (n - 1);
    b.matrix[2][2] = 2.0 * params.chi * m;
    // |1,n,m> <-> |3,n-1,m> via mode 1, |3,n-1,m> <-> |2,n-1,m+1> via mode 2.
    b.matrix[0][1] = b.matrix[1][0] = h13;
    b.matrix[1][2] = b.matrix[2][1] = h23;
    return b;
}

namespace {

using Vec3 = std::array<double, 3>;

Vec3 cross(const Vec3& a, const Vec3& b)
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 null_vector(const Matrix3& a, double lambda)
{
    Vec3 r0{a[0][0] - lambda, a[0][1], a[0][2]};
    Vec3 r1{a[1][0], a[1][1] - lambda, a[1][2]};
    Vec3 r2{a[2][0], a[2][1], a[2][2] - lambda};
    const std::array<Vec3, 3> c{cross(r0, r1), cross(r0, r2), cross(r1, r2)};
    std::size_t best = 0;
    double best_norm = dot(c[0], c[0]);
    for (std::size_t i = 1; i < 3; ++i) {
        const double nn = dot(c[i], c[i]);
        if (nn > best_norm) {
            best = i;
            best_norm = nn;
        }
    }
    Vec3 v = c[best];
    const double inv = 1.0 / std::sqrt(best_norm);
    for (double& x : v) x *= inv;
    return v;
}

void set_column(Matrix3& m, std::size_t col, const Vec3& v)
{
    for (std::size_t r = 0; r < 3; ++r) m[r][col] = v[r];
}

} // namespace

SymmetricEigen3 eigen_symmetric3_jacobi(const Matrix3& input)
{
    Matrix3 a = input;
    Matrix3 v{};
    for (std::size_t i = 0; i < 3; ++i) v[i][i] = 1.0;

    for (int sweep = 0; sweep < 64; ++sweep) {
        const double off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        if (off == 0.0) break;
        for (std::size_t p = 0; p < 2; ++p) {
            for (std::size_t q = p + 1; q < 3; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < 3; ++k) {
                    const double akp = a[k][p];
                    const double akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < 3; ++k) {
                    const double apk = a[p][k];
                    const double aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < 3; ++k) {
                    const double vkp = v[k][p];
                    const double vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
        const double scale = std::abs(a[0][0]) + std::abs(a[1][1]) + std::abs(a[2][2]);
        const double off_after = std::abs(a[0][1]) + std::abs(a[0][2]) + std::abs(a[1][2]);
        if (off_after <= 1e-300 || off_after <= scale * 1e-18) break;
    }

    std::array<std::size_t, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a[i][i] < a[j][j]; });
    SymmetricEigen3 out;
    for (std::size_t c = 0; c < 3; ++c) {
        out.values[c] = a[order[c]][order[c]];
        for (std::size_t r = 0; r < 3; ++r) out.vectors[r][c] = v[r][order[c]];
    }
    return out;
}

SymmetricEigen3 eigen_symmetric3(const Matrix3& a)
{
    const double p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    const double q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    const double d0 = a[0][0] - q;
    const double d1 = a[1][1] - q;
    const double d2 = a[2][2] - q;
    const double p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
    if (p2 == 0.0) return eigen_symmetric3_jacobi(a);
    const double p = std::sqrt(p2 / 6.0);

    // det((A - qI) / p) / 2
    const double b00 = d0 / p, b11 = d1 / p, b22 = d2 / p;
    const double b01 = a[0][1] / p, b02 = a[0][2] / p, b12 = a[1][2] / p;
    const double det = b00 * (b11 * b22 - b12 * b12) - b01 * (b01 * b22 - b12 * b02) + b02 * (b01 * b12 - b11 * b02);
    const double r = std::clamp(det / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;

    const double hi = q + 2.0 * p * std::cos(phi);
    const double lo = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    const double mid = 3.0 * q - hi - lo;

    const double scale = std::max({std::abs(hi), std::abs(lo), p});
    const double gap = std::min(mid - lo, hi - mid);
    if (gap < 1e-10 * scale) return eigen_symmetric3_jacobi(a);

    SymmetricEigen3 out;
    out.values = {lo, mid, hi};
    const Vec3 v0 = null_vector(a, lo);
    Vec3 v2 = null_vector(a, hi);
    const double overlap = dot(v0, v2);
    for (std::size_t i = 0; i < 3; ++i) v2[i] -= overlap * v0[i];
    const double inv = 1.0 / std::sqrt(dot(v2, v2));
    for (double& x : v2) x *= inv;
    const Vec3 v1 = cross(v2, v0);
    set_column(out.vectors, 0, v0);
    set_column(out.vectors, 1, v1);
    set_column(out.vectors, 2, v2);
    return out;
}

double Complex3::norm_sq() const
{
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i) s += re[i] * re[i] + im[i] * im[i];
    return s;
}

BlockEvolver::BlockEvolver(const BlockHamiltonian& block)
{
    if (block.dim != 3) throw std::invalid_argument("BlockEvolver needs a 3x3 block");
    eigen_ = eigen_symmetric3(block.matrix);
}

Complex3 BlockEvolver::evaluate(double t) const
{
    Complex3 out;
    const auto& v = eigen_.vectors;
    for (std::size_t j = 0; j < 3; ++j) {
        const double phase = -eigen_.values[j] * t;
        const double c = std::cos(phase);
        const double s = std::sin(phase);
        for (std::size_t k = 0; k < 3; ++k) {
            const double w = v[k][j] * v[0][j];
            out.re[k] += w * c;
            out.im[k] += w * s;
        }
    }
    return out;
}

double BlockEvolver::survival(double t) const
{
    const auto& v = eigen_.vectors;
    const double w0 = v[0][0] * v[0][0];
    const double w1 = v[0][1] * v[0][1];
    const double w2 = v[0][2] * v[0][2];
    const auto& e = eigen_.values;
    return w0 * w0 + w1 * w1 + w2 * w2 + 2.0 * (w0 * w1 * std::cos((e[1] - e[0]) * t) +
                                                 w0 * w2 * std::cos((e[2] - e[0]) * t) +
                                                 w1 * w2 * std::cos((e[2] - e[1]) * t));
}

Complex3 evolve_block(const BlockHamiltonian& block, double t)
{
    return BlockEvolver(block).evaluate(t);
}

MeanPhotonSeries mean_photon_series(const ModelParams& params, const InitialState& init,
                                    const FockTruncation& trunc, const TimeGrid& grid, unsigned workers)
{
    params.validate();
    init.validate();
    if (grid.count < 1) throw std::invalid_argument("grid count must be at least 1");
    if (!(grid.dt > 0.0)) throw std::invalid_argument("grid dt must be positive");
    if (trunc.n_max < 0) throw std::invalid_argument("n_max must be non-negative");

    // <N1>(t) = constant + sum_k amp_k cos(freq_k t); three beat terms per block.
    double weight_sum = 0.0;
    double constant = 0.0;
    std::vector<double> amp;
    std::vector<double> freq;
    amp.reserve(3u * static_cast<std::size_t>(trunc.n_max + 1) * static_cast<std::size_t>(trunc.n_max + 1));
    freq.reserve(amp.capacity());
    for (int n = 0; n <= trunc.n_max; ++n) {
        for (int m = 0; m <= trunc.n_max; ++m) {
            const BlockHamiltonian block = build_block(n, m, params, init);
            weight_sum += block.weight;
            if (block.dim == 1 || block.weight == 0.0) continue;
            const SymmetricEigen3 eig = eigen_symmetric3(block.matrix);
            std::array<double, 3> w{};
            for (std::size_t j = 0; j < 3; ++j) w[j] = eig.vectors[0][j] * eig.vectors[0][j];
            constant += block.weight * (n - 1.0 + w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
            const std::array<std::pair<std::size_t, std::size_t>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
            for (const auto& [j, l] : pairs) {
                amp.push_back(2.0 * block.weight * w[j] * w[l]);
                freq.push_back(eig.values[l] - eig.values[j]);
            }
        }
    }
    if (weight_sum < 1.0 - 2.0 * trunc.tail_eps - 1e-14)
        throw TruncationInsufficient("Fock truncation n_max=" + std::to_string(trunc.n_max) +
                                     " keeps weight " + std::to_string(weight_sum));

    MeanPhotonSeries out;
    out.t0 = grid.t0;
    out.dt = grid.dt;
    out.values.assign(grid.count, 0.0);
    const std::size_t terms = amp.size();
    parallel_chunks(grid.count, workers, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            const double t = grid.at(k);
            double sum = constant;
            for (std::size_t i = 0; i < terms; ++i) sum += amp[i] * std::cos(freq[i] * t);
            out.values[k] = std::clamp(sum, 0.0, static_cast<double>(trunc.n_max));
        }
    });
    return out;
}

} // namespace recnetq
