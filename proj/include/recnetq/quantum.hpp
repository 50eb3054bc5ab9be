#pragma once

// Exact evolution of a Lambda atom coupled to two Kerr-nonlinear cavity
// modes with an intensity-dependent coupling f(N) = sqrt(1 + kappa N) on
// mode 1. The Hamiltonian conserves N1 + s22 + s33 and N2 - s22, so an
// initial state with the atom in level 1 splits into independent 3x3
// blocks spanned by |1,n,m>, |3,n-1,m>, |2,n-1,m+1>. Energies are measured
// from |3,n-1,m>; at zero detuning the diagonal is (2 chi (n-1), 0, 2 chi m).

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace recnetq {

struct ModelParams {
    double chi = 5.0;    ///< Kerr strength in units of lambda
    double lambda = 1.0; ///< atom-field coupling; fixes scaled time tau = lambda t
    double kappa = 0.0;  ///< intensity parameter of mode 1, in [0, 1]
    double kappa2 = 0.0;
    double detuning = 0.0;

    /// Throws std::invalid_argument when outside the supported model.
    void validate() const;
};

/// Both modes start in the same coherent state |alpha>, atom in level 1.
/// Only |alpha|^2 enters <N1>; the phase of alpha is taken to be zero.
struct InitialState {
    double alpha_sq = 25.0;

    void validate() const;
};

struct FockTruncation {
    int n_max = 0;          ///< largest photon number kept per mode
    double tail_eps = 1e-12;
};

/// Smallest n_max whose Poisson(alpha_sq) upper-tail mass P(n > n_max) is
/// below tail_eps.
FockTruncation truncation_bound(double alpha_sq, double tail_eps);

/// Truncation used by the pipeline: the tail bound, raised to at least
/// alpha_sq + 10 sqrt(alpha_sq) and capped at alpha_sq + 12 sqrt(alpha_sq) + 20.
FockTruncation default_truncation(double alpha_sq, double tail_eps = 1e-12);

/// Upper-tail mass P(n > n_max) of Poisson(alpha_sq).
double poisson_tail(double alpha_sq, int n_max);

using Matrix3 = std::array<std::array<double, 3>, 3>;

struct BlockHamiltonian {
    int n = 0;
    int m = 0;
    int dim = 1;          ///< 1 when n == 0, otherwise 3
    Matrix3 matrix{};     ///< real symmetric, basis (|1,n,m>, |3,n-1,m>, |2,n-1,m+1>)
    double weight = 0.0;  ///< p(n, m), product of the two Poisson weights
};

BlockHamiltonian build_block(int n, int m, const ModelParams& params, const InitialState& init);

/// Eigen-decomposition of a real symmetric 3x3 matrix. Columns of
/// `vectors` are orthonormal eigenvectors; values ascend.
struct SymmetricEigen3 {
    std::array<double, 3> values{};
    Matrix3 vectors{};
};

/// Closed-form (trigonometric) eigenvalues with cross-product eigenvectors;
/// falls back to cyclic Jacobi when two eigenvalues are within a relative
/// gap of 1e-10.
SymmetricEigen3 eigen_symmetric3(const Matrix3& a);

/// Cyclic Jacobi rotations, run to machine precision.
SymmetricEigen3 eigen_symmetric3_jacobi(const Matrix3& a);

struct Complex3 {
    std::array<double, 3> re{};
    std::array<double, 3> im{};

    double norm_sq() const;
};

/// exp(-i H t) (1,0,0)^T for one block. Decomposes once; evaluate() is cheap.
class BlockEvolver {
public:
    explicit BlockEvolver(const BlockHamiltonian& block);

    Complex3 evaluate(double t) const;

    /// |A_1(t)|^2, the survival probability of |1,n,m>.
    double survival(double t) const;

    const SymmetricEigen3& eigen() const { return eigen_; }

private:
    SymmetricEigen3 eigen_;
};

Complex3 evolve_block(const BlockHamiltonian& block, double t);

struct TimeGrid {
    double t0 = 0.0;
    double dt = 1.0;
    std::size_t count = 1;

    double at(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
};

struct MeanPhotonSeries {
    double t0 = 0.0;
    double dt = 1.0;
    std::vector<double> values;
};

class TruncationInsufficient : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * <N1>(tau) on a uniform grid:
 *   sum_{n,m <= n_max} p(n,m) (n - |A_2|^2 - |A_3|^2) = sum p(n,m) (n - 1 + |A_1|^2)
 * for n >= 1, while n = 0 blocks contribute nothing. Samples are evaluated
 * directly (no time stepping) and each sample sums blocks in a fixed order,
 * so the output does not depend on `workers`.
 *
 * Throws TruncationInsufficient when the kept weight is below 1 - 2 tail_eps.
 */
MeanPhotonSeries mean_photon_series(const ModelParams& params, const InitialState& init,
                                    const FockTruncation& trunc, const TimeGrid& grid,
                                    unsigned workers = 0);

} // namespace recnetq
