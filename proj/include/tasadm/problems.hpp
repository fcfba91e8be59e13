#pragma once

#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <vector>

#include "tasadm/problem.hpp"

namespace tasadm {

class InvalidSpec : public Error {
public:
    using Error::Error;
};

/**
 * Seeded generator used by every instance builder.
 *
 * Built on std::mt19937_64, whose output sequence is fixed by the standard;
 * the distributions are implemented here (Box–Muller, rejection sampling)
 * because the standard library's are implementation-defined.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform();
    double gaussian();
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);
    /// Uniformly random permutation of 0..n−1 (Fisher–Yates).
    std::vector<std::size_t> permutation(std::size_t n);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

struct SparseRecoverySpec {
    std::size_t l = 1024;
    std::size_t m = 3072;
    std::size_t spikes = 160;
    double noise_sigma = 0.01;
    double mu_factor = 0.1;
    std::uint64_t seed = 0;
    Regularizer regularizer = Regularizer::l_half;

    void validate() const;
};

struct SparseRecovery {
    ProblemInstance problem;
    Vector x_orig;
    Vector c;
    double mu_max = 0.0;
};

/**
 * Compressed-sensing instance: Gaussian A with unit-norm columns, ±1 spikes
 * at random positions, c = A·x_orig + noise, μ = mu_factor·‖Aᵀc‖_∞.
 * Solved as min μR(x) + ½‖y − c‖² s.t. Ax − y = 0.
 */
SparseRecovery gen_sparse_recovery(const SparseRecoverySpec& spec);

/// Same data, different regularizer; A and B stay shared with `prob`.
ProblemInstance with_regularizer(const ProblemInstance& prob, Regularizer reg);

/// ℓ½-regularized logistic regression split as x − y = 0.
ProblemInstance gen_logistic_erm(std::size_t n_samples, std::size_t dim, double mu,
                                 std::uint64_t seed);

struct DoaSpec {
    std::size_t sensors = 100;  // M
    std::size_t grid = 180;     // L
    std::vector<double> true_doas;
    double snr_db = std::numeric_limits<double>::infinity();  // infinite: noiseless
    double mu_factor = 0.05;
    std::uint64_t seed = 0;

    void validate() const;
};

struct DoaInstance {
    ProblemInstance problem;
    std::vector<double> grid_angles;
    std::vector<std::size_t> support;  // grid index of each source
    Vector x_true;                     // stacked [Re x; Im x]
    bool off_grid_warning = false;
};

/// θ_i = −π/2 + i·π/L, i = 0..L−1.
std::vector<double> doa_grid(std::size_t grid);

/// Complex ULA steering matrix with half-wavelength spacing.
Eigen::MatrixXcd steering_matrix(std::size_t sensors, const std::vector<double>& angles);

/// [[Re A, −Im A], [Im A, Re A]].
Matrix real_embedding(const Eigen::MatrixXcd& a);

/**
 * Single-snapshot DOA model y = A x + n on a uniform angle grid, embedded in
 * real arithmetic. Each true angle is snapped to its nearest grid point; a
 * warning is flagged if that moves it by more than half a cell.
 */
DoaInstance gen_doa(const DoaSpec& spec);

/// Per-angle magnitude √(Re_i² + Im_i²) of a stacked real/imaginary vector.
Vector doa_spectrum(const Eigen::Ref<const Vector>& x_stacked);

/// Indices of the `count` largest local maxima, by decreasing magnitude.
std::vector<std::size_t> spectrum_peaks(const Eigen::Ref<const Vector>& spectrum, std::size_t count);

/// ‖x − x_orig‖ / ‖x_orig‖.
double l2_error(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& x_orig);

// Plain-text instance container: a format header, one keyword line per
// field with its dimensions, then whitespace-separated numbers printed at
// round-trip precision.

struct StoredInstance {
    ProblemInstance problem;
    std::optional<Vector> x_orig;
};

void write_instance(std::ostream& os, const ProblemInstance& prob,
                    const std::optional<Vector>& x_orig = std::nullopt);
StoredInstance read_instance(std::istream& is);

}  // namespace tasadm
