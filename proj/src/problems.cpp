#include "tasadm/problems.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace tasadm {

double Rng::uniform() {
    // 53 high bits → [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    spare_ = rad * std::sin(ang);
    has_spare_ = true;
    return rad * std::cos(ang);
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) {
        throw InvalidInput("Rng::below: empty range");
    }
    const std::uint64_t limit = engine_.max() - engine_.max() % n;
    std::uint64_t v = engine_();
    while (v >= limit) {
        v = engine_();
    }
    return v % n;
}

std::vector<std::size_t> Rng::permutation(std::size_t n) {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    for (std::size_t i = n; i > 1; --i) {
        std::swap(p[i - 1], p[below(i)]);
    }
    return p;
}

void SparseRecoverySpec::validate() const {
    if (l == 0 || m == 0) {
        throw InvalidSpec("SparseRecoverySpec: l and m must be positive");
    }
    if (spikes > m) {
        throw InvalidSpec("SparseRecoverySpec: T exceeds m");
    }
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
        throw InvalidSpec("SparseRecoverySpec: noise_sigma must be >= 0");
    }
    if (!(mu_factor > 0.0) || !std::isfinite(mu_factor)) {
        throw InvalidSpec("SparseRecoverySpec: mu_factor must be > 0");
    }
    if (regularizer == Regularizer::none) {
        throw InvalidSpec("SparseRecoverySpec: regularizer must be l1 or lhalf");
    }
}

namespace {

Matrix negative_identity(std::size_t n) {
    const auto k = static_cast<Eigen::Index>(n);
    return -Matrix::Identity(k, k);
}

}  // namespace

SparseRecovery gen_sparse_recovery(const SparseRecoverySpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const auto l = static_cast<Eigen::Index>(spec.l);
    const auto m = static_cast<Eigen::Index>(spec.m);

    SparseRecovery out;
    out.x_orig = Vector::Zero(m);
    const auto perm = rng.permutation(spec.m);
    for (std::size_t i = 0; i < spec.spikes; ++i) {
        const double s = rng.gaussian();
        out.x_orig[static_cast<Eigen::Index>(perm[i])] = s >= 0.0 ? 1.0 : -1.0;
    }

    Matrix a(l, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < l; ++i) a(i, j) = rng.gaussian();
        const double nrm = a.col(j).norm();
        if (nrm == 0.0) {
            throw DegenerateMatrix("gen_sparse_recovery: zero column drawn");
        }
        a.col(j) /= nrm;
    }

    Vector noise(l);
    for (Eigen::Index i = 0; i < l; ++i) noise[i] = rng.gaussian();
    out.c = a * out.x_orig + spec.noise_sigma * noise;
    out.mu_max = (a.transpose() * out.c).cwiseAbs().maxCoeff();
    if (!(out.mu_max > 0.0)) {
        throw DegenerateMatrix("gen_sparse_recovery: A^T c vanishes");
    }

    out.problem = make_instance(std::move(a), negative_identity(spec.l), Vector::Zero(l), spec.regularizer,
                                spec.mu_factor * out.mu_max, QuadraticLoss{out.c}, 1.0, 1.0, 0.0);
    return out;
}

ProblemInstance with_regularizer(const ProblemInstance& prob, Regularizer reg) {
    ProblemInstance copy = prob;
    copy.f_kind = reg;
    copy.validate();
    return copy;
}

ProblemInstance gen_logistic_erm(std::size_t n_samples, std::size_t dim, double mu,
                                 std::uint64_t seed) {
    if (n_samples == 0 || dim == 0) {
        throw InvalidSpec("gen_logistic_erm: N and l must be positive");
    }
    Rng rng(seed);
    const auto n = static_cast<Eigen::Index>(n_samples);
    const auto l = static_cast<Eigen::Index>(dim);
    LogisticLoss loss;
    loss.features.resize(n, l);
    for (Eigen::Index j = 0; j < l; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) loss.features(i, j) = rng.gaussian();
    }
    loss.labels.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) loss.labels[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;

    const double f_norm = spectral_norm(loss.features);
    const double lg = f_norm * f_norm / (4.0 * static_cast<double>(n_samples));
    // f, g ≥ 0 and ‖∇g‖² ≤ ‖F‖²/N = 4L_g, so L_β ≥ −‖∇g‖²/(2L_g) ≥ −2 on this splitting.
    return make_instance(Matrix::Identity(l, l), negative_identity(dim), Vector::Zero(l), Regularizer::l_half, mu,
                         std::move(loss), lg, 1.0, -2.0);
}

void DoaSpec::validate() const {
    if (sensors == 0 || grid == 0) {
        throw InvalidSpec("DoaSpec: M and L must be positive");
    }
    if (true_doas.empty()) {
        throw InvalidSpec("DoaSpec: no true DOAs");
    }
    const double half_pi = 0.5 * std::numbers::pi;
    for (double t : true_doas) {
        if (!std::isfinite(t) || t < -half_pi || t > half_pi) {
            throw InvalidSpec("DoaSpec: DOA outside [-pi/2, pi/2]");
        }
    }
    if (std::isnan(snr_db)) {
        throw InvalidSpec("DoaSpec: snr_db is NaN");
    }
    if (!(mu_factor > 0.0) || !std::isfinite(mu_factor)) {
        throw InvalidSpec("DoaSpec: mu_factor must be > 0");
    }
}

std::vector<double> doa_grid(std::size_t grid) {
    std::vector<double> g(grid);
    const double step = std::numbers::pi / static_cast<double>(grid);
    for (std::size_t i = 0; i < grid; ++i) {
        g[i] = -0.5 * std::numbers::pi + static_cast<double>(i) * step;
    }
    return g;
}

Eigen::MatrixXcd steering_matrix(std::size_t sensors, const std::vector<double>& angles) {
    Eigen::MatrixXcd a(static_cast<Eigen::Index>(sensors), static_cast<Eigen::Index>(angles.size()));
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        const double s = std::sin(angles[static_cast<std::size_t>(j)]);
        for (Eigen::Index m = 0; m < a.rows(); ++m) {
            a(m, j) = std::polar(1.0, -std::numbers::pi * static_cast<double>(m) * s);
        }
    }
    return a;
}

Matrix real_embedding(const Eigen::MatrixXcd& a) {
    const Eigen::Index r = a.rows();
    const Eigen::Index c = a.cols();
    Matrix out(2 * r, 2 * c);
    out.topLeftCorner(r, c) = a.real();
    out.topRightCorner(r, c) = -a.imag();
    out.bottomLeftCorner(r, c) = a.imag();
    out.bottomRightCorner(r, c) = a.real();
    return out;
}

DoaInstance gen_doa(const DoaSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    DoaInstance out;
    out.grid_angles = doa_grid(spec.grid);
    const double step = std::numbers::pi / static_cast<double>(spec.grid);
    const auto big_l = static_cast<Eigen::Index>(spec.grid);

    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(big_l);
    for (double t : spec.true_doas) {
        const double pos = std::round((t + 0.5 * std::numbers::pi) / step);
        const auto idx = static_cast<std::size_t>(
            std::clamp(pos, 0.0, static_cast<double>(spec.grid - 1)));
        if (std::abs(out.grid_angles[idx] - t) > 0.5 * step + 1e-12) {
            out.off_grid_warning = true;
        }
        if (std::find(out.support.begin(), out.support.end(), idx) != out.support.end()) {
            throw InvalidSpec("gen_doa: two DOAs snap to the same grid point");
        }
        out.support.push_back(idx);
        x[static_cast<Eigen::Index>(idx)] = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
    }

    const Eigen::MatrixXcd a = steering_matrix(spec.sensors, out.grid_angles);
    const Eigen::VectorXcd clean = a * x;
    Eigen::VectorXcd y = clean;
    if (std::isfinite(spec.snr_db)) {
        Eigen::VectorXcd noise(clean.size());
        for (Eigen::Index i = 0; i < noise.size(); ++i) {
            const double re = rng.gaussian();
            const double im = rng.gaussian();
            noise[i] = {re, im};
        }
        const double scale = clean.norm() / (noise.norm() * std::pow(10.0, spec.snr_db / 20.0));
        y += scale * noise;
    }

    const auto m = static_cast<Eigen::Index>(spec.sensors);
    Vector c(2 * m);
    c << y.real(), y.imag();
    out.x_true.resize(2 * big_l);
    out.x_true << x.real(), x.imag();

    Matrix at = real_embedding(a);
    const double mu_max = (at.transpose() * c).cwiseAbs().maxCoeff();
    out.problem = make_instance(std::move(at), negative_identity(2 * spec.sensors), Vector::Zero(2 * m),
                                Regularizer::l_half, spec.mu_factor * mu_max, QuadraticLoss{c},
                                1.0, 1.0, 0.0);
    return out;
}

Vector doa_spectrum(const Eigen::Ref<const Vector>& x_stacked) {
    if (x_stacked.size() % 2 != 0) {
        throw DimensionMismatch("doa_spectrum: stacked vector has odd length");
    }
    const Eigen::Index l = x_stacked.size() / 2;
    return (x_stacked.head(l).array().square() + x_stacked.tail(l).array().square()).sqrt();
}

std::vector<std::size_t> spectrum_peaks(const Eigen::Ref<const Vector>& spectrum, std::size_t count) {
    const Eigen::Index n = spectrum.size();
    std::vector<std::size_t> peaks;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double v = spectrum[i];
        if (!(v > 0.0)) continue;
        const bool left = i == 0 || v >= spectrum[i - 1];
        const bool right = i == n - 1 || v > spectrum[i + 1];
        if (left && right) peaks.push_back(static_cast<std::size_t>(i));
    }
    std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t p, std::size_t q) {
        return spectrum[static_cast<Eigen::Index>(p)] > spectrum[static_cast<Eigen::Index>(q)];
    });
    if (peaks.size() > count) peaks.resize(count);
    return peaks;
}

double l2_error(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& x_orig) {
    require_dim(x.size(), x_orig.size(), "l2_error");
    const double ref = x_orig.norm();
    if (!(ref > 0.0)) {
        throw InvalidInput("l2_error: zero reference vector");
    }
    return (x - x_orig).norm() / ref;
}

}  // namespace tasadm
