#include "tasadm/core.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <sstream>
#include <vector>

namespace tasadm {

void require_finite(const Eigen::Ref<const Matrix>& m, const std::string& what) {
    if (!m.allFinite()) {
        throw InvalidInput(what + ": non-finite entry");
    }
}

void require_dim(Eigen::Index actual, Eigen::Index expected, const std::string& what) {
    if (actual != expected) {
        std::ostringstream os;
        os << what << ": expected dimension " << expected << ", got " << actual;
        throw DimensionMismatch(os.str());
    }
}

namespace {

constexpr double kLanczosTol = 1e-8;

// Deterministic, well-spread start vector. A constant vector can be
// orthogonal to the dominant singular vector of structured matrices.
Vector lanczos_start(Eigen::Index n) {
    Vector v(n);
    std::uint64_t s = 0x9E3779B97F4A7C15ull;
    for (Eigen::Index i = 0; i < n; ++i) {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        v[i] = 0.5 + static_cast<double>(s >> 11) * 0x1.0p-53;
    }
    return v / v.norm();
}

}  // namespace

double spectral_norm(const Eigen::Ref<const Matrix>& m) {
    if (m.size() == 0) {
        throw InvalidInput("spectral_norm: empty matrix");
    }
    require_finite(m, "spectral_norm");

    const bool use_rows = m.rows() <= m.cols();
    const Eigen::Index n = use_rows ? m.rows() : m.cols();
    auto gram = [&](const Vector& v) -> Vector {
        if (use_rows) {
            return m * (m.transpose() * v);
        }
        return m.transpose() * (m * v);
    };

    // The Krylov space is exhausted after n steps.
    const Eigen::Index max_steps = n;
    std::vector<Vector> basis;
    std::vector<double> alphas;
    std::vector<double> betas;

    Vector q = lanczos_start(n);
    double top = 0.0;
    for (Eigen::Index j = 0; j < max_steps; ++j) {
        basis.push_back(q);
        Vector w = gram(q);
        const double a = q.dot(w);
        alphas.push_back(a);
        // full reorthogonalization, twice for stability
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis) {
                w -= b.dot(w) * b;
            }
        }
        const double bnext = w.norm();

        const auto k = static_cast<Eigen::Index>(alphas.size());
        Matrix t = Matrix::Zero(k, k);
        for (Eigen::Index i = 0; i < k; ++i) {
            t(i, i) = alphas[static_cast<std::size_t>(i)];
            if (i + 1 < k) {
                t(i, i + 1) = t(i + 1, i) = betas[static_cast<std::size_t>(i)];
            }
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(t);
        top = es.eigenvalues()[k - 1];
        const double residual = std::abs(bnext * es.eigenvectors()(k - 1, k - 1));

        if (top <= 0.0) {
            // zero operator along the start direction; only possible for M = 0
            if (bnext == 0.0) {
                break;
            }
        } else if (residual <= kLanczosTol * top) {
            break;
        }
        if (bnext <= 1e-14 * std::max(top, 1e-300)) {
            break;  // invariant subspace found, Ritz values are exact
        }
        betas.push_back(bnext);
        q = w / bnext;
    }
    return std::sqrt(std::max(top, 0.0));
}

double smallest_positive_eigenvalue(const Eigen::Ref<const Matrix>& b) {
    if (b.size() == 0) {
        throw InvalidInput("smallest_positive_eigenvalue: empty matrix");
    }
    require_finite(b, "smallest_positive_eigenvalue");
    // BBᵀ and BᵀB share their nonzero spectrum; take the smaller Gram.
    const Matrix gram = b.rows() <= b.cols() ? Matrix(b * b.transpose()) : Matrix(b.transpose() * b);
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
    const Vector& ev = es.eigenvalues();
    const double largest = ev[ev.size() - 1];
    const double cutoff = 1e-10 * largest;
    if (!(largest > 0.0)) {
        throw DegenerateMatrix("smallest_positive_eigenvalue: BBᵀ has no positive eigenvalue");
    }
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] > cutoff) {
            return ev[i];
        }
    }
    throw DegenerateMatrix("smallest_positive_eigenvalue: all eigenvalues below cutoff");
}

GMetric::GMetric(double sigma, double beta, std::shared_ptr<const Matrix> a, double ata_norm)
    : sigma_(sigma), beta_(beta), a_(std::move(a)) {
    if (!a_) {
        throw InvalidInput("GMetric: missing matrix");
    }
    if (!(beta_ > 0.0) || !std::isfinite(beta_)) {
        throw InvalidParameter("GMetric: beta must be positive and finite");
    }
    if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) {
        throw InvalidParameter("GMetric: sigma must be positive and finite");
    }
    if (sigma_ < beta_ * ata_norm) {
        throw InvalidParameter("GMetric: sigma < beta*||A^T A||, G is not positive semidefinite");
    }
}

GMetric GMetric::from_rule(double sigma_factor, double beta, std::shared_ptr<const Matrix> a,
                           double ata_norm) {
    if (!(sigma_factor >= 1.0)) {
        throw InvalidParameter("GMetric: sigma_factor must be >= 1");
    }
    double sigma = sigma_factor * beta * ata_norm;
    if (!(sigma > 0.0)) {
        // A = 0: any positive sigma is admissible
        sigma = sigma_factor * beta;
    }
    return GMetric(sigma, beta, std::move(a), ata_norm);
}

Vector GMetric::apply(const Eigen::Ref<const Vector>& v) const {
    require_dim(v.size(), a_->cols(), "GMetric::apply");
    return sigma_ * v - beta_ * (a_->transpose() * (*a_ * v));
}

double GMetric::norm_sq(const Eigen::Ref<const Vector>& v) const {
    require_dim(v.size(), a_->cols(), "GMetric::norm_sq");
    return sigma_ * v.squaredNorm() - beta_ * (*a_ * v).squaredNorm();
}

double g_metric_norm_sq(const GMetric& g, const Eigen::Ref<const Vector>& v) {
    return g.norm_sq(v);
}

}  // namespace tasadm
