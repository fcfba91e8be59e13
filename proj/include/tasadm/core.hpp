#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace tasadm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Error hierarchy. Every failure raised by the library derives from Error so
// callers can catch one type at the boundary.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class DegenerateMatrix : public Error {
public:
    using Error::Error;
};

class NumericalFailure : public Error {
public:
    using Error::Error;
};

class UnsupportedInstance : public Error {
public:
    using Error::Error;
};

/// Throws InvalidInput if any entry of `m` is NaN or infinite.
void require_finite(const Eigen::Ref<const Matrix>& m, const std::string& what);

/// Throws DimensionMismatch with a formatted message when `actual != expected`.
void require_dim(Eigen::Index actual, Eigen::Index expected, const std::string& what);

/**
 * Largest singular value ‖M‖₂.
 *
 * Lanczos with full reorthogonalization on the Gram operator of the smaller
 * side (MᵀM or MMᵀ, applied through matrix-vector products only). Iterates
 * until the Ritz residual of the top pair drops below 1e-8 relative, or the
 * Krylov space is exhausted.
 */
double spectral_norm(const Eigen::Ref<const Matrix>& m);

/// Smallest eigenvalue of BBᵀ above the cutoff 1e-10·‖BBᵀ‖₂.
double smallest_positive_eigenvalue(const Eigen::Ref<const Matrix>& b);

/**
 * The proximal metric G = σI − βAᵀA, held implicitly.
 *
 * G is only ever applied to vectors or used in quadratic forms, so the dense
 * m×m matrix is never formed.
 */
class GMetric {
public:
    /// `ata_norm` is ‖AᵀA‖₂; construction fails unless sigma ≥ beta·ata_norm.
    GMetric(double sigma, double beta, std::shared_ptr<const Matrix> a, double ata_norm);

    /// σ = sigma_factor·β·‖AᵀA‖₂, the rule used by the solver.
    static GMetric from_rule(double sigma_factor, double beta, std::shared_ptr<const Matrix> a,
                             double ata_norm);

    double sigma() const noexcept { return sigma_; }
    double beta() const noexcept { return beta_; }
    const Matrix& a() const noexcept { return *a_; }

    /// G·v = σv − βAᵀ(Av).
    Vector apply(const Eigen::Ref<const Vector>& v) const;

    /// ‖v‖²_G = σ‖v‖² − β‖Av‖².
    double norm_sq(const Eigen::Ref<const Vector>& v) const;

private:
    double sigma_;
    double beta_;
    std::shared_ptr<const Matrix> a_;
};

double g_metric_norm_sq(const GMetric& g, const Eigen::Ref<const Vector>& v);

}  // namespace tasadm
