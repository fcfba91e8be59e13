#pragma once

#include <memory>
#include <optional>
#include <variant>

#include "tasadm/core.hpp"
#include "tasadm/prox.hpp"

namespace tasadm {

/// g(y) = ½‖y − c‖².
struct QuadraticLoss {
    Vector c;
};

/// g(y) = (1/N) Σ_j log(1 + exp(−b_j a_jᵀ y)); rows of `features` are a_jᵀ.
struct LogisticLoss {
    Matrix features;
    Vector labels;  // entries in {−1, +1}
};

using SmoothLoss = std::variant<QuadraticLoss, LogisticLoss>;

/**
 * min f(x) + g(y)  s.t.  Ax + By = b,  with f = μ·R(x) handled through its
 * prox and g smooth with L_g-Lipschitz gradient.
 *
 * A and B are shared read-only so copies of an instance (sweeps, compare
 * runs) do not duplicate the data.
 */
struct ProblemInstance {
    std::shared_ptr<const Matrix> a;
    std::shared_ptr<const Matrix> b_mat;
    Vector b;
    Regularizer f_kind = Regularizer::none;
    double mu = 0.0;
    SmoothLoss g = QuadraticLoss{};
    double lipschitz_g = 1.0;  // L_g
    double sigma_b = 1.0;      // smallest positive eigenvalue of BBᵀ
    // inf over (x, y) of f + g − ‖∇g‖²/(2L_g), when known for the family.
    std::optional<double> lower_bound;

    Eigen::Index rows() const { return a->rows(); }
    Eigen::Index x_dim() const { return a->cols(); }
    Eigen::Index y_dim() const { return b_mat->cols(); }

    /// Checks dimensions and parameter ranges; throws on violation.
    void validate() const;

    /// True when B = −I, which enables the closed-form y-update.
    bool b_is_negative_identity() const { return b_neg_identity_; }

    /// Recomputes cached structure flags. Called by make_instance.
    void refresh_structure();

    Vector apply_b(const Eigen::Ref<const Vector>& y) const;
    Vector apply_bt(const Eigen::Ref<const Vector>& v) const;

    /// Ax + By − b.
    Vector constraint_residual(const Eigen::Ref<const Vector>& x,
                               const Eigen::Ref<const Vector>& y) const;

private:
    bool b_neg_identity_ = false;
};

/// Builds and validates an instance; computes σ_B when `sigma_b` is empty.
ProblemInstance make_instance(Matrix a, Matrix b_mat, Vector b, Regularizer f_kind, double mu,
                              SmoothLoss g, double lipschitz_g,
                              std::optional<double> sigma_b = std::nullopt,
                              std::optional<double> lower_bound = std::nullopt);

/// f(x) = μ·Σ|x_i|^{1/2}, μ‖x‖₁ or 0.
double f_value(const ProblemInstance& prob, const Eigen::Ref<const Vector>& x);
double g_value(const ProblemInstance& prob, const Eigen::Ref<const Vector>& y);
Vector g_gradient(const ProblemInstance& prob, const Eigen::Ref<const Vector>& y);

/// Logistic pieces, usable without an instance.
double logistic_value(const LogisticLoss& loss, const Eigen::Ref<const Vector>& y);
Vector logistic_gradient(const LogisticLoss& loss, const Eigen::Ref<const Vector>& y);

}  // namespace tasadm
