#pragma once

#include "tasadm/core.hpp"

namespace tasadm {

enum class Regularizer { none, l_one, l_half };

const char* to_string(Regularizer r) noexcept;

/// The x-block prox Prox_{f,σ}(c) = argmin f(t) + (σ/2)‖t − c‖² for f = μ·R.
struct ProxSpec {
    Regularizer kind = Regularizer::none;
    double reg_weight = 0.0;   // μ
    double quad_weight = 1.0;  // σ

    void validate() const;
    Vector apply(const Eigen::Ref<const Vector>& c) const;
};

/**
 * Componentwise global minimizer of  λ|t|^{1/2} + ½(t − x_i)².
 *
 * Closed-form half thresholding with ν = 2λ: zero when
 * |x_i| ≤ (3∛2/4)·ν^{2/3}, otherwise
 * (2x_i/3)·[1 + cos(⅔(π − φ(x_i)))],  φ = arccos((ν/8)(|x_i|/3)^{-3/2}).
 * Inputs exactly on the threshold map to 0.
 */
Vector half_shrinkage(const Eigen::Ref<const Vector>& x, double lambda);

/// Threshold below which half_shrinkage returns 0.
double half_shrinkage_threshold(double lambda);

/// sign(x_i)·max(|x_i| − κ, 0).
Vector soft_threshold(const Eigen::Ref<const Vector>& x, double kappa);

enum class ProxPower { half, one };

/// Objective λ|t|^p + ½(t − x)² minimized by the scalar prox.
double scalar_prox_objective(double t, double x, double lambda, ProxPower power);

/**
 * Reference minimizer of λ|t|^p + ½(t − x)² by exhaustive search: 10⁶ grid
 * samples on [−|x|−1, |x|+1], then bisection on the stationarity condition
 * around the best sample. Slow; intended for verification.
 */
double scalar_prox_oracle(double x, double lambda, ProxPower power);

}  // namespace tasadm
