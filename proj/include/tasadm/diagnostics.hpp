#pragma once

#include <cstddef>
#include <vector>

#include "tasadm/core.hpp"
#include "tasadm/problem.hpp"

namespace tasadm {

/// w = (x, y, λ).
struct PrimalDual {
    Vector x;
    Vector y;
    Vector lambda;
};

/// L_β(w) = f(x) + g(y) − ⟨λ, Ax+By−b⟩ + (β/2)‖Ax+By−b‖².
double augmented_lagrangian(const PrimalDual& w, const ProblemInstance& prob, double beta);

/// L_β(w) + (γ/2)‖Δx‖²_G, the merit function that decreases along compliant runs.
double tilde_lagrangian(const PrimalDual& w, const Eigen::Ref<const Vector>& dx_prev, double gamma,
                        const GMetric& g, const ProblemInstance& prob, double beta);

struct ZetaConstants {
    double zeta0 = 0.0;
    double zeta1 = 0.0;
    double zeta2 = 0.0;
    double zeta3 = 0.0;  // L_g²/ζ₂; NaN when ζ₂ ≤ 0
    bool penalty_ok = false;
};

/**
 * ζ₀ = γ/2, ζ₁ = (1−2γ)/2,
 * ζ₂ = ((1−τ−α)β²σ_B² − L_g²) / ((τ+α)βσ_B),
 * ζ₃ = L_g²/ζ₂.
 * A non-positive ζ₂ means the penalty is below the descent bound; it is
 * reported through `penalty_ok`, not thrown.
 */
ZetaConstants zeta_constants(double gamma, double tau, double alpha, double beta,
                             double lipschitz_g, double sigma_b);

/// Per-iteration diagnostics of one step w_k → w_{k+1}.
struct TraceRecord {
    std::size_t k = 0;
    double beta = 0.0;
    double gamma = 0.0;
    double r_norm = 0.0;
    double s_norm = 0.0;
    double ire = 0.0;
    double L_beta = 0.0;   // L_β(w_{k+1})
    double L_tilde = 0.0;  // L_β(w_{k+1}) + (γ_k/2)‖Δx_{k+1}‖²_G
    double dx_G = 0.0;     // ‖Δx_{k+1}‖_G
    double dy = 0.0;
    double dlambda = 0.0;
};

/// Constants the audits need besides the trace itself.
struct AuditParams {
    double tau = 0.0;
    double alpha = 0.0;
    double lipschitz_g = 0.0;
    double sigma_b = 1.0;
    double initial_L = 0.0;  // L_β(w_0)
};

struct DescentAudit {
    std::vector<std::size_t> violations;  // iterations k where the drop fell short
    double worst_margin = 0.0;            // min over k of drop − required (+tol)
    std::size_t checked = 0;
    bool penalty_ok = true;

    bool passed() const { return penalty_ok && violations.empty(); }
};

/**
 * Checks  L̃(w_k) − L̃(w_{k+1}) ≥ ζ₁‖Δx_{k+1}‖²_G + ζ₂‖Δy_{k+1}‖² − tol
 * at every recorded step, with ζ₀ = ζ₀(γ_k) on both sides of the drop and
 * tol = 1e-9·(1 + |L̃(w_{k+1})|). Meaningful only for fixed-β traces.
 */
DescentAudit audit_descent(const std::vector<TraceRecord>& trace, const AuditParams& params);

struct RateBoundAudit {
    double c0 = 0.0;
    std::vector<std::size_t> dx_violations;
    std::vector<std::size_t> dy_violations;
    std::vector<std::size_t> dlambda_violations;
    std::size_t checked = 0;
    bool penalty_ok = true;

    bool passed() const {
        return penalty_ok && dx_violations.empty() && dy_violations.empty() &&
               dlambda_violations.empty();
    }
};

/// printed: ζ₃ = L_g²/ζ₂.  chained: ζ₃ = σ_Bζ₂/L_g², the constant obtained by
/// combining the Δy bound with ‖Δλ‖ ≤ (L_g/√σ_B)‖Δy‖.
enum class Zeta3Form { printed, chained };

/**
 * For every k: min_{j≤k} ‖Δx_j‖²_G ≤ C₀/(ζ₁(k+1)), and likewise for Δy with
 * ζ₂ and Δλ with ζ₃, where C₀ = L_β(w₀) − L̲. ζ₁ uses the largest γ seen up
 * to k. Throws UnsupportedInstance when the instance has no lower bound.
 */
RateBoundAudit audit_rate_bounds(const std::vector<TraceRecord>& trace, const AuditParams& params,
                                 const ProblemInstance& prob,
                                 Zeta3Form form = Zeta3Form::printed);

struct StationarityGap {
    double gx = 0.0;  // dist(Aᵀλ, ∂f(x))
    double gy = 0.0;  // ‖Bᵀλ − ∇g(y)‖
    double gl = 0.0;  // ‖Ax + By − b‖
};

StationarityGap stationarity_gap(const PrimalDual& w, const ProblemInstance& prob);

}  // namespace tasadm
