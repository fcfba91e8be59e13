#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tasadm/core.hpp"
#include "tasadm/diagnostics.hpp"
#include "tasadm/problem.hpp"

namespace tasadm {

enum class GammaMode { fixed, nesterov };

/// plain: (x₀, y₀, λ₀) = (0, 0, lambda0_fill·1).
/// dual_consistent: x₀ = 0, y₀ = argmin g when g is quadratic (else 0), and
/// λ₀ the least-norm solution of Bᵀλ₀ = ∇g(y₀), so the dual identity holds
/// from the first step on.
enum class StartMode { plain, dual_consistent };

/// Residual-balancing constants for the penalty update.
struct AdaptParams {
    double nu = 10.0;
    double eta_incr = 2.0;
    double eta_decr = 2.0;
};

struct SolverConfig {
    double tau = 0.65;
    double alpha = 0.32;
    double beta0 = 0.04;
    GammaMode gamma_mode = GammaMode::nesterov;
    double gamma_fixed = 0.0;
    double sigma_factor = 1.01;
    bool adapt_beta = true;
    AdaptParams adapt;
    bool beta_cap_enabled = true;
    double epsilon = 1e-10;
    std::size_t max_iter = 2000;
    StartMode start = StartMode::plain;
    double lambda0_fill = 1.0;

    /// Requires 0 < τ+α < 1, fixed γ ∈ [0, ½), β₀ > 0, ε > 0.
    void validate() const;
};

/// sigma_factor·L_g / (√(1−τ−α)·σ_B): the β cap, and the fixed penalty used
/// for runs that must satisfy the descent inequality.
double compliant_beta(const ProblemInstance& prob, const SolverConfig& cfg);

struct IterateState {
    Vector x;
    Vector x_prev;
    Vector y;
    Vector lambda;
    double beta = 0.0;
    double theta_prev = 1.0;
    std::size_t k = 0;

    PrimalDual w() const { return {x, y, lambda}; }
};

/// Start per cfg.start with x₋₁ = x₀ and β = β₀. The dual-consistent start
/// throws UnsupportedInstance when ∇g(y₀) is outside the range of Bᵀ.
IterateState initial_state(const ProblemInstance& prob, const SolverConfig& cfg);

struct StepOutput {
    IterateState next;
    Vector lambda_half;
    Vector x_md;
    Vector x_ad;
    double gamma_used = 0.0;
};

struct NesterovStep {
    double theta = 1.0;
    double gamma = 0.0;
};

/// θ = (1 + √(1 + 4θ_prev²))/2,  γ = (θ_prev − 1)/(2θ).
NesterovStep nesterov_gamma_step(double theta_prev);

struct XUpdate {
    Vector x_new;
    Vector x_md;
};

/**
 * Extrapolates x_md = x + γ(x − x_prev), then solves the linearized
 * x-subproblem as Prox_{f,σ}(c_x) with
 * c_x = x_md − (βAᵀ(A x_md + B y − b) − Aᵀλ)/σ.
 */
XUpdate x_update(const IterateState& state, const ProblemInstance& prob, const GMetric& g,
                 double gamma);

/**
 * argmin_y g(y) − ⟨λ_half, By⟩ + (β/2)‖x_ad + By − b‖².
 *
 * Quadratic g is solved exactly (closed form when B = −I, otherwise a
 * Cholesky solve of (I + βBᵀB)). Logistic g uses damped Newton from
 * `warm_start` until the gradient norm is at most 1e-10·(1 + ‖y‖).
 */
Vector y_update(const Eigen::Ref<const Vector>& x_ad, const Eigen::Ref<const Vector>& lambda_half,
                const ProblemInstance& prob, double beta,
                const Vector* warm_start = nullptr);

struct Residuals {
    double r_norm = 0.0;
    double s_norm = 0.0;
};

/// β update by residual balancing, then the optional cap.
double adaptive_beta(double beta, double r_norm, double s_norm, const SolverConfig& cfg,
                     const ProblemInstance& prob);

/// max(‖Δx‖, ‖Δy‖, ‖Δλ‖) / max(‖x_prev‖, ‖y_prev‖, ‖λ_prev‖, 1).
double stopping_ire(const IterateState& prev, const IterateState& next);

enum class Termination { converged, max_iter, failure };

const char* to_string(Termination t) noexcept;

struct SolveSummary {
    IterateState final_state;
    std::size_t iterations = 0;
    Termination terminated_by = Termination::max_iter;
    double final_ire = 0.0;
    double final_equ = 0.0;  // final r_norm
    double initial_L = 0.0;  // L_{β₀}(w₀)
    double wall_seconds = 0.0;
    std::string message;
    std::optional<double> l2_error;
};

struct SolveResult {
    SolveSummary summary;
    std::vector<TraceRecord> trace;
};

/**
 * Stateful driver for one instance: caches ‖AᵀA‖₂ and the y-system
 * factorization, rebuilding the G metric only when β changes.
 */
class TasAdmm {
public:
    TasAdmm(const ProblemInstance& prob, SolverConfig cfg);

    const ProblemInstance& problem() const noexcept { return prob_; }
    const SolverConfig& config() const noexcept { return cfg_; }
    double ata_norm() const noexcept { return ata_norm_; }

    /// The metric G for penalty β.
    GMetric metric(double beta) const;

    /// One full iteration (x, λ½, y, λ updates) with the state's β held fixed.
    StepOutput step(const IterateState& state);

    Residuals residuals(const IterateState& prev, const StepOutput& out) const;

    SolveResult solve(std::optional<IterateState> start = std::nullopt);

private:
    Vector solve_y(const StepOutput& partial, const IterateState& state, double beta);

    const ProblemInstance& prob_;
    SolverConfig cfg_;
    double ata_norm_ = 0.0;
    std::optional<double> factor_beta_;
    Eigen::LLT<Matrix> y_factor_;
};

StepOutput tas_admm_step(const IterateState& state, const ProblemInstance& prob,
                         const SolverConfig& cfg);

Residuals residuals(const IterateState& prev, const StepOutput& out, const ProblemInstance& prob,
                    const SolverConfig& cfg);

SolveResult solve(const ProblemInstance& prob, const SolverConfig& cfg);

}  // namespace tasadm
