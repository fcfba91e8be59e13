#include "tasadm/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace tasadm {

void SolverConfig::validate() const {
    const double ta = tau + alpha;
    if (!std::isfinite(ta) || !(ta > 0.0) || !(ta < 1.0)) {
        throw InvalidParameter("SolverConfig: tau + alpha must lie in (0, 1)");
    }
    if (!(beta0 > 0.0) || !std::isfinite(beta0)) {
        throw InvalidParameter("SolverConfig: beta0 must be positive");
    }
    if (gamma_mode == GammaMode::fixed && !(gamma_fixed >= 0.0 && gamma_fixed < 0.5)) {
        throw InvalidParameter("SolverConfig: fixed gamma must lie in [0, 1/2)");
    }
    if (!(sigma_factor >= 1.0) || !std::isfinite(sigma_factor)) {
        throw InvalidParameter("SolverConfig: sigma_factor must be >= 1");
    }
    if (!(epsilon > 0.0)) {
        throw InvalidParameter("SolverConfig: epsilon must be positive");
    }
    if (!(adapt.nu > 0.0 && adapt.eta_incr > 0.0 && adapt.eta_decr > 0.0)) {
        throw InvalidParameter("SolverConfig: adaptive-beta parameters must be positive");
    }
    if (!std::isfinite(lambda0_fill)) {
        throw InvalidParameter("SolverConfig: lambda0_fill must be finite");
    }
}

double compliant_beta(const ProblemInstance& prob, const SolverConfig& cfg) {
    const double gap = 1.0 - cfg.tau - cfg.alpha;
    if (!(gap > 0.0)) {
        throw InvalidParameter("compliant_beta: requires tau + alpha < 1");
    }
    return cfg.sigma_factor * prob.lipschitz_g / (std::sqrt(gap) * prob.sigma_b);
}

IterateState initial_state(const ProblemInstance& prob, const SolverConfig& cfg) {
    IterateState s;
    s.x = Vector::Zero(prob.x_dim());
    s.x_prev = s.x;
    s.y = Vector::Zero(prob.y_dim());
    s.lambda = Vector::Constant(prob.rows(), cfg.lambda0_fill);
    if (cfg.start == StartMode::dual_consistent) {
        if (const auto* q = std::get_if<QuadraticLoss>(&prob.g)) {
            s.y = q->c;
        }
        const Vector grad = g_gradient(prob, s.y);
        const Matrix bt = prob.b_mat->transpose();
        s.lambda = bt.completeOrthogonalDecomposition().solve(grad);
        if ((bt * s.lambda - grad).norm() > 1e-10 * (1.0 + grad.norm())) {
            throw UnsupportedInstance("initial_state: grad g(y0) is not in the range of B^T");
        }
    }
    s.beta = cfg.beta0;
    s.theta_prev = 1.0;
    s.k = 0;
    return s;
}

NesterovStep nesterov_gamma_step(double theta_prev) {
    NesterovStep out;
    out.theta = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta_prev * theta_prev));
    out.gamma = (theta_prev - 1.0) / (2.0 * out.theta);
    return out;
}

XUpdate x_update(const IterateState& state, const ProblemInstance& prob, const GMetric& g,
                 double gamma) {
    require_dim(state.x.size(), prob.x_dim(), "x_update: x");
    require_dim(state.x_prev.size(), prob.x_dim(), "x_update: x_prev");
    require_dim(state.y.size(), prob.y_dim(), "x_update: y");
    require_dim(state.lambda.size(), prob.rows(), "x_update: lambda");
    XUpdate out;
    out.x_md = state.x + gamma * (state.x - state.x_prev);
    const Matrix& a = *prob.a;
    const Vector pen = a * out.x_md + prob.apply_b(state.y) - prob.b;
    const Vector grad = a.transpose() * (g.beta() * pen - state.lambda);
    const Vector c_x = out.x_md - grad / g.sigma();
    ProxSpec spec{prob.f_kind, prob.mu, g.sigma()};
    out.x_new = spec.apply(c_x);
    return out;
}

namespace {

Vector y_rhs_quadratic(const QuadraticLoss& q, const Eigen::Ref<const Vector>& x_ad,
                       const Eigen::Ref<const Vector>& lambda_half, const ProblemInstance& prob,
                       double beta) {
    return q.c + prob.apply_bt(lambda_half) - beta * prob.apply_bt(x_ad - prob.b);
}

Matrix y_system(const ProblemInstance& prob, double beta) {
    const Matrix& bm = *prob.b_mat;
    Matrix sys = beta * (bm.transpose() * bm);
    sys.diagonal().array() += 1.0;
    return sys;
}

Vector y_logistic(const LogisticLoss& loss, const Eigen::Ref<const Vector>& x_ad,
                  const Eigen::Ref<const Vector>& lambda_half, const ProblemInstance& prob,
                  double beta, const Vector* warm_start) {
    auto objective = [&](const Vector& y) {
        const Vector r = x_ad + prob.apply_b(y) - prob.b;
        return logistic_value(loss, y) - lambda_half.dot(prob.apply_b(y)) + 0.5 * beta * r.squaredNorm();
    };
    auto gradient = [&](const Vector& y) -> Vector {
        const Vector r = x_ad + prob.apply_b(y) - prob.b;
        return logistic_gradient(loss, y) - prob.apply_bt(lambda_half) + beta * prob.apply_bt(r);
    };

    // Damped Newton on the strongly convex subproblem. The Hessian is
    // FᵀWF/N + βBᵀB with W the logistic curvature weights.
    const Matrix btb = prob.b_mat->transpose() * *prob.b_mat;
    const double n_samples = static_cast<double>(loss.features.rows());
    Vector y = warm_start ? *warm_start : Vector::Zero(prob.y_dim());
    double fy = objective(y);
    Vector grad = gradient(y);
    constexpr int kMaxIter = 200;
    for (int it = 0; it < kMaxIter; ++it) {
        if (grad.norm() <= 1e-10 * (1.0 + y.norm())) {
            return y;
        }
        const Vector margins = loss.features * y;
        Vector w(margins.size());
        for (Eigen::Index j = 0; j < margins.size(); ++j) {
            const double p = 1.0 / (1.0 + std::exp(-std::abs(margins[j])));
            w[j] = p * (1.0 - p);
        }
        const Matrix hess = loss.features.transpose() * w.asDiagonal() * loss.features / n_samples + beta * btb;
        Eigen::LDLT<Matrix> ldlt(hess);
        Vector dir = ldlt.info() == Eigen::Success ? Vector(ldlt.solve(-grad)) : Vector(-grad);
        if (!(dir.dot(grad) < 0.0) || !dir.allFinite()) dir = -grad;

        const double slope = grad.dot(dir);
        const double gnorm = grad.norm();
        double t = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
            const Vector trial = y + t * dir;
            const double ft = objective(trial);
            const Vector gt = gradient(trial);
            // Near the minimizer the objective change drops below roundoff;
            // a smaller gradient is then the only usable signal.
            const bool armijo = ft <= fy + 1e-4 * t * slope;
            const bool flat = ft <= fy + 1e-14 * (1.0 + std::abs(fy)) && gt.norm() < gnorm;
            if (armijo || flat) {
                y = trial;
                fy = ft;
                grad = gt;
                moved = true;
                break;
            }
        }
        if (!moved) {
            if (gnorm <= 1e-8 * (1.0 + y.norm())) {
                return y;
            }
            throw NumericalFailure("y_update: logistic line search stalled");
        }
    }
    throw NumericalFailure("y_update: logistic inner solve did not converge");
}

}  // namespace

Vector y_update(const Eigen::Ref<const Vector>& x_ad, const Eigen::Ref<const Vector>& lambda_half,
                const ProblemInstance& prob, double beta, const Vector* warm_start) {
    require_dim(x_ad.size(), prob.rows(), "y_update: x_ad");
    require_dim(lambda_half.size(), prob.rows(), "y_update: lambda_half");
    if (const auto* q = std::get_if<QuadraticLoss>(&prob.g)) {
        const Vector rhs = y_rhs_quadratic(*q, x_ad, lambda_half, prob, beta);
        if (prob.b_is_negative_identity()) {
            return rhs / (1.0 + beta);
        }
        Eigen::LLT<Matrix> llt(y_system(prob, beta));
        if (llt.info() != Eigen::Success) {
            throw NumericalFailure("y_update: singular y-system");
        }
        return llt.solve(rhs);
    }
    return y_logistic(std::get<LogisticLoss>(prob.g), x_ad, lambda_half, prob, beta, warm_start);
}

double adaptive_beta(double beta, double r_norm, double s_norm, const SolverConfig& cfg,
                     const ProblemInstance& prob) {
    double candidate = beta;
    if (r_norm > cfg.adapt.nu * s_norm) {
        candidate = cfg.adapt.eta_incr * beta;
    } else if (s_norm > cfg.adapt.nu * r_norm) {
        candidate = beta / cfg.adapt.eta_decr;
    }
    if (cfg.beta_cap_enabled) {
        candidate = std::min(candidate, compliant_beta(prob, cfg));
    }
    return candidate;
}

double stopping_ire(const IterateState& prev, const IterateState& next) {
    require_dim(next.x.size(), prev.x.size(), "stopping_ire: x");
    require_dim(next.y.size(), prev.y.size(), "stopping_ire: y");
    require_dim(next.lambda.size(), prev.lambda.size(), "stopping_ire: lambda");
    const double num = std::max({(next.x - prev.x).norm(), (next.y - prev.y).norm(),
                                 (next.lambda - prev.lambda).norm()});
    const double den = std::max({prev.x.norm(), prev.y.norm(), prev.lambda.norm(), 1.0});
    return num / den;
}

const char* to_string(Termination t) noexcept {
    switch (t) {
        case Termination::converged: return "converged";
        case Termination::max_iter: return "max_iter";
        case Termination::failure: return "failure";
    }
    return "?";
}

TasAdmm::TasAdmm(const ProblemInstance& prob, SolverConfig cfg) : prob_(prob), cfg_(cfg) {
    prob_.validate();
    cfg_.validate();
    const double a_norm = spectral_norm(*prob_.a);
    ata_norm_ = a_norm * a_norm;
}

GMetric TasAdmm::metric(double beta) const {
    return GMetric::from_rule(cfg_.sigma_factor, beta, prob_.a, ata_norm_);
}

Vector TasAdmm::solve_y(const StepOutput& partial, const IterateState& state, double beta) {
    const auto* q = std::get_if<QuadraticLoss>(&prob_.g);
    if (q == nullptr || prob_.b_is_negative_identity()) {
        return y_update(partial.x_ad, partial.lambda_half, prob_, beta, &state.y);
    }
    if (!factor_beta_ || *factor_beta_ != beta) {
        y_factor_.compute(y_system(prob_, beta));
        if (y_factor_.info() != Eigen::Success) {
            throw NumericalFailure("y_update: singular y-system");
        }
        factor_beta_ = beta;
    }
    return y_factor_.solve(y_rhs_quadratic(*q, partial.x_ad, partial.lambda_half, prob_, beta));
}

StepOutput TasAdmm::step(const IterateState& state) {
    const double beta = state.beta;
    StepOutput out;
    double theta = state.theta_prev;
    if (cfg_.gamma_mode == GammaMode::nesterov) {
        const NesterovStep ns = nesterov_gamma_step(state.theta_prev);
        out.gamma_used = ns.gamma;
        theta = ns.theta;
    } else {
        out.gamma_used = cfg_.gamma_fixed;
    }

    const GMetric g = metric(beta);
    XUpdate xu = x_update(state, prob_, g, out.gamma_used);
    out.x_md = std::move(xu.x_md);

    const Vector ax = *prob_.a * xu.x_new;
    const Vector by = prob_.apply_b(state.y);
    out.lambda_half = state.lambda - cfg_.tau * beta * (ax + by - prob_.b);
    out.x_ad = cfg_.alpha * ax + (1.0 - cfg_.alpha) * (prob_.b - by);

    Vector y_new = solve_y(out, state, beta);
    Vector lambda_new = out.lambda_half - beta * (out.x_ad + prob_.apply_b(y_new) - prob_.b);

    out.next.x_prev = state.x;
    out.next.x = std::move(xu.x_new);
    out.next.y = std::move(y_new);
    out.next.lambda = std::move(lambda_new);
    out.next.beta = beta;
    out.next.theta_prev = theta;
    out.next.k = state.k + 1;
    return out;
}

Residuals TasAdmm::residuals(const IterateState& prev, const StepOutput& out) const {
    const Matrix& a = *prob_.a;
    const double beta = prev.beta;
    const GMetric g = metric(beta);
    Residuals res;
    res.r_norm = prob_.constraint_residual(out.next.x, out.next.y).norm();
    const Vector pen = a * out.next.x + prob_.apply_b(prev.y) - prob_.b;
    const Vector dlambda = out.next.lambda - prev.lambda;
    const Vector v = (out.next.x - prev.x) - out.gamma_used * (prev.x - prev.x_prev);
    res.s_norm = (a.transpose() * (dlambda + beta * pen) + g.apply(v)).norm();
    return res;
}

SolveResult TasAdmm::solve(std::optional<IterateState> start) {
    const auto t0 = std::chrono::steady_clock::now();
    SolveResult result;
    IterateState state = start ? std::move(*start) : initial_state(prob_, cfg_);
    require_dim(state.x.size(), prob_.x_dim(), "solve: x0");
    require_dim(state.y.size(), prob_.y_dim(), "solve: y0");
    require_dim(state.lambda.size(), prob_.rows(), "solve: lambda0");

    auto& summary = result.summary;
    summary.initial_L = augmented_lagrangian(state.w(), prob_, state.beta);
    summary.terminated_by = Termination::max_iter;

    for (std::size_t it = 0; it < cfg_.max_iter; ++it) {
        StepOutput out;
        try {
            out = step(state);
        } catch (const Error& e) {
            summary.terminated_by = Termination::failure;
            summary.message = e.what();
            break;
        }
        const Residuals res = residuals(state, out);
        const GMetric g = metric(state.beta);

        TraceRecord rec;
        rec.k = state.k;
        rec.beta = state.beta;
        rec.gamma = out.gamma_used;
        rec.r_norm = res.r_norm;
        rec.s_norm = res.s_norm;
        rec.ire = stopping_ire(state, out.next);
        const double dx_sq = std::max(g.norm_sq(out.next.x - state.x), 0.0);
        rec.dx_G = std::sqrt(dx_sq);
        rec.dy = (out.next.y - state.y).norm();
        rec.dlambda = (out.next.lambda - state.lambda).norm();
        rec.L_beta = augmented_lagrangian(out.next.w(), prob_, state.beta);
        rec.L_tilde = rec.L_beta + 0.5 * out.gamma_used * dx_sq;
        result.trace.push_back(rec);

        state = std::move(out.next);
        summary.iterations = it + 1;
        summary.final_ire = rec.ire;
        summary.final_equ = rec.r_norm;

        if (!std::isfinite(rec.ire) || !std::isfinite(rec.L_beta) || !state.x.allFinite() ||
            !state.lambda.allFinite()) {
            summary.terminated_by = Termination::failure;
            summary.message = "non-finite iterate";
            break;
        }
        if (rec.ire < cfg_.epsilon) {
            summary.terminated_by = Termination::converged;
            break;
        }
        if (cfg_.adapt_beta) {
            state.beta = adaptive_beta(state.beta, res.r_norm, res.s_norm, cfg_, prob_);
        }
    }

    summary.final_state = std::move(state);
    summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

StepOutput tas_admm_step(const IterateState& state, const ProblemInstance& prob,
                         const SolverConfig& cfg) {
    TasAdmm solver(prob, cfg);
    return solver.step(state);
}

Residuals residuals(const IterateState& prev, const StepOutput& out, const ProblemInstance& prob,
                    const SolverConfig& cfg) {
    return TasAdmm(prob, cfg).residuals(prev, out);
}

SolveResult solve(const ProblemInstance& prob, const SolverConfig& cfg) {
    return TasAdmm(prob, cfg).solve();
}

}  // namespace tasadm
