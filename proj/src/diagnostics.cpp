#include "tasadm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tasadm {

double augmented_lagrangian(const PrimalDual& w, const ProblemInstance& prob, double beta) {
    require_dim(w.x.size(), prob.x_dim(), "augmented_lagrangian: x");
    require_dim(w.y.size(), prob.y_dim(), "augmented_lagrangian: y");
    require_dim(w.lambda.size(), prob.rows(), "augmented_lagrangian: lambda");
    const Vector r = prob.constraint_residual(w.x, w.y);
    return f_value(prob, w.x) + g_value(prob, w.y) - w.lambda.dot(r) + 0.5 * beta * r.squaredNorm();
}

double tilde_lagrangian(const PrimalDual& w, const Eigen::Ref<const Vector>& dx_prev, double gamma,
                        const GMetric& g, const ProblemInstance& prob, double beta) {
    return augmented_lagrangian(w, prob, beta) + 0.5 * gamma * g.norm_sq(dx_prev);
}

ZetaConstants zeta_constants(double gamma, double tau, double alpha, double beta,
                             double lipschitz_g, double sigma_b) {
    ZetaConstants z;
    z.zeta0 = 0.5 * gamma;
    z.zeta1 = 0.5 * (1.0 - 2.0 * gamma);
    const double ta = tau + alpha;
    z.zeta2 = ((1.0 - ta) * beta * beta * sigma_b * sigma_b - lipschitz_g * lipschitz_g) /
              (ta * beta * sigma_b);
    z.penalty_ok = z.zeta2 > 0.0;
    z.zeta3 = z.penalty_ok ? lipschitz_g * lipschitz_g / z.zeta2
                         : std::numeric_limits<double>::quiet_NaN();
    return z;
}

DescentAudit audit_descent(const std::vector<TraceRecord>& trace, const AuditParams& params) {
    DescentAudit report;
    report.worst_margin = std::numeric_limits<double>::infinity();
    double prev_L = params.initial_L;
    double prev_dx_sq = 0.0;  // Δx_0 = 0
    for (const auto& rec : trace) {
        const ZetaConstants z = zeta_constants(rec.gamma, params.tau, params.alpha, rec.beta,
                                               params.lipschitz_g, params.sigma_b);
        report.penalty_ok = report.penalty_ok && z.penalty_ok;
        const double dx_sq = rec.dx_G * rec.dx_G;
        const double before = prev_L + z.zeta0 * prev_dx_sq;
        const double after = rec.L_beta + z.zeta0 * dx_sq;
        const double required = z.zeta1 * dx_sq + z.zeta2 * rec.dy * rec.dy;
        const double tol = 1e-9 * (1.0 + std::abs(after));
        const double margin = (before - after) - required + tol;
        report.worst_margin = std::min(report.worst_margin, margin);
        if (margin < 0.0) {
            report.violations.push_back(rec.k);
        }
        ++report.checked;
        prev_L = rec.L_beta;
        prev_dx_sq = dx_sq;
    }
    return report;
}

RateBoundAudit audit_rate_bounds(const std::vector<TraceRecord>& trace, const AuditParams& params,
                                 const ProblemInstance& prob, Zeta3Form form) {
    if (!prob.lower_bound) {
        throw UnsupportedInstance("audit_rate_bounds: instance has no known lower bound");
    }
    RateBoundAudit report;
    report.c0 = params.initial_L - *prob.lower_bound;

    double min_dx = std::numeric_limits<double>::infinity();
    double min_dy = min_dx;
    double min_dl = min_dx;
    double max_gamma = 0.0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const auto& rec = trace[i];
        max_gamma = std::max(max_gamma, rec.gamma);
        const ZetaConstants z = zeta_constants(max_gamma, params.tau, params.alpha, rec.beta,
                                               params.lipschitz_g, params.sigma_b);
        report.penalty_ok = report.penalty_ok && z.penalty_ok;
        min_dx = std::min(min_dx, rec.dx_G * rec.dx_G);
        min_dy = std::min(min_dy, rec.dy * rec.dy);
        min_dl = std::min(min_dl, rec.dlambda * rec.dlambda);

        const double steps = static_cast<double>(i + 1);
        auto bound = [&](double zeta) {
            return zeta > 0.0 ? report.c0 / (zeta * steps) : std::numeric_limits<double>::infinity();
        };
        const double slack = 1e-12 * (1.0 + std::abs(report.c0));
        if (min_dx > bound(z.zeta1) + slack) {
            report.dx_violations.push_back(rec.k);
        }
        if (min_dy > bound(z.zeta2) + slack) {
            report.dy_violations.push_back(rec.k);
        }
        const double zeta3 = form == Zeta3Form::printed
                                 ? z.zeta3
                                 : params.sigma_b * z.zeta2 / (params.lipschitz_g * params.lipschitz_g);
        if (!(min_dl <= bound(zeta3) + slack)) {
            report.dlambda_violations.push_back(rec.k);
        }
        ++report.checked;
    }
    return report;
}

StationarityGap stationarity_gap(const PrimalDual& w, const ProblemInstance& prob) {
    StationarityGap gap;
    const Vector v = prob.a->transpose() * w.lambda;
    Vector dist(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double xi = w.x[i];
        switch (prob.f_kind) {
            case Regularizer::none:
                dist[i] = v[i];
                break;
            case Regularizer::l_one:
                dist[i] = xi != 0.0 ? v[i] - std::copysign(prob.mu, xi)
                                    : std::max(std::abs(v[i]) - prob.mu, 0.0);
                break;
            case Regularizer::l_half:
                // limiting subdifferential of |t|^{1/2} at 0 is all of R
                dist[i] = xi != 0.0 ? v[i] - std::copysign(0.5 * prob.mu / std::sqrt(std::abs(xi)), xi)
                                    : 0.0;
                break;
        }
    }
    gap.gx = dist.norm();
    gap.gy = (prob.apply_bt(w.lambda) - g_gradient(prob, w.y)).norm();
    gap.gl = prob.constraint_residual(w.x, w.y).norm();
    return gap;
}

}  // namespace tasadm
