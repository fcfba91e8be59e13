#include "tasadm/prox.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tasadm {

const char* to_string(Regularizer r) noexcept {
    switch (r) {
        case Regularizer::none: return "none";
        case Regularizer::l_one: return "l1";
        case Regularizer::l_half: return "lhalf";
    }
    return "?";
}

void ProxSpec::validate() const {
    if (!(quad_weight > 0.0) || !std::isfinite(quad_weight)) {
        throw InvalidParameter("ProxSpec: quad_weight must be positive");
    }
    if (!(reg_weight >= 0.0) || !std::isfinite(reg_weight)) {
        throw InvalidParameter("ProxSpec: reg_weight must be nonnegative");
    }
}

Vector ProxSpec::apply(const Eigen::Ref<const Vector>& c) const {
    validate();
    const double ratio = reg_weight / quad_weight;
    switch (kind) {
        case Regularizer::none: return c;
        case Regularizer::l_one: return soft_threshold(c, ratio);
        case Regularizer::l_half: return ratio > 0.0 ? half_shrinkage(c, ratio) : Vector(c);
    }
    return c;
}

double half_shrinkage_threshold(double lambda) {
    const double nu = 2.0 * lambda;
    return 0.75 * std::cbrt(2.0) * std::pow(nu, 2.0 / 3.0);
}

Vector half_shrinkage(const Eigen::Ref<const Vector>& x, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw InvalidParameter("half_shrinkage: lambda must be positive");
    }
    const double nu = 2.0 * lambda;
    const double threshold = half_shrinkage_threshold(lambda);
    Vector out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        const double ax = std::abs(xi);
        if (!(ax > threshold)) {
            out[i] = 0.0;
            continue;
        }
        const double arg = std::min(1.0, nu / 8.0 * std::pow(ax / 3.0, -1.5));
        const double phi = std::acos(arg);
        out[i] = 2.0 * xi / 3.0 * (1.0 + std::cos(2.0 / 3.0 * (std::numbers::pi - phi)));
    }
    return out;
}

Vector soft_threshold(const Eigen::Ref<const Vector>& x, double kappa) {
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
        throw InvalidParameter("soft_threshold: kappa must be nonnegative");
    }
    Vector out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double mag = std::abs(x[i]) - kappa;
        out[i] = mag > 0.0 ? std::copysign(mag, x[i]) : 0.0;
    }
    return out;
}

double scalar_prox_objective(double t, double x, double lambda, ProxPower power) {
    const double reg = power == ProxPower::half ? std::sqrt(std::abs(t)) : std::abs(t);
    return lambda * reg + 0.5 * (t - x) * (t - x);
}

namespace {

// d/dt of the objective away from t = 0.
double stationarity(double t, double x, double lambda, ProxPower power) {
    const double s = t > 0.0 ? 1.0 : -1.0;
    const double reg = power == ProxPower::half ? 0.5 / std::sqrt(std::abs(t)) : 1.0;
    return s * lambda * reg + t - x;
}

}  // namespace

double scalar_prox_oracle(double x, double lambda, ProxPower power) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw InvalidParameter("scalar_prox_oracle: lambda must be positive");
    }
    constexpr int kSamples = 1'000'000;
    const double lo = -std::abs(x) - 1.0;
    const double hi = std::abs(x) + 1.0;
    const double h = (hi - lo) / (kSamples - 1);

    double best_t = lo;
    double best_f = scalar_prox_objective(lo, x, lambda, power);
    for (int i = 1; i < kSamples; ++i) {
        const double t = lo + h * i;
        const double f = scalar_prox_objective(t, x, lambda, power);
        if (f < best_f) {
            best_f = f;
            best_t = t;
        }
    }

    double result = best_t;
    double result_f = best_f;
    auto consider = [&](double t) {
        const double f = scalar_prox_objective(t, x, lambda, power);
        if (f < result_f) {
            result_f = f;
            result = t;
        }
    };
    consider(0.0);

    // Bisection on the stationarity condition within one grid cell on each
    // side, staying on the same side of the kink at 0.
    double a = best_t - h;
    double b = best_t + h;
    if (best_t > 0.0) {
        a = std::max(a, 0.5 * best_t);
    } else if (best_t < 0.0) {
        b = std::min(b, 0.5 * best_t);
    }
    if (best_t != 0.0 && a * b > 0.0) {
        const double da = stationarity(a, x, lambda, power);
        const double db = stationarity(b, x, lambda, power);
        if (da < 0.0 && db > 0.0) {
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (a + b);
                if (mid == a || mid == b) {
                    break;
                }
                const double dm = stationarity(mid, x, lambda, power);
                if (dm < 0.0) {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            consider(0.5 * (a + b));
        }
    }
    return result;
}

}  // namespace tasadm
