#include "tasadm/problem.hpp"

#include <cmath>

namespace tasadm {

namespace {

// log(1 + exp(z)) without overflow.
double log1pexp(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

// 1 / (1 + exp(−z)).
double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

void ProblemInstance::validate() const {
    if (!a || !b_mat) {
        throw InvalidInput("ProblemInstance: missing A or B");
    }
    require_dim(b_mat->rows(), a->rows(), "ProblemInstance: rows(B)");
    require_dim(b.size(), a->rows(), "ProblemInstance: len(b)");
    require_finite(*a, "ProblemInstance: A");
    require_finite(*b_mat, "ProblemInstance: B");
    require_finite(b, "ProblemInstance: b");
    if (b_mat->isZero(0.0)) {
        throw InvalidInput("ProblemInstance: B must be nonzero");
    }
    if (!(mu >= 0.0) || !std::isfinite(mu)) {
        throw InvalidParameter("ProblemInstance: mu must be nonnegative");
    }
    if (!(lipschitz_g >= 0.0) || !std::isfinite(lipschitz_g)) {
        throw InvalidParameter("ProblemInstance: L_g must be nonnegative");
    }
    if (!(sigma_b > 0.0) || !std::isfinite(sigma_b)) {
        throw InvalidParameter("ProblemInstance: sigma_B must be positive");
    }
    if (const auto* q = std::get_if<QuadraticLoss>(&g)) {
        require_dim(q->c.size(), y_dim(), "ProblemInstance: len(c)");
        require_finite(q->c, "ProblemInstance: c");
    } else {
        const auto& lg = std::get<LogisticLoss>(g);
        require_dim(lg.features.cols(), y_dim(), "ProblemInstance: logistic feature dimension");
        require_dim(lg.labels.size(), lg.features.rows(), "ProblemInstance: logistic labels");
        if (lg.features.rows() == 0) {
            throw InvalidInput("ProblemInstance: logistic loss needs at least one sample");
        }
        for (Eigen::Index j = 0; j < lg.labels.size(); ++j) {
            if (lg.labels[j] != 1.0 && lg.labels[j] != -1.0) {
                throw InvalidInput("ProblemInstance: logistic labels must be +-1");
            }
        }
    }
}

void ProblemInstance::refresh_structure() {
    b_neg_identity_ = b_mat && b_mat->rows() == b_mat->cols() &&
                      (*b_mat + Matrix::Identity(b_mat->rows(), b_mat->cols())).isZero(0.0);
}

Vector ProblemInstance::apply_b(const Eigen::Ref<const Vector>& y) const {
    if (b_neg_identity_) {
        return -y;
    }
    return *b_mat * y;
}

Vector ProblemInstance::apply_bt(const Eigen::Ref<const Vector>& v) const {
    if (b_neg_identity_) {
        return -v;
    }
    return b_mat->transpose() * v;
}

Vector ProblemInstance::constraint_residual(const Eigen::Ref<const Vector>& x,
                                            const Eigen::Ref<const Vector>& y) const {
    return *a * x + apply_b(y) - b;
}

ProblemInstance make_instance(Matrix a, Matrix b_mat, Vector b, Regularizer f_kind, double mu,
                              SmoothLoss g, double lipschitz_g, std::optional<double> sigma_b,
                              std::optional<double> lower_bound) {
    ProblemInstance p;
    const bool compute_sigma = !sigma_b.has_value();
    if (compute_sigma) {
        sigma_b = smallest_positive_eigenvalue(b_mat);
    }
    p.a = std::make_shared<const Matrix>(std::move(a));
    p.b_mat = std::make_shared<const Matrix>(std::move(b_mat));
    p.b = std::move(b);
    p.f_kind = f_kind;
    p.mu = mu;
    p.g = std::move(g);
    p.lipschitz_g = lipschitz_g;
    p.sigma_b = *sigma_b;
    p.lower_bound = lower_bound;
    p.refresh_structure();
    p.validate();
    return p;
}

double f_value(const ProblemInstance& prob, const Eigen::Ref<const Vector>& x) {
    switch (prob.f_kind) {
        case Regularizer::none: return 0.0;
        case Regularizer::l_one: return prob.mu * x.lpNorm<1>();
        case Regularizer::l_half: return prob.mu * x.array().abs().sqrt().sum();
    }
    return 0.0;
}

double logistic_value(const LogisticLoss& loss, const Eigen::Ref<const Vector>& y) {
    const Vector margins = loss.features * y;
    double sum = 0.0;
    for (Eigen::Index j = 0; j < margins.size(); ++j) {
        sum += log1pexp(-loss.labels[j] * margins[j]);
    }
    return sum / static_cast<double>(margins.size());
}

Vector logistic_gradient(const LogisticLoss& loss, const Eigen::Ref<const Vector>& y) {
    const Vector margins = loss.features * y;
    Vector weights(margins.size());
    for (Eigen::Index j = 0; j < margins.size(); ++j) {
        weights[j] = -loss.labels[j] * sigmoid(-loss.labels[j] * margins[j]);
    }
    return loss.features.transpose() * weights / static_cast<double>(margins.size());
}

double g_value(const ProblemInstance& prob, const Eigen::Ref<const Vector>& y) {
    if (const auto* q = std::get_if<QuadraticLoss>(&prob.g)) {
        return 0.5 * (y - q->c).squaredNorm();
    }
    return logistic_value(std::get<LogisticLoss>(prob.g), y);
}

Vector g_gradient(const ProblemInstance& prob, const Eigen::Ref<const Vector>& y) {
    if (const auto* q = std::get_if<QuadraticLoss>(&prob.g)) {
        return y - q->c;
    }
    return logistic_gradient(std::get<LogisticLoss>(prob.g), y);
}

}  // namespace tasadm
