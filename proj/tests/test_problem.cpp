#include <doctest.h>

#include <cmath>

#include "tasadm/problem.hpp"
#include "tasadm/problems.hpp"

using namespace tasadm;

namespace {

Vector random_vector(Rng& rng, Eigen::Index n, double scale = 1.0) {
    Vector v(n);
    for (auto& e : v) e = scale * rng.gaussian();
    return v;
}

}  // namespace

TEST_CASE("make_instance computes sigma_B and flags B = -I") {
    Matrix b(2, 2);
    b << 0, 1, 0, 2;
    const auto p = make_instance(Matrix::Identity(2, 3), b, Vector::Zero(2), Regularizer::none, 0.0,
                                 QuadraticLoss{Vector::Zero(2)}, 1.0);
    CHECK(p.sigma_b == doctest::Approx(5.0).epsilon(1e-12));
    CHECK_FALSE(p.b_is_negative_identity());
    const auto q = make_instance(Matrix::Identity(2, 3), -Matrix::Identity(2, 2), Vector::Zero(2),
                                 Regularizer::none, 0.0, QuadraticLoss{Vector::Zero(2)}, 1.0);
    CHECK(q.sigma_b == 1.0);
    CHECK(q.b_is_negative_identity());
}

TEST_CASE("make_instance rejects inconsistent data") {
    const QuadraticLoss g{Vector::Zero(2)};
    CHECK_THROWS_AS(make_instance(Matrix::Identity(3, 3), -Matrix::Identity(2, 2), Vector::Zero(2),
                                  Regularizer::none, 0.0, g, 1.0),
                    DimensionMismatch);
    CHECK_THROWS_AS(make_instance(Matrix::Identity(2, 2), -Matrix::Identity(2, 2), Vector::Zero(3),
                                  Regularizer::none, 0.0, g, 1.0),
                    DimensionMismatch);
    CHECK_THROWS_AS(make_instance(Matrix::Identity(2, 2), -Matrix::Identity(2, 2), Vector::Zero(2),
                                  Regularizer::l_one, -1.0, g, 1.0),
                    InvalidParameter);
    CHECK_THROWS(make_instance(Matrix::Identity(2, 2), Matrix::Zero(2, 2), Vector::Zero(2),
                               Regularizer::none, 0.0, g, 1.0));
    LogisticLoss bad{Matrix::Ones(2, 2), Vector::Constant(2, 0.5)};
    CHECK_THROWS_AS(make_instance(Matrix::Identity(2, 2), -Matrix::Identity(2, 2), Vector::Zero(2),
                                  Regularizer::none, 0.0, bad, 1.0),
                    InvalidInput);
}

TEST_CASE("f and g values") {
    Vector x(3);
    x << 4.0, -9.0, 0.0;
    auto p = make_instance(Matrix::Identity(3, 3), -Matrix::Identity(3, 3), Vector::Zero(3),
                           Regularizer::l_half, 0.5, QuadraticLoss{Vector::Ones(3)}, 1.0);
    CHECK(f_value(p, x) == doctest::Approx(0.5 * 5.0));
    p.f_kind = Regularizer::l_one;
    CHECK(f_value(p, x) == doctest::Approx(0.5 * 13.0));
    p.f_kind = Regularizer::none;
    CHECK(f_value(p, x) == 0.0);
    CHECK(g_value(p, Vector::Ones(3)) == 0.0);
    CHECK(g_value(p, Vector::Zero(3)) == doctest::Approx(1.5));
    CHECK((g_gradient(p, x) - (x - Vector::Ones(3))).norm() == 0.0);
    CHECK((p.constraint_residual(x, x)).norm() == 0.0);
}

TEST_CASE("logistic loss: value at zero, gradient and curvature") {
    const ProblemInstance p = gen_logistic_erm(40, 6, 0.01, 3);
    Rng rng(17);
    CHECK(g_value(p, Vector::Zero(6)) == doctest::Approx(std::log(2.0)).epsilon(1e-14));

    for (int t = 0; t < 20; ++t) {
        const Vector y = random_vector(rng, 6);
        const Vector grad = g_gradient(p, y);
        const double h = 1e-5;
        for (Eigen::Index i = 0; i < 6; ++i) {
            Vector e = Vector::Zero(6);
            e[i] = h;
            const double fd = (g_value(p, y + e) - g_value(p, y - e)) / (2.0 * h);
            CHECK(std::abs(fd - grad[i]) <= 1e-6);
        }
    }

    // directional curvature dᵀ∇²g d ≤ L_g‖d‖² via central differences of ∇g
    for (int t = 0; t < 100; ++t) {
        const Vector y = random_vector(rng, 6, 0.3);
        Vector d = random_vector(rng, 6);
        d.normalize();
        const double h = 1e-4;
        const double curv = d.dot(g_gradient(p, y + h * d) - g_gradient(p, y - h * d)) / (2.0 * h);
        CHECK(curv <= p.lipschitz_g + 1e-9);
    }
}

TEST_CASE("logistic loss is stable for large margins") {
    LogisticLoss loss{Matrix::Constant(1, 1, 1.0), Vector::Constant(1, 1.0)};
    Vector y(1);
    y << 800.0;
    CHECK(std::isfinite(logistic_value(loss, y)));
    CHECK(logistic_value(loss, y) >= 0.0);
    y << -800.0;
    CHECK(logistic_value(loss, y) == doctest::Approx(800.0));
    CHECK(logistic_gradient(loss, y)[0] == doctest::Approx(-1.0));
}
