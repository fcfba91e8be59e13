#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>

#include "tasadm/problems.hpp"
#include "tasadm/solver.hpp"

using namespace tasadm;

namespace {

Matrix random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c) {
    Matrix m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i) m(i, j) = rng.gaussian();
    return m;
}

Vector random_vector(Rng& rng, Eigen::Index n) {
    Vector v(n);
    for (auto& e : v) e = rng.gaussian();
    return v;
}

// Random instance with quadratic g and full-column-rank B (n ≤ l).
ProblemInstance small_instance(Rng& rng, Eigen::Index l, Eigen::Index m, Eigen::Index n,
                               Regularizer reg) {
    return make_instance(random_matrix(rng, l, m), random_matrix(rng, l, n), random_vector(rng, l), reg,
                         0.1, QuadraticLoss{random_vector(rng, n)}, 1.0);
}

}  // namespace

TEST_CASE("Nesterov schedule values") {
    const NesterovStep s0 = nesterov_gamma_step(1.0);
    CHECK(s0.theta == doctest::Approx(0.5 * (1.0 + std::sqrt(5.0))).epsilon(1e-15));
    CHECK(s0.gamma == 0.0);
    const NesterovStep s1 = nesterov_gamma_step(s0.theta);
    CHECK(s1.theta == doctest::Approx(2.193530).epsilon(1e-6));
    CHECK(std::abs(s1.gamma - 0.140877) <= 1e-6);

    double theta = 1.0;
    double prev = -1.0;
    for (int k = 0; k < 10000; ++k) {
        const NesterovStep s = nesterov_gamma_step(theta);
        CHECK(s.gamma > prev);
        CHECK(s.gamma < 0.5);
        prev = s.gamma;
        theta = s.theta;
    }
}

TEST_CASE("x_update: pass-through at a feasible zero-multiplier point") {
    Rng rng(1);
    const Vector x = random_vector(rng, 3);
    auto prob = make_instance(Matrix::Identity(3, 3), -Matrix::Identity(3, 3), Vector::Zero(3),
                              Regularizer::none, 0.0, QuadraticLoss{Vector::Zero(3)}, 1.0);
    IterateState st;
    st.x = x;
    st.x_prev = x;
    st.y = x;
    st.lambda = Vector::Zero(3);
    const GMetric g = GMetric::from_rule(1.01, 0.7, prob.a, 1.0);
    const XUpdate xu = x_update(st, prob, g, 0.0);
    CHECK((xu.x_new - x).norm() <= 1e-15);
    CHECK((xu.x_md - x).norm() == 0.0);
}

TEST_CASE("x_update: half shrinkage with mu/sigma = 0.5") {
    const double beta = 2.0;
    const double sigma = 1.01 * beta;
    auto prob = make_instance(Matrix::Identity(3, 3), -Matrix::Identity(3, 3), Vector::Zero(3),
                              Regularizer::l_half, 0.5 * sigma, QuadraticLoss{Vector::Zero(3)}, 1.0);
    IterateState st;
    st.x = Vector::Constant(3, 2.0);
    st.x_prev = st.x;
    st.y = st.x;
    st.lambda = Vector::Zero(3);
    const GMetric g = GMetric::from_rule(1.01, beta, prob.a, 1.0);
    const XUpdate xu = x_update(st, prob, g, 0.0);
    for (Eigen::Index i = 0; i < 3; ++i) CHECK(xu.x_new[i] == doctest::Approx(1.8144020).epsilon(1e-7));
}

TEST_CASE("x_update matches a brute-force scan of the 1-D subproblem") {
    Rng rng(23);
    for (int t = 0; t < 5; ++t) {
        const double a = rng.gaussian();
        const double bcoef = rng.gaussian();
        const double bvec = rng.gaussian();
        Matrix am(1, 1), bm(1, 1);
        am << a;
        bm << bcoef;
        Vector bv(1);
        bv << bvec;
        const Regularizer reg = t % 2 == 0 ? Regularizer::l_half : Regularizer::l_one;
        const double mu = 0.3 + rng.uniform();
        auto prob = make_instance(am, bm, bv, reg, mu, QuadraticLoss{Vector::Zero(1)}, 1.0);
        IterateState st;
        st.x = Vector::Constant(1, 2.0 * rng.gaussian());
        st.x_prev = Vector::Constant(1, st.x[0] - rng.gaussian());
        st.y = Vector::Constant(1, rng.gaussian());
        st.lambda = Vector::Constant(1, rng.gaussian());
        const double beta = 0.5 + rng.uniform();
        const double gamma = 0.3;
        const GMetric g = GMetric::from_rule(1.01, beta, prob.a, a * a);
        const double x_new = x_update(st, prob, g, gamma).x_new[0];

        const double x_md = st.x[0] + gamma * (st.x[0] - st.x_prev[0]);
        const double gm = g.sigma() - beta * a * a;
        auto objective = [&](double x) {
            const double r = a * x + bcoef * st.y[0] - bvec;
            const double f = reg == Regularizer::l_half ? mu * std::sqrt(std::abs(x)) : mu * std::abs(x);
            return f - st.lambda[0] * r + 0.5 * beta * r * r + 0.5 * gm * (x - x_md) * (x - x_md);
        };
        double best = 0.0;
        double best_val = std::numeric_limits<double>::infinity();
        const int samples = 1000000;
        for (int i = 0; i <= samples; ++i) {
            const double x = -5.0 + 10.0 * i / samples;
            const double v = objective(x);
            if (v < best_val) {
                best_val = v;
                best = x;
            }
        }
        if (std::abs(x_new) < 5.0) {
            CHECK(std::abs(x_new - best) <= 1e-4);
        }
        CHECK(objective(x_new) <= best_val + 1e-9);
    }
}

TEST_CASE("y_update closed form for B = -I") {
    {
        auto prob = make_instance(Matrix::Identity(1, 1), -Matrix::Identity(1, 1), Vector::Zero(1),
                                  Regularizer::none, 0.0, QuadraticLoss{Vector::Zero(1)}, 1.0);
        CHECK(y_update(Vector::Zero(1), Vector::Zero(1), prob, 1.0)[0] == 0.0);
    }
    auto prob = make_instance(Matrix::Identity(1, 1), -Matrix::Identity(1, 1), Vector::Zero(1),
                              Regularizer::none, 0.0, QuadraticLoss{Vector::Constant(1, 2.0)}, 1.0);
    CHECK(y_update(Vector::Constant(1, 1.0), Vector::Constant(1, 1.0), prob, 1.0)[0] ==
          doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("y_update satisfies its first-order condition for general B") {
    Rng rng(31);
    auto prob = small_instance(rng, 6, 5, 4, Regularizer::none);
    const Vector x_ad = random_vector(rng, 6);
    const Vector lh = random_vector(rng, 6);
    const double beta = 0.8;
    const Vector y = y_update(x_ad, lh, prob, beta);
    const Vector foc = g_gradient(prob, y) - prob.apply_bt(lh) + beta * prob.apply_bt(x_ad + prob.apply_b(y) - prob.b);
    CHECK(foc.norm() <= 1e-12);
    CHECK_THROWS_AS(y_update(Vector::Zero(5), lh, prob, beta), DimensionMismatch);
}

TEST_CASE("y_update on logistic loss reaches the inner tolerance") {
    const ProblemInstance prob = gen_logistic_erm(30, 5, 0.01, 2);
    Rng rng(3);
    const Vector x_ad = random_vector(rng, 5);
    const Vector lh = random_vector(rng, 5);
    const double beta = 0.5;
    const Vector y = y_update(x_ad, lh, prob, beta);
    const Vector foc = g_gradient(prob, y) - prob.apply_bt(lh) + beta * prob.apply_bt(x_ad + prob.apply_b(y) - prob.b);
    CHECK(foc.norm() <= 1e-10 * (1.0 + y.norm()));
}

TEST_CASE("one step: dual identity and the residual identity") {
    Rng rng(41);
    for (int t = 0; t < 10; ++t) {
        const auto prob = small_instance(rng, 4, 6, 4, Regularizer::l_one);
        SolverConfig cfg;
        cfg.beta0 = 0.3 + rng.uniform();
        IterateState st = initial_state(prob, cfg);
        st.x = random_vector(rng, 6);
        st.x_prev = random_vector(rng, 6);
        st.y = random_vector(rng, 4);
        st.lambda = random_vector(rng, 4);
        TasAdmm solver(prob, cfg);
        const StepOutput out = solver.step(st);
        const Vector dl = out.next.lambda - st.lambda;
        const Vector bdy = prob.apply_b(out.next.y - st.y);
        const Vector lhs = *prob.a * out.next.x + prob.apply_b(st.y) - prob.b;
        const Vector id = (cfg.tau + cfg.alpha) * lhs + dl / cfg.beta0 + bdy;
        CHECK(id.norm() <= 1e-10 * (1.0 + out.next.lambda.norm()));
        const Vector dual = prob.apply_bt(out.next.lambda) - g_gradient(prob, out.next.y);
        CHECK(dual.norm() <= 1e-10 * (1.0 + out.next.lambda.norm()));

        const Residuals res = solver.residuals(st, out);
        const Vector r_alt = -(dl / cfg.beta0 + bdy) / (cfg.tau + cfg.alpha) + bdy;
        CHECK(res.r_norm == doctest::Approx(r_alt.norm()).epsilon(1e-9));
    }
}

TEST_CASE("multiplier change is bounded by L_g times the y change") {
    Rng rng(43);
    for (int t = 0; t < 10; ++t) {
        const auto prob = small_instance(rng, 6, 8, 4, Regularizer::l_half);
        SolverConfig cfg;
        cfg.start = StartMode::dual_consistent;
        IterateState st = initial_state(prob, cfg);
        CHECK((prob.apply_bt(st.lambda) - g_gradient(prob, st.y)).norm() <= 1e-10);
        TasAdmm solver(prob, cfg);
        for (int k = 0; k < 30; ++k) {
            const StepOutput out = solver.step(st);
            const double lhs = prob.apply_bt(out.next.lambda - st.lambda).norm();
            const double rhs = prob.lipschitz_g * (out.next.y - st.y).norm();
            CHECK(lhs <= rhs + 1e-9);
            st = out.next;
        }
    }
}

TEST_CASE("dual-consistent start needs grad g(y0) in range(B^T)") {
    Matrix bt_short(1, 2);
    bt_short << 1.0, 0.0;
    // B = [1 0] (1×2): Bᵀλ spans only the first axis, so a gradient with a
    // second component cannot be matched.
    auto prob = make_instance(Matrix::Identity(1, 1), bt_short, Vector::Zero(1), Regularizer::none, 0.0,
                              QuadraticLoss{Vector::Zero(2)}, 1.0);
    SolverConfig cfg;
    cfg.start = StartMode::dual_consistent;
    CHECK_NOTHROW(initial_state(prob, cfg));  // y0 = c, gradient 0
    auto logi = make_instance(Matrix::Identity(1, 1), bt_short, Vector::Zero(1), Regularizer::none, 0.0,
                              LogisticLoss{Matrix::Ones(1, 2), Vector::Ones(1)}, 1.0);
    CHECK_THROWS_AS(initial_state(logi, cfg), UnsupportedInstance);
}

TEST_CASE("stationary point is a fixed point") {
    Rng rng(5);
    const Vector c = random_vector(rng, 3);
    auto prob = make_instance(Matrix::Identity(3, 3), -Matrix::Identity(3, 3), Vector::Zero(3),
                              Regularizer::none, 0.0, QuadraticLoss{c}, 1.0);
    SolverConfig cfg;
    IterateState st = initial_state(prob, cfg);
    st.x = c;
    st.x_prev = c;
    st.y = c;
    st.lambda = Vector::Zero(3);
    TasAdmm solver(prob, cfg);
    const StepOutput out = solver.step(st);
    CHECK((out.next.x - st.x).norm() <= 1e-15);
    CHECK((out.next.y - st.y).norm() <= 1e-15);
    CHECK((out.next.lambda - st.lambda).norm() <= 1e-15);
    const Residuals res = solver.residuals(st, out);
    CHECK(res.r_norm <= 1e-15);
    CHECK(res.s_norm <= 1e-14);
}

TEST_CASE("1-D step matches the hand computation") {
    // A = B = 1, b = 0, g = y²/2, f = 0, τ = 0.5, α = 0.25, β = 1, σ = 1.01,
    // from (x, x_prev, y, λ) = (1, 1, 0, 0):
    // x⁺ = 1/101, y⁺ = λ⁺ = −0.375/101, r = 0.625/101, s = 0.375/101.
    auto prob = make_instance(Matrix::Ones(1, 1), Matrix::Ones(1, 1), Vector::Zero(1), Regularizer::none,
                              0.0, QuadraticLoss{Vector::Zero(1)}, 1.0);
    SolverConfig cfg;
    cfg.tau = 0.5;
    cfg.alpha = 0.25;
    cfg.beta0 = 1.0;
    IterateState st = initial_state(prob, cfg);
    st.x = Vector::Ones(1);
    st.x_prev = st.x;
    st.lambda = Vector::Zero(1);
    TasAdmm solver(prob, cfg);
    const StepOutput out = solver.step(st);
    CHECK(out.gamma_used == 0.0);
    CHECK(out.next.x[0] == doctest::Approx(1.0 / 101.0).epsilon(1e-13));
    CHECK(out.next.y[0] == doctest::Approx(-0.375 / 101.0).epsilon(1e-13));
    CHECK(out.next.lambda[0] == doctest::Approx(-0.375 / 101.0).epsilon(1e-13));
    CHECK(out.lambda_half[0] == doctest::Approx(-0.5 / 101.0).epsilon(1e-13));
    CHECK(out.x_ad[0] == doctest::Approx(0.25 / 101.0).epsilon(1e-13));
    const Residuals res = solver.residuals(st, out);
    CHECK(res.r_norm == doctest::Approx(0.625 / 101.0).epsilon(1e-12));
    CHECK(res.s_norm == doctest::Approx(0.375 / 101.0).epsilon(1e-12));
}

TEST_CASE("adaptive_beta branches and cap") {
    auto prob = make_instance(Matrix::Identity(1, 1), -Matrix::Identity(1, 1), Vector::Zero(1),
                              Regularizer::none, 0.0, QuadraticLoss{Vector::Zero(1)}, 1.0);
    SolverConfig cfg;
    CHECK(adaptive_beta(0.04, 1.0, 0.05, cfg, prob) == doctest::Approx(0.08));
    CHECK(adaptive_beta(0.04, 0.05, 1.0, cfg, prob) == doctest::Approx(0.02));
    CHECK(adaptive_beta(0.04, 1.0, 1.0, cfg, prob) == 0.04);
    CHECK(adaptive_beta(0.04, 1.0, 0.1, cfg, prob) == 0.04);  // r = ν·s exactly: unchanged
    const double cap = 1.01 / std::sqrt(1.0 - 0.97);
    CHECK(compliant_beta(prob, cfg) == doctest::Approx(cap).epsilon(1e-14));
    CHECK(compliant_beta(prob, cfg) == doctest::Approx(5.8312377).epsilon(1e-7));
    CHECK(adaptive_beta(5.0, 1.0, 0.01, cfg, prob) == doctest::Approx(cap).epsilon(1e-14));
    cfg.beta_cap_enabled = false;
    CHECK(adaptive_beta(5.0, 1.0, 0.01, cfg, prob) == 10.0);
}

TEST_CASE("stopping_ire") {
    IterateState a;
    a.x = Vector::Constant(1, 0.1);
    a.y = Vector::Constant(1, 0.2);
    a.lambda = Vector::Constant(1, 0.3);
    CHECK(stopping_ire(a, a) == 0.0);
    IterateState b = a;
    b.x[0] += 0.5;
    CHECK(stopping_ire(a, b) == doctest::Approx(0.5));
    a.lambda[0] = 4.0;
    b.lambda[0] = 4.0;
    b.y[0] = 0.2 + 3.0;
    // max(0.5, 3, 0) / max(0.1, 0.2, 4, 1)
    CHECK(stopping_ire(a, b) == doctest::Approx(0.75));
}

TEST_CASE("SolverConfig validation") {
    SolverConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.tau = 0.7;
    CHECK_THROWS_AS(cfg.validate(), InvalidParameter);
    cfg.tau = -0.32;
    CHECK_THROWS_AS(cfg.validate(), InvalidParameter);
    cfg = SolverConfig{};
    cfg.gamma_mode = GammaMode::fixed;
    cfg.gamma_fixed = 0.5;
    CHECK_THROWS_AS(cfg.validate(), InvalidParameter);
    cfg = SolverConfig{};
    cfg.epsilon = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidParameter);
    cfg = SolverConfig{};
    cfg.beta0 = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidParameter);
}

TEST_CASE("solve converges to the origin on the trivial instance") {
    auto prob = make_instance(Matrix::Identity(3, 3), Matrix::Identity(3, 3), Vector::Zero(3),
                              Regularizer::none, 0.0, QuadraticLoss{Vector::Zero(3)}, 1.0);
    SolverConfig cfg;
    cfg.adapt_beta = false;
    cfg.beta0 = compliant_beta(prob, cfg);
    cfg.epsilon = 1e-12;
    cfg.max_iter = 200;
    const SolveResult res = solve(prob, cfg);
    CHECK(res.summary.terminated_by == Termination::converged);
    CHECK(res.summary.iterations <= 200);
    CHECK(res.summary.final_state.x.norm() <= 1e-9);
    CHECK(res.summary.final_state.y.norm() <= 1e-9);
    CHECK(res.summary.final_state.lambda.norm() <= 1e-9);
    CHECK(res.trace.size() == res.summary.iterations);
}

TEST_CASE("huge epsilon stops after one iteration") {
    SparseRecoverySpec spec;
    spec.l = 20;
    spec.m = 40;
    spec.spikes = 3;
    const auto sr = gen_sparse_recovery(spec);
    SolverConfig cfg;
    cfg.epsilon = 1e30;
    const SolveResult res = solve(sr.problem, cfg);
    CHECK(res.summary.iterations == 1);
    CHECK(res.summary.terminated_by == Termination::converged);
}

TEST_CASE("solve is deterministic and adapts beta between steps") {
    SparseRecoverySpec spec;
    spec.l = 32;
    spec.m = 96;
    spec.spikes = 5;
    const auto sr = gen_sparse_recovery(spec);
    SolverConfig cfg;
    cfg.max_iter = 100;
    const SolveResult a = solve(sr.problem, cfg);
    const SolveResult b = solve(sr.problem, cfg);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(a.trace[i].L_beta == b.trace[i].L_beta);
        CHECK(a.trace[i].beta == b.trace[i].beta);
    }
    CHECK(a.trace.front().beta == cfg.beta0);
    for (const auto& rec : a.trace) CHECK(rec.beta <= compliant_beta(sr.problem, cfg) + 1e-15);
}

TEST_CASE("desk-scale sparse recovery reaches feasibility") {
    SparseRecoverySpec spec;
    spec.l = 256;
    spec.m = 768;
    spec.spikes = 40;
    spec.mu_factor = 0.01;
    const auto sr = gen_sparse_recovery(spec);
    SolverConfig cfg;
    const SolveResult res = solve(sr.problem, cfg);
    CHECK(res.summary.terminated_by == Termination::converged);
    CHECK(res.summary.final_equ < 1e-8);
}

TEST_CASE("logistic instance solves without failure") {
    const ProblemInstance prob = gen_logistic_erm(60, 8, 0.01, 4);
    SolverConfig cfg;
    cfg.max_iter = 50;
    const SolveResult res = solve(prob, cfg);
    CHECK(res.summary.terminated_by != Termination::failure);
    const Vector dual = prob.apply_bt(res.summary.final_state.lambda) - g_gradient(prob, res.summary.final_state.y);
    CHECK(dual.norm() <= 1e-8);
}
