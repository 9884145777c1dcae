#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "llpauc/gradcheck.hpp"
#include "llpauc/loss.hpp"
#include "oracles.hpp"

using namespace llpauc;

namespace {

DualState random_dual(oracle::Gen& g) {
    DualState d;
    d.a = oracle::unif(g);
    d.b = oracle::unif(g);
    d.gamma = d.gamma_min() + (1.0 - d.gamma_min()) * oracle::unif(g);
    d.s_plus = 6.0 * oracle::unif(g) - 3.0;
    d.s_minus = 6.0 * oracle::unif(g) - 3.0;
    return d;
}

oracle::Dual to_oracle(const DualState& d) { return {d.a, d.b, d.gamma, d.s_plus, d.s_minus}; }

}  // namespace

TEST_CASE("pointwise pieces") {
    CHECK(square_surrogate(1.0) == 0.0);
    CHECK(square_surrogate(0.0) == 1.0);
    CHECK(square_surrogate(-1.0) == 4.0);
    CHECK(ell_plus(0.5, 0.5, 0.0) == -1.0);
    CHECK(ell_plus(0.0, 0.3, 0.7) == doctest::Approx(0.09));
    CHECK(ell_plus(1.0, 0.0, 0.0) == -1.0);
    CHECK(ell_minus(0.5, 0.5, 0.0) == 1.0);
    CHECK(ell_minus(0.0, 0.4, -0.2) == doctest::Approx(0.16));
    CHECK(ell_minus(1.0, 1.0, 0.0) == 2.0);
}

TEST_CASE("softplus is stable and close to the hinge") {
    CHECK(softplus_r(0.0, 1.0) == doctest::Approx(std::log(2.0)));
    CHECK(softplus_r(2.0, 10.0) == doctest::Approx(2.0 + 0.1 * std::log1p(std::exp(-20.0))).epsilon(1e-15));
    const double tiny = softplus_r(-50.0, 1.0);
    CHECK(std::isfinite(tiny));
    CHECK(tiny == doctest::Approx(std::exp(-50.0)).epsilon(1e-10));
    CHECK(std::isfinite(softplus_r(1e6, 20.0)));
    oracle::Gen g(31);
    for (int t = 0; t < 1000; ++t) {
        const double x = 40.0 * oracle::unif(g) - 20.0;
        const double k = 0.5 + 30.0 * oracle::unif(g);
        const double r = softplus_r(x, k);
        CHECK(r >= std::max(0.0, x));
        CHECK(r - std::max(0.0, x) <= std::log(2.0) / k + 1e-15);
    }
}

TEST_CASE("objective on hand-computed inputs") {
    const std::vector<double> p{0.0}, n{0.0};
    DualState d{0.0, 0.0, 0.0, 0.0, 0.0};
    const auto r = batch_objective(p, n, d, {1.0, 1.0, 1.0, 5.0});
    CHECK(r.value == doctest::Approx(0.0).epsilon(1e-15));

    // gamma = 0 drops the regularizer: value equals the oracle's sum of the two means
    oracle::Gen g(32);
    for (int t = 0; t < 100; ++t) {
        const auto pos = oracle::uniform_scores(g, oracle::between(g, 1, 6));
        const auto neg = oracle::uniform_scores(g, oracle::between(g, 1, 6));
        auto dual = random_dual(g);
        const LossHyper h{0.1 + 0.9 * oracle::unif(g), 0.1 + 0.9 * oracle::unif(g), 5.0, 21.0};
        CHECK(batch_objective(pos, neg, dual, h).value ==
              doctest::Approx(oracle::objective(pos, neg, to_oracle(dual), h.alpha, h.beta, h.kappa, h.w))
                  .epsilon(1e-12));
        dual = clip_dual(dual);
    }
}

TEST_CASE("objective rejects bad input") {
    const std::vector<double> p{0.5}, n{0.5}, bad{1.5}, none;
    DualState d;
    CHECK_THROWS_AS(batch_objective(bad, n, d, {}), std::invalid_argument);
    CHECK_THROWS_AS(batch_objective(none, n, d, {}), std::invalid_argument);
    DualState infeasible;
    infeasible.gamma = -0.9;  // below max(-a, b-1) = -0.5
    CHECK_THROWS_AS(batch_objective(p, n, infeasible, {}), std::invalid_argument);
    CHECK_THROWS_AS(batch_objective(p, n, d, {1.0, 1.0, 5.0, 20.0}), std::invalid_argument);
    try {
        LossHyper{1.0, 1.0, 5.0, 20.0}.validate();
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("4*kappa") != std::string::npos);
    }
}

TEST_CASE("property: analytic partials match central differences") {
    oracle::Gen g(33);
    const double h = 1e-5;
    GradcheckConfig tol;
    for (double kappa : {1.0, 5.0, 20.0}) {
        for (int t = 0; t < 40; ++t) {
            const auto pos = oracle::uniform_scores(g, oracle::between(g, 1, 6));
            const auto neg = oracle::uniform_scores(g, oracle::between(g, 1, 8));
            const DualState d = random_dual(g);
            const LossHyper hy{0.05 + 0.95 * oracle::unif(g), 0.05 + 0.95 * oracle::unif(g), kappa, 4 * kappa + 2};
            const auto r = batch_objective(pos, neg, d, hy);
            auto od = to_oracle(d);
            auto F = [&](std::vector<double> p, std::vector<double> n, oracle::Dual dd) {
                return oracle::objective(p, n, dd, hy.alpha, hy.beta, hy.kappa, hy.w);
            };
            for (std::size_t i = 0; i < pos.size(); ++i) {
                const double num = oracle::central([&](double x) { auto p = pos; p[i] = x; return F(p, neg, od); }, pos[i], h);
                CHECK(gradients_agree(r.grad_scores_pos[i], num, tol));
            }
            for (std::size_t j = 0; j < neg.size(); ++j) {
                const double num = oracle::central([&](double x) { auto n = neg; n[j] = x; return F(pos, n, od); }, neg[j], h);
                CHECK(gradients_agree(r.grad_scores_neg[j], num, tol));
            }
            auto along = [&](double oracle::Dual::*field) {
                return oracle::central([&](double x) { auto dd = od; dd.*field = x; return F(pos, neg, dd); }, od.*field, h);
            };
            CHECK(gradients_agree(r.grad_a, along(&oracle::Dual::a), tol));
            CHECK(gradients_agree(r.grad_b, along(&oracle::Dual::b), tol));
            CHECK(gradients_agree(r.grad_gamma, along(&oracle::Dual::gamma), tol));
            CHECK(gradients_agree(r.grad_s_plus, along(&oracle::Dual::s_plus), tol));
            CHECK(gradients_agree(r.grad_s_minus, along(&oracle::Dual::s_minus), tol));
        }
    }
}

TEST_CASE("gradcheck suite passes") {
    const auto rep = run_gradcheck({});
    CHECK(rep.ok());
    CHECK(rep.checks > 0);
    CHECK(rep.embedding_checks > 0);
}

TEST_CASE("gradients_agree tolerance rule") {
    GradcheckConfig c;
    CHECK(gradients_agree(1.0, 1.0 + 5e-5, c));
    CHECK_FALSE(gradients_agree(1.0, 1.0 + 5e-4, c));
    CHECK(gradients_agree(1e-9, 5e-8, c));
    CHECK_FALSE(gradients_agree(1e-4, 2e-4, c));
}

TEST_CASE("property: objective is concave in gamma when w > 4 kappa") {
    oracle::Gen g(34);
    for (int t = 0; t < 200; ++t) {
        const double kappa = 0.5 + 20.0 * oracle::unif(g);
        const LossHyper hy{0.05 + 0.95 * oracle::unif(g), 0.05 + 0.95 * oracle::unif(g), kappa, 4.0 * kappa + 1.0};
        const auto pos = oracle::uniform_scores(g, oracle::between(g, 1, 10));
        const auto neg = oracle::uniform_scores(g, oracle::between(g, 1, 10));
        DualState d = random_dual(g);
        const double h = 1e-3;
        auto at = [&](double gm) {
            DualState x = d;
            x.gamma = gm;
            return batch_objective_value(pos, neg, x, hy);
        };
        CHECK(at(d.gamma + h) - 2.0 * at(d.gamma) + at(d.gamma - h) <= 0.0);
    }
}

TEST_CASE("monotonicity of the decoupled losses under the gamma constraint") {
    oracle::Gen g(35);
    for (int t = 0; t < 500; ++t) {
        DualState d = random_dual(g);
        for (double f : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            CHECK(d_ell_plus_df(f, d.a, d.gamma) <= 1e-15);
            CHECK(d_ell_minus_df(f, d.b, d.gamma) >= -1e-15);
        }
    }
}

TEST_CASE("clip_dual") {
    auto c = clip_dual({1.2, -0.1, 2.0, 5.0, -5.0});
    CHECK(c.a == 1.0);
    CHECK(c.b == 0.0);
    CHECK(c.gamma == 1.0);
    CHECK(c.s_plus == 5.0);
    CHECK(c.s_minus == -5.0);
    c = clip_dual({0.0, 1.0, -0.5, 0.0, 0.0});
    CHECK(c.gamma == 0.0);
    oracle::Gen g(36);
    for (int t = 0; t < 200; ++t) {
        const DualState d = random_dual(g);
        const auto e = clip_dual(d);
        CHECK(e.a == d.a);
        CHECK(e.b == d.b);
        CHECK(e.gamma == d.gamma);
        DualState wild{4.0 * oracle::unif(g) - 2.0, 4.0 * oracle::unif(g) - 2.0, 6.0 * oracle::unif(g) - 3.0, 1.0, 2.0};
        const auto w = clip_dual(wild);
        CHECK(w.feasible());
        CHECK(clip_dual(w).gamma == w.gamma);
    }
}

TEST_CASE("average top-k identity") {
    const std::vector<double> l{1.0, 2.0, 3.0};
    auto r = avg_topk_identity_check(l, 2.0 / 3.0, HeadSide::negative_min);
    CHECK(r.hard_sum == 5.0);
    CHECK(r.variational_opt == 5.0);
    CHECK(r.argopt == 2.0);
    r = avg_topk_identity_check(l, 1.0, HeadSide::negative_min);
    CHECK(r.hard_sum == 6.0);
    CHECK(r.variational_opt == 6.0);
    CHECK(r.argopt <= 1.0);
    r = avg_topk_identity_check(std::vector<double>{0.7}, 1.0, HeadSide::positive_max);
    CHECK(r.hard_sum == 0.7);
    CHECK(r.variational_opt == 0.7);
    // positive side keeps the k smallest losses
    r = avg_topk_identity_check(l, 2.0 / 3.0, HeadSide::positive_max);
    CHECK(r.hard_sum == 3.0);
    CHECK(r.variational_opt == 3.0);
    CHECK(r.argopt == -2.0);
    CHECK_THROWS_AS(avg_topk_identity_check(l, 0.5, HeadSide::negative_min), std::invalid_argument);
}

TEST_CASE("property: average top-k identity on random monotone losses") {
    oracle::Gen g(37);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = oracle::between(g, 1, 50);
        const std::size_t k = oracle::between(g, 1, n);
        const double rate = static_cast<double>(k) / static_cast<double>(n);
        // losses of a monotone function of random scores
        std::vector<double> l(n);
        for (double& x : l) x = ell_minus(oracle::unif(g), 0.5, 0.0);
        auto r = avg_topk_identity_check(l, rate, HeadSide::negative_min);
        auto sorted = l;
        std::sort(sorted.begin(), sorted.end(), std::greater<>());
        double head = 0.0;
        for (std::size_t i = 0; i < k; ++i) head += sorted[i];
        CHECK(r.hard_sum == doctest::Approx(head).epsilon(1e-12));
        CHECK(std::abs(r.hard_sum - r.variational_opt) <= 1e-12 * (1.0 + std::abs(head)));
        CHECK(r.argopt == sorted[k - 1]);
        // objective at argopt reproduces the optimum
        double v = static_cast<double>(k) * r.argopt;
        for (double x : l) v += std::max(x - r.argopt, 0.0);
        CHECK(v == doctest::Approx(r.variational_opt).epsilon(1e-12));

        for (double& x : l) x = ell_plus(oracle::unif(g), 0.5, 0.0);
        r = avg_topk_identity_check(l, rate, HeadSide::positive_max);
        sorted = l;
        std::sort(sorted.begin(), sorted.end());
        head = 0.0;
        for (std::size_t i = 0; i < k; ++i) head += sorted[i];
        CHECK(std::abs(r.hard_sum - head) <= 1e-12 * (1.0 + std::abs(head)));
        CHECK(std::abs(r.hard_sum - r.variational_opt) <= 1e-12 * (1.0 + std::abs(head)));
        CHECK(r.argopt == -sorted[k - 1]);
    }
}

TEST_CASE("BPR loss") {
    const std::vector<double> eq{0.4, 0.6}, eq2{0.4, 0.6};
    CHECK(bpr_loss(eq, eq2).value == doctest::Approx(std::log(2.0)));
    const std::vector<double> p{0.9}, n{0.1};
    const auto r = bpr_loss(p, n);
    CHECK(r.value == doctest::Approx(-std::log(oracle::sigmoid(0.8))));
    CHECK(r.value == doctest::Approx(0.3711).epsilon(1e-4));
    CHECK(bpr_loss(std::vector<double>{1e3}, std::vector<double>{-1e3}).value < 1e-12);
    const double h = 1e-6;
    const double num = (bpr_loss(std::vector<double>{0.9 + h}, n).value - bpr_loss(std::vector<double>{0.9 - h}, n).value) / (2 * h);
    CHECK(r.grad_pos[0] == doctest::Approx(num).epsilon(1e-6));
    CHECK(r.grad_neg[0] == doctest::Approx(-num).epsilon(1e-6));
    CHECK_THROWS_AS(bpr_loss(p, eq), std::invalid_argument);
}

TEST_CASE("BCE loss") {
    const std::vector<double> p{0.8}, n{0.3};
    const auto r = bce_loss(p, n);
    CHECK(r.value == doctest::Approx((-std::log(0.8) - std::log(0.7)) / 2.0));
    CHECK(r.value == doctest::Approx(0.2899).epsilon(1e-4));
    CHECK(bce_loss(std::vector<double>{0.5}, std::vector<double>{0.5}).value == doctest::Approx(std::log(2.0)));
    CHECK(bce_loss(std::vector<double>{1.0}, std::vector<double>{0.0}).value < 1e-6);
    CHECK(r.grad_pos[0] == doctest::Approx(-1.0 / (2.0 * 0.8)));
    CHECK(r.grad_neg[0] == doctest::Approx(1.0 / (2.0 * 0.7)));
}

TEST_CASE("serial and parallel objectives agree bit for bit") {
    oracle::Gen g(38);
    const auto pos = oracle::uniform_scores(g, 300), neg = oracle::uniform_scores(g, 3000);
    const DualState d = random_dual(g);
    const LossHyper hy{0.5, 0.1, 5.0, 21.0};
    const auto a = batch_objective(pos, neg, d, hy, Exec::serial);
    const auto b = batch_objective(pos, neg, d, hy, Exec::parallel);
    CHECK(a.value == b.value);
    CHECK(a.grad_scores_pos == b.grad_scores_pos);
    CHECK(a.grad_scores_neg == b.grad_scores_neg);
    CHECK(a.grad_gamma == b.grad_gamma);
}
