#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <omp.h>

#include "llpauc/bounds.hpp"
#include "llpauc/loss.hpp"
#include "llpauc/trainer.hpp"
#include "oracles.hpp"

// Serial and OpenMP paths must agree bit for bit, whatever the thread count.

using namespace llpauc;

namespace {

struct Threads {
    int saved;
    explicit Threads(int n) : saved(omp_get_max_threads()) { omp_set_num_threads(n); }
    ~Threads() { omp_set_num_threads(saved); }
};

TrainData data_for(std::uint64_t seed) {
    const auto s = synth_generate({80, 120, 6, 0.08, 0.1, seed});
    SplitSpec sp;
    sp.seed = seed;
    sp.noise_mode = NoiseMode::noise;
    return TrainData::from_split(make_split(s.table, sp));
}

}  // namespace

TEST_CASE("correlation grid") {
    CorrelationConfig c;
    c.n_pos = 20;
    c.n_neg = 60;
    c.n_samples = 300;
    c.k = 5;
    c.seed = 3;
    const auto ref = simulate_correlation(c, Exec::serial);
    for (int t : {1, 3, 8}) {
        Threads th(t);
        const auto par = simulate_correlation(c, Exec::parallel);
        CHECK(par.corr == ref.corr);
    }
}

TEST_CASE("batch objective") {
    oracle::Gen g(71);
    Threads th(4);
    for (int t = 0; t < 200; ++t) {
        const auto pos = oracle::uniform_scores(g, oracle::between(g, 1, 300));
        const auto neg = oracle::uniform_scores(g, oracle::between(g, 1, 3000));
        DualState d{oracle::unif(g), oracle::unif(g), 0.0, oracle::unif(g) - 0.5, oracle::unif(g) - 0.5};
        d.gamma = d.gamma_min() + (1.0 - d.gamma_min()) * oracle::unif(g);
        const LossHyper h{0.05 + 0.95 * oracle::unif(g), 0.05 + 0.95 * oracle::unif(g), 5.0, 21.0};
        const auto s = batch_objective(pos, neg, d, h, Exec::serial);
        const auto p = batch_objective(pos, neg, d, h, Exec::parallel);
        CHECK(s.value == p.value);
        CHECK(s.grad_scores_pos == p.grad_scores_pos);
        CHECK(s.grad_scores_neg == p.grad_scores_neg);
        CHECK(s.grad_a == p.grad_a);
        CHECK(s.grad_b == p.grad_b);
        CHECK(s.grad_gamma == p.grad_gamma);
        CHECK(s.grad_s_plus == p.grad_s_plus);
        CHECK(s.grad_s_minus == p.grad_s_minus);
    }
}

TEST_CASE("full-ranking evaluation") {
    const auto data = data_for(1);
    const auto m = init_model(data.n_users, data.n_items, 8, InitScheme::seeded_normal, 2, 0.5);
    const std::vector<std::size_t> ks{1, 5, 20, 50};
    const auto s = evaluate_test(m, data, ks, Exec::serial);
    for (int t : {2, 5}) {
        Threads th(t);
        const auto p = evaluate_test(m, data, ks, Exec::parallel);
        REQUIRE(p.per_k.size() == s.per_k.size());
        for (std::size_t k = 0; k < ks.size(); ++k) {
            CHECK(p.per_k[k].recall == s.per_k[k].recall);
            CHECK(p.per_k[k].precision == s.per_k[k].precision);
            CHECK(p.per_k[k].ndcg == s.per_k[k].ndcg);
        }
        CHECK(p.users_skipped == s.users_skipped);
    }
}

TEST_CASE("training runs") {
    const auto data = data_for(2);
    for (auto opt : {Optimizer::sgda, Optimizer::adam}) {
        TrainConfig c;
        c.epochs = 3;
        c.neg_per_pos = 20;
        c.dim = 8;
        c.optimizer = opt;
        c.lr = opt == Optimizer::adam ? 0.01 : 0.5;
        c.exec = Exec::serial;
        const auto s = train(data, c);
        c.exec = Exec::parallel;
        Threads th(4);
        const auto p = train(data, c);
        CHECK(p.model.user_vectors == s.model.user_vectors);
        CHECK(p.model.item_vectors == s.model.item_vectors);
        CHECK(p.dual.gamma == s.dual.gamma);
        CHECK(p.dual.s_plus == s.dual.s_plus);
        REQUIRE(p.history.epochs.size() == s.history.epochs.size());
        for (std::size_t e = 0; e < s.history.epochs.size(); ++e) {
            CHECK(p.history.epochs[e].objective == s.history.epochs[e].objective);
            CHECK(p.history.epochs[e].val_recall == s.history.epochs[e].val_recall);
        }
    }
}
