// Serial reference vs OpenMP path for the three parallel kernels.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include <omp.h>

#include "llpauc/bounds.hpp"
#include "llpauc/data.hpp"
#include "llpauc/loss.hpp"
#include "llpauc/model.hpp"
#include "llpauc/trainer.hpp"

using namespace llpauc;

static double time_best(const std::function<void()>& fn, int reps) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

static void report(const char* name, double serial, double parallel, bool same) {
    std::printf("%-22s serial %9.4f s  parallel %9.4f s  speedup %5.2fx  %s\n", name, serial, parallel,
                serial / parallel, same ? "identical" : "MISMATCH");
}

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::atoi(argv[1]) : 3;
    std::printf("threads: %d\n", omp_get_max_threads());

    {
        CorrelationConfig cfg;
        cfg.n_samples = 2000;
        cfg.resolve();
        CorrelationGrid gs, gp;
        const double ts = time_best([&] { gs = simulate_correlation(cfg, Exec::serial); }, reps);
        const double tp = time_best([&] { gp = simulate_correlation(cfg, Exec::parallel); }, reps);
        report("simulate_correlation", ts, tp, gs.corr == gp.corr);
    }

    {
        Rng rng(42);
        std::vector<double> pos(128), neg(128 * 100);
        for (double& f : pos) f = uniform01(rng);
        for (double& f : neg) f = uniform01(rng);
        LossHyper hyper{0.5, 0.1, 5.0, 21.0};
        DualState dual;
        LossValueAndGrads rs, rp;
        const double ts = time_best([&] { for (int i = 0; i < 50; ++i) rs = batch_objective(pos, neg, dual, hyper, Exec::serial); }, reps);
        const double tp = time_best([&] { for (int i = 0; i < 50; ++i) rp = batch_objective(pos, neg, dual, hyper, Exec::parallel); }, reps);
        report("batch_objective x50", ts, tp, rs.value == rp.value && rs.grad_scores_neg == rp.grad_scores_neg);
    }

    {
        SynthSpec ss;
        ss.n_users = 1000;
        ss.n_items = 2000;
        const auto split = make_split(synth_generate(ss).table, SplitSpec{});
        const auto data = TrainData::from_split(split);
        const auto model = init_model(data.n_users, data.n_items, 32, InitScheme::seeded_normal, 1);
        const std::size_t ks[] = {20};
        EvalReport es, ep;
        const double ts = time_best([&] { es = evaluate_validation(model, data, ks, Exec::serial); }, reps);
        const double tp = time_best([&] { ep = evaluate_validation(model, data, ks, Exec::parallel); }, reps);
        report("evaluate_full_ranking", ts, tp,
               es.per_k[0].recall == ep.per_k[0].recall && es.per_k[0].ndcg == ep.per_k[0].ndcg);
    }
    return 0;
}
