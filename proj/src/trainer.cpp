#include "llpauc/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "llpauc/metrics.hpp"

namespace llpauc {

const char* to_string(LossKind k) {
    switch (k) {
        case LossKind::llpauc: return "llpauc";
        case LossKind::auc_ablation: return "auc-ablation";
        case LossKind::opauc_ablation: return "opauc-ablation";
        case LossKind::bpr: return "bpr";
        case LossKind::bce: return "bce";
    }
    return "?";
}

const char* to_string(Optimizer o) { return o == Optimizer::adam ? "adam" : "sgda"; }
const char* to_string(SelectMetric m) { return m == SelectMetric::ndcg ? "ndcg" : "recall"; }

LossKind parse_loss_kind(const std::string& s) {
    for (auto k : {LossKind::llpauc, LossKind::auc_ablation, LossKind::opauc_ablation, LossKind::bpr, LossKind::bce})
        if (s == to_string(k)) return k;
    throw std::invalid_argument("unknown loss kind '" + s + "'");
}

Optimizer parse_optimizer(const std::string& s) {
    if (s == "sgda") return Optimizer::sgda;
    if (s == "adam") return Optimizer::adam;
    throw std::invalid_argument("unknown optimizer '" + s + "'");
}

SelectMetric parse_select_metric(const std::string& s) {
    if (s == "recall") return SelectMetric::recall;
    if (s == "ndcg") return SelectMetric::ndcg;
    throw std::invalid_argument("unknown selection metric '" + s + "'");
}

bool TrainConfig::is_llpauc_family() const {
    return loss_kind == LossKind::llpauc || loss_kind == LossKind::auc_ablation ||
           loss_kind == LossKind::opauc_ablation;
}

LossHyper TrainConfig::hyper() const {
    LossHyper h{alpha, beta, kappa, w};
    if (loss_kind == LossKind::auc_ablation) h.alpha = h.beta = 1.0;
    if (loss_kind == LossKind::opauc_ablation) h.alpha = 1.0;
    return h;
}

void TrainConfig::validate() const {
    if (is_llpauc_family()) hyper().validate();
    if (!(lr >= 0.0) || !std::isfinite(lr)) throw std::invalid_argument("learning rate must be non-negative");
    if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
    if (neg_per_pos == 0) throw std::invalid_argument("negatives per positive must be positive");
    if (eval_k == 0) throw std::invalid_argument("eval K must be positive");
    if (dim == 0) throw std::invalid_argument("embedding dimension must be positive");
}

TrainData TrainData::from_split(const SplitResult& split) {
    TrainData d;
    d.n_users = split.train.n_users();
    d.n_items = split.train.n_items();
    d.train_pos.assign(d.n_users, {});
    d.val_pos.assign(d.n_users, {});
    d.test_pos.assign(d.n_users, {});
    for (const auto& r : split.train.records) {
        d.train_pos[r.user].push_back(r.item);
        d.train_pairs.emplace_back(r.user, r.item);
    }
    for (const auto& r : split.val.records) d.val_pos[r.user].push_back(r.item);
    for (const auto& r : split.test.records) d.test_pos[r.user].push_back(r.item);
    for (auto* lists : {&d.train_pos, &d.val_pos, &d.test_pos})
        for (auto& v : *lists) std::sort(v.begin(), v.end());
    return d;
}

void sample_negatives(std::span<const std::size_t> user_pos, std::size_t n_items, std::size_t count, Rng& rng,
                      std::vector<std::size_t>& out) {
    if (user_pos.size() >= n_items) throw std::invalid_argument("user has no negative items to sample");
    for (std::size_t c = 0; c < count; ++c) {
        std::size_t j;
        do {
            j = static_cast<std::size_t>(uniform_index(rng, n_items));
        } while (std::binary_search(user_pos.begin(), user_pos.end(), j));
        out.push_back(j);
    }
}

EpochSampler::EpochSampler(const TrainData& data, std::size_t batch_size, std::size_t neg_per_pos,
                           std::uint64_t seed)
    : data_(data), batch_size_(batch_size), neg_per_pos_(neg_per_pos), rng_(derive_seed(seed, 7)) {
    if (batch_size == 0 || neg_per_pos == 0) throw std::invalid_argument("sampler needs positive sizes");
    order_.resize(data.train_pairs.size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    cursor_ = order_.size();
}

void EpochSampler::begin_epoch() {
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    shuffle_in_place(order_.begin(), order_.end(), rng_);
    cursor_ = 0;
}

bool EpochSampler::next(Batch& batch) {
    batch.users.clear();
    batch.pos_items.clear();
    batch.neg_items.clear();
    batch.neg_per_pos = neg_per_pos_;
    if (cursor_ >= order_.size()) return false;
    const std::size_t end = std::min(order_.size(), cursor_ + batch_size_);
    for (; cursor_ < end; ++cursor_) {
        const auto [u, i] = data_.train_pairs[order_[cursor_]];
        batch.users.push_back(u);
        batch.pos_items.push_back(i);
        sample_negatives(data_.train_pos[u], data_.n_items, neg_per_pos_, rng_, batch.neg_items);
    }
    return true;
}

void AdamState::reset(const MfModel& model) {
    t = 0;
    m_user.assign(model.user_vectors.size(), 0.0);
    v_user.assign(model.user_vectors.size(), 0.0);
    m_item.assign(model.item_vectors.size(), 0.0);
    v_item.assign(model.item_vectors.size(), 0.0);
    std::fill(std::begin(m_dual), std::end(m_dual), 0.0);
    std::fill(std::begin(v_dual), std::end(v_dual), 0.0);
}

namespace {

struct AdamStep {
    double lr, b1, b2, eps, c1, c2;
    void operator()(double& x, double g, double& m, double& v) const {
        m = b1 * m + (1.0 - b1) * g;
        v = b2 * v + (1.0 - b2) * g * g;
        x -= lr * (m / c1) / (std::sqrt(v / c2) + eps);
    }
};

std::vector<double> dense(const std::unordered_map<std::size_t, std::vector<double>>& rows, std::size_t n_rows,
                          std::size_t dim) {
    std::vector<double> out(n_rows * dim, 0.0);
    for (const auto& [r, g] : rows) std::copy(g.begin(), g.end(), out.begin() + static_cast<std::ptrdiff_t>(r * dim));
    return out;
}

}  // namespace

double sgda_step(MfModel& model, DualState& dual, const Batch& batch, const TrainConfig& cfg, AdamState* adam) {
    if ((cfg.optimizer == Optimizer::adam) != (adam != nullptr))
        throw std::invalid_argument("sgda_step: Adam state must be supplied exactly when optimizer is adam");
    if (batch.size() == 0) throw std::invalid_argument("sgda_step: empty batch");
    const std::size_t nb = batch.size();
    const std::size_t nneg = batch.neg_per_pos;
    if (batch.neg_items.size() != nb * nneg) throw std::invalid_argument("sgda_step: malformed batch");

    std::vector<double> fpos(nb), fneg(nb * nneg);
    const auto nb_s = static_cast<std::ptrdiff_t>(nb);
#pragma omp parallel for schedule(static) if (cfg.exec == Exec::parallel)
    for (std::ptrdiff_t bi = 0; bi < nb_s; ++bi) {
        const auto b = static_cast<std::size_t>(bi);
        fpos[b] = model.score(batch.users[b], batch.pos_items[b]);
        for (std::size_t j = 0; j < nneg; ++j)
            fneg[b * nneg + j] = model.score(batch.users[b], batch.neg_items[b * nneg + j]);
    }

    std::vector<ScoreGrad> sgrads;
    sgrads.reserve(nb * (nneg + 1));
    double objective = 0.0;
    // Dual gradients in the order a, b, s-, gamma, s+.
    double dual_grad[5] = {0, 0, 0, 0, 0};

    if (cfg.is_llpauc_family()) {
        const auto lv = batch_objective(fpos, fneg, dual, cfg.hyper(), cfg.exec);
        objective = lv.value;
        for (std::size_t b = 0; b < nb; ++b) sgrads.push_back({batch.users[b], batch.pos_items[b], lv.grad_scores_pos[b]});
        for (std::size_t b = 0; b < nb; ++b)
            for (std::size_t j = 0; j < nneg; ++j)
                sgrads.push_back({batch.users[b], batch.neg_items[b * nneg + j], lv.grad_scores_neg[b * nneg + j]});
        dual_grad[0] = lv.grad_a;
        dual_grad[1] = lv.grad_b;
        dual_grad[2] = lv.grad_s_minus;
        dual_grad[3] = lv.grad_gamma;
        dual_grad[4] = lv.grad_s_plus;
    } else if (cfg.loss_kind == LossKind::bpr) {
        std::vector<double> rep(nb * nneg);
        for (std::size_t b = 0; b < nb; ++b)
            for (std::size_t j = 0; j < nneg; ++j) rep[b * nneg + j] = fpos[b];
        const auto lv = bpr_loss(rep, fneg);
        objective = lv.value;
        for (std::size_t b = 0; b < nb; ++b) {
            double g = 0.0;
            for (std::size_t j = 0; j < nneg; ++j) g += lv.grad_pos[b * nneg + j];
            sgrads.push_back({batch.users[b], batch.pos_items[b], g});
        }
        for (std::size_t b = 0; b < nb; ++b)
            for (std::size_t j = 0; j < nneg; ++j)
                sgrads.push_back({batch.users[b], batch.neg_items[b * nneg + j], lv.grad_neg[b * nneg + j]});
    } else {
        const auto lv = bce_loss(fpos, fneg);
        objective = lv.value;
        for (std::size_t b = 0; b < nb; ++b) sgrads.push_back({batch.users[b], batch.pos_items[b], lv.grad_pos[b]});
        for (std::size_t b = 0; b < nb; ++b)
            for (std::size_t j = 0; j < nneg; ++j)
                sgrads.push_back({batch.users[b], batch.neg_items[b * nneg + j], lv.grad_neg[b * nneg + j]});
    }

    if (!std::isfinite(objective)) {
        std::ostringstream os;
        os << "non-finite objective (" << objective << ") with dual a=" << dual.a << " b=" << dual.b
           << " gamma=" << dual.gamma << " s+=" << dual.s_plus << " s-=" << dual.s_minus;
        throw std::runtime_error(os.str());
    }

    const auto eg = embedding_grads(model, sgrads);
    const bool has_dual = cfg.is_llpauc_family();

    if (cfg.optimizer == Optimizer::sgda) {
        apply_embedding_grads(model, eg, cfg.lr, Direction::descent);
        if (has_dual) {
            dual.a -= cfg.lr * dual_grad[0];
            dual.b -= cfg.lr * dual_grad[1];
            dual.s_minus -= cfg.lr * dual_grad[2];
            dual.gamma += cfg.lr * dual_grad[3];
            dual.s_plus += cfg.lr * dual_grad[4];
        }
    } else {
        ++adam->t;
        const double td = static_cast<double>(adam->t);
        const AdamStep step{cfg.lr,
                            adam->beta1,
                            adam->beta2,
                            adam->eps,
                            1.0 - std::pow(adam->beta1, td),
                            1.0 - std::pow(adam->beta2, td)};
        const auto gu = dense(eg.users, model.n_users, model.dim);
        const auto gi = dense(eg.items, model.n_items, model.dim);
        for (std::size_t k = 0; k < gu.size(); ++k) step(model.user_vectors[k], gu[k], adam->m_user[k], adam->v_user[k]);
        for (std::size_t k = 0; k < gi.size(); ++k) step(model.item_vectors[k], gi[k], adam->m_item[k], adam->v_item[k]);
        if (has_dual) {
            double* vars[5] = {&dual.a, &dual.b, &dual.s_minus, &dual.gamma, &dual.s_plus};
            for (int k = 0; k < 5; ++k) {
                // Ascent variables minimize -F.
                const double g = k < 3 ? dual_grad[k] : -dual_grad[k];
                step(*vars[k], g, adam->m_dual[k], adam->v_dual[k]);
            }
        }
    }
    if (has_dual) dual = clip_dual(dual);
    return objective;
}

const MeanTopK& EvalReport::at_k(std::size_t k) const {
    for (const auto& m : per_k)
        if (m.k == k) return m;
    throw std::out_of_range("no evaluation at K=" + std::to_string(k));
}

EvalReport evaluate_full_ranking(const MfModel& model, const std::vector<std::vector<std::size_t>>& heldout,
                                 const std::vector<std::vector<std::size_t>>& exclude,
                                 std::span<const std::size_t> ks, Exec exec) {
    if (ks.empty()) throw std::invalid_argument("evaluate: empty K list");
    for (auto k : ks)
        if (k == 0) throw std::invalid_argument("evaluate: K must be positive");
    const std::size_t nu = std::min(heldout.size(), model.n_users);
    const std::size_t nk = ks.size();

    std::vector<std::uint8_t> evaluated(nu, 0);
    std::vector<TopKReport> reports(nu * nk);

    const auto nu_s = static_cast<std::ptrdiff_t>(nu);
#pragma omp parallel if (exec == Exec::parallel)
    {
        std::vector<double> all(model.n_items), cand;
        std::vector<std::uint8_t> mark(model.n_items), rel;
#pragma omp for schedule(dynamic, 8)
        for (std::ptrdiff_t ui = 0; ui < nu_s; ++ui) {
            const auto u = static_cast<std::size_t>(ui);
            if (heldout[u].empty()) continue;
            model.score_all_items(u, all);
            // 0 candidate, 1 relevant, 2 excluded
            std::fill(mark.begin(), mark.end(), 0);
            if (u < exclude.size())
                for (auto i : exclude[u]) mark[i] = 2;
            for (auto i : heldout[u]) mark[i] = 1;
            cand.clear();
            rel.clear();
            for (std::size_t i = 0; i < model.n_items; ++i) {
                if (mark[i] == 2) continue;
                cand.push_back(all[i]);
                rel.push_back(mark[i] == 1 ? 1 : 0);
            }
            for (std::size_t c = 0; c < nk; ++c)
                reports[u * nk + c] = topk_metrics_ranked(cand, rel, std::min(ks[c], cand.size()));
            evaluated[u] = 1;
        }
    }

    EvalReport rep;
    rep.per_k.resize(nk);
    for (std::size_t c = 0; c < nk; ++c) rep.per_k[c].k = ks[c];
    for (std::size_t u = 0; u < nu; ++u) {
        if (!evaluated[u]) {
            ++rep.users_skipped;
            continue;
        }
        ++rep.users_evaluated;
        for (std::size_t c = 0; c < nk; ++c) {
            rep.per_k[c].recall += reports[u * nk + c].recall;
            rep.per_k[c].precision += reports[u * nk + c].precision;
            rep.per_k[c].ndcg += reports[u * nk + c].ndcg;
        }
    }
    if (rep.users_evaluated > 0) {
        const double n = static_cast<double>(rep.users_evaluated);
        for (auto& m : rep.per_k) {
            m.recall /= n;
            m.precision /= n;
            m.ndcg /= n;
        }
    }
    return rep;
}

EvalReport evaluate_validation(const MfModel& model, const TrainData& data, std::span<const std::size_t> ks,
                               Exec exec) {
    return evaluate_full_ranking(model, data.val_pos, data.train_pos, ks, exec);
}

EvalReport evaluate_test(const MfModel& model, const TrainData& data, std::span<const std::size_t> ks, Exec exec) {
    std::vector<std::vector<std::size_t>> excl(data.n_users);
    for (std::size_t u = 0; u < data.n_users; ++u) {
        excl[u] = data.train_pos[u];
        excl[u].insert(excl[u].end(), data.val_pos[u].begin(), data.val_pos[u].end());
    }
    return evaluate_full_ranking(model, data.test_pos, excl, ks, exec);
}

TrainResult train(const TrainData& data, const TrainConfig& cfg,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
    cfg.validate();
    if (std::all_of(data.val_pos.begin(), data.val_pos.end(), [](const auto& v) { return v.empty(); }))
        throw std::invalid_argument("validation set is empty");

    TrainResult res;
    res.model = init_model(data.n_users, data.n_items, cfg.dim, InitScheme::seeded_normal, derive_seed(cfg.seed, 3),
                           cfg.init_sigma);
    res.dual = DualState{};
    const std::size_t ks[] = {cfg.eval_k};
    const auto pick = [&](const EvalReport& r) {
        return cfg.select_metric == SelectMetric::recall ? r.per_k[0].recall : r.per_k[0].ndcg;
    };

    const auto init_eval = evaluate_validation(res.model, data, ks, cfg.exec);
    res.history.initial_val_recall = init_eval.per_k[0].recall;
    res.history.initial_val_ndcg = init_eval.per_k[0].ndcg;
    if (cfg.epochs == 0) return res;

    MfModel model = res.model;
    DualState dual = res.dual;
    AdamState adam;
    if (cfg.optimizer == Optimizer::adam) adam.reset(model);
    AdamState* adam_ptr = cfg.optimizer == Optimizer::adam ? &adam : nullptr;

    EpochSampler sampler(data, cfg.batch_size, cfg.neg_per_pos, cfg.seed);
    Batch batch;
    double best = -1.0;
    std::size_t since_best = 0;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        sampler.begin_epoch();
        double obj_sum = 0.0;
        std::size_t steps = 0;
        while (sampler.next(batch)) {
            obj_sum += sgda_step(model, dual, batch, cfg, adam_ptr);
            ++steps;
        }
        const auto ev = evaluate_validation(model, data, ks, cfg.exec);
        EpochRecord rec;
        rec.epoch = epoch;
        rec.objective = steps ? obj_sum / static_cast<double>(steps) : 0.0;
        rec.val_recall = ev.per_k[0].recall;
        rec.val_ndcg = ev.per_k[0].ndcg;
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        res.history.epochs.push_back(rec);
        if (on_epoch) on_epoch(rec);

        const double score = pick(ev);
        if (score > best) {
            best = score;
            res.history.best_epoch = epoch;
            res.model = model;
            res.dual = dual;
            since_best = 0;
        } else if (cfg.patience > 0 && ++since_best >= cfg.patience) {
            res.history.stopped_early = true;
            break;
        }
    }
    return res;
}

}  // namespace llpauc
