#include "llpauc/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace llpauc {

using nlohmann::json;

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

json to_json(const CorrelationConfig& c) {
    return {{"n_pos", c.n_pos}, {"n_neg", c.n_neg}, {"n_samples", c.n_samples}, {"k", c.k},
            {"alphas", c.alphas}, {"betas", c.betas}, {"seed", c.seed}};
}

json to_json(const CorrelationGrid& g) {
    json cells = json::array();
    for (std::size_t ia = 0; ia < g.alphas.size(); ++ia) {
        json row = json::array();
        for (std::size_t ib = 0; ib < g.betas.size(); ++ib) {
            const auto& c = g.at(ia, ib);
            row.push_back(c ? json(*c) : json(nullptr));
        }
        cells.push_back(std::move(row));
    }
    return {{"n_pos", g.n_pos}, {"n_neg", g.n_neg}, {"n_samples", g.n_samples}, {"k", g.k}, {"seed", g.seed},
            {"alphas", g.alphas}, {"betas", g.betas}, {"pearson", std::move(cells)}};
}

std::string grid_csv(const CorrelationGrid& g) {
    std::ostringstream os;
    os << "alpha\\beta";
    for (double b : g.betas) os << ',' << format_double(b);
    os << '\n';
    for (std::size_t ia = 0; ia < g.alphas.size(); ++ia) {
        os << format_double(g.alphas[ia]);
        for (std::size_t ib = 0; ib < g.betas.size(); ++ib) {
            const auto& c = g.at(ia, ib);
            os << ',' << (c ? format_double(*c) : std::string("NA"));
        }
        os << '\n';
    }
    return os.str();
}

json to_json(const VerificationReport& r) {
    return {{"n_pos", r.n_pos},
            {"n_neg", r.n_neg},
            {"k", r.k},
            {"arrangements", r.arrangements},
            {"violations",
             {{"recall", r.recall_violations},
              {"precision", r.precision_violations},
              {"tightness", r.tightness_violations},
              {"order", r.order_violations}}},
            {"rounded_tightness_violations", r.rounded_tightness_violations},
            {"total_violations", r.total_violations()},
            {"first_violation", r.first_violation ? json(*r.first_violation) : json(nullptr)},
            {"ok", r.ok()}};
}

json to_json(const GradcheckConfig& c) {
    return {{"n_points", c.n_points}, {"kappas", c.kappas}, {"step", c.step},
            {"rel_tol", c.rel_tol},   {"abs_tol", c.abs_tol}, {"seed", c.seed}};
}

json to_json(const GradcheckReport& r) {
    return {{"checks", r.checks},
            {"failures", r.failures},
            {"embedding_checks", r.embedding_checks},
            {"embedding_failures", r.embedding_failures},
            {"max_rel_error", r.max_rel_error},
            {"worst", r.worst},
            {"ok", r.ok()}};
}

json to_json(const TrainConfig& c) {
    return {{"loss_kind", to_string(c.loss_kind)},
            {"alpha", c.alpha},
            {"beta", c.beta},
            {"kappa", c.kappa},
            {"w", c.w},
            {"lr", c.lr},
            {"batch_size", c.batch_size},
            {"neg_per_pos", c.neg_per_pos},
            {"epochs", c.epochs},
            {"seed", c.seed},
            {"eval_k", c.eval_k},
            {"select_metric", to_string(c.select_metric)},
            {"optimizer", to_string(c.optimizer)},
            {"dim", c.dim},
            {"init_sigma", c.init_sigma},
            {"patience", c.patience},
            {"exec", c.exec == Exec::parallel ? "parallel" : "serial"}};
}

TrainConfig train_config_from_json(const json& j) {
    TrainConfig c;
    c.loss_kind = parse_loss_kind(j.value("loss_kind", std::string(to_string(c.loss_kind))));
    c.alpha = j.value("alpha", c.alpha);
    c.beta = j.value("beta", c.beta);
    c.kappa = j.value("kappa", c.kappa);
    c.w = j.value("w", c.w);
    c.lr = j.value("lr", c.lr);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.neg_per_pos = j.value("neg_per_pos", c.neg_per_pos);
    c.epochs = j.value("epochs", c.epochs);
    c.seed = j.value("seed", c.seed);
    c.eval_k = j.value("eval_k", c.eval_k);
    c.select_metric = parse_select_metric(j.value("select_metric", std::string(to_string(c.select_metric))));
    c.optimizer = parse_optimizer(j.value("optimizer", std::string(to_string(c.optimizer))));
    c.dim = j.value("dim", c.dim);
    c.init_sigma = j.value("init_sigma", c.init_sigma);
    c.patience = j.value("patience", c.patience);
    c.exec = j.value("exec", std::string("parallel")) == "serial" ? Exec::serial : Exec::parallel;
    return c;
}

json to_json(const SplitSpec& s) {
    return {{"train_frac", s.train_frac},
            {"val_frac", s.val_frac},
            {"test_frac", s.test_frac},
            {"min_user_interactions", s.min_user_interactions},
            {"seed", s.seed},
            {"noise_mode", s.noise_mode == NoiseMode::noise ? "noise" : "clean"},
            {"noise_rating_threshold", s.noise_rating_threshold},
            {"noise_cap", s.noise_cap ? json(*s.noise_cap) : json(nullptr)}};
}

json to_json(const SynthSpec& s) {
    return {{"n_users", s.n_users}, {"n_items", s.n_items},
            {"d_true", s.d_true},   {"density", s.density},
            {"noise_flip_rate", s.noise_flip_rate}, {"seed", s.seed}};
}

json to_json(const DualState& d) {
    return {{"a", d.a}, {"b", d.b}, {"gamma", d.gamma}, {"s_plus", d.s_plus}, {"s_minus", d.s_minus}};
}

json to_json(const TrainHistory& h) {
    json epochs = json::array();
    for (const auto& e : h.epochs)
        epochs.push_back({{"epoch", e.epoch},
                          {"objective", e.objective},
                          {"val_recall", e.val_recall},
                          {"val_ndcg", e.val_ndcg},
                          {"seconds", e.seconds}});
    return {{"initial_val_recall", h.initial_val_recall},
            {"initial_val_ndcg", h.initial_val_ndcg},
            {"best_epoch", h.best_epoch},
            {"stopped_early", h.stopped_early},
            {"epochs", std::move(epochs)}};
}

std::string history_csv(const TrainHistory& h) {
    std::ostringstream os;
    os << "epoch,objective,val_recall,val_ndcg,seconds\n";
    os << "0,NA," << format_double(h.initial_val_recall) << ',' << format_double(h.initial_val_ndcg) << ",0\n";
    for (const auto& e : h.epochs)
        os << e.epoch << ',' << format_double(e.objective) << ',' << format_double(e.val_recall) << ','
           << format_double(e.val_ndcg) << ',' << format_double(e.seconds) << '\n';
    return os.str();
}

json to_json(const EvalReport& r) {
    json per_k = json::array();
    for (const auto& m : r.per_k)
        per_k.push_back({{"k", m.k}, {"recall", m.recall}, {"precision", m.precision}, {"ndcg", m.ndcg}});
    return {{"users_evaluated", r.users_evaluated}, {"users_skipped", r.users_skipped}, {"per_k", std::move(per_k)}};
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << text;
    if (!os) throw std::runtime_error("failed writing " + path);
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

}  // namespace llpauc
