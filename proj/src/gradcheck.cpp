#include "llpauc/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "llpauc/loss.hpp"
#include "llpauc/model.hpp"
#include "llpauc/random.hpp"

namespace llpauc {

void GradcheckConfig::validate() const {
    if (n_points == 0) throw std::invalid_argument("gradcheck needs at least one point");
    if (kappas.empty()) throw std::invalid_argument("gradcheck needs at least one kappa");
    for (double k : kappas)
        if (!(k > 0.0)) throw std::invalid_argument("kappa must be positive");
    if (!(step > 0.0) || !(rel_tol > 0.0) || !(abs_tol >= 0.0))
        throw std::invalid_argument("gradcheck step and tolerances must be positive");
}

bool gradients_agree(double analytic, double numeric, const GradcheckConfig& cfg) {
    const double diff = std::abs(analytic - numeric);
    const double scale = std::max(std::abs(analytic), std::abs(numeric));
    if (scale < 1e-3 && diff <= cfg.abs_tol) return true;
    return diff <= cfg.rel_tol * scale;
}

namespace {

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

struct Point {
    std::vector<double> pos, neg;
    DualState dual;
    LossHyper hyper;
};

Point random_point(Rng& rng, double kappa) {
    Point p;
    p.pos.resize(1 + uniform_index(rng, 8));
    p.neg.resize(1 + uniform_index(rng, 12));
    for (double& f : p.pos) f = uniform(rng, 0.01, 0.99);
    for (double& f : p.neg) f = uniform(rng, 0.01, 0.99);
    p.hyper.alpha = uniform(rng, 0.05, 1.0);
    p.hyper.beta = uniform(rng, 0.05, 1.0);
    p.hyper.kappa = kappa;
    p.hyper.w = 4.0 * kappa + 1.0 + uniform(rng, 0.0, 10.0);
    p.dual.a = uniform01(rng);
    p.dual.b = uniform01(rng);
    p.dual.gamma = uniform(rng, p.dual.gamma_min(), 1.0);
    p.dual.s_plus = uniform(rng, -3.0, 3.0);
    p.dual.s_minus = uniform(rng, -3.0, 3.0);
    return p;
}

class Recorder {
public:
    Recorder(const GradcheckConfig& cfg, GradcheckReport& rep) : cfg_(cfg), rep_(rep) {}

    void operator()(double analytic, double numeric, const std::string& what, bool embedding) {
        (embedding ? rep_.embedding_checks : rep_.checks) += 1;
        if (!gradients_agree(analytic, numeric, cfg_)) (embedding ? rep_.embedding_failures : rep_.failures) += 1;
        const double scale = std::max(std::abs(analytic), std::abs(numeric));
        const double rel = scale > 0.0 ? std::abs(analytic - numeric) / scale : 0.0;
        if (scale >= 1e-3 && rel > rep_.max_rel_error) {
            rep_.max_rel_error = rel;
            std::ostringstream os;
            os << what << ": analytic " << analytic << " numeric " << numeric;
            rep_.worst = os.str();
        }
    }

private:
    const GradcheckConfig& cfg_;
    GradcheckReport& rep_;
};

void check_objective(const Point& p, double h, Recorder& rec) {
    const auto g = batch_objective(p.pos, p.neg, p.dual, p.hyper);
    const auto central = [&](auto perturb) {
        Point hi = p, lo = p;
        perturb(hi, h);
        perturb(lo, -h);
        return (batch_objective_value(hi.pos, hi.neg, hi.dual, hi.hyper) -
                batch_objective_value(lo.pos, lo.neg, lo.dual, lo.hyper)) /
               (2.0 * h);
    };
    const std::string tag = "kappa=" + std::to_string(p.hyper.kappa);
    for (std::size_t i = 0; i < p.pos.size(); ++i)
        rec(g.grad_scores_pos[i], central([i](Point& q, double d) { q.pos[i] += d; }), tag + " f+", false);
    for (std::size_t j = 0; j < p.neg.size(); ++j)
        rec(g.grad_scores_neg[j], central([j](Point& q, double d) { q.neg[j] += d; }), tag + " f-", false);
    rec(g.grad_a, central([](Point& q, double d) { q.dual.a += d; }), tag + " a", false);
    rec(g.grad_b, central([](Point& q, double d) { q.dual.b += d; }), tag + " b", false);
    rec(g.grad_gamma, central([](Point& q, double d) { q.dual.gamma += d; }), tag + " gamma", false);
    rec(g.grad_s_plus, central([](Point& q, double d) { q.dual.s_plus += d; }), tag + " s+", false);
    rec(g.grad_s_minus, central([](Point& q, double d) { q.dual.s_minus += d; }), tag + " s-", false);
}

struct Pair {
    std::size_t u, i;
};

double model_objective(const MfModel& m, const std::vector<Pair>& pos, const std::vector<Pair>& neg,
                       const Point& p) {
    std::vector<double> fp, fn;
    for (const auto& x : pos) fp.push_back(m.score(x.u, x.i));
    for (const auto& x : neg) fn.push_back(m.score(x.u, x.i));
    return batch_objective_value(fp, fn, p.dual, p.hyper);
}

void check_embedding(Rng& rng, double kappa, double h, Recorder& rec) {
    Point p = random_point(rng, kappa);
    MfModel m = init_model(4, 6, 5, InitScheme::seeded_normal, rng(), 0.5);
    std::vector<Pair> pos(3 + uniform_index(rng, 4)), neg(4 + uniform_index(rng, 6));
    for (auto& x : pos) x = {uniform_index(rng, m.n_users), uniform_index(rng, m.n_items)};
    for (auto& x : neg) x = {uniform_index(rng, m.n_users), uniform_index(rng, m.n_items)};

    std::vector<double> fp, fn;
    for (const auto& x : pos) fp.push_back(m.score(x.u, x.i));
    for (const auto& x : neg) fn.push_back(m.score(x.u, x.i));
    const auto g = batch_objective(fp, fn, p.dual, p.hyper);
    std::vector<ScoreGrad> sg;
    for (std::size_t k = 0; k < pos.size(); ++k) sg.push_back({pos[k].u, pos[k].i, g.grad_scores_pos[k]});
    for (std::size_t k = 0; k < neg.size(); ++k) sg.push_back({neg[k].u, neg[k].i, g.grad_scores_neg[k]});
    const auto eg = embedding_grads(m, sg);

    const auto analytic = [&](const auto& rows, std::size_t r, std::size_t k) {
        const auto it = rows.find(r);
        return it == rows.end() ? 0.0 : it->second[k];
    };
    const std::string tag = "kappa=" + std::to_string(kappa);
    for (int table = 0; table < 2; ++table) {
        auto& vec = table == 0 ? m.user_vectors : m.item_vectors;
        for (std::size_t e = 0; e < vec.size(); ++e) {
            const double saved = vec[e];
            vec[e] = saved + h;
            const double up = model_objective(m, pos, neg, p);
            vec[e] = saved - h;
            const double down = model_objective(m, pos, neg, p);
            vec[e] = saved;
            const double a = analytic(table == 0 ? eg.users : eg.items, e / m.dim, e % m.dim);
            rec(a, (up - down) / (2.0 * h), tag + (table == 0 ? " user" : " item") + " embedding", true);
        }
    }
}

}  // namespace

GradcheckReport run_gradcheck(const GradcheckConfig& cfg) {
    cfg.validate();
    GradcheckReport rep;
    Recorder rec(cfg, rep);
    for (std::size_t c = 0; c < cfg.kappas.size(); ++c) {
        Rng rng(derive_seed(cfg.seed, c));
        for (std::size_t n = 0; n < cfg.n_points; ++n) check_objective(random_point(rng, cfg.kappas[c]), cfg.step, rec);
        const std::size_t n_embed = std::max<std::size_t>(1, cfg.n_points / 5);
        for (std::size_t n = 0; n < n_embed; ++n) check_embedding(rng, cfg.kappas[c], cfg.step, rec);
    }
    return rep;
}

}  // namespace llpauc
