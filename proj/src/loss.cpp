#include "llpauc/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace llpauc {

void LossHyper::validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0,1]");
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in (0,1]");
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("kappa must be positive");
    if (!(w > 4.0 * kappa) || !std::isfinite(w))
        throw std::invalid_argument("w must exceed 4*kappa for strong concavity in gamma (got w=" +
                                    std::to_string(w) + ", kappa=" + std::to_string(kappa) + ")");
}

double DualState::gamma_min() const { return std::max(-a, b - 1.0); }

bool DualState::feasible() const {
    return a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0 && gamma >= gamma_min() && gamma <= 1.0 &&
           std::isfinite(s_plus) && std::isfinite(s_minus);
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double softplus_r(double x, double kappa) {
    const double tail = std::log1p(std::exp(-std::abs(kappa * x))) / kappa;
    return x > 0.0 ? x + tail : tail;
}

namespace {

void check_batch(std::span<const double> pos, std::span<const double> neg) {
    if (pos.empty() || neg.empty()) throw std::invalid_argument("batch needs positive and negative scores");
    auto ok = [](double f) { return f >= 0.0 && f <= 1.0; };
    if (!std::all_of(pos.begin(), pos.end(), ok) || !std::all_of(neg.begin(), neg.end(), ok))
        throw std::invalid_argument("batch scores must lie in [0,1]");
}

}  // namespace

double batch_objective_value(std::span<const double> pos, std::span<const double> neg, const DualState& d,
                             const LossHyper& h) {
    double pos_sum = 0.0;
    for (double f : pos) pos_sum += -h.alpha * d.s_plus - softplus_r(-ell_plus(f, d.a, d.gamma) - d.s_plus, h.kappa);
    double neg_sum = 0.0;
    for (double f : neg) neg_sum += h.beta * d.s_minus + softplus_r(ell_minus(f, d.b, d.gamma) - d.s_minus, h.kappa);
    return pos_sum / static_cast<double>(pos.size()) + neg_sum / static_cast<double>(neg.size()) -
           (h.w + 1.0) * d.gamma * d.gamma;
}

LossValueAndGrads batch_objective(std::span<const double> pos, std::span<const double> neg, const DualState& d,
                                  const LossHyper& h, Exec exec) {
    h.validate();
    if (!d.feasible()) throw std::invalid_argument("dual state outside its feasible set");
    check_batch(pos, neg);

    const std::size_t np = pos.size(), nn = neg.size();
    const double inv_p = 1.0 / static_cast<double>(np);
    const double inv_n = 1.0 / static_cast<double>(nn);

    LossValueAndGrads out;
    out.grad_scores_pos.resize(np);
    out.grad_scores_neg.resize(nn);

    // Per-element contributions: value, d/d(a|b), d/dgamma, d/d(s+|s-).
    std::vector<double> pv(np), pa(np), pg(np), ps(np);
    std::vector<double> nv(nn), nb(nn), ng(nn), ns(nn);

    const auto np_s = static_cast<std::ptrdiff_t>(np);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
    for (std::ptrdiff_t ii = 0; ii < np_s; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const double f = pos[i];
        const double u = -ell_plus(f, d.a, d.gamma) - d.s_plus;
        const double sig = sigmoid(h.kappa * u);  // r'(u)
        pv[i] = -h.alpha * d.s_plus - softplus_r(u, h.kappa);
        // d/dtheta of -r(u) = sig * d ell_plus.
        out.grad_scores_pos[i] = sig * d_ell_plus_df(f, d.a, d.gamma) * inv_p;
        pa[i] = sig * (-2.0 * (f - d.a));
        pg[i] = sig * (-2.0 * f);
        ps[i] = -h.alpha + sig;
    }

    const auto nn_s = static_cast<std::ptrdiff_t>(nn);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
    for (std::ptrdiff_t jj = 0; jj < nn_s; ++jj) {
        const auto j = static_cast<std::size_t>(jj);
        const double f = neg[j];
        const double v = ell_minus(f, d.b, d.gamma) - d.s_minus;
        const double sig = sigmoid(h.kappa * v);
        nv[j] = h.beta * d.s_minus + softplus_r(v, h.kappa);
        out.grad_scores_neg[j] = sig * d_ell_minus_df(f, d.b, d.gamma) * inv_n;
        nb[j] = sig * (-2.0 * (f - d.b));
        ng[j] = sig * (2.0 * f);
        ns[j] = h.beta - sig;
    }

    double sum_pv = 0, sum_pa = 0, sum_pg = 0, sum_ps = 0;
    for (std::size_t i = 0; i < np; ++i) {
        sum_pv += pv[i];
        sum_pa += pa[i];
        sum_pg += pg[i];
        sum_ps += ps[i];
    }
    double sum_nv = 0, sum_nb = 0, sum_ng = 0, sum_ns = 0;
    for (std::size_t j = 0; j < nn; ++j) {
        sum_nv += nv[j];
        sum_nb += nb[j];
        sum_ng += ng[j];
        sum_ns += ns[j];
    }

    out.value = sum_pv * inv_p + sum_nv * inv_n - (h.w + 1.0) * d.gamma * d.gamma;
    out.grad_a = sum_pa * inv_p;
    out.grad_b = sum_nb * inv_n;
    out.grad_gamma = sum_pg * inv_p + sum_ng * inv_n - 2.0 * (h.w + 1.0) * d.gamma;
    out.grad_s_plus = sum_ps * inv_p;
    out.grad_s_minus = sum_ns * inv_n;
    return out;
}

DualState clip_dual(DualState d) {
    d.a = std::clamp(d.a, 0.0, 1.0);
    d.b = std::clamp(d.b, 0.0, 1.0);
    d.gamma = std::clamp(d.gamma, d.gamma_min(), 1.0);
    return d;
}

AvgTopKCheck avg_topk_identity_check(std::span<const double> losses, double rate, HeadSide side) {
    if (losses.empty()) throw std::invalid_argument("avg_topk_identity_check: empty loss list");
    if (!(rate > 0.0 && rate <= 1.0)) throw std::invalid_argument("avg_topk_identity_check: rate outside (0,1]");
    const double kr = rate * static_cast<double>(losses.size());
    if (std::abs(kr - std::round(kr)) > 1e-9 || std::round(kr) < 1.0)
        throw std::invalid_argument("avg_topk_identity_check: rate * n must be a positive integer");
    const auto k = static_cast<std::size_t>(std::llround(kr));
    const double kd = static_cast<double>(k);

    // Both sides reduce to "sum of the k largest x" with x = l or x = -l.
    const double sign = side == HeadSide::negative_min ? 1.0 : -1.0;
    std::vector<double> x(losses.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = sign * losses[i];
    std::vector<double> desc = x;
    std::sort(desc.begin(), desc.end(), std::greater<>());

    AvgTopKCheck out;
    double head = 0.0;
    for (std::size_t i = 0; i < k; ++i) head += desc[i];
    out.hard_sum = sign * head;

    auto shifted = [&](double s) {
        double v = kd * s;
        for (double xi : x) v += std::max(xi - s, 0.0);
        return v;
    };
    std::vector<double> vals(desc.size());
    for (std::size_t i = 0; i < desc.size(); ++i) vals[i] = shifted(desc[i]);
    const double best = *std::min_element(vals.begin(), vals.end());
    // The minimizers form a flat segment; report its right end.
    const double tol = 1e-12 * (1.0 + std::abs(best));
    double best_s = desc.back();
    for (std::size_t i = 0; i < desc.size(); ++i) {
        if (vals[i] <= best + tol) {
            best_s = desc[i];
            break;  // desc is descending, so the first hit is the largest s
        }
    }
    out.variational_opt = sign * best;
    out.argopt = best_s;  // s lives in x-space on both sides
    return out;
}

PointwiseLoss bpr_loss(std::span<const double> pos, std::span<const double> neg) {
    if (pos.size() != neg.size() || pos.empty())
        throw std::invalid_argument("bpr_loss: needs equal-length, non-empty paired batches");
    const double inv = 1.0 / static_cast<double>(pos.size());
    PointwiseLoss out;
    out.grad_pos.resize(pos.size());
    out.grad_neg.resize(neg.size());
    for (std::size_t i = 0; i < pos.size(); ++i) {
        const double diff = pos[i] - neg[i];
        out.value += softplus_r(-diff, 1.0);  // -log sigmoid(diff)
        const double g = -sigmoid(-diff) * inv;
        out.grad_pos[i] = g;
        out.grad_neg[i] = -g;
    }
    out.value *= inv;
    return out;
}

PointwiseLoss bce_loss(std::span<const double> pos, std::span<const double> neg) {
    if (pos.empty() && neg.empty()) throw std::invalid_argument("bce_loss: empty batch");
    const double inv = 1.0 / static_cast<double>(pos.size() + neg.size());
    PointwiseLoss out;
    out.grad_pos.resize(pos.size());
    out.grad_neg.resize(neg.size());
    for (std::size_t i = 0; i < pos.size(); ++i) {
        const double f = std::clamp(pos[i], kBceEpsilon, 1.0 - kBceEpsilon);
        out.value -= std::log(f);
        out.grad_pos[i] = -inv / f;
    }
    for (std::size_t j = 0; j < neg.size(); ++j) {
        const double f = std::clamp(neg[j], kBceEpsilon, 1.0 - kBceEpsilon);
        out.value -= std::log1p(-f);
        out.grad_neg[j] = inv / (1.0 - f);
    }
    out.value *= inv;
    return out;
}

}  // namespace llpauc
