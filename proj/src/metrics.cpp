#include "llpauc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace llpauc {

namespace {

void check_scores(std::span<const double> v, const char* what) {
    if (v.empty()) throw std::invalid_argument(std::string(what) + " scores are empty");
    for (double x : v) {
        if (!(x >= 0.0 && x <= 1.0))
            throw std::invalid_argument(std::string(what) + " score outside [0,1]: " + std::to_string(x));
    }
}

double dcg_discount(std::size_t rank1) { return 1.0 / std::log2(static_cast<double>(rank1) + 1.0); }

}  // namespace

void LabeledScores::validate() const {
    check_scores(pos, "positive");
    check_scores(neg, "negative");
}

void PartialAucParams::validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0,1]");
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in (0,1]");
}

std::size_t head_count(std::size_t n, double rate) {
    if (n == 0) throw std::invalid_argument("head_count: n must be positive");
    if (!(rate > 0.0 && rate <= 1.0)) throw std::invalid_argument("head_count: rate must lie in (0,1]");
    if (rate == 1.0) return n;
    const auto k = static_cast<long long>(std::llround(rate * static_cast<double>(n)));
    return static_cast<std::size_t>(std::clamp<long long>(k, 1, static_cast<long long>(n)));
}

std::vector<std::size_t> select_head_indices(std::span<const double> scores, double rate) {
    if (scores.empty()) throw std::invalid_argument("select_head: empty score list");
    const std::size_t k = head_count(scores.size(), rate);
    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    auto before = [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    };
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), before);
    idx.resize(k);
    return idx;
}

std::vector<double> select_head(std::span<const double> scores, double rate) {
    const auto idx = select_head_indices(scores, rate);
    std::vector<double> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(scores[i]);
    return out;
}

std::uint64_t count_ordered_pairs(std::span<const double> pos, std::span<const double> neg) {
    std::vector<double> p(pos.begin(), pos.end());
    std::vector<double> n(neg.begin(), neg.end());
    std::sort(p.begin(), p.end());
    std::sort(n.begin(), n.end());
    std::uint64_t count = 0;
    std::size_t below = 0;  // negatives strictly below the current positive
    for (double x : p) {
        while (below < n.size() && n[below] < x) ++below;
        count += below;
    }
    return count;
}

double llpauc(const LabeledScores& s, const PartialAucParams& p) {
    s.validate();
    p.validate();
    const auto pos_head = select_head(s.pos, p.alpha);
    const auto neg_head = select_head(s.neg, p.beta);
    const double denom = static_cast<double>(s.pos.size()) * static_cast<double>(s.neg.size());
    return static_cast<double>(count_ordered_pairs(pos_head, neg_head)) / denom;
}

double opauc(const LabeledScores& s, double beta) { return llpauc(s, {1.0, beta}); }

double auc(const LabeledScores& s) {
    s.validate();
    // Direct pair count; no head selection involved.
    std::uint64_t count = 0;
    for (double x : s.pos)
        for (double y : s.neg) count += (x > y) ? 1u : 0u;
    const double denom = static_cast<double>(s.pos.size()) * static_cast<double>(s.neg.size());
    return static_cast<double>(count) / denom;
}

TopKReport topk_metrics_ranked(std::span<const double> scores,
                               std::span<const std::uint8_t> relevant,
                               std::size_t k) {
    if (scores.size() != relevant.size())
        throw std::invalid_argument("topk_metrics: scores and labels differ in length");
    if (k == 0 || k > scores.size())
        throw std::invalid_argument("topk_metrics: k must lie in [1, number of items]");
    const std::size_t n_pos = static_cast<std::size_t>(std::count_if(
        relevant.begin(), relevant.end(), [](std::uint8_t r) { return r != 0; }));
    if (n_pos == 0) throw std::invalid_argument("topk_metrics: no positive items");

    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (scores[a] != scores[b]) return scores[a] > scores[b];
                          return a < b;
                      });

    TopKReport r;
    r.k = k;
    r.n_pos = n_pos;
    double dcg = 0.0;
    for (std::size_t rank = 0; rank < k; ++rank) {
        if (relevant[idx[rank]]) {
            ++r.hits;
            dcg += dcg_discount(rank + 1);
        }
    }
    double idcg = 0.0;
    for (std::size_t rank = 0; rank < std::min(k, n_pos); ++rank) idcg += dcg_discount(rank + 1);

    r.recall = static_cast<double>(r.hits) / static_cast<double>(n_pos);
    r.precision = static_cast<double>(r.hits) / static_cast<double>(k);
    r.ndcg = dcg / idcg;
    return r;
}

TopKReport topk_metrics(const LabeledScores& s, std::size_t k) {
    s.validate();
    std::vector<double> scores;
    scores.reserve(s.pos.size() + s.neg.size());
    scores.insert(scores.end(), s.pos.begin(), s.pos.end());
    scores.insert(scores.end(), s.neg.begin(), s.neg.end());
    std::vector<std::uint8_t> rel(scores.size(), 0);
    std::fill(rel.begin(), rel.begin() + static_cast<std::ptrdiff_t>(s.pos.size()), 1);
    return topk_metrics_ranked(scores, rel, k);
}

double mean_over_users(std::span<const double> per_user_values) {
    if (per_user_values.empty()) throw std::invalid_argument("mean_over_users: empty list");
    double sum = 0.0;
    for (double v : per_user_values) sum += v;
    return sum / static_cast<double>(per_user_values.size());
}

}  // namespace llpauc
