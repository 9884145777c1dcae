#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace llpauc {

/// Scores of one user's positive and negative items. Every score lies in [0,1].
struct LabeledScores {
    std::vector<double> pos;
    std::vector<double> neg;

    /// Throws std::invalid_argument if either list is empty or a score is
    /// outside [0,1] (NaN included).
    void validate() const;
};

/// Upper rates on TPR (alpha) and FPR (beta), both in (0,1].
struct PartialAucParams {
    double alpha = 1.0;
    double beta = 1.0;

    void validate() const;
};

struct TopKReport {
    std::size_t k = 0;
    std::size_t hits = 0;   // positives inside the top k
    std::size_t n_pos = 0;
    double recall = 0.0;
    double precision = 0.0;
    double ndcg = 0.0;
};

/// Number of items kept by a rate constraint: clamp(round(rate * n), 1, n).
std::size_t head_count(std::size_t n, double rate);

/// The head_count(n, rate) largest scores, in descending order. Equal scores
/// are ordered by original index (earlier wins).
std::vector<double> select_head(std::span<const double> scores, double rate);

/// Indices of the selected head, same order as select_head.
std::vector<std::size_t> select_head_indices(std::span<const double> scores, double rate);

/// Number of pairs (i, j) with pos[i] > neg[j]. Strict: ties count zero.
std::uint64_t count_ordered_pairs(std::span<const double> pos, std::span<const double> neg);

/// Empirical lower-left partial AUC. Pairs are restricted to the alpha-head of
/// the positives and the beta-head of the negatives, normalized by n+ * n-.
double llpauc(const LabeledScores& s, const PartialAucParams& p);

/// One-way partial AUC, i.e. llpauc with alpha = 1.
double opauc(const LabeledScores& s, double beta);

double auc(const LabeledScores& s);

/// Top-k report for a labelled list. Items are ranked by descending score;
/// ties go to the lower global index, where positives occupy indices
/// [0, n+) and negatives [n+, n+ + n-).
TopKReport topk_metrics(const LabeledScores& s, std::size_t k);

/// Top-k report over items in their natural (item id) order. `relevant[i]`
/// marks item i as positive; ties are broken by item index.
TopKReport topk_metrics_ranked(std::span<const double> scores,
                               std::span<const std::uint8_t> relevant,
                               std::size_t k);

double mean_over_users(std::span<const double> per_user_values);

}  // namespace llpauc
