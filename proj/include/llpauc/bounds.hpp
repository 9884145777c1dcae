#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "llpauc/random.hpp"

namespace llpauc {

struct BoundPair {
    double lower = 0.0;
    double upper = 0.0;
};

// Pre-rounding bound functions. `v` is the metric value measured with
// alpha = K/n+ and beta = K/n-. They throw std::domain_error for values that
// no ranking of n+ positives and n- negatives can produce.
double g_lower(double v, std::size_t k, std::size_t n_pos, std::size_t n_neg);
double g_higher(double v, std::size_t k, std::size_t n_pos, std::size_t n_neg);
double h_lower(double v, std::size_t k, std::size_t n_pos, std::size_t n_neg);
double h_higher(double v, std::size_t k, std::size_t n_pos, std::size_t n_neg);

/// Recall@K sandwich from LLPAUC(K/n+, K/n-):
/// [floor(g_lower) / n+, ceil(g_higher) / n+].
BoundPair recall_bounds_llpauc(double v, std::size_t k, std::size_t n_pos, std::size_t n_neg);
/// Same bound values divided by K instead of n+.
BoundPair precision_bounds_llpauc(double v, std::size_t k, std::size_t n_pos, std::size_t n_neg);
/// Recall@K sandwich from OPAUC(K/n-) via the h functions.
BoundPair recall_bounds_opauc(double v, std::size_t k, std::size_t n_pos, std::size_t n_neg);
BoundPair precision_bounds_opauc(double v, std::size_t k, std::size_t n_pos, std::size_t n_neg);

/// The four bound functions used by verify_bounds_exhaustive. Replaceable so
/// a deliberately broken function can serve as a negative control.
struct BoundFunctions {
    using Fn = double (*)(double, std::size_t, std::size_t, std::size_t);
    Fn lower_llpauc = &g_lower;
    Fn upper_llpauc = &g_higher;
    Fn lower_opauc = &h_lower;
    Fn upper_opauc = &h_higher;
};

struct VerificationReport {
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
    std::size_t k = 0;
    std::uint64_t arrangements = 0;
    std::uint64_t recall_violations = 0;     // (a)
    std::uint64_t precision_violations = 0;  // (b)
    std::uint64_t tightness_violations = 0;  // (c) h_lower <= g_lower, g_higher <= h_higher
    std::uint64_t order_violations = 0;      // (d) opauc >= llpauc
    // Informational, not counted: tightness after the floor/ceil rounding.
    std::uint64_t rounded_tightness_violations = 0;
    std::optional<std::string> first_violation;  // ranked labels, e.g. "+-+--"

    std::uint64_t total_violations() const {
        return recall_violations + precision_violations + tightness_violations + order_violations;
    }
    bool ok() const { return total_violations() == 0; }
};

inline constexpr std::uint64_t kMaxArrangements = 1'000'000;

/// Number of ways to place n_pos positives among n_pos + n_neg ranks.
std::uint64_t arrangement_count(std::size_t n_pos, std::size_t n_neg);

/// Enumerates every label arrangement and checks the bound sandwich and ordering on it. Throws
/// std::invalid_argument unless n+ > K and n- > K, and std::length_error
/// when the enumeration would exceed kMaxArrangements.
VerificationReport verify_bounds_exhaustive(std::size_t n_pos, std::size_t n_neg, std::size_t k,
                                            const BoundFunctions& fns = {});

/// Sample Pearson coefficient; std::nullopt when either input is constant.
/// Throws std::invalid_argument on length mismatch or fewer than two points.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

/// n points spaced evenly in log10 between lo and hi (both included).
std::vector<double> log_grid(double lo, double hi, std::size_t n);

struct CorrelationConfig {
    std::size_t n_pos = 50;
    std::size_t n_neg = 500;
    std::size_t n_samples = 5000;
    std::size_t k = 10;
    std::vector<double> alphas;
    std::vector<double> betas;
    std::uint64_t seed = 0;

    /// Fills empty grids with the default log-spaced grids and validates.
    void resolve();
};

struct CorrelationGrid {
    std::vector<double> alphas;
    std::vector<double> betas;
    std::size_t k = 0;
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    std::vector<std::optional<double>> corr;  // row-major, |alphas| x |betas|

    const std::optional<double>& at(std::size_t ia, std::size_t ib) const {
        return corr[ia * betas.size() + ib];
    }
    /// Cell with the largest defined coefficient; first in row-major order on ties.
    std::optional<std::pair<std::size_t, std::size_t>> argmax() const;
};

/// LLPAUC value for every (alpha, beta) cell (row-major) plus Recall@K for
/// one random ranking. Sample `index` of a run is a pure function of
/// (seed, index).
struct SampleMetrics {
    std::vector<double> llpauc;
    double recall = 0.0;
    std::vector<std::uint8_t> ranked_labels;  // 1 = positive, rank order
};
SampleMetrics simulate_sample(const CorrelationConfig& cfg, std::size_t index);

/// Monte Carlo study: Pearson correlation between LLPAUC(alpha, beta) and
/// Recall@K over uniformly random rankings.
CorrelationGrid simulate_correlation(CorrelationConfig cfg, Exec exec = Exec::parallel);

}  // namespace llpauc
