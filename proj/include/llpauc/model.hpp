#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "llpauc/random.hpp"

namespace llpauc {

/// Matrix factorization scorer: score(u, i) = sigmoid(<p_u, q_i>), always in (0,1).
struct MfModel {
    std::size_t n_users = 0;
    std::size_t n_items = 0;
    std::size_t dim = 0;
    std::uint64_t seed = 0;
    std::vector<double> user_vectors;  // row-major n_users x dim
    std::vector<double> item_vectors;  // row-major n_items x dim

    std::span<double> user(std::size_t u) { return {user_vectors.data() + u * dim, dim}; }
    std::span<const double> user(std::size_t u) const { return {user_vectors.data() + u * dim, dim}; }
    std::span<double> item(std::size_t i) { return {item_vectors.data() + i * dim, dim}; }
    std::span<const double> item(std::size_t i) const { return {item_vectors.data() + i * dim, dim}; }

    double logit(std::size_t u, std::size_t i) const;
    /// Throws std::out_of_range for unknown ids.
    double score(std::size_t u, std::size_t i) const;

    /// Scores of user u against every item.
    void score_all_items(std::size_t u, std::span<double> out) const;
};

enum class InitScheme { deterministic_small, seeded_normal };

inline constexpr double kDefaultInitSigma = 0.1;
inline constexpr std::size_t kDefaultDim = 32;

/// deterministic_small zero-fills both tables (every score 0.5);
/// seeded_normal draws N(0, sigma^2) entries from `seed`.
MfModel init_model(std::size_t n_users, std::size_t n_items, std::size_t dim, InitScheme scheme,
                   std::uint64_t seed, double sigma = kDefaultInitSigma);

/// dF/df for one scored pair.
struct ScoreGrad {
    std::size_t user = 0;
    std::size_t item = 0;
    double grad = 0.0;
};

/// Embedding gradient dF/dtheta, accumulated per row.
struct EmbeddingGrad {
    std::size_t dim = 0;
    std::unordered_map<std::size_t, std::vector<double>> users;
    std::unordered_map<std::size_t, std::vector<double>> items;
};

/// Chain rule through the logistic: dF/dp_u += g f(1-f) q_i and
/// dF/dq_i += g f(1-f) p_u, all evaluated at the current parameters.
/// Throws std::invalid_argument on a non-finite gradient.
EmbeddingGrad embedding_grads(const MfModel& m, std::span<const ScoreGrad> grads);

enum class Direction { descent, ascent };

/// theta -/+= lr * grad.
void apply_embedding_grads(MfModel& m, const EmbeddingGrad& g, double lr, Direction dir);

/// embedding_grads followed by apply_embedding_grads. Duplicate ids are summed
/// before any row moves.
void apply_score_grads(MfModel& m, std::span<const ScoreGrad> grads, double lr, Direction dir);

/// Binary checkpoint: "LLPMF001", u64 n_users, u64 n_items, u64 dim, u64 seed,
/// then user and item tables as row-major little-endian float64.
void save_model(const MfModel& m, const std::string& path);
MfModel load_model(const std::string& path);

}  // namespace llpauc
