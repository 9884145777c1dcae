#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace llpauc {

struct Interaction {
    std::size_t user = 0;
    std::size_t item = 0;
    std::optional<double> rating;
    std::optional<std::int64_t> timestamp;
};

/// Deduplicated interaction records over dense user and item ids.
/// `user_ids[u]` and `item_ids[i]` hold the external string ids.
struct InteractionTable {
    std::vector<Interaction> records;
    std::vector<std::string> user_ids;
    std::vector<std::string> item_ids;

    std::size_t n_users() const { return user_ids.size(); }
    std::size_t n_items() const { return item_ids.size(); }
    /// True when every record carries a rating.
    bool has_rating() const;
    /// Same id maps, no records.
    InteractionTable empty_like() const;
};

enum class TableFormat { tsv, csv };

/// csv for a ".csv" suffix, tsv otherwise.
TableFormat format_for_path(const std::string& path);

/// Reads `user, item[, rating[, timestamp]]` with a header line. Duplicate
/// (user, item) pairs keep the values of the last occurrence. Dense ids follow
/// first appearance. Throws std::runtime_error naming the line for malformed
/// input and for files without records.
InteractionTable load_interactions(const std::string& path, TableFormat format);

/// Reads records against fixed id maps (ids absent from the maps are an error).
InteractionTable load_interactions(const std::string& path, TableFormat format,
                                   const std::vector<std::string>& user_ids,
                                   const std::vector<std::string>& item_ids);

void write_interactions(const InteractionTable& t, const std::string& path, TableFormat format);

enum class NoiseMode { clean, noise };

struct SplitSpec {
    double train_frac = 0.8;
    double val_frac = 0.1;
    double test_frac = 0.1;
    std::size_t min_user_interactions = 3;
    std::uint64_t seed = 0;
    NoiseMode noise_mode = NoiseMode::clean;
    double noise_rating_threshold = 3.0;
    /// Upper bound on noisy records per user relative to its clean train+val count.
    std::optional<double> noise_cap;

    void validate() const;
};

struct SplitResult {
    InteractionTable train;
    InteractionTable val;
    InteractionTable test;
    std::size_t users_kept = 0;
    std::size_t users_dropped = 0;
    std::size_t noisy_train = 0;
    std::size_t noisy_val = 0;
    std::size_t noisy_discarded = 0;
};

/// Per-user seeded split. A record is noisy when its rating is below the
/// threshold. Clean mode drops noisy records; noise mode keeps the test set of
/// clean mode (same seed) and adds the noisy records to train and val. Users
/// with fewer clean records than the minimum are dropped and counted.
SplitResult make_split(const InteractionTable& table, const SplitSpec& spec);

/// Writes train/val/test files, users.txt / items.txt id maps and manifest.json.
void write_split(const SplitResult& split, const SplitSpec& spec, const std::string& dir);
SplitResult read_split(const std::string& dir);

struct SynthSpec {
    std::size_t n_users = 200;
    std::size_t n_items = 300;
    std::size_t d_true = 8;
    double density = 0.05;
    double noise_flip_rate = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

inline constexpr double kCleanRating = 5.0;
inline constexpr double kNoisyRating = 1.0;

struct SynthData {
    InteractionTable table;
    std::vector<double> user_factors;  // n_users x d_true
    std::vector<double> item_factors;  // n_items x d_true
    double threshold = 0.0;            // latent logit cutoff for true positives
    std::size_t n_clean = 0;
    std::size_t n_noisy = 0;

    double latent_logit(std::size_t u, std::size_t i, std::size_t d) const;
};

/// Latent-factor implicit-feedback data. The top `density` fraction of all
/// (user, item) logits are positives (rating 5); negatives are flipped into
/// noisy positives (rating 1) independently so that `noise_flip_rate` of all
/// positives are noisy in expectation.
SynthData synth_generate(const SynthSpec& spec);

}  // namespace llpauc
