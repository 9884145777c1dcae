#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "llpauc/data.hpp"
#include "llpauc/loss.hpp"
#include "llpauc/model.hpp"
#include "llpauc/random.hpp"

namespace llpauc {

enum class LossKind { llpauc, auc_ablation, opauc_ablation, bpr, bce };
enum class Optimizer { sgda, adam };
enum class SelectMetric { recall, ndcg };

const char* to_string(LossKind k);
const char* to_string(Optimizer o);
const char* to_string(SelectMetric m);
LossKind parse_loss_kind(const std::string& s);
Optimizer parse_optimizer(const std::string& s);
SelectMetric parse_select_metric(const std::string& s);

struct TrainConfig {
    LossKind loss_kind = LossKind::llpauc;
    double alpha = 0.5;
    double beta = 0.1;
    double kappa = 5.0;
    double w = 21.0;
    double lr = 0.001;
    std::size_t batch_size = 128;
    std::size_t neg_per_pos = 100;
    std::size_t epochs = 30;
    std::uint64_t seed = 0;
    std::size_t eval_k = 20;
    SelectMetric select_metric = SelectMetric::recall;
    Optimizer optimizer = Optimizer::sgda;
    std::size_t dim = kDefaultDim;
    double init_sigma = kDefaultInitSigma;
    std::size_t patience = 10;  // epochs without validation improvement; 0 disables
    Exec exec = Exec::parallel;

    bool is_llpauc_family() const;
    /// Rates actually used: (1,1) for the AUC ablation, (1,beta) for OPAUC.
    LossHyper hyper() const;
    void validate() const;
};

/// Per-user item lists derived from a split, on the split's dense ids.
struct TrainData {
    std::size_t n_users = 0;
    std::size_t n_items = 0;
    std::vector<std::vector<std::size_t>> train_pos;  // sorted
    std::vector<std::vector<std::size_t>> val_pos;
    std::vector<std::vector<std::size_t>> test_pos;
    std::vector<std::pair<std::size_t, std::size_t>> train_pairs;  // (user, item)

    static TrainData from_split(const SplitResult& split);
};

struct Batch {
    std::vector<std::size_t> users;
    std::vector<std::size_t> pos_items;
    std::size_t neg_per_pos = 0;
    std::vector<std::size_t> neg_items;  // neg_per_pos entries per positive, flattened

    std::size_t size() const { return users.size(); }
};

/// `count` items drawn uniformly, with replacement, from items outside
/// `user_pos` (sorted). Throws std::invalid_argument if no such item exists.
void sample_negatives(std::span<const std::size_t> user_pos, std::size_t n_items, std::size_t count, Rng& rng,
                      std::vector<std::size_t>& out);

/// Shuffled pass over training positives, cut into mini-batches.
class EpochSampler {
public:
    EpochSampler(const TrainData& data, std::size_t batch_size, std::size_t neg_per_pos, std::uint64_t seed);

    void begin_epoch();
    /// Fills `batch` with the next mini-batch; false when the epoch is exhausted.
    bool next(Batch& batch);

private:
    const TrainData& data_;
    std::size_t batch_size_;
    std::size_t neg_per_pos_;
    Rng rng_;
    std::vector<std::size_t> order_;
    std::size_t cursor_ = 0;
};

/// Adam moments over every trainable parameter (tables and dual scalars).
struct AdamState {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::uint64_t t = 0;
    std::vector<double> m_user, v_user, m_item, v_item;
    double m_dual[5] = {0, 0, 0, 0, 0};
    double v_dual[5] = {0, 0, 0, 0, 0};

    void reset(const MfModel& model);
};

/// One descent-ascent step. Descends on (theta, a, b, s-), ascends on
/// (gamma, s+), then clips the dual state. Returns the objective evaluated
/// before the update. `adam` must be non-null iff cfg.optimizer is adam.
double sgda_step(MfModel& model, DualState& dual, const Batch& batch, const TrainConfig& cfg,
                 AdamState* adam = nullptr);

struct MeanTopK {
    std::size_t k = 0;
    double recall = 0.0;
    double precision = 0.0;
    double ndcg = 0.0;
};

struct EvalReport {
    std::vector<MeanTopK> per_k;
    std::size_t users_evaluated = 0;
    std::size_t users_skipped = 0;

    const MeanTopK& at_k(std::size_t k) const;
};

/// Full-ranking evaluation: each user's candidates are all items except
/// `exclude[u]`; relevant items are `heldout[u]`. Users without heldout items
/// are skipped and counted. K larger than a user's candidate list is clamped.
EvalReport evaluate_full_ranking(const MfModel& model, const std::vector<std::vector<std::size_t>>& heldout,
                                 const std::vector<std::vector<std::size_t>>& exclude,
                                 std::span<const std::size_t> ks, Exec exec = Exec::parallel);

/// Validation set (train positives excluded) and test set (train and
/// validation positives excluded).
EvalReport evaluate_validation(const MfModel& model, const TrainData& data, std::span<const std::size_t> ks,
                               Exec exec = Exec::parallel);
EvalReport evaluate_test(const MfModel& model, const TrainData& data, std::span<const std::size_t> ks,
                         Exec exec = Exec::parallel);

struct EpochRecord {
    std::size_t epoch = 0;
    double objective = 0.0;
    double val_recall = 0.0;
    double val_ndcg = 0.0;
    double seconds = 0.0;
};

struct TrainHistory {
    double initial_val_recall = 0.0;
    double initial_val_ndcg = 0.0;
    std::vector<EpochRecord> epochs;
    std::size_t best_epoch = 0;  // 0 = initial model
    bool stopped_early = false;
};

struct TrainResult {
    MfModel model;
    DualState dual;
    TrainHistory history;
};

/// SGDA training with per-epoch validation; returns the checkpoint with the
/// best validation metric. Deterministic for a fixed seed.
TrainResult train(const TrainData& data, const TrainConfig& cfg,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

}  // namespace llpauc
