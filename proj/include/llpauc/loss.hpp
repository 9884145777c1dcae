#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "llpauc/random.hpp"

namespace llpauc {

/// Rate pair plus softplus sharpness and the gamma regularizer weight.
struct LossHyper {
    double alpha = 1.0;
    double beta = 1.0;
    double kappa = 5.0;
    double w = 21.0;

    /// Throws std::invalid_argument unless the rates lie in (0,1], kappa > 0
    /// and w > 4 kappa (the objective must be strongly concave in gamma).
    void validate() const;
};

/// Auxiliary variables of the minimax objective. (a, b, s_minus) are
/// minimized together with the model; (gamma, s_plus) are maximized.
struct DualState {
    double a = 0.5;
    double b = 0.5;
    double gamma = 0.0;
    double s_plus = 0.0;
    double s_minus = 0.0;

    double gamma_min() const;
    bool feasible() const;
};

struct LossValueAndGrads {
    double value = 0.0;
    std::vector<double> grad_scores_pos;
    std::vector<double> grad_scores_neg;
    double grad_a = 0.0;
    double grad_b = 0.0;
    double grad_gamma = 0.0;
    double grad_s_plus = 0.0;
    double grad_s_minus = 0.0;
};

/// Pairwise square surrogate (1 - x)^2.
inline double square_surrogate(double x) { return (1.0 - x) * (1.0 - x); }

/// Decoupled positive-side loss (f - a)^2 - 2(1 + gamma) f.
inline double ell_plus(double f, double a, double gamma) { return (f - a) * (f - a) - 2.0 * (1.0 + gamma) * f; }
/// Decoupled negative-side loss (f - b)^2 + 2(1 + gamma) f.
inline double ell_minus(double f, double b, double gamma) { return (f - b) * (f - b) + 2.0 * (1.0 + gamma) * f; }

inline double d_ell_plus_df(double f, double a, double gamma) { return 2.0 * (f - a) - 2.0 * (1.0 + gamma); }
inline double d_ell_minus_df(double f, double b, double gamma) { return 2.0 * (f - b) + 2.0 * (1.0 + gamma); }

double sigmoid(double x);

/// Smooth hinge (1/kappa) log(1 + exp(kappa x)), overflow-free for any x.
double softplus_r(double x, double kappa);

/// Minimax objective on one mini-batch with analytic partials:
///   mean_i [-alpha s+ - r(-l+(f_i) - s+)] + mean_j [beta s- + r(l-(f_j) - s-)] - (w + 1) gamma^2
/// Per-element terms are independent; the parallel path computes them
/// concurrently and reduces serially, so both paths agree bit for bit.
LossValueAndGrads batch_objective(std::span<const double> pos_scores, std::span<const double> neg_scores,
                                  const DualState& dual, const LossHyper& hyper, Exec exec = Exec::serial);

/// Objective value only; no validation. Shared by finite-difference checks.
double batch_objective_value(std::span<const double> pos_scores, std::span<const double> neg_scores,
                             const DualState& dual, const LossHyper& hyper);

/// Projects (a, b) onto [0,1]^2, then gamma onto [max(-a, b - 1), 1].
DualState clip_dual(DualState dual);

enum class HeadSide { positive_max, negative_min };

struct AvgTopKCheck {
    double hard_sum = 0.0;         // loss summed over the selected head
    double variational_opt = 0.0;  // optimum of the shift-variable form
    double argopt = 0.0;           // optimal s: k-th largest of l (negative side) or of -l (positive side)
};

/// Evaluates both sides of the average top-k identity. For negative_min the
/// head is the k largest losses and the objective k s + sum [l - s]_+ is
/// minimized; for positive_max the head is the k smallest losses and
/// -k s - sum [-l - s]_+ is maximized. The optimum is searched over the
/// breakpoints of the piecewise-linear objective. Throws
/// std::invalid_argument when rate * n is not an integer.
AvgTopKCheck avg_topk_identity_check(std::span<const double> losses, double rate, HeadSide side);

struct PointwiseLoss {
    double value = 0.0;
    std::vector<double> grad_pos;
    std::vector<double> grad_neg;
};

/// Mean of -log sigmoid(f_i - f_j) over paired entries.
PointwiseLoss bpr_loss(std::span<const double> pos_scores, std::span<const double> neg_scores);

inline constexpr double kBceEpsilon = 1e-7;

/// Mean binary cross-entropy over every item of the combined batch.
PointwiseLoss bce_loss(std::span<const double> pos_scores, std::span<const double> neg_scores);

}  // namespace llpauc
