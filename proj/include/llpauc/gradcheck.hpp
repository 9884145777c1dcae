#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace llpauc {

struct GradcheckConfig {
    std::size_t n_points = 50;  // per kappa
    std::vector<double> kappas = {1.0, 5.0, 20.0};
    double step = 1e-5;
    double rel_tol = 1e-4;
    double abs_tol = 1e-7;  // used when both values are below 1e-3 in magnitude
    std::uint64_t seed = 0;

    void validate() const;
};

struct GradcheckReport {
    std::size_t checks = 0;
    std::size_t failures = 0;
    std::size_t embedding_checks = 0;
    std::size_t embedding_failures = 0;
    double max_rel_error = 0.0;
    std::string worst;  // description of the largest relative error seen

    bool ok() const { return failures == 0 && embedding_failures == 0 && checks > 0; }
};

/// True when analytic and numeric agree within the configured tolerance.
bool gradients_agree(double analytic, double numeric, const GradcheckConfig& cfg);

/// Central finite differences against every analytic partial of the batch
/// objective (scores and all five auxiliary variables) at random feasible
/// points, plus the chain rule through a small matrix factorization model.
GradcheckReport run_gradcheck(const GradcheckConfig& cfg);

}  // namespace llpauc
