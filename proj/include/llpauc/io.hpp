#pragma once

#include <string>

#include "json.hpp"
#include "llpauc/bounds.hpp"
#include "llpauc/data.hpp"
#include "llpauc/gradcheck.hpp"
#include "llpauc/trainer.hpp"

namespace llpauc {

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double x);

nlohmann::json to_json(const CorrelationConfig& c);
nlohmann::json to_json(const CorrelationGrid& g);
/// Header row of betas; one row per alpha; "NA" where the coefficient is undefined.
std::string grid_csv(const CorrelationGrid& g);

nlohmann::json to_json(const VerificationReport& r);
nlohmann::json to_json(const GradcheckConfig& c);
nlohmann::json to_json(const GradcheckReport& r);

nlohmann::json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SplitSpec& s);
nlohmann::json to_json(const SynthSpec& s);
nlohmann::json to_json(const DualState& d);
nlohmann::json to_json(const TrainHistory& h);
std::string history_csv(const TrainHistory& h);
nlohmann::json to_json(const EvalReport& r);

void write_text(const std::string& path, const std::string& text);
void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

}  // namespace llpauc
