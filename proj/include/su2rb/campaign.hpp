#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "su2rb/analysis.hpp"

namespace su2rb {

// Invalid or inconsistent campaign configuration (exit code 2 at the CLI).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A fully validated campaign: the experiment plan plus its canonical
// serialized form (every field explicit, fixed key order) used for the
// config echo and the content hash.
struct CampaignConfig {
  ExperimentPlan plan;
  nlohmann::ordered_json canonical;
};

// Parses and validates a config document. Spin is carried as the integer
// twice_j; unknown keys are rejected at every level.
CampaignConfig parse_campaign_config(const nlohmann::json& doc);
CampaignConfig load_campaign_config(const std::filesystem::path& path);

// FNV-1a 64-bit hash of the canonical config serialization, as 16 hex chars.
// Names the per-campaign results directory.
std::string config_hash(const nlohmann::ordered_json& canonical);

struct CampaignFiles {
  std::filesystem::path dir;
  std::filesystem::path decays_csv;
  std::filesystem::path result_json;
};

// Runs the campaign and writes decays.csv + result.json under
// out_root/<config hash>/. Refuses to overwrite an existing results
// directory unless force is set. Throws ConfigError / NumericalHealthError.
CampaignFiles run_campaign(const CampaignConfig& config, const std::filesystem::path& out_root,
                           bool force = false);

// `predict` backend: exact quality parameters and error rates of a noise
// model, no simulation.
struct Prediction {
  Eigen::VectorXd f, p_raw, p_clipped;
  double avg_fidelity = 0;
};
Prediction predict_error_rates(HalfInt j, const NoiseModel& noise);

}  // namespace su2rb
