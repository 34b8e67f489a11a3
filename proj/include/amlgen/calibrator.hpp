#pragma once

#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "amlgen/config.hpp"

namespace amlgen {

struct CalibrationTargets {
  std::optional<double> annual_tx_per_account;
  std::optional<double> laundering_ratio;  // transactions per laundering transaction
};

struct CalibrationOptions {
  int max_iters = 10;
  double tol = 0.10;
  double damping = 0.7;
  double min_multiplier = 0.3;
  double max_multiplier = 3.0;
  std::int64_t pilot_days = 14;
  double pilot_fraction = 0.01;
  std::int64_t pilot_min_entities = 500;
  unsigned threads = 1;
};

// 1 + damping * (target/observed - 1), clamped to [min, max].
double damped_multiplier(double target, double observed, const CalibrationOptions& options = {});

struct PilotMeasurement {
  double annual_tx_per_account = 0.0;
  std::optional<double> laundering_ratio;
  std::uint64_t transactions = 0;
  std::uint64_t laundering = 0;
};

struct CalibrationStep {
  int iteration = 0;
  double purchase_rate_per_day = 0.0;
  double budget_scale = 1.0;
  PilotMeasurement observed;
  double rate_multiplier = 1.0;
  double budget_multiplier = 1.0;
  // d(log observed rate) / d(log purchase rate) against the previous step.
  std::optional<double> rate_sensitivity;
};

struct CalibrationResult {
  WorldConfig config;
  std::vector<CalibrationStep> trace;
  bool converged = false;
  bool warning = false;  // max_iters reached; config is the best seen
};

// Pilot world: max(pilot_fraction of the entities, pilot_min_entities) over
// pilot_days, with the pattern budget scaled to the pilot's share of rows.
WorldConfig pilot_config(const WorldConfig& config, const CalibrationOptions& options, double budget_scale,
                         int iteration);

PilotMeasurement measure_pilot(const WorldConfig& pilot, unsigned threads = 1);

CalibrationResult calibrate(const WorldConfig& config, const CalibrationTargets& targets,
                            const CalibrationOptions& options = {});

nlohmann::json to_json(const CalibrationResult& result);

}  // namespace amlgen
