#include "amlgen/calibrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "amlgen/engine.hpp"
#include "amlgen/population.hpp"

namespace amlgen {

double damped_multiplier(double target, double observed, const CalibrationOptions& o) {
  if (!(observed > 0.0) || !(target > 0.0)) return o.max_multiplier;
  return std::clamp(1.0 + o.damping * (target / observed - 1.0), o.min_multiplier, o.max_multiplier);
}

WorldConfig pilot_config(const WorldConfig& config, const CalibrationOptions& o, double budget_scale, int iteration) {
  WorldConfig p = config;
  const double entities = static_cast<double>(config.num_individuals + config.num_companies);
  const double want = std::max(o.pilot_fraction * entities, static_cast<double>(o.pilot_min_entities));
  const double f = entities > 0 ? std::min(1.0, want / entities) : 1.0;
  if (f < 1.0) {
    p.num_individuals = std::max<std::int64_t>(1, std::llround(static_cast<double>(config.num_individuals) * f));
    p.num_companies = std::max<std::int64_t>(5, std::llround(static_cast<double>(config.num_companies) * f));
    p.num_banks = std::clamp<std::int64_t>(std::llround(static_cast<double>(config.num_banks) * f), 2, config.num_banks);
  }
  p.sim_days = std::min(config.sim_days, o.pilot_days);
  const double time_share = static_cast<double>(p.sim_days) / static_cast<double>(config.sim_days);
  RandomStream rng = rng_stream(config.seed, "calibrate", static_cast<std::uint64_t>(iteration));
  for (std::size_t k = 0; k < kPatternKindCount; ++k) {
    // Stochastic rounding keeps the expected pilot budget exact.
    const double x = static_cast<double>(config.pattern_budget[k]) * budget_scale * f * time_share;
    const double whole = std::floor(x);
    p.pattern_budget[k] = static_cast<std::int64_t>(whole) + (rng.uniform() < x - whole ? 1 : 0);
  }
  return p;
}

PilotMeasurement measure_pilot(const WorldConfig& pilot, unsigned threads) {
  WorldConfig cfg = pilot;
  Population pop;
  try {
    pop = build_population(cfg, threads);
  } catch (const PopulationError&) {
    // Too few entities for any criminal to appear: measure without patterns.
    cfg.pattern_budget = {};
    pop = build_population(cfg, threads);
  }
  NullSink sink;
  SimOptions opts;
  opts.threads = threads;
  const auto result = run_simulation(pop, cfg, sink, opts);
  const auto& k = result.counters;
  PilotMeasurement m;
  m.transactions = k.transactions;
  m.laundering = k.laundering;
  if (k.accounts_seen > 0) {
    m.annual_tx_per_account = static_cast<double>(k.transactions) / static_cast<double>(k.accounts_seen) * 365.25 /
                              static_cast<double>(cfg.sim_days);
  }
  if (k.laundering > 0) m.laundering_ratio = static_cast<double>(k.transactions) / static_cast<double>(k.laundering);
  return m;
}

namespace {

WorldConfig apply(const WorldConfig& base, double purchase_rate, double budget_scale) {
  WorldConfig c = base;
  c.purchase_rate_per_day = purchase_rate;
  for (std::size_t k = 0; k < kPatternKindCount; ++k) {
    c.pattern_budget[k] = std::llround(static_cast<double>(base.pattern_budget[k]) * budget_scale);
  }
  return c;
}

}  // namespace

CalibrationResult calibrate(const WorldConfig& config, const CalibrationTargets& targets,
                            const CalibrationOptions& o) {
  validate_config(config);
  CalibrationResult result;
  result.config = config;
  double rate = config.purchase_rate_per_day;
  double scale = 1.0;
  double best_error = std::numeric_limits<double>::infinity();

  for (int it = 1; it <= o.max_iters; ++it) {
    WorldConfig current = config;
    current.purchase_rate_per_day = rate;
    const WorldConfig pilot = pilot_config(current, o, scale, it);

    CalibrationStep step;
    step.iteration = it;
    step.purchase_rate_per_day = rate;
    step.budget_scale = scale;
    step.observed = measure_pilot(pilot, o.threads);

    double error = 0.0;
    if (targets.annual_tx_per_account) {
      error = std::max(error, std::abs(step.observed.annual_tx_per_account / *targets.annual_tx_per_account - 1.0));
      step.rate_multiplier = damped_multiplier(*targets.annual_tx_per_account, step.observed.annual_tx_per_account, o);
    }
    if (targets.laundering_ratio) {
      if (step.observed.laundering_ratio) {
        error = std::max(error, std::abs(*step.observed.laundering_ratio / *targets.laundering_ratio - 1.0));
        // Laundering share is the reciprocal of the ratio.
        step.budget_multiplier = damped_multiplier(1.0 / *targets.laundering_ratio, 1.0 / *step.observed.laundering_ratio, o);
      } else {
        error = std::numeric_limits<double>::infinity();
        step.budget_multiplier = o.max_multiplier;
      }
    }
    if (!result.trace.empty()) {
      const auto& prev = result.trace.back();
      const double dp = std::log(rate) - std::log(prev.purchase_rate_per_day);
      if (std::abs(dp) > 1e-12 && prev.observed.annual_tx_per_account > 0 && step.observed.annual_tx_per_account > 0) {
        step.rate_sensitivity =
            (std::log(step.observed.annual_tx_per_account) - std::log(prev.observed.annual_tx_per_account)) / dp;
      }
    }
    if (error < best_error) {
      best_error = error;
      result.config = apply(config, rate, scale);
    }
    const bool done = error <= o.tol;
    if (done) {
      step.rate_multiplier = 1.0;
      step.budget_multiplier = 1.0;
    }
    result.trace.push_back(step);
    if (done) {
      result.converged = true;
      break;
    }
    rate *= step.rate_multiplier;
    scale *= step.budget_multiplier;
  }
  result.warning = !result.converged;
  return result;
}

nlohmann::json to_json(const CalibrationResult& r) {
  using nlohmann::json;
  json trace = json::array();
  for (const auto& s : r.trace) {
    trace.push_back({
        {"iteration", s.iteration},
        {"purchase_rate_per_day", s.purchase_rate_per_day},
        {"budget_scale", s.budget_scale},
        {"observed_annual_tx_per_account", s.observed.annual_tx_per_account},
        {"observed_laundering_ratio", s.observed.laundering_ratio ? json(*s.observed.laundering_ratio) : json(nullptr)},
        {"pilot_transactions", s.observed.transactions},
        {"pilot_laundering", s.observed.laundering},
        {"rate_multiplier", s.rate_multiplier},
        {"budget_multiplier", s.budget_multiplier},
        {"rate_sensitivity", s.rate_sensitivity ? json(*s.rate_sensitivity) : json(nullptr)},
    });
  }
  return {{"converged", r.converged},
          {"warning", r.warning},
          {"purchase_rate_per_day", r.config.purchase_rate_per_day},
          {"pattern_budget", r.config.pattern_budget},
          {"trace", std::move(trace)}};
}

}  // namespace amlgen
