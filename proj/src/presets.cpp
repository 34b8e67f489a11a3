#include "amlgen/presets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "amlgen/patterns.hpp"

namespace amlgen {

namespace {

constexpr std::array<std::string_view, 6> kNames{"hi-small", "hi-medium", "hi-large", "li-small", "li-medium", "li-large"};

std::size_t name_index(const Preset& p) {
  return (p.level == IllicitLevel::High ? 0 : 3) + static_cast<std::size_t>(p.size);
}

// Largest-remainder rounding of non-negative reals to integers with the
// rounded total.
PatternBudget round_budget(const std::array<double, kPatternKindCount>& want) {
  PatternBudget out{};
  const double total = std::accumulate(want.begin(), want.end(), 0.0);
  const auto target = static_cast<std::int64_t>(std::llround(total));
  std::int64_t assigned = 0;
  std::array<std::pair<double, std::size_t>, kPatternKindCount> rem{};
  for (std::size_t k = 0; k < kPatternKindCount; ++k) {
    out[k] = static_cast<std::int64_t>(std::floor(want[k]));
    assigned += out[k];
    rem[k] = {want[k] - std::floor(want[k]), k};
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < target && i < rem.size(); ++i, ++assigned) ++out[rem[i].second];
  return out;
}

}  // namespace

std::optional<Preset> parse_preset(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) {
      return Preset{i < 3 ? IllicitLevel::High : IllicitLevel::Low, static_cast<PresetSize>(i % 3)};
    }
  }
  return std::nullopt;
}

std::string_view preset_name(const Preset& preset) { return kNames[name_index(preset)]; }

PresetTargets preset_targets(const Preset& p) {
  constexpr std::array<double, 6> kRows{5e6, 32e6, 180e6, 7e6, 31e6, 176e6};
  constexpr std::array<std::int64_t, 3> kDays{18, 28, 97};
  return {kRows[name_index(p)], kDays[static_cast<std::size_t>(p.size)],
          p.level == IllicitLevel::High ? 807.0 : 1750.0};
}

double expected_accounts_per_entity(const WorldConfig& c) {
  // 1 + geometric failures, capped.
  double e = 1.0;
  double tail = 1.0;
  for (std::int64_t k = 1; k < c.max_accounts_per_entity; ++k) {
    tail *= 1.0 - c.accounts_geometric_p;
    e += tail;
  }
  return e;
}

double expected_placement_rate(const WorldConfig& c) {
  double per_activity = 0.0;
  for (const auto& inc : c.criminal_income) per_activity += inc.mean_interval_days > 0 ? 1.0 / inc.mean_interval_days : 0.0;
  per_activity /= static_cast<double>(kCriminalActivityCount);
  const double activities = 0.5 * static_cast<double>(c.activities_per_enterprise.min + c.activities_per_enterprise.max);
  return per_activity * activities;
}

std::array<double, kPatternKindCount> reference_kind_weights() {
  // fan-out, fan-in, gather-scatter, scatter-gather, cycle, random, bipartite, stack
  return {277, 279, 284, 276, 298, 278, 277, 259};
}

double expected_pattern_transactions(const WorldConfig& c, const std::array<double, kPatternKindCount>& weights) {
  double tx = 0.0;
  double w = 0.0;
  for (std::size_t k = 0; k < kPatternKindCount; ++k) {
    tx += weights[k] * expected_edge_count(kAllPatternKinds[k], c.pattern_size_histogram);
    w += weights[k];
  }
  return w > 0 ? tx / w : 0.0;
}

WorldConfig preset_config(const Preset& preset, double scale, const WorldConfig& base) {
  if (!(scale > 0.0)) throw ConfigError("scale must be positive");
  WorldConfig c = base;
  const PresetTargets t = preset_targets(preset);
  const double rows = t.rows * scale;
  c.sim_days = t.sim_days;

  // Spans keep their share of the horizon; LI launders half as often over
  // patterns twice as long.
  const double span_scale = static_cast<double>(c.sim_days) / static_cast<double>(base.sim_days) *
                            (preset.level == IllicitLevel::Low ? 2.0 : 1.0);
  c.pattern_span_days = {base.pattern_span_days.min * span_scale, base.pattern_span_days.max * span_scale};
  if (preset.level == IllicitLevel::Low) {
    for (auto& inc : c.criminal_income) inc.mean_interval_days *= 2.0;
  }

  // Companies are a fixed share of individuals; banks hold accounts too but
  // are few enough to ignore here.
  const double company_share =
      base.num_individuals > 0 ? static_cast<double>(base.num_companies) / static_cast<double>(base.num_individuals) : 0.05;
  const double tx_per_entity = expected_accounts_per_entity(c) * c.target_annual_tx_per_account / 365.25 *
                               static_cast<double>(c.sim_days);
  const double individuals = rows / (tx_per_entity * (1.0 + company_share));
  c.num_individuals = std::max<std::int64_t>(50, std::llround(individuals));
  c.num_companies = std::max<std::int64_t>(5, std::llround(individuals * company_share));
  c.num_banks = std::clamp<std::int64_t>(std::llround(individuals / 500.0), 5, 1000);

  // Pattern rows P and other laundering m*P split the target laundering count.
  const double laundering = rows / t.laundering_ratio;
  const double pattern_rows = laundering / (1.0 + c.natural_laundering_multiplier);
  const auto weights = reference_kind_weights();
  const double per_instance = expected_pattern_transactions(c, weights);
  const double instances = per_instance > 0 ? pattern_rows / per_instance : 0.0;
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::array<double, kPatternKindCount> want{};
  for (std::size_t k = 0; k < kPatternKindCount; ++k) want[k] = instances * weights[k] / wsum;
  c.pattern_budget = round_budget(want);

  // Placements are part of the other-laundering share; keep them near a
  // quarter of it so integration spending fills the rest.
  const double placements = 0.25 * c.natural_laundering_multiplier * pattern_rows;
  const double rate = expected_placement_rate(c) * static_cast<double>(c.sim_days);
  const double entities = static_cast<double>(c.num_individuals + c.num_companies);
  double criminals = rate > 0 ? placements / rate : 0.0;
  criminals = std::max(criminals, 3.0);
  c.criminal_fraction = std::min(0.5, criminals / entities);
  return c;
}

}  // namespace amlgen
