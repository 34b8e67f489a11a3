#pragma once

#include <optional>
#include <string_view>

#include "amlgen/config.hpp"

namespace amlgen {

enum class IllicitLevel : std::uint8_t { High, Low };
enum class PresetSize : std::uint8_t { Small, Medium, Large };

struct Preset {
  IllicitLevel level = IllicitLevel::Low;
  PresetSize size = PresetSize::Small;
  friend bool operator==(const Preset&, const Preset&) = default;
};

std::optional<Preset> parse_preset(std::string_view name);  // "hi-small" .. "li-large"
std::string_view preset_name(const Preset& preset);

struct PresetTargets {
  double rows = 0.0;         // transactions at scale 1
  std::int64_t sim_days = 0;
  double laundering_ratio = 0.0;  // transactions per laundering transaction
};

PresetTargets preset_targets(const Preset& preset);

// Expected accounts per non-bank entity under the accounts-per-entity knobs.
double expected_accounts_per_entity(const WorldConfig& config);
// Expected placements per criminal per day.
double expected_placement_rate(const WorldConfig& config);
// Expected transactions per instance, weighted over kinds by `weights`.
double expected_pattern_transactions(const WorldConfig& config, const std::array<double, kPatternKindCount>& weights);

// Relative kind frequencies of the reference large LI dataset.
std::array<double, kPatternKindCount> reference_kind_weights();

// Derives population size, horizon, criminal share and pattern budget from
// the preset's row and laundering-ratio targets, starting from `base`. LI
// presets halve criminal income frequency and double pattern spans.
WorldConfig preset_config(const Preset& preset, double scale, const WorldConfig& base = default_config());

}  // namespace amlgen
