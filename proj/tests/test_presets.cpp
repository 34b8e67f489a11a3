#include <cmath>
#include <numeric>

#include "amlgen/patterns.hpp"
#include "amlgen/presets.hpp"
#include "doctest.h"

using namespace amlgen;

TEST_CASE("preset names") {
  for (std::string_view n : {"hi-small", "hi-medium", "hi-large", "li-small", "li-medium", "li-large"}) {
    const auto p = parse_preset(n);
    REQUIRE(p);
    CHECK(preset_name(*p) == n);
  }
  CHECK_FALSE(parse_preset("HI-small").has_value());
  CHECK_FALSE(parse_preset("hi").has_value());
  CHECK(parse_preset("li-medium")->level == IllicitLevel::Low);
  CHECK(parse_preset("hi-large")->size == PresetSize::Large);
}

TEST_CASE("preset targets") {
  const auto hs = preset_targets(*parse_preset("hi-small"));
  CHECK(hs.rows == 5e6);
  CHECK(hs.sim_days == 18);
  CHECK(hs.laundering_ratio == 807.0);
  const auto ll = preset_targets(*parse_preset("li-large"));
  CHECK(ll.rows == 176e6);
  CHECK(ll.sim_days == 97);
  CHECK(ll.laundering_ratio == 1750.0);
}

TEST_CASE("expected accounts per entity") {
  WorldConfig c = default_config();
  // 1 + 1/2 + 1/4 + 1/8 + 1/16 for p = 0.5 capped at 5.
  CHECK(expected_accounts_per_entity(c) == doctest::Approx(1.9375));
  c.max_accounts_per_entity = 1;
  CHECK(expected_accounts_per_entity(c) == 1.0);
}

TEST_CASE("preset configs are valid and sized to the row target") {
  for (std::string_view n : {"hi-small", "hi-medium", "hi-large", "li-small", "li-medium", "li-large"}) {
    const Preset p = *parse_preset(n);
    for (double scale : {0.01, 0.1, 1.0}) {
      const WorldConfig c = preset_config(p, scale);
      CHECK_MESSAGE(check_config(c).empty(), n, " at scale ", scale);
      const PresetTargets t = preset_targets(p);
      CHECK(c.sim_days == t.sim_days);
      const double rows = static_cast<double>(c.num_individuals + c.num_companies) * expected_accounts_per_entity(c) *
                          c.target_annual_tx_per_account / 365.25 * static_cast<double>(c.sim_days);
      CHECK(rows == doctest::Approx(t.rows * scale).epsilon(0.01));

      // Pattern rows times (1 + m) equals the laundering target.
      const auto budget = std::accumulate(c.pattern_budget.begin(), c.pattern_budget.end(), std::int64_t{0});
      const double per = expected_pattern_transactions(c, reference_kind_weights());
      const double laundering = static_cast<double>(budget) * per * (1.0 + c.natural_laundering_multiplier);
      // Integer instance counts: off by at most half an instance's rows.
      const double want = t.rows * scale / t.laundering_ratio;
      CHECK(std::abs(laundering - want) <= 0.5 * per * (1.0 + c.natural_laundering_multiplier) + 1e-9);
      CHECK(c.criminal_fraction > 0.0);
      CHECK(c.criminal_fraction < 0.5);
    }
  }
  const auto hi = preset_config(*parse_preset("hi-medium"), 0.1);
  const auto li = preset_config(*parse_preset("li-medium"), 0.1);
  CHECK(li.pattern_span_days.max == doctest::Approx(2.0 * hi.pattern_span_days.max));
  CHECK(li.criminal_income[0].mean_interval_days == 2.0 * hi.criminal_income[0].mean_interval_days);
  CHECK_THROWS_AS(preset_config(*parse_preset("hi-small"), 0.0), ConfigError);
}
