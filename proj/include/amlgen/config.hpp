#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "amlgen/domain.hpp"
#include "amlgen/money.hpp"
#include "amlgen/sim_time.hpp"

namespace amlgen {

// Annual income band in reference-currency major units. A bin with
// min == max == 0 is the "no income" bin.
struct IncomeBin {
  double min = 0.0;
  double max = 0.0;
  double probability = 0.0;
  friend bool operator==(const IncomeBin&, const IncomeBin&) = default;
};

// Node-count band [min, max).
struct SizeBin {
  int min = 1;
  int max = 2;
  double probability = 0.0;
  friend bool operator==(const SizeBin&, const SizeBin&) = default;
};

struct CurrencySpec {
  CurrencyId id = 0;
  double rate = 1.0;   // units per one reference unit
  double share = 0.0;  // probability an entity banks in this currency
  friend bool operator==(const CurrencySpec&, const CurrencySpec&) = default;
};

struct FormatWeight {
  PaymentFormat format = PaymentFormat::ACH;
  double probability = 0.0;
  friend bool operator==(const FormatWeight&, const FormatWeight&) = default;
};

struct FrequencyWeight {
  PayFrequency frequency = PayFrequency::Monthly;
  double probability = 0.0;
  friend bool operator==(const FrequencyWeight&, const FrequencyWeight&) = default;
};

struct ActivityIncome {
  double mean_amount = 0.0;         // reference currency
  double mean_interval_days = 0.0;
  friend bool operator==(const ActivityIncome&, const ActivityIncome&) = default;
};

template <typename T>
struct Range {
  T min{};
  T max{};
  friend bool operator==(const Range&, const Range&) = default;
};

using PatternBudget = std::array<std::int64_t, kPatternKindCount>;

struct WorldConfig {
  std::uint64_t seed = 1;
  CivilDate sim_start{2022, 9, 1};
  std::int64_t sim_days = 28;

  std::int64_t num_individuals = 2000;
  std::int64_t num_companies = 100;
  std::int64_t num_banks = 10;
  double criminal_fraction = 0.005;
  double criminal_company_share = 0.5;

  double salary_participation = 0.625;
  double pension_participation = 0.183;
  std::vector<IncomeBin> salary_histogram;
  std::vector<IncomeBin> pension_histogram;
  std::vector<FrequencyWeight> salary_frequency;

  std::vector<CurrencySpec> currencies;  // first entry is the reference currency
  std::vector<FormatWeight> format_distribution;

  double target_annual_tx_per_account = 120.0;
  double purchase_rate_per_day = 0.5;
  double supplier_rate_per_day = 0.25;
  double interest_rate_monthly = 0.001;
  double accounts_geometric_p = 0.5;
  std::int64_t max_accounts_per_entity = 5;
  Range<double> company_size{1.0, 500.0};

  PatternBudget pattern_budget{};
  std::vector<SizeBin> pattern_size_histogram;
  Range<double> pattern_span_days{1.0, 10.0};
  double natural_laundering_multiplier = 4.17;
  double taint_label_threshold = 0.5;
  Range<double> hop_retention_range{0.0, 0.05};
  double account_reuse_probability = 0.2;

  Range<std::int64_t> shell_depth{1, 3};
  Range<std::int64_t> activities_per_enterprise{1, 3};
  std::array<ActivityIncome, kCriminalActivityCount> criminal_income{};
  double integration_ticks_per_day = 2.0;
  std::int64_t integration_max_per_tick = 8;

  SimTime start_time() const { return to_sim_time(sim_start); }
  SimTime horizon() const { return sim_days * kMinutesPerDay; }
  ExchangeRates exchange_rates() const;

  friend bool operator==(const WorldConfig&, const WorldConfig&) = default;
};

// The scaled-down default world shipped with the repository (config/default.json).
WorldConfig default_config();

struct ConfigViolation {
  std::string field;
  std::string rule;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigViolation> violations);
  explicit ConfigError(const std::string& message);
  const std::vector<ConfigViolation>& violations() const { return violations_; }

 private:
  std::vector<ConfigViolation> violations_;
};

std::vector<ConfigViolation> check_config(const WorldConfig& config);
// Returns the config unchanged iff it is valid; throws ConfigError listing
// every violation otherwise.
const WorldConfig& validate_config(const WorldConfig& config);

nlohmann::json to_json(const WorldConfig& config);
// Unknown keys are rejected; missing keys keep their default_config() value.
WorldConfig config_from_json(const nlohmann::json& doc);
WorldConfig load_config(const std::string& path);
std::string config_hash(const WorldConfig& config);

double probability_sum(const std::vector<IncomeBin>& bins);

}  // namespace amlgen
