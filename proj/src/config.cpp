#include "amlgen/config.hpp"

#include <climits>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "amlgen/rng.hpp"

namespace amlgen {

using nlohmann::json;

namespace {

constexpr int kUnboundedBin = INT_MAX;
constexpr int kMaxPatternNodes = 18;  // bins at or above this must be empty

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

template <typename T, typename F>
double sum_of(const std::vector<T>& items, F&& get) {
  double s = 0.0;
  for (const auto& it : items) s += get(it);
  return s;
}

void check_sum(std::vector<ConfigViolation>& out, const std::string& field, double sum) {
  if (std::abs(sum - 1.0) > 1e-9) out.push_back({field, field + " sums to " + fmt_double(sum)});
}

void check_open_unit(std::vector<ConfigViolation>& out, const std::string& field, double v) {
  if (!(v > 0.0 && v < 1.0)) out.push_back({field, field + " must lie in (0,1), got " + fmt_double(v)});
}

// -------- JSON helpers --------

class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_ + ": expected a JSON object");
  }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  template <typename T>
  void read(const std::string& key, T& target) {
    if (const json* v = get(key)) {
      try {
        target = v->get<T>();
      } catch (const json::exception& e) {
        throw ConfigError(path_ + key + ": " + e.what());
      }
    }
  }

  void finish() const {
    std::vector<ConfigViolation> unknown;
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) unknown.push_back({path_ + it.key(), "unknown key '" + path_ + it.key() + "'"});
    }
    if (!unknown.empty()) throw ConfigError(std::move(unknown));
  }

  const std::string& path() const { return path_; }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

json income_bins_json(const std::vector<IncomeBin>& bins) {
  json arr = json::array();
  for (const auto& b : bins) arr.push_back({{"min", b.min}, {"max", b.max}, {"p", b.probability}});
  return arr;
}

std::vector<IncomeBin> income_bins_from(const json& arr, const std::string& field) {
  if (!arr.is_array()) throw ConfigError(field + ": expected an array");
  std::vector<IncomeBin> bins;
  for (const auto& item : arr) {
    ObjectReader r(item, field + ".");
    IncomeBin b;
    r.read("min", b.min);
    r.read("max", b.max);
    r.read("p", b.probability);
    r.finish();
    bins.push_back(b);
  }
  return bins;
}

template <typename T>
json range_json(const Range<T>& r) {
  return json::array({r.min, r.max});
}

template <typename T>
Range<T> range_from(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 2) throw ConfigError(field + ": expected [min, max]");
  try {
    return {v[0].get<T>(), v[1].get<T>()};
  } catch (const json::exception& e) {
    throw ConfigError(field + ": " + e.what());
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigViolation> violations)
    : std::runtime_error([&] {
        std::string msg = "invalid configuration:";
        for (const auto& v : violations) msg += "\n  - " + v.rule;
        return msg;
      }()),
      violations_(std::move(violations)) {}

ConfigError::ConfigError(const std::string& message)
    : std::runtime_error("invalid configuration: " + message), violations_{{"", message}} {}

ExchangeRates WorldConfig::exchange_rates() const {
  std::vector<ExchangeRates::Entry> entries;
  for (const auto& c : currencies) entries.push_back({c.id, c.rate});
  return ExchangeRates(std::move(entries));
}

double probability_sum(const std::vector<IncomeBin>& bins) {
  return sum_of(bins, [](const IncomeBin& b) { return b.probability; });
}

WorldConfig default_config() {
  WorldConfig c;
  c.seed = 1;
  c.sim_start = {2022, 9, 1};
  c.sim_days = 90;
  c.num_individuals = 10000;
  c.num_companies = 500;
  c.num_banks = 20;
  c.criminal_fraction = 0.001;

  // Annual wages per return (IRS-style bands).
  c.salary_histogram = {
      {1, 5000, 0.07},          {5000, 10000, 0.07},      {10000, 15000, 0.07},   {15000, 20000, 0.07},
      {20000, 25000, 0.07},     {25000, 30000, 0.065},    {30000, 40000, 0.115},  {40000, 50000, 0.09},
      {50000, 75000, 0.15},     {75000, 100000, 0.095},   {100000, 200000, 0.105}, {200000, 500000, 0.025},
      {500000, 1000000, 0.004}, {1000000, 5000000, 0.001},
  };
  c.pension_histogram = {
      {1, 5000, 0.17},      {5000, 10000, 0.14},    {10000, 15000, 0.12},   {15000, 20000, 0.10},
      {20000, 25000, 0.09}, {25000, 30000, 0.07},   {30000, 40000, 0.11},   {40000, 50000, 0.075},
      {50000, 75000, 0.08}, {75000, 100000, 0.025}, {100000, 200000, 0.015}, {200000, 500000, 0.005},
  };
  c.salary_frequency = {
      {PayFrequency::Weekly, 0.32}, {PayFrequency::Biweekly, 0.43}, {PayFrequency::Monthly, 0.25}};

  auto cur = [](std::string_view name, double rate, double share) {
    return CurrencySpec{*find_currency(name), rate, share};
  };
  c.currencies = {
      cur("US Dollar", 1.0, 0.62),      cur("Euro", 0.92, 0.14), cur("UK Pound", 0.79, 0.06),
      cur("Yuan", 7.1, 0.05),           cur("Yen", 145.0, 0.05), cur("Rupee", 83.0, 0.04),
      cur("Canadian Dollar", 1.35, 0.03), cur("Bitcoin", 0.000017, 0.01),
  };
  c.format_distribution = {
      {PaymentFormat::Cheque, 0.31}, {PaymentFormat::ACH, 0.25},  {PaymentFormat::CreditCard, 0.23},
      {PaymentFormat::Cash, 0.09},   {PaymentFormat::Reinvestment, 0.08}, {PaymentFormat::Wire, 0.03},
      {PaymentFormat::Bitcoin, 0.01},
  };

  c.target_annual_tx_per_account = 120.0;
  c.purchase_rate_per_day = 0.5;
  c.supplier_rate_per_day = 0.25;

  // Aggregate node-count histogram of the eight pattern kinds (2,228 instances).
  c.pattern_size_histogram = {
      {1, 2, 519.0 / 2228.0},  {2, 4, 345.0 / 2228.0},   {4, 8, 513.0 / 2228.0},
      {8, 12, 446.0 / 2228.0}, {12, 18, 405.0 / 2228.0}, {18, kUnboundedBin, 0.0},
  };
  c.pattern_budget = {1, 1, 1, 1, 1, 1, 1, 1};
  c.pattern_span_days = {2.0, 20.0};
  c.natural_laundering_multiplier = 81143.0 / 19461.0;
  c.taint_label_threshold = 0.5;
  c.hop_retention_range = {0.0, 0.05};

  // Mean proceeds (reference currency) and mean days between events.
  c.criminal_income = {{
      {4000, 14},   // extortion
      {3000, 10},   // loan sharking
      {2500, 7},    // gambling
      {1500, 5},    // prostitution
      {50000, 120}, // kidnapping
      {8000, 45},   // robbery
      {20000, 30},  // embezzlement
      {6000, 7},    // drugs
      {25000, 30},  // smuggling
  }};
  return c;
}

std::vector<ConfigViolation> check_config(const WorldConfig& c) {
  std::vector<ConfigViolation> out;

  if (c.sim_days <= 0) out.push_back({"sim_days", "sim_days must be positive"});
  if (c.num_individuals <= 0) out.push_back({"num_individuals", "zero population: num_individuals must be positive"});
  if (c.num_companies <= 0) out.push_back({"num_companies", "zero population: num_companies must be positive"});
  if (c.num_banks <= 0) out.push_back({"num_banks", "num_banks must be positive"});

  // Zero is admitted so a crime-free world can be generated.
  if (!(c.criminal_fraction >= 0.0 && c.criminal_fraction < 1.0)) {
    out.push_back({"criminal_fraction", "criminal_fraction must lie in [0,1), got " + fmt_double(c.criminal_fraction)});
  }
  if (!(c.criminal_company_share >= 0.0 && c.criminal_company_share <= 1.0)) {
    out.push_back({"criminal_company_share", "criminal_company_share must lie in [0,1]"});
  }
  check_open_unit(out, "salary_participation", c.salary_participation);
  check_open_unit(out, "pension_participation", c.pension_participation);

  auto check_income = [&](const std::vector<IncomeBin>& bins, const std::string& field) {
    if (bins.empty()) {
      out.push_back({field, field + " is empty"});
      return;
    }
    for (const auto& b : bins) {
      if (b.min < 0 || b.max < b.min || b.probability < 0) {
        out.push_back({field, field + " has a malformed bin [" + fmt_double(b.min) + "," + fmt_double(b.max) + "]"});
      }
    }
    check_sum(out, field, probability_sum(bins));
  };
  check_income(c.salary_histogram, "salary_histogram");
  check_income(c.pension_histogram, "pension_histogram");

  if (c.salary_frequency.empty()) out.push_back({"salary_frequency", "salary_frequency is empty"});
  check_sum(out, "salary_frequency", sum_of(c.salary_frequency, [](const auto& f) { return f.probability; }));

  if (c.currencies.empty()) {
    out.push_back({"currencies", "empty currency list"});
  } else {
    std::set<CurrencyId> seen;
    for (const auto& cur : c.currencies) {
      if (!(cur.rate > 0.0)) {
        out.push_back({"currencies", "currency " + std::string(currency_name(cur.id)) + " has non-positive rate"});
      }
      if (cur.share < 0.0) out.push_back({"currencies", "negative currency share"});
      if (!seen.insert(cur.id).second) {
        out.push_back({"currencies", "duplicate currency " + std::string(currency_name(cur.id))});
      }
    }
    if (c.currencies.front().rate != 1.0) {
      out.push_back({"currencies", "reference currency (first entry) must have rate exactly 1"});
    }
    check_sum(out, "currencies.share", sum_of(c.currencies, [](const auto& x) { return x.share; }));
  }

  if (c.format_distribution.empty()) out.push_back({"format_distribution", "format_distribution is empty"});
  {
    std::set<PaymentFormat> seen;
    for (const auto& f : c.format_distribution) {
      if (f.probability < 0.0) out.push_back({"format_distribution", "negative format probability"});
      if (!seen.insert(f.format).second) {
        out.push_back({"format_distribution", "duplicate format " + std::string(to_string(f.format))});
      }
    }
  }
  check_sum(out, "format_distribution", sum_of(c.format_distribution, [](const auto& f) { return f.probability; }));

  if (!(c.target_annual_tx_per_account > 0.0)) {
    out.push_back({"target_annual_tx_per_account", "target_annual_tx_per_account must be positive"});
  }
  if (!(c.purchase_rate_per_day >= 0.0)) out.push_back({"purchase_rate_per_day", "must be non-negative"});
  if (!(c.supplier_rate_per_day >= 0.0)) out.push_back({"supplier_rate_per_day", "must be non-negative"});
  if (!(c.interest_rate_monthly >= 0.0 && c.interest_rate_monthly < 0.1)) {
    out.push_back({"interest_rate_monthly", "interest_rate_monthly must lie in [0,0.1)"});
  }
  if (!(c.accounts_geometric_p > 0.0 && c.accounts_geometric_p <= 1.0)) {
    out.push_back({"accounts_geometric_p", "accounts_geometric_p must lie in (0,1]"});
  }
  if (c.max_accounts_per_entity < 1) out.push_back({"max_accounts_per_entity", "must be at least 1"});
  if (!(c.company_size.min >= 1.0 && c.company_size.max >= c.company_size.min)) {
    out.push_back({"company_size", "company_size must satisfy 1 <= min <= max"});
  }

  for (std::size_t k = 0; k < kPatternKindCount; ++k) {
    if (c.pattern_budget[k] < 0) {
      out.push_back({"pattern_budget", "negative budget for " + std::string(to_string(kAllPatternKinds[k]))});
    }
  }
  if (c.pattern_size_histogram.empty()) out.push_back({"pattern_size_histogram", "pattern_size_histogram is empty"});
  for (const auto& b : c.pattern_size_histogram) {
    if (b.min < 1 || b.max <= b.min || b.probability < 0.0) {
      out.push_back({"pattern_size_histogram", "malformed node-count bin"});
      continue;
    }
    if (b.max > kMaxPatternNodes && b.probability > 0.0) {
      const std::string hi = b.max == kUnboundedBin ? "inf" : std::to_string(b.max);
      out.push_back({"pattern_size_histogram", "pattern_size_histogram assigns " + fmt_double(b.probability) +
                                                   " to bin [" + std::to_string(b.min) + "," + hi +
                                                   ") reaching 18 or more nodes"});
    }
  }
  check_sum(out, "pattern_size_histogram",
            sum_of(c.pattern_size_histogram, [](const SizeBin& b) { return b.probability; }));

  if (!(c.pattern_span_days.min > 0.0 && c.pattern_span_days.max >= c.pattern_span_days.min)) {
    out.push_back({"pattern_span_days", "pattern_span_days must satisfy 0 < min <= max"});
  } else if (c.pattern_span_days.max >= static_cast<double>(c.sim_days) && c.sim_days > 0) {
    out.push_back({"pattern_span_days", "pattern_span_days.max must be shorter than sim_days"});
  }
  if (!(c.natural_laundering_multiplier > 0.0)) {
    out.push_back({"natural_laundering_multiplier", "natural_laundering_multiplier must be positive"});
  }
  if (!(c.taint_label_threshold > 0.0 && c.taint_label_threshold <= 1.0)) {
    out.push_back({"taint_label_threshold", "taint_label_threshold must lie in (0,1]"});
  }
  if (!(c.hop_retention_range.min >= 0.0 && c.hop_retention_range.max <= 0.2 &&
        c.hop_retention_range.min <= c.hop_retention_range.max)) {
    out.push_back({"hop_retention_range", "hop_retention_range must satisfy 0 <= min <= max <= 0.2"});
  }
  if (!(c.account_reuse_probability >= 0.0 && c.account_reuse_probability <= 1.0)) {
    out.push_back({"account_reuse_probability", "must lie in [0,1]"});
  }
  if (c.shell_depth.min < 1 || c.shell_depth.max < c.shell_depth.min) {
    out.push_back({"shell_depth", "shell_depth must satisfy 1 <= min <= max"});
  }
  if (c.activities_per_enterprise.min < 1 || c.activities_per_enterprise.max < c.activities_per_enterprise.min ||
      c.activities_per_enterprise.max > static_cast<std::int64_t>(kCriminalActivityCount)) {
    out.push_back({"activities_per_enterprise", "activities_per_enterprise must satisfy 1 <= min <= max <= 9"});
  }
  for (std::size_t a = 0; a < kCriminalActivityCount; ++a) {
    const auto& inc = c.criminal_income[a];
    if (!(inc.mean_amount > 0.0 && inc.mean_interval_days > 0.0)) {
      out.push_back({"criminal_income",
                     "criminal_income." + std::string(to_string(static_cast<CriminalActivity>(a))) +
                         " needs positive mean_amount and mean_interval_days"});
    }
  }
  if (!(c.integration_ticks_per_day > 0.0)) out.push_back({"integration_ticks_per_day", "must be positive"});
  if (c.integration_max_per_tick < 1) out.push_back({"integration_max_per_tick", "must be at least 1"});
  return out;
}

const WorldConfig& validate_config(const WorldConfig& config) {
  auto violations = check_config(config);
  if (!violations.empty()) throw ConfigError(std::move(violations));
  return config;
}

json to_json(const WorldConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["sim_start"] = format_iso_date(c.sim_start);
  j["sim_days"] = c.sim_days;
  j["num_individuals"] = c.num_individuals;
  j["num_companies"] = c.num_companies;
  j["num_banks"] = c.num_banks;
  j["criminal_fraction"] = c.criminal_fraction;
  j["criminal_company_share"] = c.criminal_company_share;
  j["salary_participation"] = c.salary_participation;
  j["pension_participation"] = c.pension_participation;
  j["salary_histogram"] = income_bins_json(c.salary_histogram);
  j["pension_histogram"] = income_bins_json(c.pension_histogram);
  json freq = json::array();
  for (const auto& f : c.salary_frequency) freq.push_back({{"frequency", to_string(f.frequency)}, {"p", f.probability}});
  j["salary_frequency"] = freq;
  json cur = json::array();
  for (const auto& x : c.currencies) {
    cur.push_back({{"name", currency_name(x.id)}, {"rate", x.rate}, {"share", x.share}});
  }
  j["currencies"] = cur;
  json fmt = json::array();
  for (const auto& f : c.format_distribution) fmt.push_back({{"format", to_string(f.format)}, {"p", f.probability}});
  j["format_distribution"] = fmt;
  j["target_annual_tx_per_account"] = c.target_annual_tx_per_account;
  j["purchase_rate_per_day"] = c.purchase_rate_per_day;
  j["supplier_rate_per_day"] = c.supplier_rate_per_day;
  j["interest_rate_monthly"] = c.interest_rate_monthly;
  j["accounts_geometric_p"] = c.accounts_geometric_p;
  j["max_accounts_per_entity"] = c.max_accounts_per_entity;
  j["company_size"] = range_json(c.company_size);
  json budget = json::object();
  for (std::size_t k = 0; k < kPatternKindCount; ++k) budget[std::string(to_string(kAllPatternKinds[k]))] = c.pattern_budget[k];
  j["pattern_budget"] = budget;
  json sizes = json::array();
  for (const auto& b : c.pattern_size_histogram) {
    json bin = {{"min", b.min}, {"p", b.probability}};
    bin["max"] = b.max == kUnboundedBin ? json(nullptr) : json(b.max);
    sizes.push_back(bin);
  }
  j["pattern_size_histogram"] = sizes;
  j["pattern_span_days"] = range_json(c.pattern_span_days);
  j["natural_laundering_multiplier"] = c.natural_laundering_multiplier;
  j["taint_label_threshold"] = c.taint_label_threshold;
  j["hop_retention_range"] = range_json(c.hop_retention_range);
  j["account_reuse_probability"] = c.account_reuse_probability;
  j["shell_depth"] = range_json(c.shell_depth);
  j["activities_per_enterprise"] = range_json(c.activities_per_enterprise);
  json income = json::object();
  for (std::size_t a = 0; a < kCriminalActivityCount; ++a) {
    income[std::string(to_string(static_cast<CriminalActivity>(a)))] = {
        {"mean_amount", c.criminal_income[a].mean_amount},
        {"mean_interval_days", c.criminal_income[a].mean_interval_days}};
  }
  j["criminal_income"] = income;
  j["integration_ticks_per_day"] = c.integration_ticks_per_day;
  j["integration_max_per_tick"] = c.integration_max_per_tick;
  return j;
}

WorldConfig config_from_json(const json& doc) {
  WorldConfig c = default_config();
  ObjectReader r(doc, "");
  r.read("seed", c.seed);
  if (const json* v = r.get("sim_start")) {
    const auto text = v->is_string() ? v->get<std::string>() : std::string{};
    auto date = parse_iso_date(text);
    if (!date) throw ConfigError("sim_start: expected YYYY-MM-DD");
    c.sim_start = *date;
  }
  r.read("sim_days", c.sim_days);
  r.read("num_individuals", c.num_individuals);
  r.read("num_companies", c.num_companies);
  r.read("num_banks", c.num_banks);
  r.read("criminal_fraction", c.criminal_fraction);
  r.read("criminal_company_share", c.criminal_company_share);
  r.read("salary_participation", c.salary_participation);
  r.read("pension_participation", c.pension_participation);
  if (const json* v = r.get("salary_histogram")) c.salary_histogram = income_bins_from(*v, "salary_histogram");
  if (const json* v = r.get("pension_histogram")) c.pension_histogram = income_bins_from(*v, "pension_histogram");
  if (const json* v = r.get("salary_frequency")) {
    if (!v->is_array()) throw ConfigError("salary_frequency: expected an array");
    c.salary_frequency.clear();
    for (const auto& item : *v) {
      ObjectReader fr(item, "salary_frequency.");
      std::string name;
      FrequencyWeight w;
      fr.read("frequency", name);
      fr.read("p", w.probability);
      fr.finish();
      auto f = parse_pay_frequency(name);
      if (!f) throw ConfigError("salary_frequency: unknown frequency '" + name + "'");
      w.frequency = *f;
      c.salary_frequency.push_back(w);
    }
  }
  if (const json* v = r.get("currencies")) {
    if (!v->is_array()) throw ConfigError("currencies: expected an array");
    c.currencies.clear();
    for (const auto& item : *v) {
      ObjectReader cr(item, "currencies.");
      std::string name;
      CurrencySpec spec;
      cr.read("name", name);
      cr.read("rate", spec.rate);
      cr.read("share", spec.share);
      cr.finish();
      auto id = find_currency(name);
      if (!id) throw ConfigError("currencies: unknown currency '" + name + "'");
      spec.id = *id;
      c.currencies.push_back(spec);
    }
  }
  if (const json* v = r.get("format_distribution")) {
    if (!v->is_array()) throw ConfigError("format_distribution: expected an array");
    c.format_distribution.clear();
    for (const auto& item : *v) {
      ObjectReader fr(item, "format_distribution.");
      std::string name;
      FormatWeight w;
      fr.read("format", name);
      fr.read("p", w.probability);
      fr.finish();
      auto f = parse_payment_format(name);
      if (!f) throw ConfigError("format_distribution: unknown format '" + name + "'");
      w.format = *f;
      c.format_distribution.push_back(w);
    }
  }
  r.read("target_annual_tx_per_account", c.target_annual_tx_per_account);
  r.read("purchase_rate_per_day", c.purchase_rate_per_day);
  r.read("supplier_rate_per_day", c.supplier_rate_per_day);
  r.read("interest_rate_monthly", c.interest_rate_monthly);
  r.read("accounts_geometric_p", c.accounts_geometric_p);
  r.read("max_accounts_per_entity", c.max_accounts_per_entity);
  if (const json* v = r.get("company_size")) c.company_size = range_from<double>(*v, "company_size");
  if (const json* v = r.get("pattern_budget")) {
    ObjectReader br(*v, "pattern_budget.");
    for (std::size_t k = 0; k < kPatternKindCount; ++k) {
      c.pattern_budget[k] = 0;
      br.read(std::string(to_string(kAllPatternKinds[k])), c.pattern_budget[k]);
    }
    br.finish();
  }
  if (const json* v = r.get("pattern_size_histogram")) {
    if (!v->is_array()) throw ConfigError("pattern_size_histogram: expected an array");
    c.pattern_size_histogram.clear();
    for (const auto& item : *v) {
      ObjectReader sr(item, "pattern_size_histogram.");
      SizeBin b;
      sr.read("min", b.min);
      sr.read("p", b.probability);
      if (const json* mx = sr.get("max")) b.max = mx->is_null() ? kUnboundedBin : mx->get<int>();
      sr.finish();
      c.pattern_size_histogram.push_back(b);
    }
  }
  if (const json* v = r.get("pattern_span_days")) c.pattern_span_days = range_from<double>(*v, "pattern_span_days");
  r.read("natural_laundering_multiplier", c.natural_laundering_multiplier);
  r.read("taint_label_threshold", c.taint_label_threshold);
  if (const json* v = r.get("hop_retention_range")) c.hop_retention_range = range_from<double>(*v, "hop_retention_range");
  r.read("account_reuse_probability", c.account_reuse_probability);
  if (const json* v = r.get("shell_depth")) c.shell_depth = range_from<std::int64_t>(*v, "shell_depth");
  if (const json* v = r.get("activities_per_enterprise")) {
    c.activities_per_enterprise = range_from<std::int64_t>(*v, "activities_per_enterprise");
  }
  if (const json* v = r.get("criminal_income")) {
    ObjectReader ir(*v, "criminal_income.");
    for (std::size_t a = 0; a < kCriminalActivityCount; ++a) {
      const std::string name(to_string(static_cast<CriminalActivity>(a)));
      if (const json* item = ir.get(name)) {
        ObjectReader ar(*item, "criminal_income." + name + ".");
        ar.read("mean_amount", c.criminal_income[a].mean_amount);
        ar.read("mean_interval_days", c.criminal_income[a].mean_interval_days);
        ar.finish();
      }
    }
    ir.finish();
  }
  r.read("integration_ticks_per_day", c.integration_ticks_per_day);
  r.read("integration_max_per_tick", c.integration_max_per_tick);
  r.finish();
  return c;
}

WorldConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return config_from_json(doc);
}

std::string config_hash(const WorldConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_json(config).dump())));
  return buf;
}

}  // namespace amlgen
