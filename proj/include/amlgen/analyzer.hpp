#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "amlgen/csv.hpp"
#include "amlgen/domain.hpp"
#include "amlgen/errors.hpp"

namespace amlgen {

// Node-count bins [1,2) [2,4) [4,8) [8,12) [12,18) [18,inf).
constexpr std::array<int, 6> kNodeBinLower{1, 2, 4, 8, 12, 18};
std::size_t node_bin(std::size_t nodes);

// Default annualized-rate bin lower edges: 0-16, 16-32, 32-64, 64-128, 128+.
std::vector<double> default_rate_edges();

// Single-pass accumulator over dataset rows in file order.
class DatasetScan {
 public:
  void add(const Transaction& tx, RowIndex row);
  void add_issue(const CsvIssue& issue) { issues_.push_back(issue); }

  std::uint64_t rows() const { return rows_; }
  std::uint64_t laundering() const { return laundering_rows_.size(); }
  const std::vector<RowIndex>& laundering_rows() const { return laundering_rows_; }
  std::uint64_t accounts() const { return outgoing_.size(); }
  std::uint64_t banks() const { return banks_.size(); }
  SimTime first() const { return first_; }
  SimTime last() const { return last_; }
  bool ordered() const { return ordered_; }
  const std::vector<CsvIssue>& issues() const { return issues_; }
  const std::array<std::uint64_t, kPaymentFormatCount>& formats() const { return formats_; }
  // Outgoing row count per account, including accounts that only receive (0).
  std::vector<std::uint64_t> outgoing_counts() const;

 private:
  static std::uint64_t key(BankId bank, const AccountId& account) {
    return (static_cast<std::uint64_t>(bank) << 36) | account.value();
  }

  std::uint64_t rows_ = 0;
  std::vector<RowIndex> laundering_rows_;
  std::unordered_map<std::uint64_t, std::uint64_t> outgoing_;
  std::unordered_set<BankId> banks_;
  std::array<std::uint64_t, kPaymentFormatCount> formats_{};
  SimTime first_ = 0;
  SimTime last_ = 0;
  bool ordered_ = true;
  std::vector<CsvIssue> issues_;
};

DatasetScan scan_csv(const std::string& path);
DatasetScan scan_rows(std::span<const Transaction> rows);

struct Summary {
  std::uint64_t transactions = 0;
  std::uint64_t unique_accounts = 0;
  std::uint64_t unique_banks = 0;
  SimTime first = 0;
  SimTime last = 0;
  std::uint64_t laundering = 0;
  std::optional<double> laundering_ratio;  // transactions per laundering row; none when 0
  std::vector<CsvIssue> malformed;
};

Summary summarize(const DatasetScan& scan);

struct RateBreakdown {
  std::uint64_t pattern = 0;
  std::uint64_t other = 0;
  std::uint64_t total = 0;
  std::optional<double> pattern_ratio;  // transactions per row of each class
  std::optional<double> other_ratio;
  std::optional<double> total_ratio;
  std::optional<double> other_per_pattern;
};

// Throws IntegrityError when the sidecar references a missing or
// non-laundering row.
RateBreakdown rate_breakdown(const DatasetScan& scan, std::span<const PatternInstance> sidecar);

struct PatternReport {
  struct KindRow {
    std::uint64_t instances = 0;
    std::uint64_t transactions = 0;
    std::uint64_t partial = 0;
  };
  std::array<KindRow, kPatternKindCount> kinds{};
  std::array<std::uint64_t, kNodeBinLower.size()> node_histogram{};
  std::uint64_t instances = 0;
  std::uint64_t transactions = 0;
};

PatternReport pattern_report(std::span<const PatternInstance> sidecar);

struct ActivityReport {
  double span_days = 0.0;
  std::vector<double> rate_edges;  // lower edges; last bin unbounded
  std::vector<std::uint64_t> rate_counts;
  double mean_annual_rate = 0.0;
  std::array<std::uint64_t, kPaymentFormatCount> format_counts{};
  std::array<double, kPaymentFormatCount> format_fractions{};
};

// span_days <= 0 derives the span from the first and last timestamps.
// Throws std::invalid_argument on a zero span.
ActivityReport activity_histograms(const DatasetScan& scan, double span_days = 0.0,
                                   std::vector<double> rate_edges = default_rate_edges());

struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

// Goodness of fit of observed counts against probabilities; categories with
// zero expected probability must have zero observations (else p = 0).
ChiSquare chi_square(std::span<const std::uint64_t> observed, std::span<const double> probabilities);

struct IntegrityReport {
  std::vector<std::string> violations;
  std::uint64_t checked_patterns = 0;
  std::uint64_t partial_patterns = 0;
  bool clean() const { return violations.empty(); }
};

// Sidecar/CSV integrity plus the structural validator on every complete
// instance.
IntegrityReport check_dataset(const std::string& csv_path, std::span<const PatternInstance> sidecar);

nlohmann::json to_json(const Summary& s);
nlohmann::json to_json(const RateBreakdown& r);
nlohmann::json to_json(const PatternReport& r);
nlohmann::json to_json(const ActivityReport& r);

std::string format_report(const Summary& s, const ActivityReport* activity, const RateBreakdown* rates,
                          const PatternReport* patterns);

}  // namespace amlgen
