#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "amlgen/config.hpp"
#include "amlgen/errors.hpp"
#include "amlgen/sim_time.hpp"

namespace amlgen {

struct RowRange {
  std::uint64_t begin = 0;  // half-open
  std::uint64_t end = 0;
  std::uint64_t size() const { return end - begin; }
  friend bool operator==(const RowRange&, const RowRange&) = default;
};

struct SplitFractions {
  double train = 0.6;
  double validation = 0.2;
  double test = 0.2;
};

// Throws ConfigError unless every fraction is in [0,1] and they sum to 1.
void check_fractions(const SplitFractions& fractions);
SplitFractions parse_fractions(const std::string& text);  // "0.6,0.2,0.2"

struct SplitBounds {
  std::uint64_t rows = 0;
  SimTime t1 = 0;  // timestamp of the first row after the train range
  SimTime t2 = 0;  // timestamp of the first row of the test eval range
  RowRange train;
  RowRange val_eval;
  RowRange test_eval;
  std::vector<std::string> notes;
};

// Index boundaries and timestamps over an ordered timestamp column.
// Throws IntegrityError for n < 5 or unordered input.
SplitBounds split_bounds(const std::vector<SimTime>& timestamps, const SplitFractions& fractions);

nlohmann::json to_json(const SplitBounds& bounds);

struct SplitPaths {
  std::string train;
  std::string validation;
  std::string test;
  std::string manifest;
};

SplitPaths split_paths(const std::string& out_dir);

// Writes train.csv (rows [0, b1)), validation.csv ([0, b2)), test.csv (all
// rows) and split.json under out_dir. Rows are copied byte for byte.
SplitBounds temporal_split(const std::string& csv_path, const std::string& out_dir,
                           const SplitFractions& fractions = {});

struct FilterResult {
  std::uint64_t rows_in = 0;
  std::uint64_t rows_out = 0;
  bool bank_seen = false;  // false: the bank never occurs, output is header-only
};

// Keeps rows with From Bank == bank or To Bank == bank, in input order.
FilterResult filter_bank(const std::string& csv_path, BankId bank, const std::string& out_path);

}  // namespace amlgen
