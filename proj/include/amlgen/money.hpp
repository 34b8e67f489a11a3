#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace amlgen {

// Integer minor units (cents, or 1e-8 for Bitcoin).
using Amount = std::int64_t;

// Index into the built-in currency catalog.
using CurrencyId = std::uint8_t;

struct CurrencyInfo {
  std::string_view name;
  int decimals;
};

// Every currency the generator and the CSV reader know about. Names match the
// vocabulary used in published AML transaction datasets.
std::span<const CurrencyInfo> currency_catalog();

std::optional<CurrencyId> find_currency(std::string_view name);
std::string_view currency_name(CurrencyId id);
int currency_decimals(CurrencyId id);
Amount minor_per_unit(CurrencyId id);

// Fixed-decimal rendering, e.g. 12345 cents -> "123.45".
std::string format_amount(Amount value, CurrencyId currency);
void append_amount(std::string& out, Amount value, int decimals);

// Exact decimal parse into minor units. Rejects more fractional digits than the
// currency carries.
std::optional<Amount> parse_amount(std::string_view text, CurrencyId currency);

Amount round_half_even(double value);

// Static per-run exchange rates: rate = units of the currency per one unit of
// the reference currency (reference rate is exactly 1).
class ExchangeRates {
 public:
  struct Entry {
    CurrencyId id;
    double rate;
  };

  ExchangeRates() = default;
  explicit ExchangeRates(std::vector<Entry> entries);

  bool contains(CurrencyId id) const;
  double rate(CurrencyId id) const;
  CurrencyId reference() const { return reference_; }
  const std::vector<Entry>& entries() const { return entries_; }

  // Converts minor units of `from` to minor units of `to`, rounding half-even.
  // Throws std::out_of_range for currencies not configured.
  Amount convert(Amount amount, CurrencyId from, CurrencyId to) const;

  // Value of `amount` in reference-currency major units.
  double to_reference(Amount amount, CurrencyId from) const;
  Amount from_reference(double major_units, CurrencyId to) const;

 private:
  std::vector<Entry> entries_;
  std::vector<double> by_id_;  // 0 when not configured
  CurrencyId reference_ = 0;
};

}  // namespace amlgen
