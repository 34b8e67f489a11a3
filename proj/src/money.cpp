#include "amlgen/money.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace amlgen {

namespace {

constexpr std::array<CurrencyInfo, 15> kCatalog{{
    {"US Dollar", 2},
    {"Euro", 2},
    {"UK Pound", 2},
    {"Yuan", 2},
    {"Yen", 2},
    {"Rupee", 2},
    {"Canadian Dollar", 2},
    {"Australian Dollar", 2},
    {"Swiss Franc", 2},
    {"Mexican Peso", 2},
    {"Brazil Real", 2},
    {"Ruble", 2},
    {"Shekel", 2},
    {"Saudi Riyal", 2},
    {"Bitcoin", 8},
}};

constexpr std::array<Amount, 9> kPow10{1, 10, 100, 1000, 10000, 100000, 1000000, 10000000, 100000000};

}  // namespace

std::span<const CurrencyInfo> currency_catalog() { return kCatalog; }

std::optional<CurrencyId> find_currency(std::string_view name) {
  for (std::size_t i = 0; i < kCatalog.size(); ++i) {
    if (kCatalog[i].name == name) return static_cast<CurrencyId>(i);
  }
  return std::nullopt;
}

std::string_view currency_name(CurrencyId id) { return kCatalog.at(id).name; }

int currency_decimals(CurrencyId id) { return kCatalog.at(id).decimals; }

Amount minor_per_unit(CurrencyId id) { return kPow10[currency_decimals(id)]; }

void append_amount(std::string& out, Amount value, int decimals) {
  if (value < 0) {
    out.push_back('-');
    value = -value;
  }
  const Amount scale = kPow10[decimals];
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value / scale);
  out.append(buf, end);
  if (decimals == 0) return;
  out.push_back('.');
  Amount frac = value % scale;
  char digits[16];
  for (int i = decimals - 1; i >= 0; --i) {
    digits[i] = static_cast<char>('0' + frac % 10);
    frac /= 10;
  }
  out.append(digits, decimals);
}

std::string format_amount(Amount value, CurrencyId currency) {
  std::string out;
  append_amount(out, value, currency_decimals(currency));
  return out;
}

std::optional<Amount> parse_amount(std::string_view text, CurrencyId currency) {
  const int decimals = currency_decimals(currency);
  bool negative = false;
  if (!text.empty() && text.front() == '-') {
    negative = true;
    text.remove_prefix(1);
  }
  if (text.empty()) return std::nullopt;
  const auto dot = text.find('.');
  const std::string_view whole = text.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty() || static_cast<int>(frac.size()) > decimals) return std::nullopt;
  Amount units = 0;
  auto [p, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), units);
  if (ec != std::errc{} || p != whole.data() + whole.size()) return std::nullopt;
  Amount fraction = 0;
  for (char c : frac) {
    if (c < '0' || c > '9') return std::nullopt;
    fraction = fraction * 10 + (c - '0');
  }
  fraction *= kPow10[decimals - static_cast<int>(frac.size())];
  const Amount value = units * kPow10[decimals] + fraction;
  return negative ? -value : value;
}

Amount round_half_even(double value) {
  // nearbyint honours the default FE_TONEAREST mode, which is ties-to-even.
  return static_cast<Amount>(std::nearbyint(value));
}

ExchangeRates::ExchangeRates(std::vector<Entry> entries) : entries_(std::move(entries)) {
  by_id_.assign(kCatalog.size(), 0.0);
  for (const auto& e : entries_) {
    if (e.id >= kCatalog.size()) throw std::out_of_range("currency id outside catalog");
    by_id_[e.id] = e.rate;
  }
  if (!entries_.empty()) reference_ = entries_.front().id;
}

bool ExchangeRates::contains(CurrencyId id) const { return id < by_id_.size() && by_id_[id] > 0.0; }

double ExchangeRates::rate(CurrencyId id) const {
  if (!contains(id)) throw std::out_of_range("currency not configured: " + std::to_string(id));
  return by_id_[id];
}

Amount ExchangeRates::convert(Amount amount, CurrencyId from, CurrencyId to) const {
  const double rf = rate(from);
  const double rt = rate(to);
  if (from == to) return amount;
  const double major = static_cast<double>(amount) / static_cast<double>(minor_per_unit(from));
  return round_half_even(major * (rt / rf) * static_cast<double>(minor_per_unit(to)));
}

double ExchangeRates::to_reference(Amount amount, CurrencyId from) const {
  return static_cast<double>(amount) / static_cast<double>(minor_per_unit(from)) / rate(from);
}

Amount ExchangeRates::from_reference(double major_units, CurrencyId to) const {
  return round_half_even(major_units * rate(to) * static_cast<double>(minor_per_unit(to)));
}

}  // namespace amlgen
