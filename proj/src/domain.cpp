#include "amlgen/domain.hpp"

#include <algorithm>

namespace amlgen {

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(std::string_view text, const std::array<std::string_view, N>& names) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == text) return static_cast<Enum>(i);
  }
  return std::nullopt;
}

constexpr std::array<std::string_view, 5> kEntityKindNames{"individual", "corporation", "partnership",
                                                           "sole-proprietor", "bank"};
constexpr std::array<std::string_view, 3> kFrequencyNames{"weekly", "biweekly", "monthly"};
constexpr std::array<std::string_view, kPaymentFormatCount> kFormatNames{
    "ACH", "Wire", "Cheque", "Credit Card", "Cash", "Bitcoin", "Reinvestment"};
constexpr std::array<std::string_view, kPatternKindCount> kPatternNames{
    "fan-out", "fan-in", "gather-scatter", "scatter-gather", "cycle", "random", "bipartite", "stack"};
constexpr std::array<std::string_view, kCriminalActivityCount> kActivityNames{
    "extortion", "loan-sharking", "gambling", "prostitution", "kidnapping",
    "robbery",   "embezzlement",  "drugs",    "smuggling"};
constexpr std::array<std::string_view, 10> kTxKindNames{
    "salary", "pension", "interest", "purchase", "supplier_payment",
    "bill",   "liquidity", "placement", "pattern_step", "integration"};
constexpr std::array<std::string_view, 3> kRoleNames{"source", "intermediate", "sink"};

constexpr char kHex[] = "0123456789ABCDEF";

}  // namespace

AccountId AccountId::from_value(std::uint64_t value) {
  AccountId id;
  for (int i = static_cast<int>(kLength) - 1; i >= 0; --i) {
    id.chars_[i] = kHex[value & 0xF];
    value >>= 4;
  }
  return id;
}

std::optional<AccountId> AccountId::parse(std::string_view text) {
  if (!is_account_id_shape(text)) return std::nullopt;
  AccountId id;
  std::copy(text.begin(), text.end(), id.chars_.begin());
  return id;
}

std::uint64_t AccountId::value() const {
  std::uint64_t v = 0;
  for (char c : chars_) v = (v << 4) | static_cast<std::uint64_t>(c <= '9' ? c - '0' : c - 'A' + 10);
  return v;
}

bool is_account_id_shape(std::string_view text) {
  return text.size() == AccountId::kLength && std::all_of(text.begin(), text.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'A' && c <= 'F');
         });
}

std::string_view to_string(EntityKind kind) { return kEntityKindNames[static_cast<std::size_t>(kind)]; }

std::string_view to_string(PayFrequency f) { return kFrequencyNames[static_cast<std::size_t>(f)]; }
std::optional<PayFrequency> parse_pay_frequency(std::string_view text) {
  return lookup<PayFrequency>(text, kFrequencyNames);
}

std::string_view to_string(PaymentFormat f) { return kFormatNames[static_cast<std::size_t>(f)]; }
std::optional<PaymentFormat> parse_payment_format(std::string_view text) {
  return lookup<PaymentFormat>(text, kFormatNames);
}

std::string_view to_string(PatternKind kind) { return kPatternNames[static_cast<std::size_t>(kind)]; }
std::optional<PatternKind> parse_pattern_kind(std::string_view text) {
  return lookup<PatternKind>(text, kPatternNames);
}

std::string_view to_string(CriminalActivity a) { return kActivityNames[static_cast<std::size_t>(a)]; }
std::optional<CriminalActivity> parse_criminal_activity(std::string_view text) {
  return lookup<CriminalActivity>(text, kActivityNames);
}

std::string_view to_string(TxKind kind) { return kTxKindNames[static_cast<std::size_t>(kind)]; }

std::string_view to_string(Role role) { return kRoleNames[static_cast<std::size_t>(role)]; }
std::optional<Role> parse_role(std::string_view text) { return lookup<Role>(text, kRoleNames); }

bool Transaction::same_row(const Transaction& o) const {
  return timestamp == o.timestamp && from_bank == o.from_bank && from_account == o.from_account &&
         to_bank == o.to_bank && to_account == o.to_account && amount_paid == o.amount_paid &&
         payment_currency == o.payment_currency && amount_received == o.amount_received &&
         receiving_currency == o.receiving_currency && payment_format == o.payment_format &&
         is_laundering == o.is_laundering;
}

std::size_t PatternInstance::layer_count() const {
  int top = -1;
  for (const auto& s : planned_steps) top = std::max(top, s.layer);
  return static_cast<std::size_t>(top + 1);
}

}  // namespace amlgen
