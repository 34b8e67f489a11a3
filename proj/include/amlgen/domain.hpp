#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "amlgen/money.hpp"
#include "amlgen/sim_time.hpp"

namespace amlgen {

using EntityIndex = std::uint32_t;
using AccountIndex = std::uint32_t;
using BankId = std::uint32_t;
using PatternId = std::uint32_t;
using RowIndex = std::uint64_t;

constexpr std::uint32_t kNone = 0xFFFFFFFFu;

// 9-character uppercase hexadecimal account identifier.
class AccountId {
 public:
  static constexpr std::size_t kLength = 9;

  AccountId() { chars_.fill('0'); }
  static AccountId from_value(std::uint64_t value);  // low 36 bits
  static std::optional<AccountId> parse(std::string_view text);

  std::string_view view() const { return {chars_.data(), kLength}; }
  std::string str() const { return std::string(view()); }
  std::uint64_t value() const;

  friend bool operator==(const AccountId&, const AccountId&) = default;
  friend auto operator<=>(const AccountId&, const AccountId&) = default;

 private:
  std::array<char, kLength> chars_;
};

bool is_account_id_shape(std::string_view text);

enum class EntityKind : std::uint8_t { Individual, Corporation, Partnership, SoleProprietor, Bank };
std::string_view to_string(EntityKind kind);

enum class PayFrequency : std::uint8_t { Weekly, Biweekly, Monthly };
std::string_view to_string(PayFrequency f);
std::optional<PayFrequency> parse_pay_frequency(std::string_view text);

enum class PaymentFormat : std::uint8_t { ACH, Wire, Cheque, CreditCard, Cash, Bitcoin, Reinvestment };
constexpr std::size_t kPaymentFormatCount = 7;
std::string_view to_string(PaymentFormat f);
std::optional<PaymentFormat> parse_payment_format(std::string_view text);

enum class PatternKind : std::uint8_t {
  FanOut,
  FanIn,
  GatherScatter,
  ScatterGather,
  Cycle,
  Random,
  Bipartite,
  Stack,
};
constexpr std::size_t kPatternKindCount = 8;
constexpr std::array<PatternKind, kPatternKindCount> kAllPatternKinds{
    PatternKind::FanOut, PatternKind::FanIn,  PatternKind::GatherScatter, PatternKind::ScatterGather,
    PatternKind::Cycle,  PatternKind::Random, PatternKind::Bipartite,     PatternKind::Stack,
};
std::string_view to_string(PatternKind kind);
std::optional<PatternKind> parse_pattern_kind(std::string_view text);

enum class CriminalActivity : std::uint8_t {
  Extortion,
  LoanSharking,
  Gambling,
  Prostitution,
  Kidnapping,
  Robbery,
  Embezzlement,
  Drugs,
  Smuggling,
};
constexpr std::size_t kCriminalActivityCount = 9;
std::string_view to_string(CriminalActivity a);
std::optional<CriminalActivity> parse_criminal_activity(std::string_view text);

// Why a transaction happened. Not part of the CSV; used for ledger audits.
enum class TxKind : std::uint8_t {
  Salary,
  Pension,
  Interest,
  Purchase,
  SupplierPayment,
  Bill,
  Liquidity,
  Placement,
  PatternStep,
  Integration,
};
std::string_view to_string(TxKind kind);

struct Ownership {
  EntityIndex owned = kNone;
  double fraction = 0.0;
};

struct Entity {
  EntityIndex id = kNone;
  EntityKind kind = EntityKind::Individual;
  bool is_criminal = false;
  bool is_shell = false;
  CurrencyId currency = 0;
  Amount salary = 0;  // per pay period, in the employer's currency
  PayFrequency salary_frequency = PayFrequency::Monthly;
  Amount pension = 0;  // per month, in the payer's currency
  EntityIndex pension_payer = kNone;
  std::vector<AccountIndex> accounts;
  EntityIndex employer = kNone;
  std::vector<EntityIndex> suppliers;
  std::vector<Ownership> owned_entities;
  EntityIndex biller = kNone;   // company receiving this individual's monthly bill
  double size_weight = 0.0;     // companies: employee-count weight / retail popularity

  bool is_company() const {
    return kind == EntityKind::Corporation || kind == EntityKind::Partnership || kind == EntityKind::SoleProprietor;
  }
};

struct Account {
  AccountIndex index = kNone;
  AccountId account_id;
  BankId bank_id = 0;
  EntityIndex owner = kNone;
  CurrencyId currency = 0;
  // Dense per-catalog-currency vectors; only configured currencies are used.
  std::vector<Amount> balances;
  std::vector<Amount> illicit;

  Amount balance() const { return balances[currency]; }
  Amount illicit_balance() const { return illicit[currency]; }
};

struct Transaction {
  SimTime timestamp = 0;
  BankId from_bank = 0;
  AccountId from_account;
  BankId to_bank = 0;
  AccountId to_account;
  Amount amount_paid = 0;
  CurrencyId payment_currency = 0;
  Amount amount_received = 0;
  CurrencyId receiving_currency = 0;
  PaymentFormat payment_format = PaymentFormat::ACH;
  bool is_laundering = false;

  // Generator-side metadata; not written to the dataset CSV.
  Amount illicit_portion = 0;
  std::optional<PatternId> pattern_id;
  TxKind kind = TxKind::Purchase;
  AccountIndex from_index = kNone;
  AccountIndex to_index = kNone;

  // Equality on the CSV-visible columns only.
  bool same_row(const Transaction& other) const;
};

enum class Role : std::uint8_t { Source, Intermediate, Sink };
std::string_view to_string(Role role);
std::optional<Role> parse_role(std::string_view text);

struct PatternMember {
  AccountIndex account = kNone;
  AccountId account_id;
  BankId bank_id = 0;
  Role role = Role::Source;
  int layer = 0;  // stack: 0,1,2; gather-scatter hub and scatter-gather middles: 1
};

struct PlannedStep {
  SimTime offset = 0;      // minutes from the instance start
  std::uint32_t from = 0;  // index into PatternInstance::members
  std::uint32_t to = 0;
  Amount amount = 0;       // reference-currency minor units, before per-hop retention
  int layer = 0;           // hop depth; steps of layer d+1 run after all of layer d
};

struct PatternInstance {
  PatternId pattern_id = 0;
  PatternKind kind = PatternKind::FanOut;
  EntityIndex controller = kNone;
  std::vector<PatternMember> members;
  std::vector<PlannedStep> planned_steps;
  SimTime start = 0;
  SimTime span = 0;
  std::vector<double> retention;  // per member, share kept when forwarding
  bool reused_accounts = false;
  bool downsized = false;

  // Filled by execution.
  std::vector<std::optional<RowIndex>> emitted_tx;  // parallel to planned_steps
  bool complete = false;

  std::size_t layer_count() const;
};

}  // namespace amlgen
