#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "amlgen/config.hpp"
#include "amlgen/engine.hpp"
#include "amlgen/population.hpp"

namespace fixtures {

using namespace amlgen;

inline Account make_account(AccountIndex index, EntityIndex owner, BankId bank, CurrencyId currency, Amount balance,
                            Amount illicit = 0) {
  Account a;
  a.index = index;
  a.account_id = AccountId::from_value(0x100000000ULL + index);
  a.bank_id = bank;
  a.owner = owner;
  a.currency = currency;
  a.balances.assign(currency_catalog().size(), 0);
  a.illicit.assign(currency_catalog().size(), 0);
  a.balances[currency] = balance;
  a.illicit[currency] = illicit;
  return a;
}

// Legitimate-only config: no criminals, no background activity.
inline WorldConfig quiet_config(std::int64_t days) {
  WorldConfig c = default_config();
  c.sim_days = days;
  c.num_individuals = 1;
  c.num_companies = 1;
  c.num_banks = 1;
  c.criminal_fraction = 0.0;
  c.pattern_budget = {};
  c.purchase_rate_per_day = 0.0;
  c.supplier_rate_per_day = 0.0;
  c.interest_rate_monthly = 0.0;
  c.pattern_span_days = {0.5, std::min(10.0, static_cast<double>(days) * 0.5)};
  return c;
}

// One bank, one employee, one employer.
inline Population salary_population(PayFrequency frequency, Amount salary) {
  const CurrencyId usd = 0;
  Population p;
  Entity bank;
  bank.id = 0;
  bank.kind = EntityKind::Bank;
  bank.accounts = {0};
  Entity person;
  person.id = 1;
  person.kind = EntityKind::Individual;
  person.employer = 2;
  person.salary = salary;
  person.salary_frequency = frequency;
  person.accounts = {1};
  Entity firm;
  firm.id = 2;
  firm.kind = EntityKind::Corporation;
  firm.size_weight = 1.0;
  firm.accounts = {2};
  p.entities = {bank, person, firm};
  p.accounts = {make_account(0, 0, 0, usd, 1'000'000'00), make_account(1, 1, 0, usd, 0),
                make_account(2, 2, 0, usd, 1'000'000'00)};
  p.employment_edges = {{1, 2}};
  p.banks = {0};
  p.individuals = {1};
  p.companies = {2};
  return p;
}

struct LedgerCheck {
  std::vector<std::string> mismatches;
  Amount placed = 0;  // placement amounts, minor units summed over currencies
};

// Replays rows against the initial balances: inflow - outflow must equal the
// balance change for every account and currency. Placements are external
// injections (inflow only).
inline LedgerCheck check_ledger(const Population& before, const Population& after, const std::vector<Transaction>& rows) {
  std::map<std::pair<AccountIndex, CurrencyId>, Amount> delta;
  LedgerCheck out;
  for (const auto& tx : rows) {
    if (tx.kind == TxKind::Placement) {
      delta[{tx.to_index, tx.receiving_currency}] += tx.amount_received;
      out.placed += tx.amount_received;
      continue;
    }
    delta[{tx.from_index, tx.payment_currency}] -= tx.amount_paid;
    delta[{tx.to_index, tx.receiving_currency}] += tx.amount_received;
  }
  for (std::size_t a = 0; a < after.accounts.size(); ++a) {
    for (std::size_t c = 0; c < after.accounts[a].balances.size(); ++c) {
      const Amount change = after.accounts[a].balances[c] - before.accounts[a].balances[c];
      auto it = delta.find({static_cast<AccountIndex>(a), static_cast<CurrencyId>(c)});
      const Amount flow = it == delta.end() ? 0 : it->second;
      if (change != flow) {
        out.mismatches.push_back("account " + std::to_string(a) + " currency " + std::to_string(c) + ": change " +
                                 std::to_string(change) + " flow " + std::to_string(flow));
      }
    }
  }
  return out;
}

inline std::string temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("amlgen_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace fixtures
