#include "amlgen/taint.hpp"

#include <algorithm>
#include <cassert>
#include <string>

namespace amlgen {

namespace {

void check_bound([[maybe_unused]] const Account& account, [[maybe_unused]] CurrencyId c) {
  assert(account.illicit[c] >= 0 && account.illicit[c] <= account.balances[c]);
}

}  // namespace

void deposit(Account& account, CurrencyId currency, Amount amount, Amount illicit_portion) {
  if (amount < 0 || illicit_portion < 0) throw LedgerError("deposit: negative amount");
  if (illicit_portion > amount) {
    throw LedgerError("deposit: illicit portion " + std::to_string(illicit_portion) + " exceeds amount " +
                      std::to_string(amount));
  }
  account.balances[currency] += amount;
  account.illicit[currency] += illicit_portion;
  check_bound(account, currency);
}

Amount pro_rata_illicit(Amount amount, Amount balance, Amount illicit) {
  if (balance <= 0 || illicit <= 0) return 0;
  const auto num = static_cast<__int128>(amount) * illicit;
  auto q = static_cast<Amount>(num / balance);
  const auto r = static_cast<Amount>(num % balance);
  const auto twice = static_cast<__int128>(r) * 2;
  if (twice > balance || (twice == balance && (q & 1))) ++q;
  const Amount clean = balance - illicit;
  const Amount lo = std::max<Amount>(0, amount - clean);
  const Amount hi = std::min(amount, illicit);
  return std::clamp(q, lo, hi);
}

Amount convert_illicit(Amount illicit, Amount paid, Amount received) {
  if (paid <= 0 || illicit <= 0 || received <= 0) return 0;
  if (illicit >= paid) return received;
  const auto num = static_cast<__int128>(illicit) * received;
  auto q = static_cast<Amount>(num / paid);
  const auto twice = static_cast<__int128>(num % paid) * 2;
  if (twice > paid || (twice == paid && (q & 1))) ++q;
  return std::clamp<Amount>(q, 0, received);
}

Withdrawal withdraw(Account& account, CurrencyId currency, Amount amount, DrawMode mode) {
  if (amount < 0) throw LedgerError("withdraw: negative amount");
  Amount& balance = account.balances[currency];
  Amount& illicit = account.illicit[currency];
  if (amount > balance) {
    throw LedgerError("withdraw: insufficient balance (" + std::to_string(balance) + " < " + std::to_string(amount) +
                      ")");
  }
  Amount taken = 0;
  if (mode == DrawMode::IllicitFirst) {
    taken = std::min(amount, illicit);
  } else {
    taken = pro_rata_illicit(amount, balance, illicit);
  }
  balance -= amount;
  illicit -= taken;
  check_bound(account, currency);
  return {amount - taken, taken};
}

bool label(Amount illicit_portion, Amount amount, std::optional<PatternId> pattern_id, double threshold) {
  if (pattern_id) return true;
  if (amount <= 0) return false;
  return static_cast<double>(illicit_portion) >= threshold * static_cast<double>(amount);
}

double illicit_fraction(const Account& account, CurrencyId currency) {
  const Amount b = account.balances[currency];
  return b > 0 ? static_cast<double>(account.illicit[currency]) / static_cast<double>(b) : 0.0;
}

}  // namespace amlgen
