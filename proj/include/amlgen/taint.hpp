#pragma once

#include <optional>
#include <stdexcept>

#include "amlgen/domain.hpp"

namespace amlgen {

// Illicit sub-balance bookkeeping. Every account carries, per currency, an
// illicit amount bounded by its balance; transfers move illicit funds either
// pro rata (co-mingled spending) or illicit-first (tracked laundering hops).

enum class DrawMode { ProRata, IllicitFirst };

struct Withdrawal {
  Amount clean = 0;
  Amount illicit = 0;
};

class LedgerError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void deposit(Account& account, CurrencyId currency, Amount amount, Amount illicit_portion);
Withdrawal withdraw(Account& account, CurrencyId currency, Amount amount, DrawMode mode);

// round_half_even(amount * illicit / balance) clamped so both the illicit and the
// clean remainder stay within what the account holds.
Amount pro_rata_illicit(Amount amount, Amount balance, Amount illicit);

// Illicit share carried across a currency conversion: round_half_even(illicit *
// received / paid), so a fully illicit payment arrives fully illicit.
Amount convert_illicit(Amount illicit, Amount paid, Amount received);

bool label(Amount illicit_portion, Amount amount, std::optional<PatternId> pattern_id, double threshold);

double illicit_fraction(const Account& account, CurrencyId currency);

}  // namespace amlgen
