#pragma once

#include <array>
#include <optional>

#include "amlgen/config.hpp"
#include "amlgen/population.hpp"
#include "amlgen/rng.hpp"
#include "amlgen/taint.hpp"

namespace amlgen {

// Per-transaction format draws that keep the overall mix on the configured
// distribution even though some transaction kinds have a forced format: free
// draws use q_f ∝ max(0, p_f - φ_f), φ_f being the running share of rows whose
// format f was forced.
class FormatSampler {
 public:
  explicit FormatSampler(const std::vector<FormatWeight>& weights);

  PaymentFormat draw_free(RandomStream& rng) const;
  // ACH or Wire in proportion to their configured weights.
  PaymentFormat draw_liquidity(RandomStream& rng) const;
  void record(PaymentFormat format, bool forced);

  double target(PaymentFormat f) const { return target_[static_cast<std::size_t>(f)]; }

 private:
  std::array<double, kPaymentFormatCount> target_{};
  std::array<std::uint64_t, kPaymentFormatCount> forced_{};
  std::uint64_t rows_ = 0;
};

// Mutable simulation state shared by the legitimate and laundering sides:
// balances live in the population's accounts; `reserved` holds pattern funds
// in transit that ordinary spending must leave alone.
struct World {
  World(const WorldConfig& config, Population& population);

  const WorldConfig& config;
  Population& population;
  ExchangeRates rates;
  std::vector<Amount> reserved;
  FormatSampler formats;

  Account& account(AccountIndex i) { return population.accounts[i]; }
  Amount spendable(AccountIndex i) const;

  // Moves `amount_paid` (sender's currency) between accounts and returns the
  // labeled row. Receiver gets the converted amount and a proportional share
  // of the illicit portion.
  Transaction transfer(AccountIndex from, AccountIndex to, Amount amount_paid, SimTime when, PaymentFormat format,
                       DrawMode mode, TxKind kind, std::optional<PatternId> pattern = std::nullopt);

  // Cash deposit of fully illicit funds, recorded as a self-transaction.
  Transaction place(AccountIndex account, Amount amount, SimTime when);
};

}  // namespace amlgen
