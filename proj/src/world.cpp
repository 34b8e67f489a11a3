#include "amlgen/world.hpp"

#include <algorithm>

namespace amlgen {

FormatSampler::FormatSampler(const std::vector<FormatWeight>& weights) {
  for (const auto& w : weights) target_[static_cast<std::size_t>(w.format)] += w.probability;
}

PaymentFormat FormatSampler::draw_free(RandomStream& rng) const {
  std::array<double, kPaymentFormatCount> q{};
  double total = 0.0;
  for (std::size_t f = 0; f < kPaymentFormatCount; ++f) {
    const double phi = rows_ ? static_cast<double>(forced_[f]) / static_cast<double>(rows_) : 0.0;
    q[f] = std::max(0.0, target_[f] - phi);
    total += q[f];
  }
  if (total <= 0.0) {
    q = target_;
    total = 1.0;
  }
  double u = rng.uniform() * total;
  for (std::size_t f = 0; f < kPaymentFormatCount; ++f) {
    if (u < q[f]) return static_cast<PaymentFormat>(f);
    u -= q[f];
  }
  for (std::size_t f = kPaymentFormatCount; f-- > 0;) {
    if (q[f] > 0.0) return static_cast<PaymentFormat>(f);
  }
  return PaymentFormat::ACH;
}

PaymentFormat FormatSampler::draw_liquidity(RandomStream& rng) const {
  const double ach = target(PaymentFormat::ACH);
  const double wire = target(PaymentFormat::Wire);
  if (ach + wire <= 0.0) return PaymentFormat::ACH;
  return rng.uniform() * (ach + wire) < ach ? PaymentFormat::ACH : PaymentFormat::Wire;
}

void FormatSampler::record(PaymentFormat format, bool forced) {
  ++rows_;
  if (forced) ++forced_[static_cast<std::size_t>(format)];
}

World::World(const WorldConfig& cfg, Population& pop)
    : config(cfg),
      population(pop),
      rates(cfg.exchange_rates()),
      reserved(pop.accounts.size(), 0),
      formats(cfg.format_distribution) {}

Amount World::spendable(AccountIndex i) const {
  const Account& a = population.accounts[i];
  return std::max<Amount>(0, a.balance() - reserved[i]);
}

Transaction World::transfer(AccountIndex from, AccountIndex to, Amount amount_paid, SimTime when,
                            PaymentFormat format, DrawMode mode, TxKind kind, std::optional<PatternId> pattern) {
  Account& src = population.accounts[from];
  Account& dst = population.accounts[to];
  const Withdrawal w = withdraw(src, src.currency, amount_paid, mode);
  const Amount received = rates.convert(amount_paid, src.currency, dst.currency);
  const Amount illicit_in = src.currency == dst.currency ? w.illicit : convert_illicit(w.illicit, amount_paid, received);
  deposit(dst, dst.currency, received, illicit_in);

  Transaction tx;
  tx.timestamp = when;
  tx.from_bank = src.bank_id;
  tx.from_account = src.account_id;
  tx.to_bank = dst.bank_id;
  tx.to_account = dst.account_id;
  tx.amount_paid = amount_paid;
  tx.payment_currency = src.currency;
  tx.amount_received = received;
  tx.receiving_currency = dst.currency;
  tx.payment_format = format;
  tx.illicit_portion = w.illicit;
  tx.pattern_id = pattern;
  tx.is_laundering = label(w.illicit, amount_paid, pattern, config.taint_label_threshold);
  tx.kind = kind;
  tx.from_index = from;
  tx.to_index = to;
  return tx;
}

Transaction World::place(AccountIndex account, Amount amount, SimTime when) {
  Account& acc = population.accounts[account];
  deposit(acc, acc.currency, amount, amount);
  Transaction tx;
  tx.timestamp = when;
  tx.from_bank = tx.to_bank = acc.bank_id;
  tx.from_account = tx.to_account = acc.account_id;
  tx.amount_paid = tx.amount_received = amount;
  tx.payment_currency = tx.receiving_currency = acc.currency;
  tx.payment_format = PaymentFormat::Cash;
  tx.illicit_portion = amount;
  tx.is_laundering = true;
  tx.kind = TxKind::Placement;
  tx.from_index = tx.to_index = account;
  return tx;
}

}  // namespace amlgen
