#include "amlgen/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <queue>

#include "amlgen/parallel.hpp"

namespace amlgen {

Cadence draw_cadence(PayFrequency frequency, RandomStream& stream) {
  Cadence c;
  c.frequency = frequency;
  switch (frequency) {
    case PayFrequency::Weekly:
      c.phase_day = static_cast<int>(stream.uniform_int(0, 6));
      break;
    case PayFrequency::Biweekly:
      c.phase_day = static_cast<int>(stream.uniform_int(0, 13));
      break;
    case PayFrequency::Monthly:
      c.phase_day = static_cast<int>(stream.uniform_int(1, 28));
      break;
  }
  c.minute = static_cast<int>(stream.uniform_int(0, kMinutesPerDay - 1));
  return c;
}

SimTime next_fire(const Cadence& c, SimTime start, SimTime after) {
  if (c.frequency == PayFrequency::Monthly) {
    CivilDate d = date_of(after);
    for (int i = 0; i < 3; ++i) {
      const SimTime t = to_sim_time({d.year, d.month, static_cast<unsigned>(c.phase_day)}, c.minute / 60, c.minute % 60);
      if (t >= after) return t;
      d.month = d.month % 12 + 1;
      if (d.month == 1) ++d.year;
    }
    return after;  // unreachable: a later month always qualifies
  }
  const SimTime period = (c.frequency == PayFrequency::Weekly ? 7 : 14) * kMinutesPerDay;
  const SimTime base = (start / kMinutesPerDay) * kMinutesPerDay + c.phase_day * kMinutesPerDay + c.minute;
  if (after <= base) return base;
  const SimTime k = (after - base + period - 1) / period;
  return base + k * period;
}

std::vector<SimTime> schedule_recurring(const Cadence& cadence, SimTime start, SimTime horizon) {
  std::vector<SimTime> out;
  for (SimTime t = next_fire(cadence, start, start); t < start + horizon; t = next_fire(cadence, start, t + 1)) {
    out.push_back(t);
  }
  return out;
}

LiquidityDecision liquidity_check(const World& world, AccountIndex paying, Amount amount) {
  LiquidityDecision d;
  const Amount have = world.spendable(paying);
  if (have >= amount) return d;
  const Amount shortfall = amount - have;
  const Entity& owner = world.population.entities[world.population.accounts[paying].owner];
  AccountIndex best = kNone;
  Amount best_balance = 0;
  for (AccountIndex a : owner.accounts) {
    if (a == paying) continue;
    const Amount s = world.spendable(a);
    if (best == kNone || s > best_balance) {
      best = a;
      best_balance = s;
    }
  }
  if (best == kNone || best_balance < shortfall) {
    d.status = LiquidityDecision::Status::Insufficient;
    return d;
  }
  d.status = LiquidityDecision::Status::Transfer;
  d.from = best;
  d.amount = std::max(shortfall, std::min(best_balance, shortfall + (shortfall + 9) / 10));
  return d;
}

namespace {

constexpr double kDaysPerMonth = 30.436875;

double periods_per_year(PayFrequency f) {
  switch (f) {
    case PayFrequency::Weekly:
      return 52.0;
    case PayFrequency::Biweekly:
      return 26.0;
    case PayFrequency::Monthly:
      return 12.0;
  }
  return 12.0;
}

struct Later {
  bool operator()(const Event& x, const Event& y) const { return fires_before(y, x); }
};

class Economy {
 public:
  Economy(Population& pop, const WorldConfig& config, TransactionSink& sink, const SimOptions& options)
      : world_(config, pop),
        config_(config),
        pop_(pop),
        sink_(sink),
        options_(options),
        start_(config.start_time()),
        end_(config.start_time() + config.horizon()),
        format_rng_(rng_stream(config.seed, "format", 0)) {}

  SimulationResult run();

 private:
  void push(SimTime t, std::uint32_t source, EventKind kind, std::uint32_t a, std::uint32_t b = 0) {
    if (t < start_ || t >= end_) return;
    queue_.push(Event{t, source, seq_++, kind, a, b});
  }

  RowIndex emit(const Transaction& tx, bool forced);
  void pay_mandatory(AccountIndex from, AccountIndex to, Amount amount, SimTime now, PaymentFormat format,
                     bool forced, TxKind kind, RandomStream& rng);
  AccountIndex random_account(const Entity& e, RandomStream& rng) const {
    return e.accounts[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(e.accounts.size()) - 1))];
  }

  void prepare();
  void handle(const Event& ev);
  void on_salary(EntityIndex i, SimTime now);
  void on_pension(EntityIndex i, SimTime now);
  void on_interest(AccountIndex a, SimTime now);
  void on_bill(EntityIndex i, SimTime now);
  void on_purchase(EntityIndex i, SimTime now);
  void on_supplier(EntityIndex c, SimTime now);
  void on_income(std::uint32_t k, std::uint32_t j, SimTime now);
  void on_pattern_step(PatternId p, std::uint32_t s, SimTime now);
  void on_integration(std::uint32_t k, SimTime now);

  World world_;
  const WorldConfig& config_;
  Population& pop_;
  TransactionSink& sink_;
  SimOptions options_;
  SimTime start_;
  SimTime end_;

  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t seq_ = 0;
  SimCounters counters_;
  std::vector<char> account_seen_;
  std::vector<char> bank_seen_;

  std::vector<RandomStream> rng_;       // per entity
  std::vector<Cadence> salary_cadence_;  // per entity
  std::vector<Cadence> monthly_cadence_; // per entity: pension and bill
  std::vector<Cadence> interest_cadence_;  // per account
  std::vector<Amount> bill_amount_;
  std::vector<double> purchase_mean_;    // reference major units
  std::vector<Amount> reserve_;          // companies: cash kept back from suppliers
  DiscreteSampler company_sampler_;
  RandomStream format_rng_;

  std::vector<CriminalEnterprise> enterprises_;
  std::vector<std::vector<Placement>> placements_;
  std::vector<RandomStream> enterprise_rng_;
  std::vector<PatternInstance> patterns_;
  std::optional<PatternRunner> runner_;
  std::size_t downsized_ = 0;
  std::size_t dropped_ = 0;
};

RowIndex Economy::emit(const Transaction& tx, bool forced) {
  const RowIndex row = counters_.transactions++;
  if (row == 0) counters_.first_timestamp = tx.timestamp;
  counters_.last_timestamp = tx.timestamp;
  if (tx.is_laundering) {
    ++counters_.laundering;
    if (tx.pattern_id) {
      ++counters_.pattern_laundering;
    } else {
      ++counters_.other_laundering;
    }
  }
  ++counters_.formats[static_cast<std::size_t>(tx.payment_format)];
  ++counters_.by_kind[static_cast<std::size_t>(tx.kind)];
  if (tx.kind == TxKind::Placement) ++counters_.placements;
  if (tx.kind == TxKind::Liquidity) ++counters_.liquidity_transfers;
  for (AccountIndex a : {tx.from_index, tx.to_index}) {
    if (!account_seen_[a]) {
      account_seen_[a] = 1;
      ++counters_.accounts_seen;
    }
  }
  for (BankId b : {tx.from_bank, tx.to_bank}) {
    if (!bank_seen_[b]) {
      bank_seen_[b] = 1;
      ++counters_.banks_seen;
    }
  }
  world_.formats.record(tx.payment_format, forced);
  sink_.write(tx, row);
  if (options_.progress && counters_.transactions % 1000000 == 0) {
    std::fprintf(stderr, "  %llu transactions\n", static_cast<unsigned long long>(counters_.transactions));
  }
  return row;
}

void Economy::pay_mandatory(AccountIndex from, AccountIndex to, Amount amount, SimTime now, PaymentFormat format,
                            bool forced, TxKind kind, RandomStream& rng) {
  if (amount <= 0 || world_.rates.convert(amount, pop_.accounts[from].currency, pop_.accounts[to].currency) <= 0) {
    return;
  }
  ++counters_.mandatory_payments;
  const LiquidityDecision d = liquidity_check(world_, from, amount);
  if (d.status == LiquidityDecision::Status::Insufficient) {
    ++counters_.skipped_payments;
    return;
  }
  if (d.status == LiquidityDecision::Status::Transfer) {
    emit(world_.transfer(d.from, from, d.amount, now, world_.formats.draw_liquidity(rng), DrawMode::ProRata,
                         TxKind::Liquidity),
         true);
  }
  emit(world_.transfer(from, to, amount, now, format, DrawMode::ProRata, kind), forced);
}

void Economy::prepare() {
  const std::size_t ne = pop_.entities.size();
  account_seen_.assign(pop_.accounts.size(), 0);
  bank_seen_.assign(static_cast<std::size_t>(config_.num_banks), 0);
  rng_.resize(ne);
  salary_cadence_.resize(ne);
  monthly_cadence_.resize(ne);
  bill_amount_.assign(ne, 0);
  purchase_mean_.assign(ne, 0.0);
  reserve_.assign(ne, 0);
  interest_cadence_.resize(pop_.accounts.size());

  std::vector<double> weights;
  for (EntityIndex c : pop_.companies) weights.push_back(pop_.entities[c].size_weight);
  company_sampler_ = DiscreteSampler(weights);

  std::vector<double> payroll_month(ne, 0.0);  // employer currency
  for (EntityIndex i : pop_.individuals) {
    const Entity& e = pop_.entities[i];
    if (e.employer != kNone) payroll_month[e.employer] += e.salary * periods_per_year(e.salary_frequency) / 12.0;
  }

  const ExchangeRates& rates = world_.rates;
  const double lambda = config_.purchase_rate_per_day;
  parallel_for(ne, options_.threads, [&](std::size_t i) {
    RandomStream setup = rng_stream(config_.seed, "cadence", i);
    rng_[i] = rng_stream(config_.seed, "activity", i);
    const Entity& e = pop_.entities[i];
    salary_cadence_[i] = draw_cadence(e.salary_frequency, setup);
    monthly_cadence_[i] = draw_cadence(PayFrequency::Monthly, setup);
    if (e.kind == EntityKind::Individual) {
      double monthly_ref = e.pension > 0 ? rates.to_reference(e.pension, rates.reference()) : 0.0;
      if (e.employer != kNone) {
        monthly_ref += rates.to_reference(e.salary, pop_.entities[e.employer].currency) *
                       periods_per_year(e.salary_frequency) / 12.0;
      }
      bill_amount_[i] = rates.from_reference(setup.uniform(0.15, 0.35) * monthly_ref + 40.0, e.currency);
      if (lambda > 0.0) purchase_mean_[i] = (0.55 * monthly_ref + 150.0) / (lambda * kDaysPerMonth);
    } else if (e.is_company() && !e.is_shell) {
      reserve_[i] = static_cast<Amount>(1.5 * payroll_month[i]);
    }
  });
  for (std::size_t a = 0; a < pop_.accounts.size(); ++a) {
    RandomStream setup = rng_stream(config_.seed, "interest", a);
    interest_cadence_[a] = draw_cadence(PayFrequency::Monthly, setup);
  }

  // Laundering side: enterprises, placements and the layering plan.
  enterprises_ = build_enterprises(pop_, config_, options_.threads);
  placements_.resize(enterprises_.size());
  enterprise_rng_.resize(enterprises_.size());
  parallel_for(enterprises_.size(), options_.threads, [&](std::size_t k) {
    RandomStream income = rng_stream(config_.seed, "income", k);
    placements_[k] = generate_criminal_income(enterprises_[k], income, start_, config_.horizon());
    enterprise_rng_[k] = rng_stream(config_.seed, "integration", k);
  });
  RandomStream layering = rng_stream(config_.seed, "layering", 0);
  LayeringPlan plan = plan_layering(enterprises_, pop_, config_, layering);
  patterns_ = std::move(plan.instances);
  downsized_ = plan.downsized;
  dropped_ = plan.dropped;

  // Initial events.
  for (EntityIndex i : pop_.individuals) {
    const Entity& e = pop_.entities[i];
    if (e.employer != kNone && e.salary > 0) push(next_fire(salary_cadence_[i], start_, start_), i, EventKind::Salary, i);
    if (e.pension > 0 && e.pension_payer != kNone) {
      Cadence c = monthly_cadence_[i];
      c.minute = (c.minute + 360) % kMinutesPerDay;
      push(next_fire(c, start_, start_), i, EventKind::Pension, i);
    }
    if (e.biller != kNone) push(next_fire(monthly_cadence_[i], start_, start_), i, EventKind::Bill, i);
    if (lambda > 0.0) {
      push(start_ + static_cast<SimTime>(rng_[i].exponential(kMinutesPerDay / lambda)), i, EventKind::Purchase, i);
    }
  }
  if (config_.supplier_rate_per_day > 0.0) {
    for (EntityIndex c : pop_.companies) {
      push(start_ + static_cast<SimTime>(rng_[c].exponential(kMinutesPerDay / config_.supplier_rate_per_day)), c,
           EventKind::SupplierPayment, c);
    }
  }
  if (config_.interest_rate_monthly > 0.0) {
    for (const Account& a : pop_.accounts) {
      if (pop_.entities[a.owner].kind == EntityKind::Bank) continue;
      push(next_fire(interest_cadence_[a.index], start_, start_), a.owner, EventKind::Interest, a.index);
    }
  }
  for (std::uint32_t k = 0; k < enterprises_.size(); ++k) {
    const EntityIndex who = enterprises_[k].entity;
    for (std::uint32_t j = 0; j < placements_[k].size(); ++j) {
      push(placements_[k][j].time, who, EventKind::CriminalIncome, k, j);
    }
    if (config_.integration_ticks_per_day > 0.0) {
      push(start_ + static_cast<SimTime>(
                        enterprise_rng_[k].exponential(kMinutesPerDay / config_.integration_ticks_per_day)),
           who, EventKind::IntegrationSpend, k);
    }
  }
}

void Economy::on_salary(EntityIndex i, SimTime now) {
  const Entity& e = pop_.entities[i];
  const Entity& employer = pop_.entities[e.employer];
  pay_mandatory(employer.accounts.front(), e.accounts.front(), e.salary, now, PaymentFormat::ACH, true,
                TxKind::Salary, rng_[i]);
  push(next_fire(salary_cadence_[i], start_, now + 1), i, EventKind::Salary, i);
}

void Economy::on_pension(EntityIndex i, SimTime now) {
  const Entity& e = pop_.entities[i];
  const Entity& bank = pop_.entities[e.pension_payer];
  pay_mandatory(bank.accounts.front(), e.accounts.front(), e.pension, now, PaymentFormat::ACH, true,
                TxKind::Pension, rng_[i]);
  Cadence c = monthly_cadence_[i];
  c.minute = (c.minute + 360) % kMinutesPerDay;
  push(next_fire(c, start_, now + 1), i, EventKind::Pension, i);
}

void Economy::on_interest(AccountIndex a, SimTime now) {
  const Account& acc = pop_.accounts[a];
  const auto interest = static_cast<Amount>(std::floor(static_cast<double>(acc.balance()) * config_.interest_rate_monthly));
  const Entity& bank = pop_.entities[pop_.banks[acc.bank_id]];
  const AccountIndex from = bank.accounts.front();
  const Amount paid = world_.rates.convert(interest, acc.currency, pop_.accounts[from].currency);
  if (paid > 0) pay_mandatory(from, a, paid, now, PaymentFormat::ACH, true, TxKind::Interest, rng_[acc.owner]);
  push(next_fire(interest_cadence_[a], start_, now + 1), acc.owner, EventKind::Interest, a);
}

void Economy::on_bill(EntityIndex i, SimTime now) {
  const Entity& e = pop_.entities[i];
  RandomStream& rng = rng_[i];
  const AccountIndex to = random_account(pop_.entities[e.biller], rng);
  pay_mandatory(e.accounts.front(), to, bill_amount_[i], now, world_.formats.draw_free(format_rng_), false,
                TxKind::Bill, rng);
  push(next_fire(monthly_cadence_[i], start_, now + 1), i, EventKind::Bill, i);
}

void Economy::on_purchase(EntityIndex i, SimTime now) {
  const Entity& e = pop_.entities[i];
  RandomStream& rng = rng_[i];
  push(now + 1 + static_cast<SimTime>(rng.exponential(kMinutesPerDay / config_.purchase_rate_per_day)), i,
       EventKind::Purchase, i);

  // Pay from an account chosen in proportion to what it can spend.
  double total = 0.0;
  for (AccountIndex a : e.accounts) total += static_cast<double>(world_.spendable(a));
  if (total <= 0.0) return;
  double u = rng.uniform() * total;
  AccountIndex from = e.accounts.back();
  for (AccountIndex a : e.accounts) {
    u -= static_cast<double>(world_.spendable(a));
    if (u < 0.0) {
      from = a;
      break;
    }
  }
  const CurrencyId cur = pop_.accounts[from].currency;
  Amount amount = world_.rates.from_reference(purchase_mean_[i] * rng.lognormal(-0.405, 0.9), cur);
  amount = std::min(amount, world_.spendable(from) / 2);
  if (world_.rates.to_reference(amount, cur) < 1.0) return;
  const AccountIndex to = random_account(pop_.entities[pop_.companies[company_sampler_.sample(rng)]], rng);
  if (to == from) return;
  emit(world_.transfer(from, to, amount, now, world_.formats.draw_free(format_rng_), DrawMode::ProRata,
                       TxKind::Purchase),
       false);
}

void Economy::on_supplier(EntityIndex c, SimTime now) {
  const Entity& e = pop_.entities[c];
  RandomStream& rng = rng_[c];
  push(now + 1 + static_cast<SimTime>(rng.exponential(kMinutesPerDay / config_.supplier_rate_per_day)), c,
       EventKind::SupplierPayment, c);
  if (e.suppliers.empty()) return;
  const AccountIndex from = e.accounts.front();
  const Amount surplus = world_.spendable(from) - reserve_[c];
  const double frac = rng.uniform(0.05, 0.2);
  const EntityIndex supplier = e.suppliers[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(e.suppliers.size()) - 1))];
  if (surplus <= 0) return;
  const auto amount = static_cast<Amount>(static_cast<double>(surplus) * frac);
  const CurrencyId cur = pop_.accounts[from].currency;
  if (world_.rates.to_reference(amount, cur) < 1.0) return;
  const AccountIndex to = random_account(pop_.entities[supplier], rng);
  emit(world_.transfer(from, to, amount, now, world_.formats.draw_free(format_rng_), DrawMode::ProRata,
                       TxKind::SupplierPayment),
       false);
}

void Economy::on_income(std::uint32_t k, std::uint32_t j, SimTime now) {
  const CriminalEnterprise& ent = enterprises_[k];
  RandomStream& rng = enterprise_rng_[k];
  const AccountIndex to = ent.shell_accounts[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(ent.shell_accounts.size()) - 1))];
  const Amount amount = world_.rates.from_reference(placements_[k][j].amount, pop_.accounts[to].currency);
  if (amount > 0) emit(world_.place(to, amount, now), true);
}

void Economy::on_pattern_step(PatternId p, std::uint32_t s, SimTime now) {
  PatternRunner::Outcome out = runner_->execute_step(p, s, now, format_rng_);
  for (const auto& tx : out.staging) emit(tx, true);
  if (out.step_row) runner_->record_row(p, s, emit(*out.step_row, false));
  const EntityIndex who = patterns_[p].controller;
  for (const auto& f : out.follow_up) push(f.time, who, EventKind::PatternStep, f.pattern, f.step);
}

void Economy::on_integration(std::uint32_t k, SimTime now) {
  RandomStream& rng = enterprise_rng_[k];
  const auto target =
      static_cast<std::int64_t>(std::floor(config_.natural_laundering_multiplier *
                                           static_cast<double>(counters_.pattern_laundering)));
  const std::int64_t deficit = target - static_cast<std::int64_t>(counters_.other_laundering);
  if (deficit > 0) {
    for (const auto& tx : integrate_funds(enterprises_[k], world_, now, deficit, config_.integration_max_per_tick, rng,
                                          company_sampler_)) {
      emit(tx, false);
    }
  }
  push(now + 1 + static_cast<SimTime>(rng.exponential(kMinutesPerDay / config_.integration_ticks_per_day)),
       enterprises_[k].entity, EventKind::IntegrationSpend, k);
}

void Economy::handle(const Event& ev) {
  switch (ev.kind) {
    case EventKind::Salary:
      on_salary(ev.a, ev.fire_time);
      break;
    case EventKind::Pension:
      on_pension(ev.a, ev.fire_time);
      break;
    case EventKind::Interest:
      on_interest(ev.a, ev.fire_time);
      break;
    case EventKind::Purchase:
      on_purchase(ev.a, ev.fire_time);
      break;
    case EventKind::SupplierPayment:
      on_supplier(ev.a, ev.fire_time);
      break;
    case EventKind::Bill:
      on_bill(ev.a, ev.fire_time);
      break;
    case EventKind::CriminalIncome:
      on_income(ev.a, ev.b, ev.fire_time);
      break;
    case EventKind::PatternStep:
      on_pattern_step(ev.a, ev.b, ev.fire_time);
      break;
    case EventKind::IntegrationSpend:
      on_integration(ev.a, ev.fire_time);
      break;
  }
}

SimulationResult Economy::run() {
  const auto t0 = std::chrono::steady_clock::now();
  prepare();
  runner_.emplace(patterns_, world_);
  for (const auto& s : runner_->initial_steps()) {
    push(s.time, patterns_[s.pattern].controller, EventKind::PatternStep, s.pattern, s.step);
  }
  while (!queue_.empty()) {
    const Event ev = queue_.top();
    queue_.pop();
    handle(ev);
  }

  SimulationResult result;
  for (std::size_t p = 0; p < patterns_.size(); ++p) {
    if (patterns_[p].complete) {
      ++counters_.patterns_complete;
    } else {
      ++counters_.patterns_partial;
    }
  }
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (options_.progress) {
    std::fprintf(stderr, "  %llu transactions in %.2f s (%.0f tx/s)\n",
                 static_cast<unsigned long long>(counters_.transactions), result.seconds,
                 counters_.transactions / std::max(result.seconds, 1e-9));
  }
  result.counters = counters_;
  result.patterns = std::move(patterns_);
  result.enterprises = std::move(enterprises_);
  result.patterns_downsized = downsized_;
  result.patterns_dropped = dropped_;
  return result;
}

}  // namespace

SimulationResult run_simulation(Population& population, const WorldConfig& config, TransactionSink& sink,
                                const SimOptions& options) {
  Economy economy(population, config, sink, options);
  return economy.run();
}

}  // namespace amlgen
