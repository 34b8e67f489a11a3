#include "amlgen/laundering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "amlgen/parallel.hpp"

namespace amlgen {

namespace {

constexpr double kIncomeSigma = 0.6;
constexpr double kPatternAmountMean = 12000.0;  // reference major units per instance
constexpr double kIntegrationMean = 1500.0;

double lognormal_with_mean(RandomStream& rng, double mean, double sigma) {
  return rng.lognormal(std::log(mean) - 0.5 * sigma * sigma, sigma);
}

std::vector<EntityIndex> controlled_entities(const Population& pop, EntityIndex root) {
  std::vector<EntityIndex> out;
  std::vector<EntityIndex> stack{root};
  while (!stack.empty()) {
    const EntityIndex e = stack.back();
    stack.pop_back();
    if (std::find(out.begin(), out.end(), e) != out.end()) continue;
    out.push_back(e);
    for (const auto& own : pop.entities[e].owned_entities) {
      if (own.fraction > 0.5) stack.push_back(own.owned);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

void check_enterprise(const CriminalEnterprise& e) {
  if (e.activities.empty()) throw EnterpriseError("criminal enterprise has no activities");
  if (e.activities.size() != e.income_rate.size()) throw EnterpriseError("activity and income lists differ in size");
  if (e.controlled.empty()) throw EnterpriseError("criminal enterprise controls no accounts");
}

std::vector<CriminalEnterprise> build_enterprises(const Population& pop, const WorldConfig& config, unsigned threads) {
  std::vector<std::vector<EntityIndex>> staff(pop.entities.size());
  for (const auto& [employee, employer] : pop.employment_edges) staff[employer].push_back(employee);

  std::vector<CriminalEnterprise> out(pop.criminals.size());
  parallel_for(out.size(), threads, [&](std::size_t k) {
    RandomStream rng = rng_stream(config.seed, "enterprise", k);
    CriminalEnterprise& e = out[k];
    e.entity = pop.criminals[k];
    const auto lo = std::clamp<std::int64_t>(config.activities_per_enterprise.min, 1, kCriminalActivityCount);
    const auto hi = std::clamp<std::int64_t>(config.activities_per_enterprise.max, lo, kCriminalActivityCount);
    const auto n = static_cast<std::size_t>(rng.uniform_int(lo, hi));
    std::array<std::size_t, kCriminalActivityCount> order{};
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));
    std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n));
    for (std::size_t i = 0; i < n; ++i) {
      e.activities.push_back(static_cast<CriminalActivity>(order[i]));
      e.income_rate.push_back(config.criminal_income[order[i]]);
    }
    e.controlled = controlled_accounts(pop, e.entity);
    for (EntityIndex owned : controlled_entities(pop, e.entity)) {
      const Entity& ent = pop.entities[owned];
      if (ent.is_shell) e.shell_accounts.insert(e.shell_accounts.end(), ent.accounts.begin(), ent.accounts.end());
      if (ent.is_company()) e.front_employees.insert(e.front_employees.end(), staff[owned].begin(), staff[owned].end());
    }
    std::sort(e.shell_accounts.begin(), e.shell_accounts.end());
    if (e.shell_accounts.empty()) e.shell_accounts = e.controlled;
  });
  return out;
}

std::vector<Placement> generate_criminal_income(const CriminalEnterprise& enterprise, RandomStream& stream,
                                                SimTime start, SimTime horizon) {
  check_enterprise(enterprise);
  std::vector<Placement> out;
  for (std::size_t i = 0; i < enterprise.activities.size(); ++i) {
    const ActivityIncome& inc = enterprise.income_rate[i];
    if (inc.mean_interval_days <= 0.0 || inc.mean_amount <= 0.0) continue;
    const double mean_gap = inc.mean_interval_days * static_cast<double>(kMinutesPerDay);
    double t = stream.exponential(mean_gap);
    while (t < static_cast<double>(horizon)) {
      out.push_back({start + static_cast<SimTime>(t), enterprise.activities[i],
                     lognormal_with_mean(stream, inc.mean_amount, kIncomeSigma)});
      t += stream.exponential(mean_gap);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Placement& a, const Placement& b) { return a.time < b.time; });
  return out;
}

LayeringPlan plan_layering(const std::vector<CriminalEnterprise>& enterprises, const Population& pop,
                           const WorldConfig& config, RandomStream& stream) {
  LayeringPlan plan;
  std::vector<std::vector<char>> used(enterprises.size());
  const ExchangeRates rates = config.exchange_rates();
  const Amount ref_unit = minor_per_unit(rates.reference());
  const SimTime horizon = config.horizon();

  for (PatternKind kind : kAllPatternKinds) {
    const auto budget = config.pattern_budget[static_cast<std::size_t>(kind)];
    for (std::int64_t b = 0; b < budget; ++b) {
      PatternShape shape = sample_shape(kind, config.pattern_size_histogram, stream);
      const auto need = static_cast<std::size_t>(shape.nodes());

      std::vector<double> fit(enterprises.size(), 0.0);
      std::vector<double> feasible(enterprises.size(), 0.0);
      for (std::size_t k = 0; k < enterprises.size(); ++k) {
        const auto cap = static_cast<double>(enterprises[k].controlled.size());
        if (enterprises[k].controlled.size() >= need) fit[k] = cap;
        if (enterprises[k].controlled.size() >= static_cast<std::size_t>(min_nodes(kind))) feasible[k] = cap;
      }
      bool downsized = false;
      std::size_t k = 0;
      if (std::any_of(fit.begin(), fit.end(), [](double w) { return w > 0.0; })) {
        k = DiscreteSampler(fit).sample(stream);
      } else if (std::any_of(feasible.begin(), feasible.end(), [](double w) { return w > 0.0; })) {
        k = DiscreteSampler(feasible).sample(stream);
        shrink_shape(shape, static_cast<int>(enterprises[k].controlled.size()));
        downsized = true;
      } else {
        ++plan.dropped;
        continue;
      }
      const CriminalEnterprise& ent = enterprises[k];
      auto& used_k = used[k];
      used_k.resize(ent.controlled.size(), 0);

      // Shells first, each group shuffled; unused accounts ahead of used ones
      // unless this instance may reuse freely.
      const bool allow_reuse = stream.bernoulli(config.account_reuse_probability);
      std::vector<std::size_t> order(ent.controlled.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      stream.shuffle(std::span<std::size_t>(order));
      auto rank = [&](std::size_t i) {
        const bool shell = pop.entities[pop.accounts[ent.controlled[i]].owner].is_shell;
        return (allow_reuse || !used_k[i] ? 0 : 2) + (shell ? 0 : 1);
      };
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) { return rank(a) < rank(c); });

      std::vector<AccountIndex> chosen;
      bool reused = false;
      for (std::size_t i = 0; i < static_cast<std::size_t>(shape.nodes()); ++i) {
        chosen.push_back(ent.controlled[order[i]]);
        reused = reused || used_k[order[i]];
        used_k[order[i]] = 1;
      }
      if (shape.kind == PatternKind::Cycle || shape.kind == PatternKind::Random) {
        stream.shuffle(std::span<AccountIndex>(chosen));
      }

      auto members = layout_members(shape, chosen);
      for (auto& m : members) {
        m.account_id = pop.accounts[m.account].account_id;
        m.bank_id = pop.accounts[m.account].bank_id;
      }
      const Amount total =
          std::max<Amount>(ref_unit, round_half_even(lognormal_with_mean(stream, kPatternAmountMean, 0.7) *
                                                     static_cast<double>(ref_unit)));
      SimTime span = static_cast<SimTime>(
          stream.uniform(config.pattern_span_days.min, config.pattern_span_days.max) * kMinutesPerDay);
      span = std::clamp<SimTime>(span, 60, std::max<SimTime>(60, horizon * 4 / 5));
      const SimTime latest = std::max<SimTime>(0, horizon - span - kMinutesPerDay);
      const SimTime offset = stream.uniform_int(0, latest);

      PatternInstance inst = instantiate(shape.kind, std::move(members), total, span, stream);
      inst.pattern_id = static_cast<PatternId>(plan.instances.size());
      inst.controller = ent.entity;
      inst.start = config.start_time() + offset;
      inst.reused_accounts = reused;
      inst.downsized = downsized;
      inst.retention.resize(inst.members.size());
      for (auto& r : inst.retention) r = stream.uniform(config.hop_retention_range.min, config.hop_retention_range.max);
      if (downsized) ++plan.downsized;
      plan.instances.push_back(std::move(inst));
    }
  }
  return plan;
}

PatternRunner::PatternRunner(std::vector<PatternInstance>& instances, World& world)
    : instances_(instances), world_(world), state_(instances.size()) {
  for (std::size_t p = 0; p < instances.size(); ++p) {
    const PatternInstance& inst = instances[p];
    State& s = state_[p];
    const std::size_t n = inst.members.size();
    s.planned_in.assign(n, 0);
    s.received.assign(n, 0);
    s.held.assign(n, 0);
    s.out_left.assign(n, 0);
    s.layer_left.assign(inst.layer_count(), 0);
    s.retries.assign(inst.planned_steps.size(), 0);
    for (const auto& step : inst.planned_steps) {
      s.planned_in[step.to] += step.amount;
      ++s.out_left[step.from];
      ++s.layer_left[step.layer];
    }
  }
}

std::vector<PatternRunner::Scheduled> PatternRunner::initial_steps() const {
  std::vector<Scheduled> out;
  for (std::size_t p = 0; p < instances_.size(); ++p) {
    const PatternInstance& inst = instances_[p];
    for (std::uint32_t i = 0; i < inst.planned_steps.size(); ++i) {
      if (inst.planned_steps[i].layer == 0) {
        out.push_back({inst.start + inst.planned_steps[i].offset, static_cast<PatternId>(p), i});
      }
    }
  }
  return out;
}

void PatternRunner::release(PatternId pattern, std::uint32_t member) {
  State& s = state_[pattern];
  const AccountIndex acc = instances_[pattern].members[member].account;
  world_.reserved[acc] -= std::min(world_.reserved[acc], s.held[member]);
  s.held[member] = 0;
}

void PatternRunner::abandon(PatternId pattern) {
  State& s = state_[pattern];
  s.partial = true;
  for (std::uint32_t m = 0; m < s.held.size(); ++m) release(pattern, m);
}

std::size_t PatternRunner::partial_count() const {
  return static_cast<std::size_t>(std::count_if(state_.begin(), state_.end(), [](const State& s) { return s.partial; }));
}

PatternRunner::Outcome PatternRunner::execute_step(PatternId pattern, std::uint32_t step_index, SimTime now,
                                                   RandomStream& rng) {
  Outcome out;
  State& s = state_[pattern];
  PatternInstance& inst = instances_[pattern];
  if (s.partial || inst.complete) return out;

  const SimTime end = world_.config.start_time() + world_.config.horizon();
  const PlannedStep& step = inst.planned_steps[step_index];
  const PatternMember& from = inst.members[step.from];
  const PatternMember& to = inst.members[step.to];
  Account& src = world_.account(from.account);
  const bool is_source = from.role == Role::Source;

  Amount amount = 0;
  if (is_source) {
    amount = std::max<Amount>(1, world_.rates.convert(step.amount, world_.rates.reference(), src.currency));
    const Amount have = world_.spendable(from.account);
    if (have < amount) out.staging.push_back(world_.place(from.account, amount - have, now));
  } else {
    const double share = s.planned_in[step.from] > 0
                             ? static_cast<double>(step.amount) / static_cast<double>(s.planned_in[step.from])
                             : 0.0;
    amount = std::max<Amount>(
        1, static_cast<Amount>(std::floor(static_cast<double>(s.received[step.from]) * share *
                                          (1.0 - inst.retention[step.from]))));
    if (src.balance() < amount) {
      if (s.retries[step_index] < kMaxRetries && now + kMinutesPerDay < end) {
        ++s.retries[step_index];
        out.status = Outcome::Status::Retry;
        out.follow_up.push_back({now + kMinutesPerDay, pattern, step_index});
      } else {
        abandon(pattern);
        out.status = Outcome::Status::Abandoned;
      }
      return out;
    }
  }

  Transaction tx = world_.transfer(from.account, to.account, amount, now, world_.formats.draw_free(rng),
                                   DrawMode::IllicitFirst, TxKind::PatternStep, inst.pattern_id);
  s.received[step.to] += tx.amount_received;
  if (s.out_left[step.to] > 0) {
    s.held[step.to] += tx.amount_received;
    world_.reserved[to.account] += tx.amount_received;
  }
  if (!is_source) {
    const Amount freed = std::min(s.held[step.from], amount);
    s.held[step.from] -= freed;
    world_.reserved[from.account] -= std::min(world_.reserved[from.account], freed);
  }
  if (--s.out_left[step.from] == 0) release(pattern, step.from);
  out.step_row = std::move(tx);
  out.status = Outcome::Status::Executed;

  s.layer_done = std::max(s.layer_done, now);
  if (--s.layer_left[step.layer] == 0) {
    const int next = step.layer + 1;
    if (static_cast<std::size_t>(next) >= s.layer_left.size()) {
      inst.complete = true;
      return out;
    }
    for (std::uint32_t i = 0; i < inst.planned_steps.size(); ++i) {
      if (inst.planned_steps[i].layer != next) continue;
      const SimTime when = std::max(inst.start + inst.planned_steps[i].offset, s.layer_done + 1);
      if (when >= end) {
        abandon(pattern);
        out.follow_up.clear();
        return out;
      }
      out.follow_up.push_back({when, pattern, i});
    }
  }
  return out;
}

void PatternRunner::record_row(PatternId pattern, std::uint32_t step, RowIndex row) {
  instances_[pattern].emitted_tx[step] = row;
}

std::vector<Transaction> integrate_funds(const CriminalEnterprise& enterprise, World& world, SimTime now,
                                         std::int64_t deficit, std::int64_t max_rows, RandomStream& stream,
                                         const DiscreteSampler& company_sampler) {
  std::vector<Transaction> rows;
  if (deficit <= 0 || max_rows <= 0) return rows;
  const Population& pop = world.population;
  const double tau = world.config.taint_label_threshold;

  std::vector<AccountIndex> pool;
  std::vector<double> weight;
  for (AccountIndex a : enterprise.controlled) {
    const Account& acc = pop.accounts[a];
    const Amount spend = world.spendable(a);
    if (spend <= 0 || illicit_fraction(acc, acc.currency) < tau) continue;
    const double w = world.rates.to_reference(std::min(spend, acc.illicit_balance()), acc.currency);
    if (w < 1.0) continue;
    pool.push_back(a);
    weight.push_back(w);
  }

  std::int64_t labeled = 0;
  for (int guard = 0; !pool.empty() && labeled < deficit && static_cast<std::int64_t>(rows.size()) < max_rows &&
                      guard < 4 * max_rows;
       ++guard) {
    const std::size_t pick = DiscreteSampler(weight).sample(stream);
    const AccountIndex from = pool[pick];
    const Account& acc = pop.accounts[from];
    const Amount cap = world.spendable(from);
    Amount amount = world.rates.from_reference(lognormal_with_mean(stream, kIntegrationMean, 0.8), acc.currency);
    amount = std::min(amount, cap);
    if (world.rates.to_reference(amount, acc.currency) < 1.0 || illicit_fraction(acc, acc.currency) < tau) {
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
      weight.erase(weight.begin() + static_cast<std::ptrdiff_t>(pick));
      continue;
    }

    AccountIndex to = kNone;
    const double u = stream.uniform();
    if (!enterprise.front_employees.empty() && u < 0.4) {
      const auto who = enterprise.front_employees[static_cast<std::size_t>(
          stream.uniform_int(0, static_cast<std::int64_t>(enterprise.front_employees.size()) - 1))];
      to = pop.entities[who].accounts.front();
    } else if (!company_sampler.empty()) {
      const Entity& firm = pop.entities[pop.companies[company_sampler.sample(stream)]];
      to = firm.accounts[static_cast<std::size_t>(
          stream.uniform_int(0, static_cast<std::int64_t>(firm.accounts.size()) - 1))];
    }
    if (to == kNone || std::binary_search(enterprise.controlled.begin(), enterprise.controlled.end(), to)) continue;

    Transaction tx = world.transfer(from, to, amount, now, world.formats.draw_free(stream), DrawMode::ProRata,
                                    TxKind::Integration);
    if (tx.is_laundering) ++labeled;
    rows.push_back(std::move(tx));
    const Account& after = pop.accounts[from];
    weight[pick] = world.rates.to_reference(std::min(world.spendable(from), after.illicit_balance()), after.currency);
    if (weight[pick] < 1.0) {
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
      weight.erase(weight.begin() + static_cast<std::ptrdiff_t>(pick));
    }
  }
  return rows;
}

}  // namespace amlgen
