#include "amlgen/population.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "amlgen/parallel.hpp"

namespace amlgen {

namespace {

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

struct IndividualDraw {
  bool criminal = false;
  bool salaried = false;
  bool pensioner = false;
  double salary_annual = 0.0;
  double pension_annual = 0.0;
  PayFrequency frequency = PayFrequency::Monthly;
  EntityIndex employer = kNone;
  EntityIndex pension_payer = kNone;
  EntityIndex biller = kNone;
  CurrencyId currency = 0;
  std::vector<BankId> account_banks;
  double savings_ref = 0.0;
};

struct CompanyDraw {
  EntityKind kind = EntityKind::Corporation;
  bool criminal = false;
  double size_weight = 1.0;
  CurrencyId currency = 0;
  std::vector<BankId> account_banks;
};

std::vector<BankId> draw_account_banks(RandomStream& rng, const WorldConfig& config) {
  const int n = accounts_for_entity(rng, config);
  std::vector<BankId> banks;
  const auto primary = static_cast<BankId>(rng.uniform_int(0, config.num_banks - 1));
  banks.push_back(primary);
  for (int i = 1; i < n; ++i) {
    banks.push_back(rng.bernoulli(0.7) ? primary : static_cast<BankId>(rng.uniform_int(0, config.num_banks - 1)));
  }
  return banks;
}

CurrencyId draw_currency(RandomStream& rng, const WorldConfig& config, const DiscreteSampler& shares) {
  return config.currencies[shares.sample(rng)].id;
}

}  // namespace

int accounts_for_entity(RandomStream& stream, const WorldConfig& config) {
  const auto extra = stream.geometric(config.accounts_geometric_p);
  return 1 + static_cast<int>(std::min<std::int64_t>(extra, config.max_accounts_per_entity - 1));
}

AccountId make_account_id(std::uint64_t seed, AccountIndex index) {
  // Affine map modulo 2^36 with an odd multiplier: a bijection, so ids never collide.
  constexpr std::uint64_t kMask = (std::uint64_t{1} << 36) - 1;
  std::uint64_t s = seed ^ 0xACC0u;
  const std::uint64_t mul = (splitmix64(s) & kMask) | 1u;
  const std::uint64_t add = splitmix64(s) & kMask;
  return AccountId::from_value((static_cast<std::uint64_t>(index) * mul + add) & kMask);
}

double sample_income(RandomStream& stream, const std::vector<IncomeBin>& histogram) {
  std::vector<double> w;
  w.reserve(histogram.size());
  for (const auto& b : histogram) w.push_back(b.probability);
  const auto& bin = histogram[DiscreteSampler(w).sample(stream)];
  if (bin.max <= bin.min) return bin.min;
  return stream.uniform(bin.min, bin.max);
}

ShellLayers build_shell_layers(const Entity& criminal, int depth, RandomStream& stream, EntityIndex first_id,
                               const WorldConfig& config) {
  if (depth < 1) throw PopulationError("build_shell_layers: depth must be at least 1");
  if (!criminal.is_criminal) throw PopulationError("build_shell_layers: entity is not criminal");
  ShellLayers out;
  std::vector<EntityIndex> level{criminal.id};
  EntityIndex next = first_id;
  for (int d = 0; d < depth; ++d) {
    std::vector<EntityIndex> below;
    for (EntityIndex parent : level) {
      // The first level is a single holding shell; deeper levels may fan out.
      const int children = d == 0 ? 1 : static_cast<int>(stream.uniform_int(1, 3));
      for (int c = 0; c < children; ++c) {
        Entity shell;
        shell.id = next++;
        shell.kind = stream.bernoulli(0.7) ? EntityKind::Corporation : EntityKind::Partnership;
        shell.is_shell = true;
        out.edges.push_back({parent, shell.id, stream.uniform(0.51, 1.0)});
        out.account_counts.push_back(accounts_for_entity(stream, config));
        out.shells.push_back(std::move(shell));
        below.push_back(out.shells.back().id);
      }
    }
    level = std::move(below);
  }
  return out;
}

std::vector<AccountIndex> controlled_accounts(const Population& population, EntityIndex controller) {
  std::vector<AccountIndex> result;
  std::vector<EntityIndex> stack{controller};
  std::vector<char> visited(population.entities.size(), 0);
  while (!stack.empty()) {
    const EntityIndex e = stack.back();
    stack.pop_back();
    if (visited[e]) continue;
    visited[e] = 1;
    const Entity& ent = population.entities[e];
    result.insert(result.end(), ent.accounts.begin(), ent.accounts.end());
    for (const auto& own : ent.owned_entities) {
      if (own.fraction > 0.5) stack.push_back(own.owned);
    }
  }
  std::sort(result.begin(), result.end());
  return result;
}

Population build_population(const WorldConfig& config, unsigned threads) {
  if (config.num_banks <= 0) throw PopulationError("num_banks must be positive");
  if (config.num_individuals < 0 || config.num_companies <= 0) throw PopulationError("population size must be positive");

  const auto nb = static_cast<std::size_t>(config.num_banks);
  const auto ni = static_cast<std::size_t>(config.num_individuals);
  const auto nc = static_cast<std::size_t>(config.num_companies);
  const ExchangeRates rates = config.exchange_rates();
  const CurrencyId reference = rates.reference();

  std::vector<double> share_w;
  for (const auto& c : config.currencies) share_w.push_back(c.share);
  const DiscreteSampler currency_sampler(share_w);
  std::vector<double> freq_w;
  for (const auto& f : config.salary_frequency) freq_w.push_back(f.probability);
  const DiscreteSampler freq_sampler(freq_w);

  const double expected_criminals = config.criminal_fraction * static_cast<double>(ni + nc);
  const double p_crim_ind = ni ? std::min(1.0, expected_criminals * (1.0 - config.criminal_company_share) / ni) : 0.0;
  const double p_crim_comp = std::min(1.0, expected_criminals * config.criminal_company_share / nc);

  // Pension receipt is split so that roughly half of pensioners also draw a salary.
  const double sp = config.salary_participation;
  const double pp = config.pension_participation;
  const double p_pension_salaried = std::min(1.0, 0.5 * pp / sp);
  const double p_pension_unsalaried = std::min(1.0, 0.5 * pp / (1.0 - sp));

  const EntityIndex first_individual = static_cast<EntityIndex>(nb);
  const EntityIndex first_company = static_cast<EntityIndex>(nb + ni);

  // Companies first: their size weights drive employment and retail choice.
  std::vector<CompanyDraw> comp(nc);
  parallel_for(nc, threads, [&](std::size_t c) {
    RandomStream rng = rng_stream(config.seed, "company", c);
    CompanyDraw& d = comp[c];
    const double u = rng.uniform();
    d.kind = u < 0.5 ? EntityKind::Corporation : (u < 0.7 ? EntityKind::Partnership : EntityKind::SoleProprietor);
    d.size_weight = std::exp(rng.uniform(std::log(config.company_size.min), std::log(config.company_size.max)));
    d.criminal = rng.bernoulli(p_crim_comp);
    d.currency = draw_currency(rng, config, currency_sampler);
    d.account_banks = draw_account_banks(rng, config);
  });
  std::vector<double> company_w(nc);
  for (std::size_t c = 0; c < nc; ++c) company_w[c] = comp[c].size_weight;
  const DiscreteSampler company_sampler(company_w);

  std::vector<IndividualDraw> ind(ni);
  parallel_for(ni, threads, [&](std::size_t i) {
    RandomStream rng = rng_stream(config.seed, "individual", i);
    IndividualDraw& d = ind[i];
    d.criminal = rng.bernoulli(p_crim_ind);
    d.salaried = rng.bernoulli(sp);
    d.pensioner = rng.bernoulli(d.salaried ? p_pension_salaried : p_pension_unsalaried);
    if (d.salaried) {
      d.salary_annual = sample_income(rng, config.salary_histogram);
      d.frequency = config.salary_frequency[freq_sampler.sample(rng)].frequency;
      d.employer = first_company + static_cast<EntityIndex>(company_sampler.sample(rng));
    }
    if (d.pensioner) {
      d.pension_annual = sample_income(rng, config.pension_histogram);
      d.pension_payer = static_cast<EntityIndex>(rng.uniform_int(0, config.num_banks - 1));
    }
    d.biller = first_company + static_cast<EntityIndex>(company_sampler.sample(rng));
    d.currency = draw_currency(rng, config, currency_sampler);
    d.account_banks = draw_account_banks(rng, config);
    const double monthly = (d.salary_annual + d.pension_annual) / 12.0;
    d.savings_ref = monthly * rng.uniform(0.5, 2.5) + rng.lognormal(std::log(3000.0), 1.0);
  });

  Population pop;
  pop.entities.resize(nb + ni + nc);
  for (std::size_t b = 0; b < nb; ++b) {
    Entity& e = pop.entities[b];
    e.id = static_cast<EntityIndex>(b);
    e.kind = EntityKind::Bank;
    e.currency = reference;
    pop.banks.push_back(e.id);
  }
  for (std::size_t c = 0; c < nc; ++c) {
    Entity& e = pop.entities[first_company + c];
    e.id = first_company + static_cast<EntityIndex>(c);
    e.kind = comp[c].kind;
    e.is_criminal = comp[c].criminal;
    e.currency = comp[c].currency;
    e.size_weight = comp[c].size_weight;
    pop.companies.push_back(e.id);
  }
  for (std::size_t i = 0; i < ni; ++i) {
    const IndividualDraw& d = ind[i];
    Entity& e = pop.entities[first_individual + i];
    e.id = first_individual + static_cast<EntityIndex>(i);
    e.kind = EntityKind::Individual;
    e.is_criminal = d.criminal;
    e.currency = d.currency;
    e.biller = d.biller;
    if (d.salaried) {
      const Entity& employer = pop.entities[d.employer];
      const double per_period = d.salary_annual / periods_per_year(d.frequency);
      e.salary = std::max<Amount>(1, rates.from_reference(per_period, employer.currency));
      e.salary_frequency = d.frequency;
      e.employer = d.employer;
      pop.employment_edges.emplace_back(e.id, d.employer);
    }
    if (d.pensioner) {
      e.pension = std::max<Amount>(1, rates.from_reference(d.pension_annual / 12.0, reference));
      e.pension_payer = d.pension_payer;
    }
    pop.individuals.push_back(e.id);
  }

  // Supplier links and ownership of operating companies.
  std::vector<std::vector<EntityIndex>> suppliers(nc);
  std::vector<OwnershipEdge> company_owner(nc);
  parallel_for(nc, threads, [&](std::size_t c) {
    RandomStream rng = rng_stream(config.seed, "supplier", c);
    const auto want = static_cast<std::size_t>(rng.uniform_int(1, 4));
    for (int attempt = 0; attempt < 16 && suppliers[c].size() < want && nc > 1; ++attempt) {
      const auto s = company_sampler.sample(rng);
      if (s == c) continue;
      const EntityIndex sid = first_company + static_cast<EntityIndex>(s);
      if (std::find(suppliers[c].begin(), suppliers[c].end(), sid) == suppliers[c].end()) suppliers[c].push_back(sid);
    }
    if (comp[c].criminal) return;
    RandomStream own = rng_stream(config.seed, "owner", c);
    if (c > 0 && own.bernoulli(0.2)) {
      // Parent company with a lower index keeps majority ownership acyclic.
      const auto parent = static_cast<std::size_t>(own.uniform_int(0, static_cast<std::int64_t>(c) - 1));
      if (!comp[parent].criminal) {
        company_owner[c] = {first_company + static_cast<EntityIndex>(parent), first_company + static_cast<EntityIndex>(c),
                            own.uniform(0.2, 1.0)};
        return;
      }
    }
    if (ni == 0) return;
    for (int attempt = 0; attempt < 8; ++attempt) {
      const auto person = static_cast<std::size_t>(own.uniform_int(0, static_cast<std::int64_t>(ni) - 1));
      if (ind[person].criminal) continue;
      company_owner[c] = {first_individual + static_cast<EntityIndex>(person),
                          first_company + static_cast<EntityIndex>(c), own.uniform(0.51, 1.0)};
      return;
    }
  });
  for (std::size_t c = 0; c < nc; ++c) {
    Entity& e = pop.entities[first_company + c];
    e.suppliers = suppliers[c];
    for (EntityIndex s : suppliers[c]) pop.supplier_edges.emplace_back(e.id, s);
    if (company_owner[c].owner != kNone) {
      pop.ownership_edges.push_back(company_owner[c]);
      pop.entities[company_owner[c].owner].owned_entities.push_back({e.id, company_owner[c].fraction});
    }
  }

  for (const Entity& e : pop.entities) {
    if (e.is_criminal) pop.criminals.push_back(e.id);
  }
  const auto budget = std::accumulate(config.pattern_budget.begin(), config.pattern_budget.end(), std::int64_t{0});
  if (budget > 0 && config.criminal_fraction > 0.0 && pop.criminals.empty()) {
    throw PopulationError("population too small to host the pattern budget: no criminal entities were drawn");
  }

  // Shell layers under each criminal.
  std::vector<std::vector<BankId>> shell_banks;
  for (std::size_t k = 0; k < pop.criminals.size(); ++k) {
    RandomStream rng = rng_stream(config.seed, "shell", k);
    const int depth = static_cast<int>(rng.uniform_int(config.shell_depth.min, config.shell_depth.max));
    const EntityIndex first_id = static_cast<EntityIndex>(pop.entities.size());
    ShellLayers layers = build_shell_layers(pop.entities[pop.criminals[k]], depth, rng, first_id, config);
    for (std::size_t s = 0; s < layers.shells.size(); ++s) {
      Entity shell = std::move(layers.shells[s]);
      shell.currency = draw_currency(rng, config, currency_sampler);
      std::vector<BankId> banks;
      for (int a = 0; a < layers.account_counts[s]; ++a) {
        banks.push_back(static_cast<BankId>(rng.uniform_int(0, config.num_banks - 1)));
      }
      shell_banks.push_back(std::move(banks));
      pop.shells.push_back(shell.id);
      pop.entities.push_back(std::move(shell));
    }
    for (const auto& edge : layers.edges) {
      pop.ownership_edges.push_back(edge);
      pop.entities[edge.owner].owned_entities.push_back({edge.owned, edge.fraction});
    }
  }

  // Opening balances (reference units) per entity.
  std::vector<double> opening(pop.entities.size(), 0.0);
  std::vector<double> payroll_month(nc, 0.0);
  double pensions_month = 0.0;
  for (std::size_t i = 0; i < ni; ++i) {
    const IndividualDraw& d = ind[i];
    opening[first_individual + i] = d.savings_ref;
    if (d.salaried) payroll_month[d.employer - first_company] += d.salary_annual / 12.0;
    pensions_month += d.pension_annual / 12.0;
  }
  double deposits = 0.0;
  for (std::size_t c = 0; c < nc; ++c) {
    opening[first_company + c] = 4.0 * payroll_month[c] + 2000.0 * comp[c].size_weight + 20000.0;
  }
  for (double v : opening) deposits += v;
  for (std::size_t b = 0; b < nb; ++b) {
    opening[b] = (12.0 * pensions_month + 0.05 * deposits) / static_cast<double>(nb) + 1.0e6;
  }

  // Accounts, in entity order.
  const std::size_t n_currencies = currency_catalog().size();
  std::size_t shell_cursor = 0;
  for (Entity& e : pop.entities) {
    std::vector<BankId> banks;
    if (e.kind == EntityKind::Bank) {
      banks = {static_cast<BankId>(e.id)};
    } else if (e.is_shell) {
      banks = shell_banks[shell_cursor++];
    } else if (e.is_company()) {
      banks = comp[e.id - first_company].account_banks;
    } else {
      banks = ind[e.id - first_individual].account_banks;
    }
    const CurrencyId cur = e.currency;
    const Amount total = rates.from_reference(opening[e.id], cur);
    for (std::size_t a = 0; a < banks.size(); ++a) {
      Account acc;
      acc.index = static_cast<AccountIndex>(pop.accounts.size());
      acc.account_id = make_account_id(config.seed, acc.index);
      acc.bank_id = banks[a];
      acc.owner = e.id;
      acc.currency = cur;
      acc.balances.assign(n_currencies, 0);
      acc.illicit.assign(n_currencies, 0);
      // Primary account holds most of the opening balance.
      const double share = banks.size() == 1 ? 1.0 : (a == 0 ? 0.7 : 0.3 / static_cast<double>(banks.size() - 1));
      acc.balances[cur] = static_cast<Amount>(std::floor(static_cast<double>(total) * share));
      e.accounts.push_back(acc.index);
      pop.accounts.push_back(std::move(acc));
    }
  }
  return pop;
}

}  // namespace amlgen
