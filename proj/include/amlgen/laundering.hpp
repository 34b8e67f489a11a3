#pragma once

#include <stdexcept>
#include <vector>

#include "amlgen/config.hpp"
#include "amlgen/domain.hpp"
#include "amlgen/patterns.hpp"
#include "amlgen/population.hpp"
#include "amlgen/rng.hpp"
#include "amlgen/world.hpp"

namespace amlgen {

struct CriminalEnterprise {
  EntityIndex entity = kNone;
  std::vector<CriminalActivity> activities;
  std::vector<ActivityIncome> income_rate;  // parallel to activities
  std::vector<AccountIndex> controlled;     // sorted
  std::vector<AccountIndex> shell_accounts; // placement targets
  std::vector<EntityIndex> front_employees; // salaried staff of controlled companies
};

class EnterpriseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void check_enterprise(const CriminalEnterprise& enterprise);

// One enterprise per criminal entity, in entity order. Activities are a random
// subset sized by activities_per_enterprise; LI/HI differences come in through
// criminal_income.
std::vector<CriminalEnterprise> build_enterprises(const Population& population, const WorldConfig& config,
                                                  unsigned threads = 1);

struct Placement {
  SimTime time = 0;  // absolute
  CriminalActivity activity = CriminalActivity::Extortion;
  double amount = 0.0;  // reference-currency major units
};

// Exponential inter-arrival times per activity over [start, start + horizon),
// merged in time order.
std::vector<Placement> generate_criminal_income(const CriminalEnterprise& enterprise, RandomStream& stream,
                                                SimTime start, SimTime horizon);

struct LayeringPlan {
  std::vector<PatternInstance> instances;  // pattern_id == index
  std::size_t downsized = 0;
  std::size_t dropped = 0;  // no enterprise could host even the minimal shape
};

// Samples kind and shape per the budget, then hands each instance to an
// enterprise able to host it (weighted by controlled-account count). Accounts
// come from the controller's closure, shells first.
LayeringPlan plan_layering(const std::vector<CriminalEnterprise>& enterprises, const Population& population,
                           const WorldConfig& config, RandomStream& stream);

// Hop-by-hop execution state for planned instances.
class PatternRunner {
 public:
  struct Scheduled {
    SimTime time = 0;
    PatternId pattern = 0;
    std::uint32_t step = 0;
  };

  struct Outcome {
    enum class Status { Executed, Retry, Abandoned, Ignored } status = Status::Ignored;
    std::vector<Transaction> staging;       // placements topping up a source
    std::optional<Transaction> step_row;    // the pattern transaction itself
    std::vector<Scheduled> follow_up;       // next layer or a retry
  };

  static constexpr int kMaxRetries = 3;

  PatternRunner(std::vector<PatternInstance>& instances, World& world);

  std::vector<Scheduled> initial_steps() const;
  Outcome execute_step(PatternId pattern, std::uint32_t step, SimTime now, RandomStream& rng);
  void record_row(PatternId pattern, std::uint32_t step, RowIndex row);

  bool partial(PatternId pattern) const { return state_[pattern].partial; }
  std::size_t partial_count() const;

 private:
  struct State {
    std::vector<Amount> planned_in;  // reference minor units
    std::vector<Amount> received;    // member currency
    std::vector<Amount> held;        // still reserved on behalf of the member
    std::vector<int> out_left;
    std::vector<int> layer_left;
    std::vector<int> retries;
    SimTime layer_done = 0;
    bool partial = false;
  };

  void release(PatternId pattern, std::uint32_t member);
  void abandon(PatternId pattern);

  std::vector<PatternInstance>& instances_;
  World& world_;
  std::vector<State> state_;
};

// Integration: spends from the enterprise's tainted, unreserved accounts while
// `deficit` > 0. Draws are pro rata; rows are labeled by the taint rule.
// Returns at most `max_rows` rows.
std::vector<Transaction> integrate_funds(const CriminalEnterprise& enterprise, World& world, SimTime now,
                                         std::int64_t deficit, std::int64_t max_rows, RandomStream& stream,
                                         const DiscreteSampler& company_sampler);

}  // namespace amlgen
