#include <algorithm>
#include <numeric>

#include "amlgen/laundering.hpp"
#include "amlgen/patterns.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace amlgen;
using fixtures::make_account;

namespace {

Population account_pool(std::size_t n, Amount balance) {
  Population p;
  p.entities.resize(1);
  p.entities[0].id = 0;
  p.entities[0].kind = EntityKind::Corporation;
  for (std::size_t i = 0; i < n; ++i) {
    p.accounts.push_back(make_account(static_cast<AccountIndex>(i), 0, static_cast<BankId>(i % 3), 0, balance));
    p.entities[0].accounts.push_back(static_cast<AccountIndex>(i));
  }
  return p;
}

std::vector<PatternMember> members_for(const PatternShape& shape, const Population& p) {
  std::vector<AccountIndex> ids(static_cast<std::size_t>(shape.nodes()));
  std::iota(ids.begin(), ids.end(), AccountIndex{0});
  auto m = layout_members(shape, ids);
  for (auto& x : m) {
    x.account_id = p.accounts[x.account].account_id;
    x.bank_id = p.accounts[x.account].bank_id;
  }
  return m;
}

// Drives one instance through the runner and returns its rows in step order.
std::vector<Transaction> execute(PatternInstance& inst, World& world, RandomStream& rng) {
  std::vector<PatternInstance> one{inst};
  one[0].pattern_id = 0;
  PatternRunner runner(one, world);
  auto pending = runner.initial_steps();
  std::vector<Transaction> rows;
  std::vector<std::optional<Transaction>> by_step(inst.planned_steps.size());
  while (!pending.empty()) {
    auto it = std::min_element(pending.begin(), pending.end(), [](const auto& a, const auto& b) {
      return a.time != b.time ? a.time < b.time : a.step < b.step;
    });
    const auto s = *it;
    pending.erase(it);
    auto out = runner.execute_step(s.pattern, s.step, s.time, rng);
    if (out.step_row) {
      runner.record_row(s.pattern, s.step, rows.size());
      rows.push_back(*out.step_row);
      by_step[s.step] = *out.step_row;
    }
    pending.insert(pending.end(), out.follow_up.begin(), out.follow_up.end());
  }
  inst = one[0];
  std::vector<Transaction> ordered;
  for (auto& r : by_step) {
    if (r) ordered.push_back(*r);
  }
  return ordered;
}

Transaction hop(const PatternInstance& inst, std::uint32_t from, std::uint32_t to, SimTime t) {
  Transaction tx;
  tx.from_bank = inst.members[from].bank_id;
  tx.from_account = inst.members[from].account_id;
  tx.to_bank = inst.members[to].bank_id;
  tx.to_account = inst.members[to].account_id;
  tx.timestamp = t;
  tx.amount_paid = tx.amount_received = 100;
  tx.is_laundering = true;
  return tx;
}

PatternShape shape(PatternKind k, std::vector<int> g) { return PatternShape{k, std::move(g)}; }

}  // namespace

TEST_CASE("schema edges per kind") {
  CHECK(edge_count(shape(PatternKind::FanOut, {1, 5})) == 5);
  CHECK(edge_count(shape(PatternKind::FanIn, {4, 1})) == 4);
  CHECK(edge_count(shape(PatternKind::GatherScatter, {3, 1, 2})) == 5);
  CHECK(edge_count(shape(PatternKind::ScatterGather, {1, 3, 1})) == 6);
  CHECK(edge_count(shape(PatternKind::Cycle, {5})) == 5);
  CHECK(edge_count(shape(PatternKind::Random, {5})) == 4);
  CHECK(edge_count(shape(PatternKind::Bipartite, {2, 3})) == 6);
  CHECK(edge_count(shape(PatternKind::Stack, {2, 2, 3})) == 10);
  for (PatternKind k : kAllPatternKinds) {
    RandomStream rng = rng_stream(1, "edges", static_cast<std::uint64_t>(k));
    for (int i = 0; i < 200; ++i) {
      const auto s = sample_shape(k, default_config().pattern_size_histogram, rng);
      CHECK(schema_edges(s).size() == edge_count(s));
    }
  }
  const auto cyc = schema_edges(shape(PatternKind::Cycle, {3}));
  CHECK(cyc.back() == PatternEdge{2, 0, 2});
}

TEST_CASE("instantiated cycle closes and keeps time order") {
  RandomStream rng = rng_stream(4, "cycle", 0);
  const Population p = account_pool(5, 0);
  const auto s = shape(PatternKind::Cycle, {5});
  const PatternInstance inst = instantiate(PatternKind::Cycle, members_for(s, p), 10000, 5 * kMinutesPerDay, rng);
  REQUIRE(inst.planned_steps.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(inst.planned_steps[i].from == i);
    CHECK(inst.planned_steps[i].to == (i + 1) % 5);
    CHECK(inst.planned_steps[i].amount == 10000);
    if (i > 0) CHECK(inst.planned_steps[i].offset > inst.planned_steps[i - 1].offset);
    CHECK(inst.planned_steps[i].offset < 5 * kMinutesPerDay);
  }
  CHECK_THROWS_AS(instantiate(PatternKind::Cycle, members_for(s, p), 0, 100, rng), std::invalid_argument);
  CHECK_THROWS_AS(instantiate(PatternKind::Cycle, members_for(s, p), 100, 3, rng), std::invalid_argument);
}

TEST_CASE("fan-out amounts sum to the total") {
  RandomStream rng = rng_stream(4, "fan", 0);
  const Population p = account_pool(8, 0);
  const auto s = shape(PatternKind::FanOut, {1, 7});
  const PatternInstance inst = instantiate(PatternKind::FanOut, members_for(s, p), 12345, 600, rng);
  Amount sum = 0;
  for (const auto& st : inst.planned_steps) {
    CHECK(st.from == 0);
    CHECK(st.amount >= 1);
    sum += st.amount;
  }
  CHECK(sum == 12345);
  const auto parts = split_amount(10, {1, 1, 1});
  CHECK(std::accumulate(parts.begin(), parts.end(), Amount{0}) == 10);
  CHECK(*std::min_element(parts.begin(), parts.end()) >= 3);
  CHECK(split_amount(2, {1, 1, 1, 1}) == std::vector<Amount>{1, 1, 0, 0});
}

TEST_CASE("validators accept a clean cycle and flag broken ones") {
  const Population p = account_pool(3, 0);
  PatternInstance inst;
  inst.kind = PatternKind::Cycle;
  inst.members = members_for(shape(PatternKind::Cycle, {3}), p);
  inst.planned_steps.resize(3);
  inst.complete = true;
  const std::vector<Transaction> good{hop(inst, 0, 1, 10), hop(inst, 1, 2, 20), hop(inst, 2, 0, 30)};
  CHECK(validate(inst, good).empty());

  const std::vector<Transaction> open{hop(inst, 0, 1, 10), hop(inst, 1, 2, 20), hop(inst, 2, 1, 30)};
  const auto v = validate(inst, open);
  CHECK(std::find(v.begin(), v.end(), "cycle not closed") != v.end());

  const std::vector<Transaction> late{hop(inst, 0, 1, 30), hop(inst, 1, 2, 20), hop(inst, 2, 0, 40)};
  const auto w = validate(inst, late);
  CHECK(std::find(w.begin(), w.end(), "money path not time-ordered at member 1") != w.end());

  auto unlabeled = good;
  unlabeled[1].is_laundering = false;
  CHECK_FALSE(validate(inst, unlabeled).empty());

  PatternInstance partial = inst;
  partial.complete = false;
  CHECK(validate(partial, good) == std::vector<std::string>{"instance not complete"});
}

TEST_CASE("scatter-gather must gather from the scattered set") {
  const Population p = account_pool(4, 0);
  PatternInstance inst;
  inst.kind = PatternKind::ScatterGather;
  inst.members = members_for(shape(PatternKind::ScatterGather, {1, 2, 1}), p);
  inst.planned_steps.resize(4);
  inst.complete = true;
  const std::vector<Transaction> good{hop(inst, 0, 1, 1), hop(inst, 0, 2, 2), hop(inst, 1, 3, 5), hop(inst, 2, 3, 6)};
  CHECK(validate(inst, good).empty());
  const std::vector<Transaction> bad{hop(inst, 0, 1, 1), hop(inst, 0, 2, 2), hop(inst, 1, 3, 5), hop(inst, 1, 3, 6)};
  const auto v = validate(inst, bad);
  CHECK(std::find(v.begin(), v.end(), "intermediate set mismatch") != v.end());
}

TEST_CASE("shape sampling respects the histogram and the node cap") {
  const std::vector<SizeBin> small{{2, 4, 1.0}};
  const std::vector<SizeBin> tiny{{1, 2, 1.0}};
  const std::vector<SizeBin> big{{12, 18, 1.0}};
  RandomStream rng = rng_stream(9, "sizes", 0);
  for (int i = 0; i < 500; ++i) {
    const int f = sample_size(PatternKind::FanOut, small, rng);
    CHECK(f >= 2);
    CHECK(f <= 3);
    CHECK(sample_size(PatternKind::ScatterGather, tiny, rng) == 4);
    CHECK(sample_size(PatternKind::Stack, tiny, rng) == 3);
    for (PatternKind k : kAllPatternKinds) CHECK(sample_size(k, big, rng) <= kMaxPatternNodes);
    const auto gs = sample_shape(PatternKind::GatherScatter, big, rng);
    CHECK(gs.groups[1] == 1);
    CHECK(gs.nodes() <= kMaxPatternNodes);
  }
  for (PatternKind k : kAllPatternKinds) CHECK(sample_histogram_value(tiny, rng) == 1);
}

TEST_CASE("expected edge count matches enumeration and sampling") {
  const std::vector<SizeBin> four{{4, 5, 1.0}};
  CHECK(expected_edge_count(PatternKind::FanOut, four) == doctest::Approx(3.0));
  CHECK(expected_edge_count(PatternKind::FanIn, four) == doctest::Approx(3.0));
  CHECK(expected_edge_count(PatternKind::ScatterGather, four) == doctest::Approx(4.0));
  CHECK(expected_edge_count(PatternKind::Cycle, four) == doctest::Approx(4.0));
  CHECK(expected_edge_count(PatternKind::Random, four) == doctest::Approx(3.0));
  // k = 1,2,3: 3, 4, 3 edges.
  CHECK(expected_edge_count(PatternKind::Bipartite, four) == doctest::Approx(10.0 / 3.0));
  // (1,1,2) 3, (1,2,1) 4, (2,1,1) 3.
  CHECK(expected_edge_count(PatternKind::Stack, four) == doctest::Approx(10.0 / 3.0));
  CHECK(expected_edge_count(PatternKind::GatherScatter, four) == doctest::Approx(8.0));

  const auto hist = default_config().pattern_size_histogram;
  for (PatternKind k : kAllPatternKinds) {
    RandomStream rng = rng_stream(17, "mc", static_cast<std::uint64_t>(k));
    const int n = 200000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += static_cast<double>(edge_count(sample_shape(k, hist, rng)));
    CHECK(sum / n == doctest::Approx(expected_edge_count(k, hist)).epsilon(0.02));
  }
}

TEST_CASE("shrinking keeps the kind") {
  PatternShape s = shape(PatternKind::Stack, {5, 5, 5});
  CHECK(shrink_shape(s, 7));
  CHECK(s.nodes() == 7);
  for (int g : s.groups) CHECK(g >= 1);
  PatternShape sg = shape(PatternKind::ScatterGather, {1, 10, 1});
  CHECK(shrink_shape(sg, 5));
  CHECK(sg == shape(PatternKind::ScatterGather, {1, 3, 1}));
  PatternShape gs = shape(PatternKind::GatherScatter, {4, 1, 4});
  CHECK_FALSE(shrink_shape(gs, 4));
}

TEST_CASE("per-hop retention compounds along a walk") {
  const WorldConfig c = fixtures::quiet_config(30);
  Population p = account_pool(4, 0);
  World world(c, p);
  RandomStream rng = rng_stream(2, "retention", 0);
  const auto s = shape(PatternKind::Random, {4});
  PatternInstance inst = instantiate(PatternKind::Random, members_for(s, p), 10000, 3 * kMinutesPerDay, rng);
  inst.start = c.start_time();
  inst.retention.assign(4, 0.05);
  const auto rows = execute(inst, world, rng);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].amount_paid == 10000);
  CHECK(rows[1].amount_paid == 9500);
  CHECK(rows[2].amount_paid == 9025);
  CHECK(inst.complete);
  CHECK(p.accounts[3].balance() == 9025);
  CHECK(p.accounts[1].balance() == 500);
  for (const auto& r : rows) CHECK(r.is_laundering);
}

TEST_CASE("property: instantiated and executed patterns validate") {
  const WorldConfig c = fixtures::quiet_config(30);
  const auto hist = default_config().pattern_size_histogram;
  for (PatternKind k : kAllPatternKinds) {
    RandomStream rng = rng_stream(31, "property", static_cast<std::uint64_t>(k));
    for (int trial = 0; trial < 60; ++trial) {
      Population p = account_pool(kMaxPatternNodes, trial % 2 ? 5'000'000 : 0);
      World world(c, p);
      const PatternShape sh = sample_shape(k, hist, rng);
      const SimTime span = rng.uniform_int(60, 10 * kMinutesPerDay);
      PatternInstance inst = instantiate(k, members_for(sh, p), rng.uniform_int(100, 10'000'000), span, rng);
      inst.start = c.start_time() + kMinutesPerDay;
      inst.retention.assign(inst.members.size(), 0.0);
      for (auto& r : inst.retention) r = rng.uniform(0.0, 0.05);
      const auto rows = execute(inst, world, rng);
      CHECK(inst.complete);
      const auto v = validate(inst, rows);
      CHECK_MESSAGE(v.empty(), to_string(k), " trial ", trial, ": ", (v.empty() ? "" : v.front()));
      for (const auto& r : rows) {
        CHECK(r.timestamp >= inst.start);
        CHECK(r.timestamp < inst.start + span + kMinutesPerDay * PatternRunner::kMaxRetries);
      }
    }
  }
}
