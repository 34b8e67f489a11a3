#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "amlgen/config.hpp"
#include "amlgen/domain.hpp"
#include "amlgen/laundering.hpp"
#include "amlgen/population.hpp"
#include "amlgen/rng.hpp"
#include "amlgen/world.hpp"

namespace amlgen {

enum class EventKind : std::uint8_t {
  Salary,
  Pension,
  Interest,
  Purchase,
  SupplierPayment,
  Bill,
  CriminalIncome,
  PatternStep,
  IntegrationSpend,
};

struct Event {
  SimTime fire_time = 0;
  std::uint32_t source = 0;  // originating entity; first tiebreak
  std::uint64_t seq = 0;     // insertion order; second tiebreak
  EventKind kind = EventKind::Purchase;
  std::uint32_t a = 0;
  std::uint32_t b = 0;
};

// Strict total order, earliest first.
inline bool fires_before(const Event& x, const Event& y) {
  if (x.fire_time != y.fire_time) return x.fire_time < y.fire_time;
  if (x.source != y.source) return x.source < y.source;
  return x.seq < y.seq;
}

// Fixed per-entity phase of a recurring payment: day within the cycle
// (weekly 0..6, biweekly 0..13, monthly day-of-month 1..28) and minute of day.
struct Cadence {
  PayFrequency frequency = PayFrequency::Monthly;
  int phase_day = 1;
  int minute = 0;
};

Cadence draw_cadence(PayFrequency frequency, RandomStream& stream);
// First fire time >= `after`, given the simulation start.
SimTime next_fire(const Cadence& cadence, SimTime start, SimTime after);
// All fire times within [start, start + horizon).
std::vector<SimTime> schedule_recurring(const Cadence& cadence, SimTime start, SimTime horizon);

struct LiquidityDecision {
  enum class Status { Sufficient, Transfer, Insufficient } status = Status::Sufficient;
  AccountIndex from = kNone;
  Amount amount = 0;
};

// Shortfall plus a 10% buffer from the richest sibling account, capped at
// that account's spendable balance but never below the shortfall.
LiquidityDecision liquidity_check(const World& world, AccountIndex paying, Amount amount);

class TransactionSink {
 public:
  virtual ~TransactionSink() = default;
  virtual void write(const Transaction& tx, RowIndex row) = 0;
};

class VectorSink : public TransactionSink {
 public:
  void write(const Transaction& tx, RowIndex) override { rows.push_back(tx); }
  std::vector<Transaction> rows;
};

class NullSink : public TransactionSink {
 public:
  void write(const Transaction&, RowIndex) override {}
};

struct SimCounters {
  std::uint64_t transactions = 0;
  std::uint64_t laundering = 0;
  std::uint64_t pattern_laundering = 0;
  std::uint64_t other_laundering = 0;
  std::uint64_t placements = 0;
  std::uint64_t liquidity_transfers = 0;
  std::uint64_t skipped_payments = 0;
  std::uint64_t mandatory_payments = 0;
  std::uint64_t accounts_seen = 0;
  std::uint64_t banks_seen = 0;
  std::uint64_t patterns_complete = 0;
  std::uint64_t patterns_partial = 0;
  std::array<std::uint64_t, kPaymentFormatCount> formats{};
  std::array<std::uint64_t, 10> by_kind{};  // indexed by TxKind
  SimTime first_timestamp = 0;
  SimTime last_timestamp = 0;
};

struct SimOptions {
  unsigned threads = 1;
  bool progress = false;  // transactions/sec on stderr
};

struct SimulationResult {
  SimCounters counters;
  std::vector<PatternInstance> patterns;
  std::vector<CriminalEnterprise> enterprises;
  std::size_t patterns_downsized = 0;
  std::size_t patterns_dropped = 0;
  double seconds = 0.0;
};

// Runs the economy over [config.start_time(), +horizon). Accounts in
// `population` hold the final balances on return.
SimulationResult run_simulation(Population& population, const WorldConfig& config, TransactionSink& sink,
                                const SimOptions& options = {});

}  // namespace amlgen
