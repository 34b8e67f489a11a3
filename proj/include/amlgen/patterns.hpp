#pragma once

#include <span>
#include <string>
#include <vector>

#include "amlgen/config.hpp"
#include "amlgen/domain.hpp"
#include "amlgen/rng.hpp"

namespace amlgen {

constexpr int kMaxPatternNodes = 17;

// Group sizes in member order:
//   fan-out {1,k}  fan-in {k,1}  gather-scatter {k,1,m}  scatter-gather {1,k,1}
//   cycle {n}  random {n}  bipartite {k,m}  stack {a,b,c}
struct PatternShape {
  PatternKind kind = PatternKind::FanOut;
  std::vector<int> groups;

  int nodes() const;
  friend bool operator==(const PatternShape&, const PatternShape&) = default;
};

int min_nodes(PatternKind kind);
std::size_t edge_count(const PatternShape& shape);

// Raw draw from the node-count histogram: bin by probability, then a uniform
// integer in [min, max). Never returns more than kMaxPatternNodes.
int sample_histogram_value(const std::vector<SizeBin>& histogram, RandomStream& stream);

// Full shape for one instance. Gather-scatter draws its input and output
// counts independently.
PatternShape sample_shape(PatternKind kind, const std::vector<SizeBin>& histogram, RandomStream& stream);
int sample_size(PatternKind kind, const std::vector<SizeBin>& histogram, RandomStream& stream);

// Largest shape of the same kind with at most max_nodes nodes (shrinks the
// biggest group first). Returns false when even the minimal shape is too big.
bool shrink_shape(PatternShape& shape, int max_nodes);

// Exact expectation of edge_count(sample_shape(kind, histogram)).
double expected_edge_count(PatternKind kind, const std::vector<SizeBin>& histogram);

// Members for `shape` taken from `accounts` in order; roles and group layers
// follow the kind's schema.
std::vector<PatternMember> layout_members(const PatternShape& shape, std::span<const AccountIndex> accounts);

// Recover the group sizes from the member layers. Throws std::invalid_argument
// on a schema mismatch.
PatternShape shape_of(PatternKind kind, std::span<const PatternMember> members);

// Edges implied by the role schema, as (from, to, hop layer) member indices.
struct PatternEdge {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  int layer = 0;
  friend bool operator==(const PatternEdge&, const PatternEdge&) = default;
};
std::vector<PatternEdge> schema_edges(const PatternShape& shape);

// Plans every edge of the kind with integer minute offsets inside [0, span):
// hop layer d lives in the d-th of equal disjoint windows, so offsets strictly
// increase along any money path. Amounts split by flat-Dirichlet shares.
PatternInstance instantiate(PatternKind kind, std::vector<PatternMember> members, Amount total_amount, SimTime span,
                            RandomStream& stream);

// Split `total` into parts proportional to `weights` that sum exactly to the
// total (largest remainder), with every part >= 1 when total >= parts.
std::vector<Amount> split_amount(Amount total, const std::vector<double>& weights);

// Structural checks over the emitted rows (parallel to instance.emitted_tx).
std::vector<std::string> validate(const PatternInstance& instance, std::span<const Transaction> emitted);

}  // namespace amlgen
