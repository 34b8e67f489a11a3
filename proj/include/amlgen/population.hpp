#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "amlgen/config.hpp"
#include "amlgen/domain.hpp"
#include "amlgen/rng.hpp"

namespace amlgen {

struct OwnershipEdge {
  EntityIndex owner = kNone;
  EntityIndex owned = kNone;
  double fraction = 0.0;
};

// The entity / circular-flow graph: banks, households, firms, shells, and the
// accounts they hold.
struct Population {
  std::vector<Entity> entities;  // banks, then individuals, then companies, then shells
  std::vector<Account> accounts;
  std::vector<std::pair<EntityIndex, EntityIndex>> employment_edges;  // (employee, employer)
  std::vector<std::pair<EntityIndex, EntityIndex>> supplier_edges;    // (buyer, supplier)
  std::vector<OwnershipEdge> ownership_edges;

  std::vector<EntityIndex> banks;
  std::vector<EntityIndex> individuals;
  std::vector<EntityIndex> companies;  // operating companies (not shells)
  std::vector<EntityIndex> shells;
  std::vector<EntityIndex> criminals;  // criminal individuals and companies, entity order

  const Account& account(AccountIndex i) const { return accounts[i]; }
  const Entity& entity(EntityIndex i) const { return entities[i]; }
};

class PopulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Population build_population(const WorldConfig& config, unsigned threads = 1);

// Draw an annual amount: pick a bin by probability, then uniform within it.
// A [0,0] bin always yields exactly 0.
double sample_income(RandomStream& stream, const std::vector<IncomeBin>& histogram);

struct ShellLayers {
  std::vector<Entity> shells;  // ids assigned from first_id upward; accounts left empty
  std::vector<int> account_counts;  // parallel to shells, each >= 1
  std::vector<OwnershipEdge> edges;
};

// Chain of shell companies `depth` levels deep under `criminal`, with possible
// branching below the first level. Every shell is majority-owned by its parent.
ShellLayers build_shell_layers(const Entity& criminal, int depth, RandomStream& stream, EntityIndex first_id,
                               const WorldConfig& config);

// Accounts reachable from `controller` through majority (> 0.5) ownership,
// including its own. Sorted ascending.
std::vector<AccountIndex> controlled_accounts(const Population& population, EntityIndex controller);

int accounts_for_entity(RandomStream& stream, const WorldConfig& config);
AccountId make_account_id(std::uint64_t seed, AccountIndex index);

}  // namespace amlgen
