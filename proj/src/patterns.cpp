#include "amlgen/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace amlgen {

namespace {

std::vector<int> min_groups(PatternKind kind) {
  switch (kind) {
    case PatternKind::FanOut:
      return {1, 2};
    case PatternKind::FanIn:
      return {2, 1};
    case PatternKind::GatherScatter:
      return {2, 1, 2};
    case PatternKind::ScatterGather:
      return {1, 2, 1};
    case PatternKind::Cycle:
    case PatternKind::Random:
      return {2};
    case PatternKind::Bipartite:
      return {1, 1};
    case PatternKind::Stack:
      return {1, 1, 1};
  }
  return {};
}

bool is_walk(PatternKind kind) { return kind == PatternKind::Cycle || kind == PatternKind::Random; }

// Probability of each raw histogram value 0..kMaxPatternNodes.
std::vector<double> value_distribution(const std::vector<SizeBin>& histogram) {
  std::vector<double> p(kMaxPatternNodes + 1, 0.0);
  double total = 0.0;
  for (const auto& b : histogram) total += b.probability;
  for (const auto& b : histogram) {
    if (b.probability <= 0.0) continue;
    const int lo = std::min(b.min, kMaxPatternNodes);
    const int hi = std::min(b.max - 1, kMaxPatternNodes);
    const int width = std::max(1, hi - lo + 1);
    for (int v = lo; v <= std::max(lo, hi); ++v) p[v] += b.probability / total / width;
  }
  return p;
}

Role role_for(std::size_t group, std::size_t group_count) {
  if (group == 0) return Role::Source;
  return group + 1 == group_count ? Role::Sink : Role::Intermediate;
}

std::pair<int, int> shrink_pair(int in, int out) {
  while (in + out + 1 > kMaxPatternNodes) {
    if (in >= out) {
      --in;
    } else {
      --out;
    }
  }
  return {in, out};
}

}  // namespace

int PatternShape::nodes() const { return std::accumulate(groups.begin(), groups.end(), 0); }

int min_nodes(PatternKind kind) {
  const auto g = min_groups(kind);
  return std::accumulate(g.begin(), g.end(), 0);
}

std::size_t edge_count(const PatternShape& s) {
  const auto& g = s.groups;
  switch (s.kind) {
    case PatternKind::FanOut:
      return static_cast<std::size_t>(g[1]);
    case PatternKind::FanIn:
      return static_cast<std::size_t>(g[0]);
    case PatternKind::GatherScatter:
      return static_cast<std::size_t>(g[0] + g[2]);
    case PatternKind::ScatterGather:
      return static_cast<std::size_t>(2 * g[1]);
    case PatternKind::Cycle:
      return static_cast<std::size_t>(g[0]);
    case PatternKind::Random:
      return static_cast<std::size_t>(g[0] - 1);
    case PatternKind::Bipartite:
      return static_cast<std::size_t>(g[0] * g[1]);
    case PatternKind::Stack:
      return static_cast<std::size_t>(g[0] * g[1] + g[1] * g[2]);
  }
  return 0;
}

int sample_histogram_value(const std::vector<SizeBin>& histogram, RandomStream& stream) {
  std::vector<double> w;
  w.reserve(histogram.size());
  for (const auto& b : histogram) w.push_back(b.probability);
  const SizeBin& bin = histogram[DiscreteSampler(w).sample(stream)];
  const int lo = std::min(bin.min, kMaxPatternNodes);
  const int hi = std::max(lo, std::min(bin.max - 1, kMaxPatternNodes));
  return static_cast<int>(stream.uniform_int(lo, hi));
}

PatternShape sample_shape(PatternKind kind, const std::vector<SizeBin>& histogram, RandomStream& stream) {
  PatternShape s;
  s.kind = kind;
  if (kind == PatternKind::GatherScatter) {
    const int in = std::max(2, sample_histogram_value(histogram, stream));
    const int out = std::max(2, sample_histogram_value(histogram, stream));
    const auto [a, b] = shrink_pair(in, out);
    s.groups = {a, 1, b};
    return s;
  }
  const int n = std::clamp(sample_histogram_value(histogram, stream), min_nodes(kind), kMaxPatternNodes);
  switch (kind) {
    case PatternKind::FanOut:
      s.groups = {1, n - 1};
      break;
    case PatternKind::FanIn:
      s.groups = {n - 1, 1};
      break;
    case PatternKind::ScatterGather:
      s.groups = {1, n - 2, 1};
      break;
    case PatternKind::Cycle:
    case PatternKind::Random:
      s.groups = {n};
      break;
    case PatternKind::Bipartite: {
      const int k = static_cast<int>(stream.uniform_int(1, n - 1));
      s.groups = {k, n - k};
      break;
    }
    case PatternKind::Stack: {
      // Uniform over the C(n-1, 2) compositions into three positive parts.
      const int cuts = n - 1;
      const auto pick = stream.uniform_int(0, static_cast<std::int64_t>(cuts) * (cuts - 1) / 2 - 1);
      int c1 = 1;
      std::int64_t rest = pick;
      while (rest >= cuts - c1) {
        rest -= cuts - c1;
        ++c1;
      }
      const int c2 = c1 + 1 + static_cast<int>(rest);
      s.groups = {c1, c2 - c1, n - c2};
      break;
    }
    case PatternKind::GatherScatter:
      break;
  }
  return s;
}

int sample_size(PatternKind kind, const std::vector<SizeBin>& histogram, RandomStream& stream) {
  return sample_shape(kind, histogram, stream).nodes();
}

bool shrink_shape(PatternShape& shape, int max_nodes) {
  const auto mins = min_groups(shape.kind);
  if (min_nodes(shape.kind) > max_nodes) return false;
  while (shape.nodes() > max_nodes) {
    std::size_t best = 0;
    int slack = -1;
    for (std::size_t i = 0; i < shape.groups.size(); ++i) {
      const int s = shape.groups[i] - mins[i];
      if (s > slack || (s == slack && shape.groups[i] > shape.groups[best])) {
        slack = s;
        best = i;
      }
    }
    --shape.groups[best];
  }
  return true;
}

double expected_edge_count(PatternKind kind, const std::vector<SizeBin>& histogram) {
  const auto p = value_distribution(histogram);
  double e = 0.0;
  if (kind == PatternKind::GatherScatter) {
    for (int a = 0; a <= kMaxPatternNodes; ++a) {
      for (int b = 0; b <= kMaxPatternNodes; ++b) {
        const auto [in, out] = shrink_pair(std::max(2, a), std::max(2, b));
        e += p[a] * p[b] * (in + out);
      }
    }
    return e;
  }
  for (int v = 0; v <= kMaxPatternNodes; ++v) {
    if (p[v] == 0.0) continue;
    const int n = std::clamp(v, min_nodes(kind), kMaxPatternNodes);
    double edges = 0.0;
    switch (kind) {
      case PatternKind::FanOut:
      case PatternKind::FanIn:
        edges = n - 1;
        break;
      case PatternKind::ScatterGather:
        edges = 2.0 * (n - 2);
        break;
      case PatternKind::Cycle:
        edges = n;
        break;
      case PatternKind::Random:
        edges = n - 1;
        break;
      case PatternKind::Bipartite:
        for (int k = 1; k < n; ++k) edges += static_cast<double>(k * (n - k)) / (n - 1);
        break;
      case PatternKind::Stack: {
        int count = 0;
        for (int c1 = 1; c1 < n; ++c1) {
          for (int c2 = c1 + 1; c2 < n; ++c2) {
            edges += c1 * (c2 - c1) + (c2 - c1) * (n - c2);
            ++count;
          }
        }
        edges /= count;
        break;
      }
      case PatternKind::GatherScatter:
        break;
    }
    e += p[v] * edges;
  }
  return e;
}

std::vector<PatternMember> layout_members(const PatternShape& shape, std::span<const AccountIndex> accounts) {
  if (accounts.size() < static_cast<std::size_t>(shape.nodes())) {
    throw std::invalid_argument("layout_members: not enough accounts for shape");
  }
  std::vector<PatternMember> out;
  std::size_t next = 0;
  if (is_walk(shape.kind)) {
    const int n = shape.groups[0];
    for (int i = 0; i < n; ++i) {
      PatternMember m;
      m.account = accounts[next++];
      m.layer = i;
      m.role = i == 0 ? Role::Source
                      : (shape.kind == PatternKind::Random && i == n - 1 ? Role::Sink : Role::Intermediate);
      out.push_back(m);
    }
    return out;
  }
  for (std::size_t g = 0; g < shape.groups.size(); ++g) {
    for (int i = 0; i < shape.groups[g]; ++i) {
      PatternMember m;
      m.account = accounts[next++];
      m.layer = static_cast<int>(g);
      m.role = role_for(g, shape.groups.size());
      out.push_back(m);
    }
  }
  return out;
}

PatternShape shape_of(PatternKind kind, std::span<const PatternMember> members) {
  PatternShape s;
  s.kind = kind;
  const auto mins = min_groups(kind);
  const std::string name(to_string(kind));
  if (is_walk(kind)) {
    const int n = static_cast<int>(members.size());
    for (int i = 0; i < n; ++i) {
      const Role want = i == 0 ? Role::Source
                               : (kind == PatternKind::Random && i == n - 1 ? Role::Sink : Role::Intermediate);
      if (members[i].layer != i || members[i].role != want) {
        throw std::invalid_argument(name + ": member " + std::to_string(i) + " out of walk order");
      }
    }
    s.groups = {n};
  } else {
    int layer = 0;
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (members[i].layer == layer + 1 && !s.groups.empty()) {
        ++layer;
      } else if (members[i].layer != layer) {
        throw std::invalid_argument(name + ": member layers not contiguous");
      }
      if (static_cast<std::size_t>(layer) >= mins.size()) throw std::invalid_argument(name + ": too many groups");
      if (s.groups.size() <= static_cast<std::size_t>(layer)) s.groups.push_back(0);
      ++s.groups[layer];
      if (members[i].role != role_for(layer, mins.size())) {
        throw std::invalid_argument(name + ": member " + std::to_string(i) + " has role " +
                                    std::string(to_string(members[i].role)));
      }
    }
    if (s.groups.size() != mins.size()) throw std::invalid_argument(name + ": wrong number of groups");
  }
  for (std::size_t g = 0; g < mins.size(); ++g) {
    if (s.groups[g] < mins[g]) {
      throw std::invalid_argument(name + ": group " + std::to_string(g) + " needs at least " +
                                  std::to_string(mins[g]) + " accounts");
    }
  }
  return s;
}

std::vector<PatternEdge> schema_edges(const PatternShape& shape) {
  std::vector<PatternEdge> e;
  const auto& g = shape.groups;
  auto complete = [&](std::uint32_t a0, int na, std::uint32_t b0, int nb, int layer) {
    for (int i = 0; i < na; ++i) {
      for (int j = 0; j < nb; ++j) e.push_back({a0 + i, b0 + j, layer});
    }
  };
  switch (shape.kind) {
    case PatternKind::FanOut:
    case PatternKind::FanIn:
    case PatternKind::Bipartite:
      complete(0, g[0], static_cast<std::uint32_t>(g[0]), g[1], 0);
      break;
    case PatternKind::GatherScatter:
    case PatternKind::ScatterGather:
    case PatternKind::Stack:
      complete(0, g[0], static_cast<std::uint32_t>(g[0]), g[1], 0);
      complete(static_cast<std::uint32_t>(g[0]), g[1], static_cast<std::uint32_t>(g[0] + g[1]), g[2], 1);
      break;
    case PatternKind::Cycle:
      for (int i = 0; i < g[0]; ++i) e.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>((i + 1) % g[0]), i});
      break;
    case PatternKind::Random:
      for (int i = 0; i + 1 < g[0]; ++i) e.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i + 1), i});
      break;
  }
  return e;
}

std::vector<Amount> split_amount(Amount total, const std::vector<double>& weights) {
  const std::size_t k = weights.size();
  std::vector<Amount> parts(k, 0);
  if (k == 0) return parts;
  const bool floor_one = total >= static_cast<Amount>(k);
  const Amount pool = floor_one ? total - static_cast<Amount>(k) : total;
  double wsum = 0.0;
  for (double w : weights) wsum += w;
  std::vector<std::pair<double, std::size_t>> rem;
  Amount used = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double exact = wsum > 0.0 ? static_cast<double>(pool) * weights[i] / wsum : static_cast<double>(pool) / k;
    parts[i] = static_cast<Amount>(std::floor(exact));
    used += parts[i];
    rem.emplace_back(exact - static_cast<double>(parts[i]), i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; used < pool; r = (r + 1) % k) {
    ++parts[rem[r].second];
    ++used;
  }
  if (floor_one) {
    for (auto& p : parts) ++p;
  }
  return parts;
}

PatternInstance instantiate(PatternKind kind, std::vector<PatternMember> members, Amount total_amount, SimTime span,
                            RandomStream& stream) {
  if (total_amount <= 0) throw std::invalid_argument("instantiate: total amount must be positive");
  if (span <= 0) throw std::invalid_argument("instantiate: span must be positive");
  const PatternShape shape = shape_of(kind, members);
  const auto edges = schema_edges(shape);

  int layers = 0;
  for (const auto& e : edges) layers = std::max(layers, e.layer + 1);
  if (span < layers) throw std::invalid_argument("instantiate: span shorter than the number of hop layers");

  // Source budgets, then forward each member's inflow along its outgoing layer.
  const std::size_t n = members.size();
  std::vector<Amount> inflow(n, 0);
  std::vector<char> is_source(n, 0);
  std::vector<std::size_t> sources;
  for (std::size_t i = 0; i < n; ++i) {
    if (members[i].role == Role::Source) {
      is_source[i] = 1;
      sources.push_back(i);
    }
  }
  std::vector<Amount> budget(n, 0);
  const auto shares = split_amount(total_amount, stream.simplex(sources.size()));
  for (std::size_t s = 0; s < sources.size(); ++s) budget[sources[s]] = shares[s];

  PatternInstance inst;
  inst.kind = kind;
  inst.span = span;
  inst.planned_steps.resize(edges.size());
  for (int d = 0; d < layers; ++d) {
    const SimTime lo = span * d / layers;
    const SimTime hi = span * (d + 1) / layers - 1;
    std::map<std::uint32_t, std::vector<std::size_t>> by_sender;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (edges[i].layer == d) by_sender[edges[i].from].push_back(i);
    }
    for (const auto& [from, idx] : by_sender) {
      const Amount available = is_source[from] ? budget[from] : inflow[from];
      const auto parts = split_amount(available, stream.simplex(idx.size()));
      for (std::size_t j = 0; j < idx.size(); ++j) {
        const auto& e = edges[idx[j]];
        PlannedStep& step = inst.planned_steps[idx[j]];
        step.from = e.from;
        step.to = e.to;
        step.layer = e.layer;
        step.amount = parts[j];
        step.offset = stream.uniform_int(lo, std::max(lo, hi));
        inflow[e.to] += parts[j];
      }
    }
  }
  inst.members = std::move(members);
  inst.emitted_tx.assign(inst.planned_steps.size(), std::nullopt);
  return inst;
}

std::vector<std::string> validate(const PatternInstance& instance, std::span<const Transaction> emitted) {
  std::vector<std::string> v;
  const std::size_t n = instance.members.size();
  if (n > static_cast<std::size_t>(kMaxPatternNodes)) {
    v.push_back("node count " + std::to_string(n) + " exceeds " + std::to_string(kMaxPatternNodes));
  }
  if (!instance.complete) {
    v.push_back("instance not complete");
    return v;
  }
  PatternShape shape;
  try {
    shape = shape_of(instance.kind, instance.members);
  } catch (const std::invalid_argument& e) {
    v.push_back(std::string("role schema: ") + e.what());
    return v;
  }
  if (emitted.size() != instance.planned_steps.size()) {
    v.push_back("expected " + std::to_string(instance.planned_steps.size()) + " rows, got " +
                std::to_string(emitted.size()));
  }

  std::map<std::pair<BankId, AccountId>, std::uint32_t> member_of;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!member_of.emplace(std::pair{instance.members[i].bank_id, instance.members[i].account_id}, i).second) {
      v.push_back("duplicate account " + instance.members[i].account_id.str());
    }
  }

  struct Hop {
    std::uint32_t from, to;
    SimTime t;
  };
  std::vector<Hop> hops;
  for (std::size_t r = 0; r < emitted.size(); ++r) {
    const Transaction& tx = emitted[r];
    if (!tx.is_laundering) v.push_back("row " + std::to_string(r) + " not labeled laundering");
    const auto f = member_of.find({tx.from_bank, tx.from_account});
    const auto t = member_of.find({tx.to_bank, tx.to_account});
    if (f == member_of.end() || t == member_of.end()) {
      v.push_back("row " + std::to_string(r) + " uses an account outside the instance");
      continue;
    }
    hops.push_back({f->second, t->second, tx.timestamp});
  }

  std::multiset<std::pair<std::uint32_t, std::uint32_t>> want, got;
  for (const auto& e : schema_edges(shape)) want.emplace(e.from, e.to);
  for (const auto& h : hops) got.emplace(h.from, h.to);
  if (want != got) v.push_back("edge coverage mismatch");

  std::vector<SimTime> last_in(n, -1), first_out(n, std::numeric_limits<SimTime>::max());
  for (const auto& h : hops) {
    last_in[h.to] = std::max(last_in[h.to], h.t);
    first_out[h.from] = std::min(first_out[h.from], h.t);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (instance.members[i].role == Role::Source) continue;
    if (last_in[i] >= 0 && first_out[i] != std::numeric_limits<SimTime>::max() && last_in[i] >= first_out[i]) {
      v.push_back("money path not time-ordered at member " + std::to_string(i));
    }
  }

  if (instance.kind == PatternKind::Cycle && !hops.empty()) {
    auto ordered = hops;
    std::stable_sort(ordered.begin(), ordered.end(), [](const Hop& a, const Hop& b) { return a.t < b.t; });
    if (ordered.back().to != ordered.front().from) v.push_back("cycle not closed");
    std::vector<int> visits(n, 0);
    for (const auto& h : ordered) ++visits[h.to];
    for (std::size_t i = 0; i < n; ++i) {
      if (visits[i] > 1) v.push_back("cycle revisits member " + std::to_string(i));
    }
  }
  if (instance.kind == PatternKind::ScatterGather) {
    const std::uint32_t src = 0;
    const auto sink = static_cast<std::uint32_t>(n - 1);
    std::set<std::uint32_t> scattered, gathered;
    for (const auto& h : hops) {
      if (h.from == src) scattered.insert(h.to);
      if (h.to == sink) gathered.insert(h.from);
    }
    if (scattered != gathered) v.push_back("intermediate set mismatch");
  }
  if (instance.kind == PatternKind::Random) {
    for (const auto& h : hops) {
      if (h.to == 0) {
        v.push_back("random walk returns to origin");
        break;
      }
    }
  }
  return v;
}

}  // namespace amlgen
