#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace amlgen {

std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t fnv1a64(std::string_view text);

// Deterministic pseudo-random stream keyed by (seed, domain tag, index).
//
// The engine is SplitMix64 (8 bytes of state, so one stream per entity is
// affordable), and every distribution below is implemented here rather than
// taken from <random>: the standard distributions are not bit-reproducible
// across library implementations.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream() = default;
  RandomStream(std::uint64_t seed, std::string_view domain_tag, std::uint64_t index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64() { return splitmix64(state_); }

  // [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  // Inclusive on both ends; unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  bool bernoulli(double p);
  double exponential(double mean);
  double normal();
  double lognormal(double mu, double sigma);
  std::int64_t poisson(double mean);
  // Number of failures before the first success.
  std::int64_t geometric(double p);
  // Uniform point on the (k-1)-simplex (flat Dirichlet).
  std::vector<double> simplex(std::size_t k);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(items[i - 1], items[j]);
    }
  }

  friend bool operator==(const RandomStream&, const RandomStream&) = default;

 private:
  std::uint64_t state_ = 0;
};

RandomStream rng_stream(std::uint64_t seed, std::string_view domain_tag, std::uint64_t index);

// Categorical draw over non-negative weights via cumulative sums.
class DiscreteSampler {
 public:
  DiscreteSampler() = default;
  explicit DiscreteSampler(std::span<const double> weights);

  std::size_t sample(RandomStream& rng) const;
  std::size_t size() const { return cumulative_.size(); }
  bool empty() const { return cumulative_.empty() || cumulative_.back() <= 0.0; }

 private:
  std::vector<double> cumulative_;
};

}  // namespace amlgen
