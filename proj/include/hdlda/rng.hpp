#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace hdlda {

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Derives a child seed from a parent seed and a sequence of counters, by
/// folding each counter through splitmix64. Two different counter paths give
/// unrelated seeds; the same path always gives the same seed, whatever
/// order or thread the derivation happens in.
std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> path);

/// An explicit source of randomness. Every random operation in the library
/// takes one of these by reference; there is no global generator.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

  std::uint64_t seed() const { return seed_; }

  /// Independent stream derived from this stream's seed and a counter path.
  /// Does not advance this stream.
  RngStream child(std::initializer_list<std::uint64_t> path) const {
    return RngStream(derive_seed(seed_, path));
  }

  double normal() { return normal_(engine_); }
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace hdlda
