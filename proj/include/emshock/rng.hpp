#pragma once

#include <cstdint>

namespace emshock {

// Deterministic random stream: xoshiro256++ seeded through splitmix64.
// The (seed, position) pair fully identifies the state, so any draw
// sequence can be replayed independently of platform or standard library.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform on (0,1), open at both ends.
  double uniform();

  // Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal();

  // Gamma(shape, 1) by Marsaglia-Tsang squeeze, shape > 0.
  double gamma(double shape);

  double chi_squared(double dof) { return 2.0 * gamma(0.5 * dof); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t position() const { return position_; }

  // Advances until the stream has produced `position` raw outputs.
  void skip_to(std::uint64_t position);

 private:
  std::uint64_t state_[4];
  std::uint64_t seed_ = 0;
  std::uint64_t position_ = 0;
};

}  // namespace emshock
