#pragma once

// Counter-based random streams. Every draw is a pure function of
// (seed, replicate, coordinate, draw index), so replicate loops can run in
// any order or in parallel and still reproduce bit-identical results.

#include <array>
#include <cstdint>
#include <limits>

namespace anticonc {

/// Philox4x32-10 block function (Salmon et al., SC'11).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) noexcept;
};

/// A single reproducible stream. Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint32_t replicate, std::uint32_t coordinate) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform on the open interval (0, 1).
  double uniform_open() noexcept;
  /// Standard normal via Box-Muller; consumes two uniforms.
  double normal() noexcept;
  /// Rate-1 exponential by inversion.
  double exponential() noexcept;
  /// Bernoulli(p).
  bool bernoulli(double p) noexcept { return uniform() < p; }
  /// Uniform integer in [0, bound), bound > 0, unbiased.
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  Philox4x32::Key key_;
  std::uint64_t block_ = 0;
  std::uint32_t coordinate_;
  std::uint32_t replicate_;
  Philox4x32::Counter buffer_{};
  int used_ = 4;
};

/// Streams of one replicate. stream(c) is independent for distinct c.
class SeedStream {
 public:
  SeedStream(std::uint64_t seed, std::uint64_t replicate);

  CounterRng stream(std::uint64_t coordinate) const;
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint32_t replicate() const noexcept { return replicate_; }

 private:
  std::uint64_t seed_;
  std::uint32_t replicate_;
};

/// Stream for (seed, replicate, coordinate). Replicate and coordinate
/// indices must be below 2^32; larger values raise ConfigError.
CounterRng seed_stream(std::uint64_t seed, std::uint64_t replicate, std::uint64_t coordinate);

}  // namespace anticonc
