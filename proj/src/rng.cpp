#include "anticonc/rng.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "anticonc/errors.hpp"

namespace anticonc {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

constexpr std::uint64_t kIndexLimit = std::uint64_t{1} << 32;

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint32_t replicate, std::uint32_t coordinate) noexcept
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      coordinate_(coordinate),
      replicate_(replicate) {}

CounterRng::result_type CounterRng::operator()() noexcept {
  if (used_ >= 4) {
    buffer_ = Philox4x32::block({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                 coordinate_, replicate_},
                                key_);
    ++block_;
    used_ = 0;
  }
  const std::uint64_t lo = buffer_[used_];
  const std::uint64_t hi = buffer_[used_ + 1];
  used_ += 2;
  return (hi << 32) | lo;
}

double CounterRng::uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double CounterRng::uniform_open() noexcept {
  return (static_cast<double>((*this)() >> 12) + 0.5) * 0x1.0p-52;
}

double CounterRng::normal() noexcept {
  const double u1 = uniform_open();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double CounterRng::exponential() noexcept { return -std::log(uniform_open()); }

__extension__ typedef unsigned __int128 u128;

std::uint64_t CounterRng::below(std::uint64_t bound) noexcept {
  // Lemire's nearly-divisionless method.
  u128 m = static_cast<u128>((*this)()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<u128>((*this)()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

SeedStream::SeedStream(std::uint64_t seed, std::uint64_t replicate) : seed_(seed) {
  if (replicate >= kIndexLimit) {
    throw ConfigError("replicate index " + std::to_string(replicate) + " exceeds 2^32 - 1");
  }
  replicate_ = static_cast<std::uint32_t>(replicate);
}

CounterRng SeedStream::stream(std::uint64_t coordinate) const {
  if (coordinate >= kIndexLimit) {
    throw ConfigError("coordinate index " + std::to_string(coordinate) + " exceeds 2^32 - 1");
  }
  return CounterRng(seed_, replicate_, static_cast<std::uint32_t>(coordinate));
}

CounterRng seed_stream(std::uint64_t seed, std::uint64_t replicate, std::uint64_t coordinate) {
  return SeedStream(seed, replicate).stream(coordinate);
}

}  // namespace anticonc
