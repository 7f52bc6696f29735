// Licensed under the Apache License 2.0 (see LICENSE file).

#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

namespace mstvtp {

/// Counter-based generator (Philox-4x32, 10 rounds). A stream is identified
/// by a 64-bit key; draws within a stream come from incrementing the 128-bit
/// counter, so a stream is fully determined by (key) regardless of how other
/// streams are consumed. This is what makes replication-level results
/// independent of thread scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64();

  /// Uniform on the open interval (0,1).
  double uniform();

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);

  /// Integer uniform on {0, ..., n-1}.
  int uniform_int(int n);

  /// Standard normal via Box-Muller (pairs cached; call order deterministic).
  double normal();

  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int block_pos_ = 4;  // 32-bit lanes consumed from block_
  bool have_cached_normal_ = false;
  double cached_normal_ = 0.0;

  void refill();
};

/// Raw Philox-4x32-10 block function, exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key);

/// SplitMix64 finalizer; the mixing primitive behind stream derivation.
std::uint64_t mix64(std::uint64_t x);

/// Stream-splitting rule: fold a tuple of integers into a stream key by
/// iterated mixing, h_{i+1} = mix64(h_i ^ mix64(field_i + i + 1)). The Monte
/// Carlo harness derives its streams as
///   split_stream({base_seed, dgp_id, T, replication, purpose[, extra]})
/// with purpose 1 = data, 2 = covariate, 3 = starts, so every replication's
/// data, covariate, and per-model start draws live on distinct streams.
std::uint64_t split_stream(std::initializer_list<std::uint64_t> fields);

}  // namespace mstvtp
