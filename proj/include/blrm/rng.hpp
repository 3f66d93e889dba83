#pragma once

#include <array>
#include <cstdint>

namespace blrm {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Streams are cheap: (seed, stream) select disjoint counter blocks, so
/// replicate i of a simulation batch can draw from stream i and produce the
/// same sequence no matter how replicates are scheduled across threads.
class Philox4x32 {
 public:
  explicit Philox4x32(std::uint64_t seed, std::uint64_t stream = 0);

  /// Raw 10-round block function (exposed for known-answer tests).
  static std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& counter,
                                            const std::array<std::uint32_t, 2>& key);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1].
  double uniform_pos();
  /// Uniform integer in {0, ..., n-1}; n must be positive.
  std::uint64_t uniform_below(std::uint64_t n);
  /// Standard normal deviate (Box-Muller).
  double normal();
  /// Bernoulli with success probability p.
  bool bernoulli(double p);
  /// Beta(alpha, 1) via inverse CDF.
  double beta_one(double alpha);

 private:
  void refill();

  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> block_{};
  int block_pos_ = 4;
  double spare_normal_ = 0.0;
  bool have_spare_normal_ = false;
};

}  // namespace blrm
