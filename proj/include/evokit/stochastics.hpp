#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace evokit::stochastics {

/// xoshiro256** seeded through splitmix64. The algorithm is fixed so that a
/// seed reproduces the same stream on every platform; std:: distributions are
/// deliberately avoided for the same reason.
///
/// Satisfies UniformRandomBitGenerator. Single owner: do not share a stream
/// between threads, derive one per task instead (see `derive`).
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() noexcept;
  result_type operator()() noexcept { return next_u64(); }
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  /// Uniform double in [0, 1) built from the top 53 bits.
  double next_unit() noexcept;

  /// Unbiased integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;

  /// Stream for repetition `index` of an experiment seeded with `base`.
  static RngStream derive(std::uint64_t base, std::uint64_t index) {
    return RngStream(base + index);
  }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_{};
};

struct LevyParams {
  double alpha = 1.001;
  double scale = 1.0;
};

/// U(low, up). Throws ErrorKind::bounds when low > up.
double uniform(RngStream& rng, double low, double up);

/// One N(0, 1) variate (Marsaglia polar method, no cached spare).
double standard_normal(RngStream& rng);

/// Symmetric alpha-stable step multiplied by `params.scale`.
/// Throws ErrorKind::parameter unless 1 < alpha <= 2.
double levy_step(RngStream& rng, const LevyParams& params);

/// Uniformly random permutation of 0..n-1 (Fisher-Yates).
std::vector<std::size_t> permute(RngStream& rng, std::size_t n);

}  // namespace evokit::stochastics
