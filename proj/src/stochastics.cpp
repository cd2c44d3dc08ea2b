#include "evokit/stochastics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "evokit/errors.hpp"

namespace evokit::stochastics {
namespace {

std::uint64_t splitmix64(std::uint64_t& x) noexcept {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : seed_(seed) {
  std::uint64_t sm = seed;
  for (auto& word : state_) word = splitmix64(sm);
}

std::uint64_t RngStream::next_u64() noexcept {
  auto& s = state_;
  const std::uint64_t result = rotl(s[1] * 5, 7) * 9;
  const std::uint64_t t = s[1] << 17;
  s[2] ^= s[0];
  s[3] ^= s[1];
  s[1] ^= s[2];
  s[0] ^= s[3];
  s[2] ^= t;
  s[3] = rotl(s[3], 45);
  return result;
}

double RngStream::next_unit() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

__extension__ using u128 = unsigned __int128;

std::uint64_t RngStream::below(std::uint64_t n) noexcept {
  // Lemire's multiply-shift with rejection.
  u128 m = static_cast<u128>(next_u64()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<u128>(next_u64()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double uniform(RngStream& rng, double low, double up) {
  if (low > up) {
    std::ostringstream msg;
    msg << "uniform: low (" << low << ") exceeds up (" << up << ")";
    throw Error(ErrorKind::bounds, msg.str());
  }
  if (low == up) return low;
  const double v = low + (up - low) * rng.next_unit();
  // Rounding can land exactly on `up`; keep the interval half-open.
  return v < up ? v : std::nextafter(up, low);
}

double standard_normal(RngStream& rng) {
  double u, v, s;
  do {
    u = 2.0 * rng.next_unit() - 1.0;
    v = 2.0 * rng.next_unit() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  return u * std::sqrt(-2.0 * std::log(s) / s);
}

double levy_step(RngStream& rng, const LevyParams& params) {
  const double alpha = params.alpha;
  if (!(alpha > 1.0 && alpha <= 2.0)) {
    std::ostringstream msg;
    msg << "levy_step: alpha must lie in (1, 2], got " << alpha;
    throw Error(ErrorKind::parameter, msg.str());
  }
  if (params.scale == 0.0) return 0.0;

  // Chambers-Mallows-Stuck, symmetric case.
  double unit;
  do {
    unit = rng.next_unit();
  } while (unit == 0.0);
  const double angle = std::numbers::pi * (unit - 0.5);
  double w;
  do {
    w = -std::log(1.0 - rng.next_unit());
  } while (w == 0.0);

  const double head = std::sin(alpha * angle) / std::pow(std::cos(angle), 1.0 / alpha);
  const double tail = std::pow(std::cos(angle - alpha * angle) / w, (1.0 - alpha) / alpha);
  return params.scale * head * tail;
}

std::vector<std::size_t> permute(RngStream& rng, std::size_t n) {
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(out[i - 1], out[j]);
  }
  return out;
}

}  // namespace evokit::stochastics
