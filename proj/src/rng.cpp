#include "pinkey/rng.hpp"

#include <cmath>
#include <numbers>

namespace pinkey {

std::uint64_t CounterRng::below(std::uint64_t bound) noexcept {
  // Reject the top partial block so every residue is equally likely.
  const std::uint64_t limit = max() - (max() % bound);
  std::uint64_t x = 0;
  do {
    x = (*this)();
  } while (x >= limit);
  return x % bound;
}

double CounterRng::normal() noexcept {
  if (has_cached_) {
    has_cached_ = false;
    return cached_normal_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_ = true;
  return r * std::cos(theta);
}

}  // namespace pinkey
