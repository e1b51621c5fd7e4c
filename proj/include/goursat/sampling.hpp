#ifndef GOURSAT_SAMPLING_HPP
#define GOURSAT_SAMPLING_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "goursat/error.hpp"
#include "goursat/web.hpp"

namespace goursat {

/// Axis-aligned sampling box, one [lower, upper] range per coordinate.
struct Box {
  std::vector<std::pair<double, double>> ranges;

  static Box uniform(int n, double lower, double upper) {
    return Box{std::vector<std::pair<double, double>>(static_cast<std::size_t>(n), {lower, upper})};
  }
  int dimension() const { return static_cast<int>(ranges.size()); }
  void validate() const {
    for (const auto& [lo, hi] : ranges)
      if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
        throw ConfigError("box bounds must be finite with lower < upper");
  }
};

/// Halton sequence with a seeded Cranley-Patterson shift: space-filling,
/// deterministic for a given seed.
class HaltonSampler {
 public:
  HaltonSampler(Box box, std::uint64_t seed) : box_(std::move(box)) {
    box_.validate();
    if (box_.dimension() > static_cast<int>(kPrimes.size())) throw ContractError("sampler supports up to 16 dimensions");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int d = 0; d < box_.dimension(); ++d) shift_.push_back(u(rng));
  }

  Point next() {
    ++index_;
    std::vector<double> x;
    for (std::size_t d = 0; d < box_.ranges.size(); ++d) {
      double t = radical_inverse(index_, kPrimes[d]) + shift_[d];
      t -= std::floor(t);
      const auto& [lo, hi] = box_.ranges[d];
      x.push_back(lo + t * (hi - lo));
    }
    return Point(std::move(x));
  }

 private:
  static constexpr std::array<std::uint64_t, 16> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

  static double radical_inverse(std::uint64_t i, std::uint64_t base) {
    double inv = 1.0 / static_cast<double>(base), f = inv, r = 0.0;
    while (i > 0) {
      r += f * static_cast<double>(i % base);
      i /= base;
      f *= inv;
    }
    return r;
  }

  Box box_;
  std::vector<double> shift_;
  std::uint64_t index_ = 0;
};

struct RegularSample {
  std::vector<Point> points;
  int rejected = 0;
};

/// Draws `count` points at which the web yields a regular order-`order` jet,
/// with up to 10 * count attempts in total.
inline RegularSample sample_regular_points(const WebFunction& web, const Box& box, int count, std::uint64_t seed,
                                           int order) {
  if (count < 1) throw ConfigError("sample count must be at least 1");
  if (box.dimension() != web.arity()) throw ConfigError("box dimension does not match web arity");
  HaltonSampler sampler(box, seed);
  RegularSample out;
  const int attempts = 10 * count;
  for (int k = 0; k < attempts && static_cast<int>(out.points.size()) < count; ++k) {
    Point p = sampler.next();
    try {
      (void)web.regular_jet(p, order);
      out.points.push_back(std::move(p));
    } catch (const Error&) {
      ++out.rejected;
    }
  }
  if (static_cast<int>(out.points.size()) < count)
    throw SamplingError("too few regular sample points (" + std::to_string(out.points.size()) + " of " +
                        std::to_string(count) + ")");
  return out;
}

}  // namespace goursat

#endif  // GOURSAT_SAMPLING_HPP
