#ifndef GOURSAT_RESIDUAL_HPP
#define GOURSAT_RESIDUAL_HPP

#include <algorithm>
#include <cmath>

namespace goursat {

inline constexpr double kScaleFloor = 1e-12;

/// Value of an expression asserted to vanish, together with the magnitude
/// of its largest monomial.
struct Residual {
  double value = 0.0;
  double scale = 0.0;

  double relative() const { return std::abs(value) / std::max(scale, kScaleFloor); }

  /// Accumulates one expanded monomial.
  Residual& add(double term) {
    value += term;
    scale = std::max(scale, std::abs(term));
    return *this;
  }
  Residual& sub(double term) { return add(-term); }
  /// coef_a * y - coef_b * y, expanded.
  Residual& add_diff(double coef_a, double coef_b, double y) {
    add(coef_a * y);
    return add(-coef_b * y);
  }
};

}  // namespace goursat

#endif  // GOURSAT_RESIDUAL_HPP
