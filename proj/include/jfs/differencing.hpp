#pragma once

#include <array>
#include <cstddef>

namespace jfs {

/// Fourth-order central difference on a uniform grid:
/// f'(t) ~ (f(t-2h) - 8 f(t-h) + 8 f(t+h) - f(t+2h)) / (12 h).
/// `values` holds f at t-2h, t-h, t, t+h, t+2h.
template <typename T>
T central_difference(const std::array<T, 5>& values, double h) {
  return (values[0] - 8.0 * values[1] + 8.0 * values[3] - values[4]) /
         (12.0 * h);
}

/// One-sided fourth-order difference at the first stencil point, for use at
/// grid ends. `values` holds f at t, t+s, ..., t+4s with s = +h or -h.
template <typename T>
T one_sided_difference(const std::array<T, 5>& values, double s) {
  return (-25.0 * values[0] + 48.0 * values[1] - 36.0 * values[2] +
          16.0 * values[3] - 3.0 * values[4]) /
         (12.0 * s);
}

inline constexpr std::size_t kStencilHalfWidth = 2;

}  // namespace jfs
