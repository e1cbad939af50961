#pragma once

// Geometry on the circle R/Z and on projective directions RP^1 = R/(pi Z).

#include <cmath>
#include <numbers>
#include <vector>

namespace qpsc {

inline constexpr double pi = std::numbers::pi;

// Wrap a real number into [0, 1).
template <class T>
T wrap01(T x) {
  T y = std::fmod(x, T(1));
  if (y < 0) y += T(1);
  if (y >= T(1)) y -= T(1);  // fmod can return exactly 1 after the += above
  return y;
}

// Distance on R/Z: min over integers m of |x - y - m|, in [0, 1/2].
template <class T>
T torus_dist(T x, T y) {
  T d = std::fmod(x - y, T(1));
  if (d < 0) d += T(1);
  return std::min(d, T(1) - d);
}

// Representative of an RP^1 point in [0, pi).
inline double rp1_wrap(double a) {
  double y = std::fmod(a, pi);
  if (y < 0) y += pi;
  if (y >= pi) y -= pi;
  return y;
}

// Representative of a - b as an RP^1 difference, reduced to (-pi/2, pi/2].
inline double rp1_diff(double a, double b) {
  double d = std::fmod(a - b, pi);
  if (d <= -pi / 2) d += pi;
  if (d > pi / 2) d -= pi;
  return d;
}

// Distance on RP^1, in [0, pi/2].
inline double rp1_dist(double a, double b) { return std::abs(rp1_diff(a, b)); }

// Nearest-branch continuation: shift each sample by a multiple of pi so the
// curve is continuous. First sample keeps its (-pi/2, pi/2] representative.
inline void rp1_unwrap(std::vector<double>& g) {
  if (g.empty()) return;
  g[0] = rp1_diff(g[0], 0.0);
  for (std::size_t i = 1; i < g.size(); ++i) {
    double step = std::remainder(g[i] - g[i - 1], pi);
    g[i] = g[i - 1] + step;
  }
}

}  // namespace qpsc
