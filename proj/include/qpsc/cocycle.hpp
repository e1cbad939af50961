#pragma once

// Schrödinger transfer matrices, overflow-safe orbit products with log-norm
// accumulation, and the conjugated normal form Lambda * R_phi with
// cot(phi) = t - v(x).

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "qpsc/circle.hpp"
#include "qpsc/frequency.hpp"
#include "qpsc/potential.hpp"
#include "qpsc/sl2.hpp"

namespace qpsc {

struct CocycleParams {
  Potential potential = Potential::amo();
  double lambda = 0;  // coupling
  double E = 0;       // energy
  Frequency freq;

  double t() const { return lambda > 0 ? E / lambda : 0; }
};

// One-step transfer matrix [[E - lambda v(x), -1], [1, 0]].
inline Sl2 step_matrix(const CocycleParams& p, double x) {
  return {p.E - p.lambda * p.potential.v(x), -1, 1, 0};
}

// Conjugated normal form diag(lambda, 1/lambda) R_phi, phi = arccot(t - v(x))
// taken in (0, pi). Its one-step angle identity s - u = arctan(t - v(x)) seeds
// the induction's angle function.
inline Sl2 model_cocycle(const CocycleParams& p, double x) {
  if (p.lambda <= 0) throw std::domain_error("model_cocycle: lambda must be > 0");
  double w = p.t() - p.potential.v(x);
  double phi = pi / 2 - std::atan(w);
  Sl2 r = Sl2::rotation(phi);
  double l = p.lambda;
  return {l * r.a, l * r.b, r.c / l, r.d / l};
}

struct OrbitProduct {
  double log_norm = 0;
  Sl2 normalized_matrix;  // product scaled to unit operator norm
  std::int64_t n = 0;
  double s = 0;  // RP^1 directions of the full product; undefined while the
  double u = 0;  // product is isotropic (log_norm == 0 at n == 0)
};

namespace detail {

template <class StepFn>
ScaledProduct forward_product(StepFn&& step, long double x0, long double alpha, std::int64_t n) {
  ScaledProduct prod;
  long double y = wrap01(x0);
  for (std::int64_t k = 0; k < n; ++k) {
    prod.mul_left(step(static_cast<double>(y)));
    y += alpha;
    if (y >= 1) y -= 1;
  }
  return prod;
}

inline OrbitProduct finish(const ScaledProduct& sp, std::int64_t n) {
  OrbitProduct op;
  op.n = n;
  op.log_norm = sp.log_norm();
  double unit = std::exp(sp.log_norm() - sp.log_scale);  // norm of the stored matrix
  op.normalized_matrix = {sp.a / unit, sp.b / unit, sp.c / unit, sp.d / unit};
  if (n != 0) {
    PolarData pd = sp.polar();
    op.s = pd.s_dir();
    op.u = pd.u_dir();
  }
  return op;
}

}  // namespace detail

inline constexpr std::int64_t default_orbit_cap = 100000000;

// n-step product A_n(x); n <= -1 is the inverse of the forward product from
// the shifted base point, so norms match and s/u swap.
template <class StepFn>
OrbitProduct orbit_product_with(StepFn&& step, const Frequency& f, double x, std::int64_t n,
                                std::int64_t cap = default_orbit_cap) {
  if (std::abs(n) > cap) throw std::domain_error("orbit_product: |n| exceeds cap");
  if (n >= 0) {
    return detail::finish(detail::forward_product(step, x, f.alpha, n), n);
  }
  long double base = wrap01(static_cast<long double>(x) + static_cast<long double>(n) * f.alpha);
  ScaledProduct sp = detail::forward_product(step, base, f.alpha, -n);
  return detail::finish(sp.inverse_adj(), n);
}

inline OrbitProduct orbit_product(const CocycleParams& p, double x, std::int64_t n,
                                  std::int64_t cap = default_orbit_cap) {
  return orbit_product_with([&p](double y) { return step_matrix(p, y); }, p.freq, x, n, cap);
}

// Cocycle identity: A_{n+m}(x) = A_m(T^n x) A_n(x). Used by tests and the
// avalanche extrapolation; rebuilds the scaled representation from the two
// normalized factors.
inline OrbitProduct compose(const OrbitProduct& first, const OrbitProduct& then) {
  ScaledProduct sp{first.normalized_matrix.a, first.normalized_matrix.b,
                   first.normalized_matrix.c, first.normalized_matrix.d, first.log_norm};
  ScaledProduct left{then.normalized_matrix.a, then.normalized_matrix.b,
                     then.normalized_matrix.c, then.normalized_matrix.d, then.log_norm};
  sp.mul_left(left);
  return detail::finish(sp, first.n + then.n);
}

}  // namespace qpsc
