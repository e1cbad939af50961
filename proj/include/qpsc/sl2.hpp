#pragma once

// SL(2,R) matrices, closed-form polar decomposition, and a log-scaled
// accumulator for long products that would overflow double range.

#include <cmath>
#include <stdexcept>

#include "qpsc/circle.hpp"

namespace qpsc {

struct Sl2 {
  double a = 1, b = 0, c = 0, d = 1;  // [[a, b], [c, d]]

  static Sl2 identity() { return {}; }
  static Sl2 rotation(double t) { return {std::cos(t), -std::sin(t), std::sin(t), std::cos(t)}; }
  static Sl2 diag(double m) { return {m, 0, 0, 1.0 / m}; }

  double det() const { return a * d - b * c; }
  double frob2() const { return a * a + b * b + c * c + d * d; }

  // adj(A) = A^{-1} for unimodular A
  Sl2 inverse() const { return {d, -b, -c, a}; }

  friend Sl2 operator*(const Sl2& x, const Sl2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }

  // Operator norm: for det = 1, ||A||^2 = (t + sqrt(t^2 - 4))/2 with t the
  // squared Frobenius norm. ||A|| >= 1 always.
  double op_norm() const {
    double t = frob2();
    double disc = t * t - 4;
    if (disc < 0) disc = 0;
    return std::sqrt(0.5 * (t + std::sqrt(disc)));
  }
};

// Polar data of A with ||A|| > 1:
//   A = R_u . diag(e^l, e^-l) . R_{pi/2 - s},   l = log ||A||.
// s in [0, pi) is the most contracted input direction, u in [0, 2pi) the most
// expanded image direction. u is kept in the doubled range so the
// reconstruction reproduces A including its sign; u_dir() gives the RP^1
// class used by all angle arithmetic.
struct PolarData {
  double log_norm = 0;
  double u = 0;
  double s = 0;

  double u_dir() const { return rp1_wrap(u); }
  double s_dir() const { return rp1_wrap(s); }
};

namespace detail {

// Eigenvector direction of the symmetric matrix [[m00, m01], [m01, m11]] for
// eigenvalue mu, chosen from the better conditioned row.
inline double sym2_eigvec_angle(double m00, double m01, double m11, double mu) {
  double r0 = std::abs(m00 - mu), r1 = std::abs(m11 - mu);
  double vx, vy;
  if (r0 >= r1) {
    vx = -m01;
    vy = m00 - mu;
  } else {
    vx = m11 - mu;
    vy = -m01;
  }
  if (vx == 0 && vy == 0) return 0;  // isotropic; caller guards
  return std::atan2(vy, vx);
}

}  // namespace detail

inline PolarData polar(const Sl2& A) {
  double n = A.op_norm();
  if (n <= 1 + 1e-12) throw std::domain_error("isotropic matrix: directions undefined");
  double n2 = n * n;

  // s: eigenvector of A^T A for the small eigenvalue 1/n^2
  double g00 = A.a * A.a + A.c * A.c;
  double g01 = A.a * A.b + A.c * A.d;
  double g11 = A.b * A.b + A.d * A.d;
  double s = rp1_wrap(detail::sym2_eigvec_angle(g00, g01, g11, 1.0 / n2));

  // u: image direction of the most expanded input, which R_{pi/2 - s} sends
  // to the first axis, i.e. the input at angle s - pi/2
  double wx = std::sin(s), wy = -std::cos(s);
  double ix = A.a * wx + A.b * wy;
  double iy = A.c * wx + A.d * wy;
  double u = std::atan2(iy, ix);  // in (-pi, pi]
  if (u < 0) u += 2 * pi;

  return {std::log(n), u, s};
}

// Running product e^{log_scale} * M with M kept at Frobenius norm <= e^30.
// Norms and singular directions of huge products are recovered from M via
// M^T M, whose dominant eigenvector stays well conditioned as M degenerates
// toward rank one; the small singular value is below double range long before
// that and is never needed.
struct ScaledProduct {
  double a = 1, b = 0, c = 0, d = 1;
  double log_scale = 0;

  static constexpr double rescale_threshold = 1.06e26;  // e^60 on frob^2

  void mul_left(const Sl2& m) {
    double na = m.a * a + m.b * c, nb = m.a * b + m.b * d;
    double nc = m.c * a + m.d * c, nd = m.c * b + m.d * d;
    a = na;
    b = nb;
    c = nc;
    d = nd;
    double f2 = a * a + b * b + c * c + d * d;
    if (f2 > rescale_threshold) {
      double f = std::sqrt(f2);
      a /= f;
      b /= f;
      c /= f;
      d /= f;
      log_scale += std::log(f);
    }
  }

  void mul_left(const ScaledProduct& p) {
    double na = p.a * a + p.b * c, nb = p.a * b + p.b * d;
    double nc = p.c * a + p.d * c, nd = p.c * b + p.d * d;
    a = na;
    b = nb;
    c = nc;
    d = nd;
    log_scale += p.log_scale;
    double f2 = a * a + b * b + c * c + d * d;
    if (f2 > rescale_threshold) {
      double f = std::sqrt(f2);
      a /= f;
      b /= f;
      c /= f;
      d /= f;
      log_scale += std::log(f);
    }
  }

  // For unimodular true products the inverse is the adjugate; norm and
  // log-scale carry over, stable/unstable directions swap.
  ScaledProduct inverse_adj() const { return {d, -b, -c, a, log_scale}; }

  double log_norm() const {
    double m00 = a * a + c * c, m01 = a * b + c * d, m11 = b * b + d * d;
    double tr = m00 + m11;
    double det = m00 * m11 - m01 * m01;
    double disc = tr * tr - 4 * det;
    if (disc < 0) disc = 0;
    double sig2 = 0.5 * (tr + std::sqrt(disc));
    return log_scale + 0.5 * std::log(sig2);
  }

  // Directions of the underlying product (valid once it is hyperbolic).
  PolarData polar() const {
    double m00 = a * a + c * c, m01 = a * b + c * d, m11 = b * b + d * d;
    double tr = m00 + m11;
    double det = m00 * m11 - m01 * m01;
    double disc = tr * tr - 4 * det;
    if (disc < 0) disc = 0;
    double sig2 = 0.5 * (tr + std::sqrt(disc));
    // dominant right-singular direction; s is its orthogonal complement, and
    // the image of the input at angle s - pi/2 fixes u's sign
    double w = detail::sym2_eigvec_angle(m00, m01, m11, sig2);
    double s = rp1_wrap(w + pi / 2);
    double wx = std::sin(s), wy = -std::cos(s);
    double ix = a * wx + b * wy;
    double iy = c * wx + d * wy;
    double u = std::atan2(iy, ix);
    if (u < 0) u += 2 * pi;
    return {log_scale + 0.5 * std::log(sig2), u, s};
  }
};

}  // namespace qpsc
