#pragma once

// Sampling potentials with exactly two nondegenerate critical points on the
// circle: v(x) = 2cos(2 pi x), its deformation 2cos(2 pi x) + e2 cos(4 pi x),
// and tabulated data through a periodic cubic spline (C^2 by construction).

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpsc/circle.hpp"

namespace qpsc {

struct CriticalPointCheck {
  bool ok = false;
  int sign_changes = 0;      // of v' over the grid
  double min_abs_v2 = 0;     // |v''| at the located critical points
  std::string message;
};

class Potential {
 public:
  enum class Kind { amo, cos_deformed, tabulated };

  static Potential amo() {
    Potential p;
    p.kind_ = Kind::amo;
    return p;
  }

  static Potential cos_deformed(double eps2) {
    Potential p;
    p.kind_ = Kind::cos_deformed;
    p.eps2_ = eps2;
    return p;
  }

  // values sampled at x_j = j/m, j = 0..m-1; periodic natural cubic spline
  static Potential tabulated(std::vector<double> values) {
    if (values.size() < 8) throw std::domain_error("tabulated potential: need >= 8 samples");
    Potential p;
    p.kind_ = Kind::tabulated;
    p.table_ = std::move(values);
    p.build_spline();
    return p;
  }

  Kind kind() const { return kind_; }

  double v(double x) const {
    switch (kind_) {
      case Kind::amo:
        return 2 * std::cos(2 * pi * x);
      case Kind::cos_deformed:
        return 2 * std::cos(2 * pi * x) + eps2_ * std::cos(4 * pi * x);
      case Kind::tabulated:
        return spline_eval<0>(x);
    }
    return 0;
  }

  double dv(double x) const {
    switch (kind_) {
      case Kind::amo:
        return -4 * pi * std::sin(2 * pi * x);
      case Kind::cos_deformed:
        return -4 * pi * std::sin(2 * pi * x) - 4 * pi * eps2_ * std::sin(4 * pi * x);
      case Kind::tabulated:
        return spline_eval<1>(x);
    }
    return 0;
  }

  double d2v(double x) const {
    switch (kind_) {
      case Kind::amo:
        return -8 * pi * pi * std::cos(2 * pi * x);
      case Kind::cos_deformed:
        return -8 * pi * pi * std::cos(2 * pi * x) - 16 * pi * pi * eps2_ * std::cos(4 * pi * x);
      case Kind::tabulated:
        return spline_eval<2>(x);
    }
    return 0;
  }

  // Numerical check of the cos-type hypothesis: exactly two sign changes of
  // v' on a 2^14 grid and |v''| above the floor at both critical points.
  CriticalPointCheck check_cos_type(double v2_floor = 1e-3) const {
    const int n = 1 << 14;
    CriticalPointCheck r;
    std::vector<double> crit;
    double prev = dv(0.0);
    for (int j = 1; j <= n; ++j) {
      double x = static_cast<double>(j % n) / n;
      double cur = dv(x);
      if ((prev < 0 && cur >= 0) || (prev > 0 && cur <= 0)) {
        ++r.sign_changes;
        crit.push_back((static_cast<double>(j) - 0.5) / n);
      }
      prev = cur;
    }
    r.min_abs_v2 = 1e300;
    for (double c : crit) r.min_abs_v2 = std::min(r.min_abs_v2, std::abs(d2v(c)));
    if (crit.empty()) r.min_abs_v2 = 0;
    r.ok = (r.sign_changes == 2) && (r.min_abs_v2 > v2_floor);
    if (!r.ok)
      r.message = "potential is not cos-type: " + std::to_string(r.sign_changes) +
                  " critical points, min |v''| = " + std::to_string(r.min_abs_v2);
    return r;
  }

 private:
  Kind kind_ = Kind::amo;
  double eps2_ = 0;
  std::vector<double> table_;
  std::vector<double> m2_;  // spline second derivatives at knots

  void build_spline() {
    // periodic tridiagonal system for second derivatives (cyclic Thomas via
    // Sherman-Morrison)
    const int n = static_cast<int>(table_.size());
    const double h = 1.0 / n;
    std::vector<double> rhs(n);
    for (int i = 0; i < n; ++i) {
      double ym = table_[(i + n - 1) % n], y0 = table_[i], yp = table_[(i + 1) % n];
      rhs[i] = 6.0 * (yp - 2 * y0 + ym) / (h * h);
    }
    // system: m_{i-1} + 4 m_i + m_{i+1} = rhs_i (cyclic)
    std::vector<double> x1 = solve_tridiag(rhs, 4.0), u(n, 0.0);
    std::vector<double> uv(n, 0.0);
    uv[0] = 1.0;
    uv[n - 1] = 1.0;
    std::vector<double> x2 = solve_tridiag(uv, 4.0);
    // Sherman-Morrison with u = e_0 + e_{n-1}, correction couples wrap terms
    double fact = (x1[0] + x1[n - 1]) / (1.0 + x2[0] + x2[n - 1]);
    m2_.resize(n);
    for (int i = 0; i < n; ++i) m2_[i] = x1[i] - fact * x2[i];
  }

  std::vector<double> solve_tridiag(const std::vector<double>& rhs, double diag) const {
    const int n = static_cast<int>(rhs.size());
    std::vector<double> c(n), x(n);
    double beta = diag;
    x[0] = rhs[0] / beta;
    for (int i = 1; i < n; ++i) {
      c[i] = 1.0 / beta;
      beta = diag - c[i];
      x[i] = (rhs[i] - x[i - 1]) / beta;
    }
    for (int i = n - 2; i >= 0; --i) x[i] -= c[i + 1] * x[i + 1];
    return x;
  }

  template <int Deriv>
  double spline_eval(double x) const {
    const int n = static_cast<int>(table_.size());
    const double h = 1.0 / n;
    double xx = wrap01(x) * n;
    int i = static_cast<int>(xx);
    if (i >= n) i = n - 1;
    double t = (xx - i) * h;  // offset within [0, h]
    int j = (i + 1) % n;
    double y0 = table_[i], y1 = table_[j], m0 = m2_[i], m1 = m2_[j];
    if constexpr (Deriv == 0) {
      double A = (h - t) / h, B = t / h;
      return A * y0 + B * y1 + ((A * A * A - A) * m0 + (B * B * B - B) * m1) * h * h / 6.0;
    } else if constexpr (Deriv == 1) {
      double A = (h - t) / h, B = t / h;
      return (y1 - y0) / h - (3 * A * A - 1) * h * m0 / 6.0 + (3 * B * B - 1) * h * m1 / 6.0;
    } else {
      double A = (h - t) / h, B = t / h;
      return A * m0 + B * m1;
    }
  }
};

}  // namespace qpsc
