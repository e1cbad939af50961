#pragma once

// Induction objects on critical intervals: first-return times past the
// epsilon threshold, angle functions g_{i+1} = s_{r+} - u_{r-} with critical
// point tracking, Case I/II/III classification, growth and nondegeneracy
// checks, the resonant arctan composition, slope/curvature type tags, and
// the bifurcation diagnostic for planted type-III pairs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpsc/circle.hpp"
#include "qpsc/cocycle.hpp"
#include "qpsc/frequency.hpp"
#include "qpsc/parallel.hpp"

namespace qpsc {

enum class CaseTag { none, case_I, case_II, case_III, unclassified };
enum class TypeTag { I_plus, I_minus, II, III, unclassified };

inline const char* to_string(CaseTag c) {
  switch (c) {
    case CaseTag::case_I: return "I";
    case CaseTag::case_II: return "II";
    case CaseTag::case_III: return "III";
    case CaseTag::unclassified: return "unclassified";
    default: return "none";
  }
}
inline const char* to_string(TypeTag t) {
  switch (t) {
    case TypeTag::I_plus: return "I+";
    case TypeTag::I_minus: return "I-";
    case TypeTag::II: return "II";
    case TypeTag::III: return "III";
    default: return "unclassified";
  }
}

struct CriticalSet {
  int level = 0;                // index into freq.convergents
  std::vector<double> points;   // one or two centers
  double radius = 0;            // q_level^{-2}

  static CriticalSet at_level(const Frequency& f, int level, std::vector<double> pts) {
    if (level < 0 || static_cast<std::size_t>(level) >= f.levels())
      throw std::domain_error("CriticalSet: level out of range");
    long double q = to_ld(f.convergents[level].q);
    return {level, std::move(pts), static_cast<double>(1.0L / (q * q))};
  }

  bool contains(double x) const {
    for (double c : points)
      if (torus_dist(x, c) < radius) return true;
    return false;
  }
};

struct ReturnTimes {
  int level = 0;
  std::vector<std::int64_t> r_plus, r_minus;  // one entry per grid sample
  std::int64_t r_plus_min = 0, r_minus_min = 0;
  std::int64_t r = 0;          // min over interval of min(r+, r-)
  std::int64_t threshold = 1;  // enumeration starts at this j
};

struct AngleSamples {
  double lo = 0, hi = 0;   // interval in unwrapped coordinates (hi > lo)
  std::vector<double> x;   // uniform grid, endpoints included
  std::vector<double> g;   // branch-unwrapped angle values
};

struct AngleFunctionData {
  int level = 0;
  std::vector<AngleSamples> intervals;
  CaseTag case_tag = CaseTag::none;
  TypeTag type_tag = TypeTag::unclassified;
  std::optional<std::int64_t> resonance_k;
  std::vector<double> critical_points;  // refined minima of |g|, one per interval
  std::vector<double> critical_depths;  // |g| there
  bool extra_minima = false;            // an interval had two comparable minima
  bool tangency = false;                // two-point critical set degenerated
};

struct GrowthReport {
  double exponent_soft = 0.9;       // asserted lower-rate fraction
  double exponent_raw = 0;          // the unsoftened rate 1 - 1e-2 eps
  double min_ratio = 0;             // min over samples of log||A_r|| / (r log lambda)
  double worst_x = 0;
  int failures_soft = 0;            // samples below the softened rate
  int samples = 0;
  bool pass = false;
};

struct NondegReport {
  double c_fit = 0;     // largest c with |g| >= c dist^3 outside exclusion
  double argmin_x = 0;  // where the fit is tight
  double exclusion = 0;
  bool pass = false;    // c_fit > 0
};

namespace detail {

// first j >= threshold with x + dir j alpha inside the union of intervals
inline std::int64_t first_return(const Frequency& f, const CriticalSet& crit, long double x,
                                 int dir, std::int64_t threshold, std::int64_t cap) {
  long double y = wrap01(x);
  long double step = dir > 0 ? f.alpha : -f.alpha;
  for (std::int64_t j = 1; j <= cap; ++j) {
    y += step;
    if (y >= 1) y -= 1;
    if (y < 0) y += 1;
    if (j < threshold) continue;
    if (crit.contains(static_cast<double>(y))) return j;
  }
  throw std::domain_error("return-time overflow: no return within the cube-growth horizon");
}

}  // namespace detail

// Enumeration cap: the orbit of length q_m is 1/q_m-dense up to 1/q_{m+1},
// so the first convergent with q_m >= q_i^3 guarantees a hit in an interval
// of radius q_i^{-2}. Doubled for the edge effects of a finite radius.
inline std::int64_t return_time_cap(const Frequency& f, int level) {
  long double qi = to_ld(f.convergents[level].q);
  long double cube = qi * qi * qi;
  for (const auto& c : f.convergents)
    if (to_ld(c.q) >= cube) return static_cast<std::int64_t>(2 * to_ld(c.q));
  return static_cast<std::int64_t>(2 * cube);
}

inline std::int64_t return_threshold(const Frequency& f, int level, double eps = 1e-3) {
  long double qi = to_ld(f.convergents[level].q);
  auto t = static_cast<std::int64_t>(std::ceil(1e-3 * eps * static_cast<double>(qi)));
  return std::max<std::int64_t>(1, t);
}

// First forward/backward hits of the union of critical intervals past the
// threshold 1e-3 eps q_i, per sample.
inline ReturnTimes return_times(const Frequency& f, const CriticalSet& crit,
                                const std::vector<double>& x_samples, double eps = 1e-3,
                                int threads = 1) {
  ReturnTimes rt;
  rt.level = crit.level;
  rt.threshold = return_threshold(f, crit.level, eps);
  std::int64_t cap = return_time_cap(f, crit.level);
  rt.r_plus.resize(x_samples.size());
  rt.r_minus.resize(x_samples.size());
  parallel_for(x_samples.size(), threads, [&](std::size_t i) {
    rt.r_plus[i] = detail::first_return(f, crit, x_samples[i], +1, rt.threshold, cap);
    rt.r_minus[i] = detail::first_return(f, crit, x_samples[i], -1, rt.threshold, cap);
  });
  rt.r_plus_min = rt.r_minus_min = cap;
  for (std::size_t i = 0; i < x_samples.size(); ++i) {
    rt.r_plus_min = std::min(rt.r_plus_min, rt.r_plus[i]);
    rt.r_minus_min = std::min(rt.r_minus_min, rt.r_minus[i]);
  }
  rt.r = std::min(rt.r_plus_min, rt.r_minus_min);
  return rt;
}

// Case classification in precedence order: consecutive intervals first (II), then
// a nonzero resonant translate within the window |k| < 1e-3 eps q_i (III),
// otherwise I. Desk-scale q_i keeps the window empty, so genuine Case III
// needs synthetic convergents; the predicate itself is exact.
inline std::pair<CaseTag, std::optional<std::int64_t>> classify_case(const Frequency& f,
                                                                     const CriticalSet& crit,
                                                                     double eps = 1e-3) {
  if (crit.points.size() < 2) return {CaseTag::case_II, std::nullopt};
  double c1 = crit.points[0], c2 = crit.points[1];
  if (torus_dist(c1, c2) < 2 * crit.radius) return {CaseTag::case_II, std::nullopt};
  long double qi = to_ld(f.convergents[crit.level].q);
  auto kmax = static_cast<std::int64_t>(1e-3 * eps * static_cast<double>(qi));
  for (std::int64_t k = 1; k < kmax; ++k) {
    for (std::int64_t sk : {k, -k}) {
      double shifted = static_cast<double>(wrap01(static_cast<long double>(c1) + static_cast<long double>(sk) * f.alpha));
      if (torus_dist(shifted, c2) < 2 * crit.radius) return {CaseTag::case_III, sk};
    }
  }
  return {CaseTag::case_I, std::nullopt};
}

// golden-section minimizer to ~1e-12 absolute
template <class Fn>
double golden_section_min(Fn&& fn, double a, double b) {
  const double gr = 0.6180339887498949;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  for (int it = 0; it < 90 && (b - a) > 1e-12; ++it) {
    if (fn(c) < fn(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - gr * (b - a);
    d = a + gr * (b - a);
  }
  return 0.5 * (a + b);
}

// Initial angle function of the normal form: g(x) = arctan(t - v(x)) on the
// whole circle, critical points at the two deepest minima of |g| (the roots
// of v = t for cos-type v). A potential grazing the level t produces a
// tangency flag instead of two points.
inline AngleFunctionData initial_angle(const CocycleParams& p, int grid_size = 4096) {
  if (p.lambda <= 0) throw std::domain_error("initial_angle: lambda must be > 0");
  AngleFunctionData afd;
  afd.level = -1;
  AngleSamples s;
  s.lo = 0;
  s.hi = 1;
  double t = p.t();
  s.x.resize(grid_size + 1);
  s.g.resize(grid_size + 1);
  for (int i = 0; i <= grid_size; ++i) {
    s.x[i] = static_cast<double>(i) / grid_size;
    s.g[i] = std::atan(t - p.potential.v(s.x[i]));
  }
  afd.intervals.push_back(std::move(s));

  // local minima of |g| on the circle
  const auto& gs = afd.intervals[0].g;
  std::vector<std::pair<double, double>> minima;  // (depth, x)
  for (int i = 0; i < grid_size; ++i) {
    double prev = std::abs(gs[(i + grid_size - 1) % grid_size]);
    double cur = std::abs(gs[i]);
    double next = std::abs(gs[(i + 1) % grid_size]);
    if (cur <= prev && cur < next) minima.emplace_back(cur, afd.intervals[0].x[i]);
  }
  std::sort(minima.begin(), minima.end());
  auto eval = [&](double x) { return std::abs(std::atan(t - p.potential.v(x))); };
  std::size_t keep = std::min<std::size_t>(2, minima.size());
  for (std::size_t i = 0; i < keep; ++i) {
    double h = 1.0 / grid_size;
    double c = golden_section_min(eval, minima[i].second - h, minima[i].second + h);
    afd.critical_points.push_back(wrap01(c));
    afd.critical_depths.push_back(eval(c));
  }
  if (afd.critical_points.size() == 2 &&
      torus_dist(afd.critical_points[0], afd.critical_points[1]) < 2.0 / grid_size) {
    afd.critical_points.pop_back();
    afd.critical_depths.pop_back();
  }
  afd.tangency = afd.critical_points.size() != 2;
  afd.extra_minima = minima.size() > 2 && std::abs(minima[2].first - minima[1].first) < 1e-6;
  std::sort(afd.critical_points.begin(), afd.critical_points.end());
  return afd;
}

namespace detail {

struct AngleEval {
  const CocycleParams* params;
  const Frequency* freq;
  const CriticalSet* crit;
  std::int64_t threshold, cap;

  // g(x) = s(A_{r+}(x)) - u(A_{-r-}(x)) as a (-pi/2, pi/2] representative,
  // plus the pieces callers need
  struct Value {
    double g;
    std::int64_t r_plus, r_minus;
    double log_norm_fwd, log_norm_bwd;
  };

  Value operator()(double x) const {
    std::int64_t rp = first_return(*freq, *crit, x, +1, threshold, cap);
    std::int64_t rm = first_return(*freq, *crit, x, -1, threshold, cap);
    OrbitProduct fwd = orbit_product(*params, x, rp);
    OrbitProduct bwd = orbit_product(*params, x, -rm);
    if (fwd.log_norm <= 0 || bwd.log_norm <= 0)
      throw std::domain_error("angle_function: non-hyperbolic product at x = " + std::to_string(x));
    return {rp1_diff(fwd.s, bwd.s), rp, rm, fwd.log_norm, bwd.log_norm};
  }
};

}  // namespace detail

// Angle function g_{i+1} sampled on the critical intervals with branch
// unwrapping, case classification, and refined critical points (deepest |g|
// minimum per interval, golden-section to 1e-12).
inline AngleFunctionData angle_function(const CocycleParams& p, const Frequency& f,
                                        const CriticalSet& crit, const ReturnTimes& rt,
                                        int grid_size, double eps = 1e-3, int threads = 1) {
  AngleFunctionData afd;
  afd.level = crit.level;
  auto [tag, k] = classify_case(f, crit, eps);
  afd.case_tag = tag;
  afd.resonance_k = k;

  detail::AngleEval eval{&p, &f, &crit, rt.threshold, return_time_cap(f, crit.level)};

  for (double c : crit.points) {
    AngleSamples s;
    s.lo = c - crit.radius;
    s.hi = c + crit.radius;
    s.x.resize(grid_size + 1);
    s.g.resize(grid_size + 1);
    parallel_for(grid_size + 1, threads, [&](std::size_t i) {
      s.x[i] = s.lo + (s.hi - s.lo) * static_cast<double>(i) / grid_size;
      s.g[i] = eval(wrap01(s.x[i])).g;
    });
    rp1_unwrap(s.g);
    afd.intervals.push_back(std::move(s));
  }

  // deepest |g| minimum per interval, then refine on the continuous evaluator
  auto absg = [&](double x) { return rp1_dist(eval(wrap01(x)).g, 0.0); };
  for (const auto& s : afd.intervals) {
    std::size_t best = 0;
    double bestv = 1e300;
    std::size_t second = 0;
    double secondv = 1e300;
    for (std::size_t i = 0; i < s.g.size(); ++i) {
      double v = rp1_dist(s.g[i], 0.0);
      if (v < bestv) {
        second = best;
        secondv = bestv;
        best = i;
        bestv = v;
      } else if (v < secondv) {
        second = i;
        secondv = v;
      }
    }
    double h = (s.hi - s.lo) / grid_size;
    double c = golden_section_min(absg, s.x[best] - h, s.x[best] + h);
    afd.critical_points.push_back(wrap01(c));
    afd.critical_depths.push_back(absg(c));
    // a second minimum of comparable depth away from the first is suspicious
    if (secondv < 2 * bestv + 1e-12 &&
        std::abs(static_cast<double>(second) - static_cast<double>(best)) > 2)
      afd.extra_minima = true;
  }
  return afd;
}

// Growth bound at the return times, softened for desk-scale lambda:
// log||A_{+-r(x)}(x)|| >= exponent_soft * r(x) * log lambda, with the raw
// exponent 1 - 1e-2 eps reported alongside.
inline GrowthReport verify_growth(const CocycleParams& p, const ReturnTimes& rt,
                                  const std::vector<double>& x_samples, double exponent_soft = 0.9,
                                  double eps = 1e-3, int threads = 1) {
  GrowthReport rep;
  rep.exponent_soft = exponent_soft;
  rep.exponent_raw = 1.0 - 1e-2 * eps;
  rep.samples = static_cast<int>(x_samples.size()) * 2;
  rep.min_ratio = 1e300;
  double llam = std::log(p.lambda);
  if (llam <= 0) {
    rep.min_ratio = 0;
    rep.failures_soft = rep.samples;
    rep.pass = false;
    return rep;
  }
  std::vector<double> ratios(2 * x_samples.size());
  parallel_for(x_samples.size(), threads, [&](std::size_t i) {
    OrbitProduct fwd = orbit_product(p, wrap01(x_samples[i]), rt.r_plus[i]);
    OrbitProduct bwd = orbit_product(p, wrap01(x_samples[i]), -rt.r_minus[i]);
    ratios[2 * i] = fwd.log_norm / (static_cast<double>(rt.r_plus[i]) * llam);
    ratios[2 * i + 1] = bwd.log_norm / (static_cast<double>(rt.r_minus[i]) * llam);
  });
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (ratios[i] < rep.min_ratio) {
      rep.min_ratio = ratios[i];
      rep.worst_x = x_samples[i / 2];
    }
    if (ratios[i] < exponent_soft) ++rep.failures_soft;
  }
  rep.pass = rep.failures_soft == 0;
  return rep;
}

// Largest c with |g(x)| >= c ||x - C||^3 over grid points outside the
// exclusion balls around the previous critical set.
inline NondegReport nondegeneracy_check(const AngleFunctionData& afd,
                                        const std::vector<double>& crit_next,
                                        const std::vector<double>& exclusion_centers,
                                        double exclusion) {
  NondegReport rep;
  rep.exclusion = exclusion;
  rep.c_fit = 1e300;
  bool any = false;
  for (const auto& s : afd.intervals) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      double x = wrap01(s.x[i]);
      bool excluded = false;
      for (double e : exclusion_centers)
        if (torus_dist(x, e) < exclusion) excluded = true;
      if (excluded) continue;
      double dist = 1e300;
      for (double c : crit_next) dist = std::min(dist, torus_dist(x, c));
      if (dist <= 0) continue;
      double ratio = rp1_dist(s.g[i], 0.0) / (dist * dist * dist);
      if (ratio < rep.c_fit) {
        rep.c_fit = ratio;
        rep.argmin_x = x;
      }
      any = true;
    }
  }
  if (!any) rep.c_fit = 0;
  rep.pass = any && rep.c_fit > 0;
  return rep;
}

// The resonant composition arctan(l^2 tan(f1)) - pi/2 + f2, extended
// continuously through the tan poles (the arctan composition has one-sided
// limits 0 and -pi, the same RP^1 point).
inline double resonant_compose(double f1, double f2, double l_k) {
  double t = rp1_diff(f1, 0.0);
  double first;
  if (std::abs(std::abs(t) - pi / 2) < 1e-12) {
    first = (t > 0 ? pi / 2 : -pi / 2) - pi / 2;
  } else {
    first = std::atan(l_k * l_k * std::tan(t)) - pi / 2;
  }
  return first + f2;
}

namespace detail {

inline double interp(const AngleSamples& s, double x) {
  // sample x given in the interval's own unwrapped coordinates
  if (s.x.size() < 2) throw std::domain_error("interp: empty angle samples");
  double h = (s.hi - s.lo) / (static_cast<double>(s.x.size()) - 1);
  double f = (x - s.lo) / h;
  auto i = static_cast<std::int64_t>(std::floor(f));
  if (i < 0) i = 0;
  if (i >= static_cast<std::int64_t>(s.x.size()) - 1) i = static_cast<std::int64_t>(s.x.size()) - 2;
  double w = f - static_cast<double>(i);
  return s.g[i] * (1 - w) + s.g[i + 1] * w;
}

}  // namespace detail

// Resonant update: for x in I_{i,1} the first argument is
// g_i(x + k alpha) read from the second interval, and symmetrically with
// -k alpha on I_{i,2}. l_k is ||A_k||.
inline AngleFunctionData resonant_update(const AngleFunctionData& g_i, const Frequency& f,
                                         std::int64_t k, double l_k) {
  if (g_i.case_tag != CaseTag::case_III || !g_i.resonance_k || *g_i.resonance_k != k)
    throw std::domain_error("resonant_update: angle data is not in Case III with this k");
  if (g_i.intervals.size() != 2)
    throw std::domain_error("resonant_update: need both critical intervals");
  AngleFunctionData out;
  out.level = g_i.level + 1;
  out.case_tag = CaseTag::case_III;
  out.type_tag = TypeTag::III;
  out.resonance_k = k;
  double shift = static_cast<double>(static_cast<long double>(k) * f.alpha);
  for (int j = 0; j < 2; ++j) {
    const AngleSamples& own = g_i.intervals[j];
    const AngleSamples& other = g_i.intervals[1 - j];
    double sgn = (j == 0) ? 1.0 : -1.0;
    AngleSamples s;
    s.lo = own.lo;
    s.hi = own.hi;
    s.x = own.x;
    s.g.resize(own.x.size());
    for (std::size_t i = 0; i < own.x.size(); ++i) {
      double xs = own.x[i] + sgn * shift;
      // map into the other interval's unwrapped frame
      double base = 0.5 * (other.lo + other.hi);
      double xo = base + (static_cast<double>(wrap01(xs)) - static_cast<double>(wrap01(base)));
      if (xo - base > 0.5) xo -= 1;
      if (xo - base < -0.5) xo += 1;
      double f1 = detail::interp(other, xo);
      s.g[i] = resonant_compose(f1, own.g[i], l_k);
    }
    rp1_unwrap(s.g);
    out.intervals.push_back(std::move(s));
  }
  return out;
}

// Finite-difference type classification, evaluated in order: type I when
// |g'| > q_n^{-4} throughout the middle half, else type II
// when |g''| > c_floor wherever |g'| < q_n^{-4}; type III only comes from a
// caller-supplied resonant decomposition.
inline TypeTag type_classify(const AngleSamples& s, long double q_n, double c_floor = 0.1,
                             bool has_resonant_form = false) {
  if (has_resonant_form) return TypeTag::III;
  if (s.x.size() < (1u << 10) + 1)
    throw std::domain_error("type_classify: need >= 2^10 + 1 grid points");
  std::size_t n = s.x.size();
  double h = (s.hi - s.lo) / (static_cast<double>(n) - 1);
  double thr = static_cast<double>(1.0L / (q_n * q_n * q_n * q_n));

  // half-interval: same center, half length
  std::size_t lo = n / 4, hi = n - n / 4;
  bool type1 = true;
  double slope_at_min = 0;
  double depth = 1e300;
  for (std::size_t i = lo; i < hi; ++i) {
    double d1 = (s.g[i + 1] - s.g[i]) / h;
    if (std::abs(d1) <= thr) type1 = false;
    double v = rp1_dist(s.g[i], 0.0);
    if (v < depth) {
      depth = v;
      slope_at_min = d1;
    }
  }
  if (type1) return slope_at_min > 0 ? TypeTag::I_plus : TypeTag::I_minus;

  bool type2 = true;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    double d1 = (s.g[i + 1] - s.g[i - 1]) / (2 * h);
    if (std::abs(d1) < thr) {
      double d2 = (s.g[i + 1] - 2 * s.g[i] + s.g[i - 1]) / (h * h);
      if (std::abs(d2) <= c_floor) type2 = false;
    }
  }
  if (type2) return TypeTag::II;
  return TypeTag::unclassified;
}

// ---- bifurcation diagnostic on planted type-III data ----

struct AffineAngle {
  double slope = 0;  // f(x) = slope * (x - zero)
  double zero = 0;
  double operator()(double x) const { return slope * (x - zero); }
};

struct BifurcationReport {
  double d = 0;     // separation of the two planted zeros
  double l_k = 0;
  int zero_count = 0;             // zeros of the composition mod pi
  std::vector<double> zeros;      // refined locations
  double min_abs_g = 0;           // min RP^1 distance of g to 0 over I
  double min_arg = 0;
  double nearest_zero_to_e1 = -1;  // -1 when no zeros
};

namespace detail {

// zeros (mod pi) of fn on [lo, hi]: sign changes of the reduced representative
// with a jump guard, refined by bisection. The guard pi/4 rejects wrap-around
// jumps at under-resolved tan poles (magnitude close to pi/2 or pi), while
// genuine zeros sit on branches whose reduced values stay near 0.
template <class Fn>
std::vector<double> rp1_zeros(Fn&& fn, double lo, double hi, int grid) {
  std::vector<double> zs;
  double prev = rp1_diff(fn(lo), 0.0);
  double xprev = lo;
  for (int i = 1; i <= grid; ++i) {
    double x = lo + (hi - lo) * static_cast<double>(i) / grid;
    double v = rp1_diff(fn(x), 0.0);
    bool crossing = (prev <= 0 && v > 0 && v - prev < pi / 4) ||
                    (prev >= 0 && v < 0 && prev - v < pi / 4);
    if (crossing) {
      double a = xprev, b = x;
      for (int it = 0; it < 60; ++it) {
        double m = 0.5 * (a + b);
        double fm = rp1_diff(fn(m), 0.0);
        if ((fm <= 0) == (prev <= 0)) {
          a = m;
        } else {
          b = m;
        }
      }
      double z = 0.5 * (a + b);
      // a true zero refines to value 0; a branch wrap refines to ~pi/2
      if (std::abs(rp1_diff(fn(z), 0.0)) < pi / 8) zs.push_back(z);
    }
    prev = v;
    xprev = x;
  }
  return zs;
}

}  // namespace detail

// Zero counting of the planted composition
//   g(x) = arctan(l_k^2 tan(a1 (x - e1))) - pi/2 + a2_slope (x - e2)
// over a sweep of separations d = e1 - e2. g1 must be increasing at its zero
// (type I+) and g2 decreasing (type I-). The interval is sized ~ 40 / l_k
// around e1 and widened to cover every swept e2.
inline std::vector<BifurcationReport> bifurcation_diagnose(const AffineAngle& g1,
                                                           const AffineAngle& g2_template,
                                                           double l_k,
                                                           const std::vector<double>& d_sweep,
                                                           int grid = 1 << 14) {
  if (g1.slope <= 0 || g2_template.slope >= 0)
    throw std::domain_error("bifurcation_diagnose: need type I+ g1 and type I- g2");
  if (l_k < 100) throw std::domain_error("bifurcation_diagnose: l_k must be >= 100");
  double e1 = g1.zero;
  double dmax = 0;
  for (double d : d_sweep) dmax = std::max(dmax, d);
  double lo = e1 - dmax - 20 / l_k, hi = e1 + 20 / l_k;

  std::vector<BifurcationReport> out;
  for (double d : d_sweep) {
    AffineAngle g2 = g2_template;
    g2.zero = e1 - d;
    auto fn = [&](double x) { return resonant_compose(g1(x), g2(x), l_k); };
    BifurcationReport rep;
    rep.d = d;
    rep.l_k = l_k;
    rep.zeros = detail::rp1_zeros(fn, lo, hi, grid);
    rep.zero_count = static_cast<int>(rep.zeros.size());
    rep.min_abs_g = 1e300;
    for (int i = 0; i <= grid; ++i) {
      double x = lo + (hi - lo) * static_cast<double>(i) / grid;
      double v = rp1_dist(fn(x), 0.0);
      if (v < rep.min_abs_g) {
        rep.min_abs_g = v;
        rep.min_arg = x;
      }
    }
    if (!rep.zeros.empty()) {
      double best = 1e300;
      for (double z : rep.zeros) best = std::min(best, std::abs(z - e1));
      rep.nearest_zero_to_e1 = best;
    }
    out.push_back(std::move(rep));
  }
  return out;
}

// Transition separation d0: bisection between a separation with zeros and one
// without. Transition scale: d0 ~ eta l_k^{-1}.
inline double locate_bifurcation_d0(const AffineAngle& g1, const AffineAngle& g2_template,
                                    double l_k, int grid = 1 << 14) {
  auto count_at = [&](double d) {
    return bifurcation_diagnose(g1, g2_template, l_k, {d}, grid)[0].zero_count;
  };
  double lo = 0, hi = 20 / l_k;
  if (count_at(hi) == 0) throw std::domain_error("locate_bifurcation_d0: no zeros at upper bracket");
  if (count_at(lo) > 0) throw std::domain_error("locate_bifurcation_d0: zeros at d = 0");
  for (int it = 0; it < 40; ++it) {
    double mid = 0.5 * (lo + hi);
    if (count_at(mid) > 0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// ---- level-by-level driver ----

struct InductionConfig {
  CocycleParams params;       // E = lambda * t
  int grid_size = 512;
  int initial_grid = 1 << 14;
  long long max_q = 10000;    // stop once q_i exceeds this
  int max_levels = 64;
  double eps = 1e-3;
  double growth_exponent = 0.9;  // softened from 1 - 1e-2 eps
  double drift_exponent = 0.5;   // softened from 3/4
  long long min_start_q = 13;
  int threads = 1;
};

struct LevelReport {
  int level = 0;        // convergent index
  long long q = 0;
  CriticalSet crit;     // intervals this level ran on
  ReturnTimes rt;
  AngleFunctionData afd;
  GrowthReport growth;
  NondegReport nondeg;
  std::vector<double> drift;         // |c_{i+1,j} - c_{i,j}| matched by position
  double drift_bound = 0;            // lambda^{-drift_exponent * r_{i-1}} + grid step
  double contraction = -1;           // max |g_{i+1} - g_i| on this grid (levels > first)
  double contraction_bound = -1;     // lambda^{-r_{i-1}} (levels > first)
};

struct InductionRun {
  AngleFunctionData initial;
  std::vector<LevelReport> levels;
  bool potential_ok = true;
  std::string message;
};

inline InductionRun run_induction(const InductionConfig& cfg) {
  InductionRun run;
  auto check = cfg.params.potential.check_cos_type();
  run.potential_ok = check.ok;
  if (!check.ok) run.message = check.message;

  run.initial = initial_angle(cfg.params, cfg.initial_grid);
  if (run.initial.tangency) {
    run.message += (run.message.empty() ? "" : "; ");
    run.message += "initial angle function does not have two critical points";
    return run;
  }
  const Frequency& f = cfg.params.freq;
  double sep = torus_dist(run.initial.critical_points[0], run.initial.critical_points[1]);

  int start = -1;
  for (std::size_t i = 0; i < f.levels(); ++i) {
    long double q = to_ld(f.convergents[i].q);
    if (q >= static_cast<long double>(cfg.min_start_q) &&
        static_cast<double>(1.0L / (q * q)) < sep / 4) {
      start = static_cast<int>(i);
      break;
    }
  }
  if (start < 0) {
    run.message = "no stored convergent is fine enough to start the induction";
    return run;
  }

  std::vector<double> C = run.initial.critical_points;
  std::int64_t prev_r = -1;
  std::optional<CriticalSet> prev_crit;

  for (int i = start; static_cast<std::size_t>(i) < f.levels(); ++i) {
    if (to_ld(f.convergents[i].q) > static_cast<long double>(cfg.max_q)) break;
    if (static_cast<int>(run.levels.size()) >= cfg.max_levels) break;

    LevelReport rep;
    rep.level = i;
    rep.q = static_cast<long long>(to_ld(f.convergents[i].q));
    rep.crit = CriticalSet::at_level(f, i, C);

    std::vector<double> samples;
    for (double c : C)
      for (int j = 0; j <= cfg.grid_size; ++j)
        samples.push_back(c - rep.crit.radius +
                          2 * rep.crit.radius * static_cast<double>(j) / cfg.grid_size);

    rep.rt = return_times(f, rep.crit, samples, cfg.eps, cfg.threads);
    rep.afd = angle_function(cfg.params, f, rep.crit, rep.rt, cfg.grid_size, cfg.eps, cfg.threads);
    rep.growth = verify_growth(cfg.params, rep.rt, samples, cfg.growth_exponent, cfg.eps,
                               cfg.threads);

    double grid_step = 2 * rep.crit.radius / cfg.grid_size;
    double llam = std::log(cfg.params.lambda);
    std::int64_t r_prev_scale = prev_r > 0 ? prev_r : rep.rt.r;
    rep.drift_bound =
        std::exp(-cfg.drift_exponent * static_cast<double>(r_prev_scale) * llam) + grid_step;
    for (std::size_t j = 0; j < C.size() && j < rep.afd.critical_points.size(); ++j)
      rep.drift.push_back(torus_dist(rep.afd.critical_points[j], C[j]));

    rep.nondeg = nondegeneracy_check(rep.afd, rep.afd.critical_points, C,
                                     std::exp(-static_cast<double>(rep.rt.r) * llam));

    if (prev_crit && prev_r > 0 &&
        (rep.afd.case_tag == CaseTag::case_I || rep.afd.case_tag == CaseTag::case_II)) {
      // |g_{i+1} - g_i| with the previous angle function re-evaluated at the
      // same phases; interpolation would smear the return-time kinks, whose
      // curvature scales like a power of lambda
      detail::AngleEval prev_eval{&cfg.params, &f, &*prev_crit,
                                  return_threshold(f, prev_crit->level, cfg.eps),
                                  return_time_cap(f, prev_crit->level)};
      double worst = 0;
      for (const AngleSamples& cur : rep.afd.intervals)
        for (std::size_t j = 0; j < cur.x.size(); j += 8)
          worst = std::max(worst, rp1_dist(cur.g[j], prev_eval(wrap01(cur.x[j])).g));
      rep.contraction = worst;
      rep.contraction_bound = std::exp(-static_cast<double>(prev_r) * llam);
    }

    // classify the per-interval type of the new angle function
    if (!rep.afd.intervals.empty() && rep.afd.intervals[0].x.size() >= (1u << 10) + 1)
      rep.afd.type_tag = type_classify(rep.afd.intervals[0], to_ld(f.convergents[i].q));

    C = rep.afd.critical_points;
    prev_r = rep.rt.r;
    prev_crit = rep.crit;
    run.levels.push_back(std::move(rep));
    if (C.size() < 2) {
      run.message += (run.message.empty() ? "" : "; ");
      run.message += "critical set degenerated below two points";
      break;
    }
  }
  return run;
}

}  // namespace qpsc
