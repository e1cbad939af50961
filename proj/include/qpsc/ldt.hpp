#pragma once

// Large-deviation measurements: the fraction of a uniform phase grid where
// the finite-scale exponent (1/i) log||A_i(x)|| falls below kappa log lambda,
// and the exponential-decay fit of those fractions across scales.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qpsc/cocycle.hpp"
#include "qpsc/parallel.hpp"
#include "qpsc/rng.hpp"

namespace qpsc {

struct DeviationReport {
  std::vector<std::int64_t> scales;
  std::vector<double> fractions;
  double kappa = 0.9;
  int phases = 0;
  double lambda = 0;
  std::optional<double> delta_hat;  // nullopt: every fraction was zero,
  double residual = 0;              // decay is below grid resolution
  bool below_resolution = false;
};

inline double deviation_fraction(const CocycleParams& p, std::int64_t i, double kappa, int phases,
                                 std::uint64_t seed = 0, int threads = 1) {
  if (p.lambda <= 1) throw std::domain_error("deviation_fraction: lambda must exceed 1");
  if (i < 1) throw std::domain_error("deviation_fraction: scale must be >= 1");
  if (phases < 100) throw std::domain_error("deviation_fraction: need >= 100 phases");
  std::mt19937_64 rng(seed);
  double x0 = u01(rng);
  double thr = kappa * std::log(p.lambda);
  std::vector<int> dev(phases, 0);
  parallel_for(phases, threads, [&](std::size_t j) {
    double x = wrap01(x0 + static_cast<double>(j) / phases);
    if (orbit_product(p, x, i).log_norm / static_cast<double>(i) < thr) dev[j] = 1;
  });
  std::int64_t cnt = 0;
  for (int v : dev) cnt += v;
  return static_cast<double>(cnt) / phases;
}

// Through-origin least squares of log(fraction) on -i log lambda, matching
// the decay form  fraction < lambda^{-delta i}  (no prefactor). Scales
// whose measured fraction is zero carry no information at this resolution and
// are dropped; if all are zero the report is flagged below-resolution.
inline DeviationReport decay_fit(const CocycleParams& p, const std::vector<std::int64_t>& scales,
                                 double kappa, int phases, std::uint64_t seed = 0,
                                 int threads = 1) {
  if (scales.size() < 4) throw std::domain_error("decay_fit: need >= 4 scales");
  for (std::size_t k = 0; k + 1 < scales.size(); ++k)
    if (scales[k + 1] <= scales[k]) throw std::domain_error("decay_fit: scales must increase");
  if (scales.back() < 8 * scales.front())
    throw std::domain_error("decay_fit: scales must span at least a factor 8");

  DeviationReport rep;
  rep.scales = scales;
  rep.kappa = kappa;
  rep.phases = phases;
  rep.lambda = p.lambda;
  for (std::int64_t i : scales)
    rep.fractions.push_back(deviation_fraction(p, i, kappa, phases, seed, threads));

  double sxx = 0, sxy = 0;
  int used = 0;
  for (std::size_t k = 0; k < scales.size(); ++k) {
    if (rep.fractions[k] <= 0) continue;
    double xk = -static_cast<double>(scales[k]) * std::log(p.lambda);
    double yk = std::log(rep.fractions[k]);
    sxx += xk * xk;
    sxy += xk * yk;
    ++used;
  }
  if (used == 0) {
    rep.below_resolution = true;
    return rep;
  }
  double delta = sxy / sxx;
  rep.delta_hat = delta;
  double rss = 0;
  for (std::size_t k = 0; k < scales.size(); ++k) {
    if (rep.fractions[k] <= 0) continue;
    double xk = -static_cast<double>(scales[k]) * std::log(p.lambda);
    double e = std::log(rep.fractions[k]) - delta * xk;
    rss += e * e;
  }
  rep.residual = std::sqrt(rss / used);
  return rep;
}

// Distance from x to the backward orbit translates {c - l alpha : 0 <= l <= i}
// of the critical points; the deviant set concentrates near this set.
inline double critical_preimage_distance(double x, const std::vector<double>& crit_points,
                                         const Frequency& f, std::int64_t i) {
  double best = 0.5;
  for (double c : crit_points) {
    long double y = c;
    for (std::int64_t l = 0; l <= i; ++l) {
      best = std::min(best, static_cast<double>(torus_dist(static_cast<long double>(x), y)));
      y -= f.alpha;
      if (y < 0) y += 1;
    }
  }
  return best;
}

// Deviant phases at one scale, for the bad-set geometry cross-check.
inline std::vector<double> deviant_phases(const CocycleParams& p, std::int64_t i, double kappa,
                                          int phases, std::uint64_t seed = 0, int threads = 1) {
  if (p.lambda <= 1) throw std::domain_error("deviant_phases: lambda must exceed 1");
  std::mt19937_64 rng(seed);
  double x0 = u01(rng);
  double thr = kappa * std::log(p.lambda);
  std::vector<int> dev(phases, 0);
  parallel_for(phases, threads, [&](std::size_t j) {
    double x = wrap01(x0 + static_cast<double>(j) / phases);
    if (orbit_product(p, x, i).log_norm / static_cast<double>(i) < thr) dev[j] = 1;
  });
  std::vector<double> out;
  for (int j = 0; j < phases; ++j)
    if (dev[j]) out.push_back(wrap01(x0 + static_cast<double>(j) / phases));
  return out;
}

}  // namespace qpsc
