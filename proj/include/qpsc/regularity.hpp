#pragma once

// Hölder exponent estimation by multi-scale pair regression: for each dyadic
// gap h, M(h) is the maximal |f(E) - f(E')| over grid pairs at distance h,
// and sigma_hat the least-squares slope of log M(h) against log h.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpsc/spectral.hpp"

namespace qpsc {

struct HolderFit {
  double sigma_hat = 0;
  double log_C = 0;
  double E_min = 0, E_max = 0;
  std::vector<double> scales_used;
  std::vector<double> M;            // modulus at each used scale
  std::vector<double> scales_dropped;
  double residual = 0;
  bool degenerate = false;  // fewer than two usable scales
};

// values on a uniform E grid; scales are gap widths, each at least 4 grid
// steps. Scales with M(h) = 0 or M(h) below 3x the caller's noise floor are
// dropped and recorded.
inline HolderFit holder_fit(const std::vector<double>& E, const std::vector<double>& values,
                            const std::vector<double>& scales, double noise_floor = 0) {
  if (E.size() != values.size() || E.size() < 8)
    throw std::domain_error("holder_fit: need matching grids with >= 8 points");
  for (double v : values)
    if (!std::isfinite(v)) throw std::domain_error("holder_fit: non-finite value");
  double h0 = (E.back() - E.front()) / (static_cast<double>(E.size()) - 1);
  if (h0 <= 0) throw std::domain_error("holder_fit: E grid must increase");

  HolderFit fit;
  fit.E_min = E.front();
  fit.E_max = E.back();
  std::vector<double> lh, lM;
  for (double h : scales) {
    auto k = static_cast<std::int64_t>(std::llround(h / h0));
    if (k < 4) throw std::domain_error("holder_fit: grid spacing must be <= scale / 4");
    if (k >= static_cast<std::int64_t>(E.size())) continue;
    double M = 0;
    for (std::size_t i = 0; i + k < E.size(); ++i)
      M = std::max(M, std::abs(values[i + k] - values[i]));
    if (M <= 0 || M < 3 * noise_floor) {
      fit.scales_dropped.push_back(h);
      continue;
    }
    fit.scales_used.push_back(h);
    fit.M.push_back(M);
    lh.push_back(std::log(static_cast<double>(k) * h0));
    lM.push_back(std::log(M));
  }
  if (lh.size() < 2) {
    fit.degenerate = true;
    return fit;
  }
  double n = static_cast<double>(lh.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lh.size(); ++i) {
    sx += lh[i];
    sy += lM[i];
    sxx += lh[i] * lh[i];
    sxy += lh[i] * lM[i];
  }
  fit.sigma_hat = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.log_C = (sy - fit.sigma_hat * sx) / n;
  double rss = 0;
  for (std::size_t i = 0; i < lh.size(); ++i) {
    double e = lM[i] - (fit.sigma_hat * lh[i] + fit.log_C);
    rss += e * e;
  }
  fit.residual = std::sqrt(rss / n);
  return fit;
}

struct JointHolderReport {
  HolderFit L_fit, N_fit;
  std::vector<double> E, L, N;
  bool cross_check_ok = false;   // |sigma(L) - sigma(N)| <= 0.25 when both fit
  std::string flags;
};

// L(E) and N(E) on a uniform grid over the window, fitted at the same dyadic
// scales. A curve that is flat over the window (window misses the numerical
// spectrum for N, or zero exponent throughout for L) yields a degenerate fit,
// which is flagged; only both curves degenerating is a hard error.
inline JointHolderReport joint_report(const CocycleParams& p, double E_min, double E_max,
                                      int grid_points, std::int64_t n_le, int phases_le,
                                      std::int64_t n_ids, int phases_ids,
                                      const std::vector<double>& scales, std::uint64_t seed = 0,
                                      int threads = 1, double noise_floor_L = 0,
                                      double noise_floor_N = 0) {
  if (grid_points < 16) throw std::domain_error("joint_report: need >= 16 grid points");
  JointHolderReport rep;
  rep.E.resize(grid_points);
  rep.L.resize(grid_points);
  rep.N.resize(grid_points);
  for (int i = 0; i < grid_points; ++i)
    rep.E[i] = E_min + (E_max - E_min) * static_cast<double>(i) / (grid_points - 1);
  parallel_for(grid_points, threads, [&](std::size_t i) {
    CocycleParams q = p;
    q.E = rep.E[i];
    rep.L[i] = lyapunov_birkhoff(q, n_le, phases_le, seed).value;
    rep.N[i] = ids_dirichlet(q, rep.E[i], n_ids, phases_ids, seed).value;
  });
  rep.L_fit = holder_fit(rep.E, rep.L, scales, noise_floor_L);
  rep.N_fit = holder_fit(rep.E, rep.N, scales, noise_floor_N);
  if (rep.L_fit.degenerate) rep.flags += "L flat over window;";
  if (rep.N_fit.degenerate) rep.flags += "N flat over window (no spectrum here);";
  if (rep.L_fit.degenerate && rep.N_fit.degenerate)
    throw std::domain_error("vacuous window: both curves locally constant");
  rep.cross_check_ok = !rep.L_fit.degenerate && !rep.N_fit.degenerate &&
                       std::abs(rep.L_fit.sigma_hat - rep.N_fit.sigma_hat) <= 0.25;
  return rep;
}

}  // namespace qpsc
