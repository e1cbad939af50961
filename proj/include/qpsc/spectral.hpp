#pragma once

// Finite-scale Lyapunov exponents (phase-averaged Birkhoff and the avalanche
// doubling extrapolation), integrated density of states by Sturm counts on
// Dirichlet truncations, and the Thouless-formula consistency integral.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpsc/cocycle.hpp"
#include "qpsc/parallel.hpp"
#include "qpsc/rng.hpp"

namespace qpsc {

enum class LeMethod { birkhoff, avalanche };

struct LyapunovEstimate {
  double E = 0;
  std::int64_t n = 0;
  int phases = 0;
  double value = 0;  // estimate of L_n
  LeMethod method = LeMethod::birkhoff;
  double stderr_ = 0;                   // across-phase spread / sqrt(phases)
  bool ap_degenerate = false;           // avalanche only: conditions failed,
  std::vector<double> residual_chain;   // fell back to the plain average
};

// Mean of (1/n) log||A_n(x_j)|| over the shifted uniform grid
// x_j = x0 + j/phases with seeded origin.
inline LyapunovEstimate lyapunov_birkhoff(const CocycleParams& p, std::int64_t n, int phases,
                                          std::uint64_t seed = 0, int threads = 1) {
  if (n < 1 || phases < 1) throw std::domain_error("lyapunov_birkhoff: n and phases must be >= 1");
  std::mt19937_64 rng(seed);
  double x0 = u01(rng);
  std::vector<double> vals(phases);
  parallel_for(phases, threads, [&](std::size_t j) {
    double x = wrap01(x0 + static_cast<double>(j) / phases);
    vals[j] = orbit_product(p, x, n).log_norm / static_cast<double>(n);
  });
  double mean = 0;
  for (double v : vals) mean += v;
  mean /= phases;
  double var = 0;
  for (double v : vals) var += (v - mean) * (v - mean);
  var = phases > 1 ? var / (phases - 1) : 0;
  LyapunovEstimate est;
  est.E = p.E;
  est.n = n;
  est.phases = phases;
  est.value = mean;
  est.method = LeMethod::birkhoff;
  est.stderr_ = std::sqrt(var / phases);
  return est;
}

// Multiscale estimate: n_{s+1} = round(growth n_s); at each level L_{n_s} and
// L_{2n_s} come from block averages over the phase grid, and the reported
// value is the pair extrapolation 2 L_{2n_S} - L_{n_S} at the last level.
// The residual chain L_{n_{s+1}} + L_{n_s} - 2 L_{2n_s} tracks how well the
// avalanche telescoping holds between levels. If the avalanche hypotheses
// fail for more than 10% of phases at some level (block norm below mu = m, or
// pair defect at least half of log mu), the result is flagged ap-degenerate
// and falls back to the longest Birkhoff average.
inline LyapunovEstimate lyapunov_avalanche(const CocycleParams& p, std::int64_t n1, double growth,
                                           int levels, int phases, std::uint64_t seed = 0,
                                           int threads = 1) {
  if (n1 < 10) throw std::domain_error("lyapunov_avalanche: n1 must be >= 10");
  if (growth < 2 || growth > 100) throw std::domain_error("lyapunov_avalanche: growth in [2,100]");
  if (levels < 1 || phases < 1) throw std::domain_error("lyapunov_avalanche: levels, phases >= 1");

  std::mt19937_64 rng(seed);
  double x0 = u01(rng);
  std::vector<std::int64_t> ns(levels);
  ns[0] = n1;
  for (int s = 1; s < levels; ++s) ns[s] = static_cast<std::int64_t>(std::llround(growth * ns[s - 1]));

  std::vector<double> L_n(levels), L_2n(levels);
  int bad_phases_worst = 0;
  for (int s = 0; s < levels; ++s) {
    std::int64_t n = ns[s];
    std::vector<double> ln(phases), l2n(phases);
    std::vector<int> bad(phases, 0);
    parallel_for(phases, threads, [&](std::size_t j) {
      double x = wrap01(x0 + static_cast<double>(j) / phases);
      OrbitProduct b0 = orbit_product(p, x, n);
      OrbitProduct b1 = orbit_product(p, wrap01(x + static_cast<double>(n) * static_cast<double>(p.freq.alpha)), n);
      OrbitProduct b01 = compose(b0, b1);
      ln[j] = 0.5 * (b0.log_norm + b1.log_norm) / n;
      l2n[j] = b01.log_norm / (2.0 * n);
      double mu = std::min(b0.log_norm, b1.log_norm);
      double defect = std::abs(b0.log_norm + b1.log_norm - b01.log_norm);
      if (mu <= std::log(2.0) || defect >= 0.5 * mu) bad[j] = 1;
    });
    double sn = 0, s2n = 0;
    int badc = 0;
    for (int j = 0; j < phases; ++j) {
      sn += ln[j];
      s2n += l2n[j];
      badc += bad[j];
    }
    L_n[s] = sn / phases;
    L_2n[s] = s2n / phases;
    bad_phases_worst = std::max(bad_phases_worst, badc);
  }

  LyapunovEstimate est;
  est.E = p.E;
  est.n = 2 * ns[levels - 1];
  est.phases = phases;
  est.method = LeMethod::avalanche;
  for (int s = 0; s + 1 < levels; ++s)
    est.residual_chain.push_back(L_n[s + 1] + L_n[s] - 2 * L_2n[s]);
  est.ap_degenerate = bad_phases_worst > phases / 10;
  est.value = est.ap_degenerate ? L_2n[levels - 1] : 2 * L_2n[levels - 1] - L_n[levels - 1];
  double spread = 0;
  for (double r : est.residual_chain) spread = std::max(spread, std::abs(r));
  est.stderr_ = spread;
  return est;
}

struct IDSEstimate {
  double E = 0;
  std::int64_t n = 0;
  int phases = 0;
  double value = 0;  // in [0, 1]
};

// Eigenvalue counting below E for the n x n Dirichlet truncation with
// diagonal lambda v(x + k alpha) and off-diagonal 1, via the Sturm pivot
// recurrence d_k = (lambda v - E) - 1/d_{k-1}. A vanishing pivot is replaced
// by -eps (LAPACK convention), which cannot change the count by more than the
// one eigenvalue sitting exactly at E.
inline IDSEstimate ids_dirichlet(const CocycleParams& p, double E, std::int64_t n, int phases,
                                 std::uint64_t seed = 0, int threads = 1) {
  if (n < 1 || phases < 1) throw std::domain_error("ids_dirichlet: n and phases must be >= 1");
  std::mt19937_64 rng(seed);
  double x0 = u01(rng);
  std::vector<std::int64_t> counts(phases);
  parallel_for(phases, threads, [&](std::size_t j) {
    long double y = wrap01(static_cast<long double>(x0) + static_cast<long double>(j) / phases);
    std::int64_t cnt = 0;
    double d = 1.0;
    for (std::int64_t k = 1; k <= n; ++k) {
      y += p.freq.alpha;
      if (y >= 1) y -= 1;
      double diag = p.lambda * p.potential.v(static_cast<double>(y)) - E;
      d = (k == 1) ? diag : diag - 1.0 / d;
      if (d == 0) d = -std::numeric_limits<double>::min();
      if (d < 0) ++cnt;
    }
    counts[j] = cnt;
  });
  double sum = 0;
  for (auto c : counts) sum += static_cast<double>(c);
  IDSEstimate est;
  est.E = E;
  est.n = n;
  est.phases = phases;
  est.value = sum / (static_cast<double>(phases) * static_cast<double>(n));
  return est;
}

// Stieltjes integral of log|E - E'| against the piecewise-constant dN given
// by an IDS grid: midpoint rule per cell, and the exact antiderivative
// x log x - x on the cell containing E (uniform density there).
inline double thouless_check(double E, const std::vector<IDSEstimate>& ids_grid) {
  if (ids_grid.size() < 2) throw std::domain_error("thouless_check: need >= 2 grid points");
  for (std::size_t i = 0; i + 1 < ids_grid.size(); ++i) {
    if (ids_grid[i + 1].E <= ids_grid[i].E)
      throw std::domain_error("thouless_check: E grid must be increasing");
    if (ids_grid[i + 1].value < ids_grid[i].value - 1e-12)
      throw std::domain_error("thouless_check: ids values must be monotone");
  }
  double acc = 0;
  for (std::size_t i = 0; i + 1 < ids_grid.size(); ++i) {
    double a = ids_grid[i].E, b = ids_grid[i + 1].E;
    double dN = ids_grid[i + 1].value - ids_grid[i].value;
    if (dN <= 0) continue;
    if (E >= a && E <= b) {
      auto xlogx = [](double x) { return x > 0 ? x * std::log(x) - x : 0.0; };
      acc += dN / (b - a) * (xlogx(E - a) + xlogx(b - E));
    } else {
      acc += dN * std::log(std::abs(E - 0.5 * (a + b)));
    }
  }
  return acc;
}

// Point mass convenience for tests: a grid with a single jump at E0.
inline std::vector<IDSEstimate> point_mass_grid(double E0, double halfwidth) {
  return {{E0 - halfwidth, 0, 0, 0.0}, {E0 + halfwidth, 0, 0, 1.0}};
}

}  // namespace qpsc
