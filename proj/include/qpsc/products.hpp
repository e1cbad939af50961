#pragma once

// Pair and chain estimates for products of hyperbolic SL(2,R) matrices: the
// resonant/nonresonant angle geometry, the elementary nonresonant lower
// bound, the resonant stable-direction formula, and the Avalanche Principle
// defect as a checkable predicate.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qpsc/circle.hpp"
#include "qpsc/sl2.hpp"

namespace qpsc {

enum class PairRegime { nonresonant, resonant_e2_dominant, resonant_e1_dominant, unclassified };

inline const char* to_string(PairRegime r) {
  switch (r) {
    case PairRegime::nonresonant: return "nonresonant";
    case PairRegime::resonant_e2_dominant: return "resonant_e2_dominant";
    case PairRegime::resonant_e1_dominant: return "resonant_e1_dominant";
    default: return "unclassified";
  }
}

struct PairGeometry {
  double e1 = 0, e2 = 0;  // norms of E1, E2
  double theta = 0;       // s(E2) - u(E1) in (-pi/2, pi/2]
  PairRegime regime = PairRegime::unclassified;
  static constexpr double kappa = 1e-3;
  static constexpr double eta = 1e-2;
};

// theta = s(E2) - u(E1); regime classified by the resonance hypotheses, with
// nonresonance checked first and "unclassified" when neither applies (the
// hypotheses are restrictive and many pairs genuinely fall in the gap).
inline PairGeometry pair_geometry(const Sl2& E2, const Sl2& E1) {
  PolarData p2 = polar(E2);
  PolarData p1 = polar(E1);
  PairGeometry g;
  g.e1 = std::exp(p1.log_norm);
  g.e2 = std::exp(p2.log_norm);
  g.theta = rp1_diff(p2.s_dir(), p1.u_dir());
  double a = std::abs(g.theta);
  if (a >= std::max(std::pow(g.e1, -PairGeometry::eta), std::pow(g.e2, -PairGeometry::eta))) {
    g.regime = PairRegime::nonresonant;
  } else if (g.e1 <= std::pow(g.e2, PairGeometry::kappa)) {
    g.regime = PairRegime::resonant_e2_dominant;
  } else if (g.e2 <= std::pow(g.e1, PairGeometry::kappa)) {
    g.regime = PairRegime::resonant_e1_dominant;
  }
  return g;
}

// Rigorous elementary lower bound in the nonresonant regime. Feeding E1's
// most expanded input direction through the pair gives
// ||E2 E1|| >= e1 e2 |sin theta| exactly; half of it is returned so the
// constant survives roundoff and chaining.
inline double nonresonant_lower_bound(const PairGeometry& g) {
  if (g.regime != PairRegime::nonresonant)
    throw std::domain_error("nonresonant_lower_bound: pair is not in the nonresonant regime");
  return 0.5 * g.e1 * g.e2 * std::abs(std::sin(g.theta));
}

// Stable direction of a dominant product per the resonant-case formula:
// s(E2 E1) = s(E1) + arctan(||E1||^2 tan(s(E2) - u(E1))) - pi/2.
inline double resonant_direction_prediction(const Sl2& E2, const Sl2& E1) {
  PolarData p2 = polar(E2);
  PolarData p1 = polar(E1);
  double e1 = std::exp(p1.log_norm);
  if (e1 < 10 || p2.log_norm < 10 * p1.log_norm)
    throw std::domain_error("resonant_direction_prediction: need ||E2|| >= ||E1||^10, ||E1|| >= 10");
  double theta = rp1_diff(p2.s_dir(), p1.u_dir());
  double tn;
  if (std::abs(std::abs(theta) - pi / 2) < 1e-12) {
    tn = theta > 0 ? 1e12 : -1e12;  // clamped at the pole
  } else {
    tn = std::tan(theta);
  }
  return rp1_wrap(p1.s_dir() + std::atan(e1 * e1 * tn) - pi / 2);
}

struct APReport {
  int m = 0;
  double mu = 0;
  bool cond8_ok = false;  // min ||B_j|| >= mu > m
  bool cond9_ok = false;  // pair defects < (1/2) log mu
  double defect = 0;      // left side of the telescoping identity
  double bound = 0;       // m / mu
  double defect_over_bound = 0;
};

// Avalanche Principle accounting: conditions (min norm >= mu > m and pair
// defect < log(mu)/2) evaluated exactly as stated, and the telescoping defect
//   | log||B_m...B_1|| + sum_{j=2}^{m-1} log||B_j|| - sum log||B_{j+1}B_j|| |
// computed with scaled products so long chains cannot overflow.
inline APReport avalanche_check(const std::vector<Sl2>& B, double mu) {
  const int m = static_cast<int>(B.size());
  if (m < 3) throw std::domain_error("avalanche_check: need at least 3 factors");
  APReport rep;
  rep.m = m;
  rep.mu = mu;
  rep.bound = static_cast<double>(m) / mu;

  double min_norm = 1e300;
  std::vector<double> log_norms(m);
  for (int j = 0; j < m; ++j) {
    log_norms[j] = std::log(B[j].op_norm());
    min_norm = std::min(min_norm, B[j].op_norm());
  }
  rep.cond8_ok = (min_norm >= mu) && (mu > m);

  double worst_pair = 0;
  std::vector<double> log_pair(m - 1);
  for (int j = 0; j + 1 < m; ++j) {
    ScaledProduct sp;
    sp.mul_left(B[j]);
    sp.mul_left(B[j + 1]);
    log_pair[j] = sp.log_norm();
    worst_pair = std::max(worst_pair, std::abs(log_norms[j] + log_norms[j + 1] - log_pair[j]));
  }
  rep.cond9_ok = worst_pair < 0.5 * std::log(mu);

  ScaledProduct chain;
  for (int j = 0; j < m; ++j) chain.mul_left(B[j]);
  double middle = 0;
  for (int j = 1; j + 1 < m; ++j) middle += log_norms[j];
  double pairs = 0;
  for (int j = 0; j + 1 < m; ++j) pairs += log_pair[j];
  rep.defect = std::abs(chain.log_norm() + middle - pairs);
  rep.defect_over_bound = rep.defect / rep.bound;
  return rep;
}

}  // namespace qpsc
