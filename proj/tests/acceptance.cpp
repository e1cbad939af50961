// Acceptance suite: one criterion per function, each printing a PASS/FAIL
// line with its measured quantities and wall time. Run all (no arguments) or
// a single criterion by number. Exit code 1 if any executed criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "qpsc/cocycle.hpp"
#include "qpsc/frequency.hpp"
#include "qpsc/induction.hpp"
#include "qpsc/ldt.hpp"
#include "qpsc/products.hpp"
#include "qpsc/regularity.hpp"
#include "qpsc/rng.hpp"
#include "qpsc/spectral.hpp"

using namespace qpsc;

namespace {

constexpr std::uint64_t kSeed = 1;
constexpr int kThreads = 0;  // hardware

CocycleParams amo(double lambda, double E) {
  CocycleParams p;
  p.potential = Potential::amo();
  p.lambda = lambda;
  p.E = E;
  p.freq = golden_mean();
  return p;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// 1. Constant-cocycle Lyapunov exponent against the closed form.
Outcome criterion1() {
  double want = std::log((3 + std::sqrt(5.0)) / 2);
  LyapunovEstimate est = lyapunov_birkhoff(amo(0, 3), 10000, 1, kSeed);
  double err = std::abs(est.value - want);
  std::ostringstream d;
  d << "|L - log((3+sqrt5)/2)| = " << err << " (tol 1e-3)";
  return {err <= 1e-3, d.str()};
}

// 2. Almost Mathieu plateau: L(0) within 2e-2 of log lambda and above
// 0.9 log lambda for lambda 5, 10, 20.
Outcome criterion2() {
  std::ostringstream d;
  bool ok = true;
  for (double lam : {5.0, 10.0, 20.0}) {
    LyapunovEstimate est = lyapunov_birkhoff(amo(lam, 0), 100000, 128, kSeed, kThreads);
    double err = std::abs(est.value - std::log(lam));
    bool this_ok = est.value >= 0.9 * std::log(lam) && err <= 2e-2;
    ok = ok && this_ok;
    d << "lambda=" << lam << ": |L - log lambda| = " << err << "; ";
  }
  d << "(tol 2e-2, floor 0.9 log lambda)";
  return {ok, d.str()};
}

// 3. Avalanche Principle over 1e3 seeded chains satisfying (8)-(9).
Outcome criterion3() {
  std::mt19937_64 rng(kSeed);
  int satisfied = 0, within = 0;
  double worst_ratio = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    int m = static_cast<int>(uniform_int(rng, 3, 32));
    double mu = std::exp(uniform(rng, std::log(1e3), std::log(1e6)));
    std::vector<Sl2> B;
    for (int j = 0; j < m; ++j)
      B.push_back(Sl2::rotation(uniform(rng, -0.3, 0.3)) *
                  Sl2::diag(mu * std::exp(uniform(rng, 0.0, 1.0))) *
                  Sl2::rotation(uniform(rng, -0.3, 0.3)));
    APReport rep = avalanche_check(B, mu);
    if (!(rep.cond8_ok && rep.cond9_ok)) continue;
    ++satisfied;
    worst_ratio = std::max(worst_ratio, rep.defect_over_bound);
    if (rep.defect <= 20.0 * rep.bound) ++within;
  }
  std::ostringstream d;
  d << within << "/" << satisfied << " chains within 20 m/mu, worst defect/(m/mu) = "
    << worst_ratio;
  return {satisfied == 1000 && within == satisfied, d.str()};
}

// 4. Resonant stable-direction formula on 1e4 dominant pairs.
Outcome criterion4() {
  std::mt19937_64 rng(kSeed);
  int ok_count = 0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    double ln1 = uniform(rng, std::log(10.0), std::log(100.0));
    Sl2 E1 = Sl2::rotation(uniform(rng, 0, pi)) * Sl2::diag(std::exp(ln1)) *
             Sl2::rotation(uniform(rng, 0, pi));
    double ln2 = uniform(rng, 10 * ln1, 10 * ln1 + 2.0);
    Sl2 E2 = Sl2::rotation(uniform(rng, 0, pi)) * Sl2::diag(std::exp(ln2)) *
             Sl2::rotation(uniform(rng, 0, pi));
    double pred = resonant_direction_prediction(E2, E1);
    double actual = polar(E2 * E1).s_dir();
    if (rp1_dist(pred, actual) <= std::pow(std::exp(ln1), -1.5)) ++ok_count;
  }
  std::ostringstream d;
  d << ok_count << "/" << trials << " within ||E1||^{-3/2} (needs >= 9900)";
  return {ok_count >= 9900, d.str()};
}

// 5. Large-deviation decay at scales 50..800: fractions non-increasing and a positive
// fitted decay rate with residual below 1.
Outcome criterion5() {
  DeviationReport rep =
      decay_fit(amo(10, 0), {50, 100, 200, 400, 800}, 0.9, 100000, kSeed, kThreads);
  bool monotone = true;
  for (std::size_t k = 0; k + 1 < rep.fractions.size(); ++k)
    if (rep.fractions[k + 1] > rep.fractions[k] + 3.0 / std::sqrt(100000.0)) monotone = false;
  std::ostringstream d;
  d << "fractions =";
  for (double f : rep.fractions) d << " " << f;
  if (rep.delta_hat)
    d << "; delta_hat = " << *rep.delta_hat << ", residual = " << rep.residual;
  else
    d << "; delta_hat below resolution (every fraction 0 at 1e5 phases)";
  bool ok = monotone && rep.delta_hat.has_value() && *rep.delta_hat > 0 && rep.residual < 1;
  return {ok, d.str()};
}

// 6. Coupling robustness of the fitted decay rate at the same scales.
Outcome criterion6() {
  std::vector<double> deltas;
  std::ostringstream d;
  for (double lam : {5.0, 10.0, 20.0}) {
    DeviationReport rep =
        decay_fit(amo(lam, 0), {50, 100, 200, 400, 800}, 0.9, 100000, kSeed, kThreads);
    if (rep.delta_hat) {
      deltas.push_back(*rep.delta_hat);
      d << "lambda=" << lam << ": delta_hat=" << *rep.delta_hat << "; ";
    } else {
      d << "lambda=" << lam << ": below resolution; ";
    }
  }
  if (deltas.size() < 3) {
    d << "cannot compare three rates";
    return {false, d.str()};
  }
  double lo = *std::min_element(deltas.begin(), deltas.end());
  double hi = *std::max_element(deltas.begin(), deltas.end());
  d << "spread factor = " << hi / lo << " (needs <= 4)";
  return {hi / lo <= 4.0 && lo > 0, d.str()};
}

// 7. First-level induction growth and critical-point drift.
Outcome criterion7() {
  InductionConfig cfg;
  cfg.params = amo(20, 0);  // t = 0
  cfg.grid_size = 127;      // 128 points per interval, 256 samples on I_N
  cfg.max_q = 13;
  cfg.threads = resolve_threads(kThreads);
  InductionRun run = run_induction(cfg);
  if (run.levels.empty()) return {false, "no induction level was computed: " + run.message};
  const LevelReport& lr = run.levels[0];
  bool growth_ok = lr.growth.failures_soft == 0 && lr.growth.samples == 512;
  bool drift_ok = true;
  for (double dr : lr.drift)
    if (dr > lr.drift_bound) drift_ok = false;
  std::ostringstream d;
  d << "growth min ratio = " << lr.growth.min_ratio << " over " << lr.growth.samples
    << " products (needs all >= 0.9); drift";
  for (double dr : lr.drift) d << " " << dr;
  d << " vs bound " << lr.drift_bound;
  return {growth_ok && drift_ok, d.str()};
}

// 8. Bifurcation diagnostic on planted type-III compositions.
Outcome criterion8() {
  AffineAngle g1{0.3, 0.0}, g2{-0.3, 0.0};
  std::ostringstream d;
  bool ok = true;
  std::vector<double> d0l;
  for (double l : {1e2, 1e3, 1e4}) {
    std::vector<double> sweep;
    for (int i = 0; i <= 20; ++i) sweep.push_back((20.0 - i) / l);
    auto reps = bifurcation_diagnose(g1, g2, l, sweep);
    int prev = 2;
    for (const auto& r : reps) {
      if (r.zero_count > prev) ok = false;
      prev = r.zero_count;
    }
    if (reps.front().zero_count != 2 || reps.back().zero_count != 0) ok = false;
    for (const auto& r : reps)
      if (r.zero_count == 2 && r.nearest_zero_to_e1 > 10.0 * std::pow(l, -0.75)) ok = false;
    double d0 = locate_bifurcation_d0(g1, g2, l);
    d0l.push_back(d0 * l);
    d << "l=" << l << ": d0*l=" << d0 * l << "; ";
  }
  double spread = *std::max_element(d0l.begin(), d0l.end()) /
                  *std::min_element(d0l.begin(), d0l.end());
  d << "d0*l spread = " << spread << " (needs <= 2)";
  return {ok && spread <= 2.0, d.str()};
}

// 9. Free-operator counting function and the Thouless integral.
Outcome criterion9() {
  CocycleParams p = amo(0, 0);
  IDSEstimate half = ids_dirichlet(p, 0.0, 1000, 1, kSeed);
  std::vector<IDSEstimate> grid;
  for (int i = 0; i <= 400; ++i)
    grid.push_back(ids_dirichlet(p, -2.5 + 5.0 * i / 400, 1000, 1, kSeed));
  double t0 = thouless_check(0.0, grid);
  double t3 = thouless_check(3.0, grid);
  double l0 = lyapunov_birkhoff(amo(0, 0), 10000, 4, kSeed).value;
  double l3 = lyapunov_birkhoff(amo(0, 3), 10000, 1, kSeed).value;
  std::ostringstream d;
  d << "N(0) = " << half.value << " (0.5 +- 2e-3); |L - thouless| at E=0: "
    << std::abs(l0 - t0) << ", at E=3: " << std::abs(l3 - t3) << " (tol 5e-2)";
  bool ok = std::abs(half.value - 0.5) <= 2e-3 && std::abs(l0 - t0) <= 5e-2 &&
            std::abs(l3 - t3) <= 5e-2;
  return {ok, d.str()};
}

// 10. Hölder exponents of L and N over the almost Mathieu window, with the
// |E|^{1/2} calibration of the fitting machinery.
Outcome criterion10() {
  std::vector<double> E(1025), v(1025);
  for (int i = 0; i <= 1024; ++i) {
    E[i] = -1 + 2.0 * i / 1024;
    v[i] = std::sqrt(std::abs(E[i]));
  }
  HolderFit cal = holder_fit(E, v, {1.0 / 128, 1.0 / 64, 1.0 / 32, 1.0 / 16, 1.0 / 8});
  bool cal_ok = std::abs(cal.sigma_hat - 0.5) <= 0.05;

  JointHolderReport rep = joint_report(
      amo(10, 0), -0.5, 0.5, 400, 100000, 16, 10000, 32,
      {1.0 / 64, 1.0 / 32, 1.0 / 16, 1.0 / 8, 1.0 / 4}, kSeed, resolve_threads(kThreads));
  std::ostringstream d;
  d << "calibration sigma(|E|^1/2) = " << cal.sigma_hat << " (0.5 +- 0.05); sigma(L) = "
    << rep.L_fit.sigma_hat << ", sigma(N) = " << rep.N_fit.sigma_hat << " (both >= 0.2)";
  bool ok = cal_ok && !rep.L_fit.degenerate && !rep.N_fit.degenerate &&
            rep.L_fit.sigma_hat >= 0.2 && rep.N_fit.sigma_hat >= 0.2;
  return {ok, d.str()};
}

// 11. Arithmetic identities: exact convergent identity, the q_n return-time floor
// and the cube-growth return-time ceiling, for three frequencies.
Outcome criterion11() {
  std::ostringstream d;
  bool ok = true;
  std::mt19937_64 rng(kSeed);
  std::vector<std::pair<const char*, Frequency>> freqs;
  freqs.emplace_back("golden", golden_mean(10000));
  freqs.emplace_back("sqrt2-1", sqrt2_minus_1(10000));
  freqs.emplace_back("synth(beta=1)", synth(1.0, 6, kSeed));
  for (auto& [name, f] : freqs) {
    for (std::size_t k = 1; k < f.levels(); ++k) {
      int128 lhs = f.convergents[k].p * f.convergents[k - 1].q -
                   f.convergents[k - 1].p * f.convergents[k].q;
      if (lhs != ((k % 2 == 1) ? 1 : -1)) ok = false;
    }
    int floor_checks = 0, ceil_checks = 0;
    for (std::size_t n = 2; n < f.levels(); ++n) {
      long double q = to_ld(f.convergents[n].q);
      if (q < 3 || q > 10000) continue;
      long double rad = 1.0L / (q * q);
      auto kmax_floor = static_cast<std::int64_t>(q) - 1;
      for (int t = 0; t < 1000; ++t) {
        long double c = u01(rng);
        long double x = c + (2 * u01(rng) - 1) * rad;
        if (kmax_floor >= 1 && min_return_time(f, x, c, rad, kmax_floor).has_value()) ok = false;
        ++floor_checks;
      }
      // ceiling: the first stored convergent >= q^3 guarantees a hit
      std::int64_t horizon = 0;
      for (const auto& cvg : f.convergents)
        if (to_ld(cvg.q) >= q * q * q) {
          horizon = static_cast<std::int64_t>(to_ld(cvg.q));
          break;
        }
      if (horizon == 0) continue;
      for (int t = 0; t < 100; ++t) {
        if (!min_return_time(f, u01(rng), u01(rng), rad, horizon).has_value()) ok = false;
        ++ceil_checks;
      }
    }
    d << name << ": identity exact, " << floor_checks << " floor checks, " << ceil_checks
      << " ceiling checks; ";
  }
  return {ok, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::pair<double, std::function<Outcome()>>> criteria = {
      {1.0, criterion1},  {60.0 * 3, criterion2}, {10.0, criterion3}, {10.0, criterion4},
      {600.0, criterion5}, {1800.0, criterion6},  {300.0, criterion7}, {60.0, criterion8},
      {60.0, criterion9}, {1800.0, criterion10},  {10.0, criterion11}};

  std::vector<int> to_run;
  if (argc > 1) {
    int c = std::atoi(argv[1]);
    if (c < 1 || c > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "usage: acceptance [1..%zu]\n", criteria.size());
      return 2;
    }
    to_run.push_back(c);
  } else {
    for (int c = 1; c <= static_cast<int>(criteria.size()); ++c) to_run.push_back(c);
  }

  bool all_pass = true;
  for (int c : to_run) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome out = criteria[c - 1].second();
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_budget = wall < criteria[c - 1].first;
    bool pass = out.pass && in_budget;
    all_pass = all_pass && pass;
    std::printf("criterion %2d: %s (%.1f s%s) - %s\n", c, pass ? "PASS" : "FAIL", wall,
                in_budget ? "" : ", OVER BUDGET", out.detail.c_str());
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}
