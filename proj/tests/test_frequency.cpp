#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qpsc/frequency.hpp"
#include "qpsc/rng.hpp"

using namespace qpsc;

namespace {
std::vector<long long> q_seq(const Frequency& f) {
  std::vector<long long> q;
  for (const auto& c : f.convergents) q.push_back(static_cast<long long>(to_ld(c.q)));
  return q;
}
}  // namespace

TEST_CASE("golden mean expands to Fibonacci denominators") {
  Frequency f = expand((std::sqrt(5.0L) - 1) / 2, 13);
  REQUIRE(q_seq(f) == std::vector<long long>{1, 1, 2, 3, 5, 8, 13});
  for (auto a : f.partial_quotients) REQUIRE(static_cast<long long>(a) == 1);
  REQUIRE_FALSE(f.rational_truncation);
}

TEST_CASE("rational input truncates with the exact convergent") {
  Frequency f = expand(1.0L / 3.0L, 1000);
  REQUIRE(f.rational_truncation);
  REQUIRE(static_cast<long long>(f.back().p) == 1);
  REQUIRE(static_cast<long long>(f.back().q) == 3);
}

TEST_CASE("sqrt2 - 1 has all partial quotients 2") {
  Frequency f = expand(std::sqrt(2.0L) - 1, 100);
  REQUIRE(q_seq(f) == std::vector<long long>{1, 2, 5, 12, 29, 70});
  for (auto a : f.partial_quotients) REQUIRE(static_cast<long long>(a) == 2);
}

TEST_CASE("convergent identity holds exactly in integer arithmetic") {
  for (Frequency f : {golden_mean(100000), sqrt2_minus_1(100000),
                      expand(0.1415926535897932384626433L, 100000), synth(1.0, 6, 42)}) {
    for (std::size_t k = 1; k < f.levels(); ++k) {
      int128 lhs = f.convergents[k].p * f.convergents[k - 1].q -
                   f.convergents[k - 1].p * f.convergents[k].q;
      int128 want = (k % 2 == 1) ? 1 : -1;
      REQUIRE(static_cast<long long>(lhs) == static_cast<long long>(want));
    }
  }
}

TEST_CASE("approximation sandwich holds for every stored convergent") {
  for (Frequency f : {golden_mean(100000), sqrt2_minus_1(100000)}) {
    // the sandwich needs q_{k+1}, so check all but the last stored level
    for (std::size_t k = 1; k + 1 < f.levels(); ++k) {
      long double p = to_ld(f.convergents[k].p), q = to_ld(f.convergents[k].q);
      long double q1 = to_ld(f.convergents[k + 1].q);
      long double err = fabsl(f.alpha - p / q);
      REQUIRE(err <= 1.0L / (q * q1) * (1 + 1e-15L));
      REQUIRE(err >= 1.0L / (q * (q1 + q)) * (1 - 1e-15L));
    }
  }
}

TEST_CASE("best approximation property over k < q_n") {
  Frequency f = golden_mean(10000);
  for (std::size_t n = 2; n < f.levels(); ++n) {
    long long qn = static_cast<long long>(to_ld(f.convergents[n].q));
    if (qn > 10000) break;
    long long qn1 = static_cast<long long>(to_ld(f.convergents[n - 1].q));
    long double ref = torus_dist(wrap01(static_cast<long double>(qn1) * f.alpha), 0.0L);
    REQUIRE(ref >= 1.0L / (qn1 + qn) * (1 - 1e-15L));
    long double best = 1;
    for (long long k = 1; k < qn; ++k)
      best = std::min(best, torus_dist(wrap01(static_cast<long double>(k) * f.alpha), 0.0L));
    REQUIRE(best >= ref * (1 - 1e-15L));
  }
}

TEST_CASE("beta estimate vanishes for the golden mean tail") {
  Frequency f = golden_mean(1000000);
  FrequencyClass fc = beta_estimate(f, 15);
  REQUIRE(fc.beta_hat < 0.01);
  REQUIRE(fc.beta_hat >= 0);
  FrequencyClass early = beta_estimate(f, 5);
  REQUIRE(fc.beta_hat <= early.beta_hat);
  REQUIRE(early.diophantine_witness.has_value());
}

TEST_CASE("beta estimate requires a tail") {
  Frequency f = expand(1.0L / 3.0L, 10);
  REQUIRE_THROWS_AS(beta_estimate(f, 3), std::domain_error);
}

TEST_CASE("synthesized frequency reproduces its beta target") {
  SECTION("beta = 1, depth 6") {
    Frequency f = synth(1.0, 6, 7);
    Frequency re = expand(f.alpha, f.back().q);
    FrequencyClass fc = beta_estimate(re, 2);
    REQUIRE(fc.beta_hat >= 0.9);
    REQUIRE(fc.beta_hat <= 1.1);
  }
  SECTION("beta = 2 recovers within 5%") {
    Frequency f = synth(2.0, 6, 11);
    FrequencyClass fc = beta_estimate(f, 2);
    REQUIRE(fc.beta_hat >= 1.9);
    REQUIRE(fc.beta_hat <= 2.1);
  }
  SECTION("beta = 0 keeps quotients bounded and the tail estimate decays") {
    Frequency f = synth(0.0, 16, 3);
    for (auto a : f.partial_quotients) REQUIRE(static_cast<long long>(a) <= 4);
    REQUIRE(beta_estimate(f, 8).beta_hat < 0.2);
    REQUIRE(beta_estimate(f, 12).beta_hat < beta_estimate(f, 4).beta_hat);
  }
  SECTION("beta = 3 grows like exp(3 q_k) until the integer width runs out") {
    Frequency f = synth(3.0, 5, 5);
    REQUIRE(f.levels() >= 4);
    REQUIRE(f.overflow_truncation);  // depth 5 is unreachable in 128 bits
    bool saw_target_rate = false;
    for (std::size_t k = 1; k + 1 < f.levels(); ++k) {
      double rate = static_cast<double>(logl(to_ld(f.convergents[k + 1].q)) / to_ld(f.convergents[k].q));
      if (rate > 2.7 && rate < 3.3) saw_target_rate = true;
    }
    REQUIRE(saw_target_rate);
  }
}

TEST_CASE("torus distance basics") {
  REQUIRE(torus_dist(0.1, 0.9) == Catch::Approx(0.2));
  REQUIRE(torus_dist(0.37, 0.37) == 0.0);
  REQUIRE(torus_dist(0.25, 0.75) == Catch::Approx(0.5));
}

TEST_CASE("return time of a critical interval is at least q_n") {
  Frequency f = golden_mean(10000);
  std::mt19937_64 rng(99);
  for (std::size_t n = 3; n < f.levels(); ++n) {
    long long qn = static_cast<long long>(to_ld(f.convergents[n].q));
    if (qn > 10000) break;
    long double rad = 1.0L / (static_cast<long double>(qn) * qn);
    int trials = qn <= 1000 ? 100 : 20;
    for (int t = 0; t < trials; ++t) {
      long double c = u01(rng);
      long double x = c + (2 * u01(rng) - 1) * rad;
      auto hit = min_return_time(f, x, c, rad, qn - 1);
      REQUIRE_FALSE(hit.has_value());
    }
  }
}

TEST_CASE("return happens before the cube-growth convergent") {
  Frequency f = golden_mean(10000);
  std::mt19937_64 rng(7);
  // radius q_l^{-2} with horizon the first convergent >= q_l^3
  for (long long ql : {2LL, 3LL, 5LL, 13LL}) {
    long long horizon = 0;
    for (const auto& c : f.convergents)
      if (to_ld(c.q) >= static_cast<long double>(ql) * ql * ql) {
        horizon = static_cast<long long>(to_ld(c.q));
        break;
      }
    REQUIRE(horizon > 0);
    for (int t = 0; t < 50; ++t) {
      long double x = u01(rng), c = u01(rng);
      auto hit = min_return_time(f, x, c, 1.0L / (static_cast<long double>(ql) * ql), horizon);
      REQUIRE(hit.has_value());
    }
  }
}

TEST_CASE("radius one half returns immediately") {
  Frequency f = golden_mean(100);
  REQUIRE(min_return_time(f, 0.123L, 0.77L, 0.5L, 10).value() == 1);
}
