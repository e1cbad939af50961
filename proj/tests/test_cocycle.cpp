#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qpsc/cocycle.hpp"
#include "qpsc/rng.hpp"

using namespace qpsc;

namespace {
CocycleParams amo_params(double lambda, double E) {
  CocycleParams p;
  p.potential = Potential::amo();
  p.lambda = lambda;
  p.E = E;
  p.freq = golden_mean();
  return p;
}
}  // namespace

TEST_CASE("step matrix entries") {
  CocycleParams p = amo_params(0, 3);
  Sl2 A = step_matrix(p, 0.77);
  REQUIRE(A.a == 3.0);
  REQUIRE(A.b == -1.0);
  REQUIRE(A.c == 1.0);
  REQUIRE(A.d == 0.0);

  p = amo_params(1, 0);
  A = step_matrix(p, 0.0);  // v(0) = 2
  REQUIRE(A.a == Catch::Approx(-2.0));

  p = amo_params(2, 1);
  A = step_matrix(p, 0.25);  // v(1/4) = 0
  REQUIRE(A.a == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("orbit product of length zero is the identity") {
  CocycleParams p = amo_params(2, 1);
  OrbitProduct op = orbit_product(p, 0.3, 0);
  REQUIRE(op.log_norm == 0.0);
  REQUIRE(op.normalized_matrix.a == 1.0);
  REQUIRE(op.normalized_matrix.d == 1.0);
  REQUIRE(op.n == 0);
}

TEST_CASE("constant hyperbolic cocycle growth rate") {
  CocycleParams p = amo_params(0, 3);
  OrbitProduct op = orbit_product(p, 0.123, 10000);
  double want = std::log((3 + std::sqrt(5.0)) / 2);
  REQUIRE(op.log_norm / 10000.0 == Catch::Approx(want).margin(1e-3));
}

TEST_CASE("forward then backward returns to the identity") {
  // composing e^l M with its inverse cancels l; meaningful in double while
  // e^{2l} eps stays small, so moderate lengths at mild coupling
  CocycleParams p = amo_params(1.2, 0.4);
  for (std::int64_t n : {7LL, 25LL, 60LL}) {
    OrbitProduct fwd = orbit_product(p, 0.21, n);
    double shifted = wrap01(0.21 + static_cast<double>(n) * static_cast<double>(p.freq.alpha));
    OrbitProduct bwd = orbit_product(p, shifted, -n);
    OrbitProduct both = compose(fwd, bwd);
    REQUIRE(both.n == 0);
    double floor = std::exp(2 * fwd.log_norm) * 1e-15 * static_cast<double>(n);
    REQUIRE(both.log_norm ==
            Catch::Approx(0.0).margin(1e-9 * static_cast<double>(n) + floor));
  }
}

TEST_CASE("backward product is the adjugate of the shifted forward product") {
  // the formula A_{-n}(T^n x) = (A_n(x))^{-1} stated entrywise on the
  // normalized representations, well conditioned at any length
  CocycleParams p = amo_params(2.5, 0.7);
  for (std::int64_t n : {9LL, 111LL, 1234LL}) {
    OrbitProduct fwd = orbit_product(p, 0.37, n);
    double shifted = wrap01(0.37 + static_cast<double>(n) * static_cast<double>(p.freq.alpha));
    OrbitProduct bwd = orbit_product(p, shifted, -n);
    REQUIRE(bwd.log_norm == Catch::Approx(fwd.log_norm).epsilon(1e-12).margin(1e-10));
    Sl2 adj = fwd.normalized_matrix.inverse();
    REQUIRE(bwd.normalized_matrix.a == Catch::Approx(adj.a).margin(1e-12));
    REQUIRE(bwd.normalized_matrix.b == Catch::Approx(adj.b).margin(1e-12));
    REQUIRE(bwd.normalized_matrix.c == Catch::Approx(adj.c).margin(1e-12));
    REQUIRE(bwd.normalized_matrix.d == Catch::Approx(adj.d).margin(1e-12));
    // u and s swap under inversion
    REQUIRE(rp1_dist(bwd.s, fwd.u) < 1e-9);
    REQUIRE(rp1_dist(bwd.u, fwd.s) < 1e-9);
  }
}

TEST_CASE("orbit product cap is enforced") {
  CocycleParams p = amo_params(1, 0);
  REQUIRE_THROWS_AS(orbit_product(p, 0.1, 50, 10), std::domain_error);
}

TEST_CASE("brute-force equivalence in extended precision") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    CocycleParams p = amo_params(uniform(rng, 0.2, 3.0), uniform(rng, -2, 2));
    double x = u01(rng);
    auto n = static_cast<std::int64_t>(uniform_int(rng, 1, 30));
    OrbitProduct op = orbit_product(p, x, n);
    oracle::Mat2L naive = oracle::naive_product(p, x, n);
    double want = static_cast<double>(logl(oracle::op_norm(naive)));
    REQUIRE(op.log_norm == Catch::Approx(want).epsilon(1e-10).margin(1e-12));
    // entrywise, after undoing the scaling
    double sc = std::exp(op.log_norm);
    REQUIRE(op.normalized_matrix.a * sc ==
            Catch::Approx(static_cast<double>(naive.a)).epsilon(1e-9).margin(1e-9));
    REQUIRE(op.normalized_matrix.d * sc ==
            Catch::Approx(static_cast<double>(naive.d)).epsilon(1e-9).margin(1e-9));
  }
}

TEST_CASE("cocycle identity for random splits") {
  std::mt19937_64 rng(77);
  CocycleParams p = amo_params(2.5, 0.3);
  for (int trial = 0; trial < 40; ++trial) {
    auto n = static_cast<std::int64_t>(uniform_int(rng, 1, 500));
    auto m = static_cast<std::int64_t>(uniform_int(rng, 1, 500));
    double x = u01(rng);
    OrbitProduct first = orbit_product(p, x, n);
    OrbitProduct rest =
        orbit_product(p, wrap01(x + static_cast<double>(n) * static_cast<double>(p.freq.alpha)), m);
    OrbitProduct whole = orbit_product(p, x, n + m);
    OrbitProduct glued = compose(first, rest);
    REQUIRE(glued.log_norm ==
            Catch::Approx(whole.log_norm).margin(1e-6 * static_cast<double>(n + m)));
  }
}

TEST_CASE("log norm is submultiplicative along sampled decompositions") {
  std::mt19937_64 rng(13);
  CocycleParams p = amo_params(4.0, 0.7);
  for (int trial = 0; trial < 40; ++trial) {
    auto n = static_cast<std::int64_t>(uniform_int(rng, 1, 300));
    auto m = static_cast<std::int64_t>(uniform_int(rng, 1, 300));
    double x = u01(rng);
    double whole = orbit_product(p, x, n + m).log_norm;
    double a = orbit_product(p, x, n).log_norm;
    double b = orbit_product(p, wrap01(x + static_cast<double>(n) * static_cast<double>(p.freq.alpha)), m)
                   .log_norm;
    REQUIRE(whole <= a + b + 1e-6 * static_cast<double>(n + m));
  }
}

TEST_CASE("determinant is preserved through renormalized products") {
  // det(e^l M) = e^{2l} det(M) = 1. The normalized det e^{-2l} is computable
  // until the entrywise cancellation floor ~ e^{-36}, so the check runs on an
  // elliptic orbit (l stays O(1) at any length) and on short hyperbolic ones.
  CocycleParams elliptic = amo_params(0, 1.2);
  for (std::int64_t n : {50LL, 400LL, 3000LL}) {
    OrbitProduct op = orbit_product(elliptic, 0.4321, n);
    double det_total = op.normalized_matrix.det() * std::exp(2 * op.log_norm);
    REQUIRE(det_total == Catch::Approx(1.0).margin(1e-6));
  }
  CocycleParams hyper = amo_params(3.0, 0.5);
  for (std::int64_t n : {4LL, 8LL, 12LL}) {
    OrbitProduct op = orbit_product(hyper, 0.4321, n);
    double det_total = op.normalized_matrix.det() * std::exp(2 * op.log_norm);
    REQUIRE(det_total == Catch::Approx(1.0).margin(1e-6));
  }
}

TEST_CASE("model cocycle normal form") {
  CocycleParams p = amo_params(10, 10);  // t = 1
  SECTION("t - v = 0 gives the quarter rotation") {
    // v(x) = 1 at cos(2 pi x) = 1/2, x = 1/6
    Sl2 A = model_cocycle(p, 1.0 / 6);
    Sl2 want = Sl2::diag(10) * Sl2::rotation(pi / 2);
    REQUIRE(A.a == Catch::Approx(want.a).margin(1e-9));
    REQUIRE(A.b == Catch::Approx(want.b).margin(1e-9));
    REQUIRE(A.c == Catch::Approx(want.c).margin(1e-9));
    REQUIRE(A.d == Catch::Approx(want.d).margin(1e-9));
  }
  SECTION("lambda = 1 is a pure rotation") {
    CocycleParams q = amo_params(1, 1);
    Sl2 A = model_cocycle(q, 0.3);
    REQUIRE(A.op_norm() == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("t - v = 1 gives phi = pi/4 and norm lambda") {
    // t = 1, v = 0 at x = 1/4
    Sl2 A = model_cocycle(p, 0.25);
    REQUIRE(A.op_norm() == Catch::Approx(10.0).margin(1e-9));
    Sl2 want = Sl2::diag(10) * Sl2::rotation(pi / 4);
    REQUIRE(A.a == Catch::Approx(want.a).margin(1e-9));
  }
}

TEST_CASE("initial angle identity on a fine phase grid") {
  CocycleParams p = amo_params(6.0, 6.0 * 0.4);  // t = 0.4
  const int grid = 1 << 12;
  for (int j = 0; j < grid; ++j) {
    double x = static_cast<double>(j) / grid;
    Sl2 A = model_cocycle(p, x);
    PolarData pd = polar(A);
    double g = rp1_diff(pd.s_dir(), pd.u_dir());
    double want = std::atan(p.t() - p.potential.v(x));
    REQUIRE(rp1_dist(g, want) < 1e-8);
  }
}

TEST_CASE("potential critical point check") {
  REQUIRE(Potential::amo().check_cos_type().ok);
  REQUIRE(Potential::cos_deformed(0.3).check_cos_type().ok);
  // eps2 = 1 creates extra critical points
  REQUIRE_FALSE(Potential::cos_deformed(1.0).check_cos_type().ok);

  // tabulated amo stays cos-type with spline derivatives close to analytic
  std::vector<double> table(256);
  for (int i = 0; i < 256; ++i) table[i] = 2 * std::cos(2 * pi * i / 256.0);
  Potential tab = Potential::tabulated(table);
  REQUIRE(tab.check_cos_type().ok);
  for (double x : {0.1, 0.3, 0.62, 0.9}) {
    REQUIRE(tab.v(x) == Catch::Approx(2 * std::cos(2 * pi * x)).margin(1e-6));
    REQUIRE(tab.dv(x) == Catch::Approx(-4 * pi * std::sin(2 * pi * x)).margin(1e-3));
    REQUIRE(tab.d2v(x) == Catch::Approx(-8 * pi * pi * std::cos(2 * pi * x)).margin(2e-1));
  }
}
