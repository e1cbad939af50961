#pragma once

// Continued-fraction arithmetic for the rotation number: convergents by the
// Euclidean algorithm, tail estimate of beta = limsup log(q_{n+1})/q_n,
// synthesis of frequencies with prescribed beta, and first-return times of
// the circle rotation. alpha is carried in 80-bit long double; convergents in
// 128-bit integers with overflow truncation.

#include <cfloat>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpsc/circle.hpp"
#include "qpsc/rng.hpp"

namespace qpsc {

using int128 = __int128;

inline long double to_ld(int128 v) { return static_cast<long double>(v); }
inline std::string int128_str(int128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  if (neg) v = -v;
  std::string s;
  while (v > 0) {
    s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return neg ? "-" + s : s;
}

struct Convergent {
  int128 p = 0;
  int128 q = 1;
};

struct Frequency {
  long double alpha = 0;                   // in (0,1)
  std::vector<int128> partial_quotients;   // a_1, a_2, ... (a_0 = 0)
  std::vector<Convergent> convergents;     // (p_0,q_0)=(0,1), then p_k/q_k
  bool rational_truncation = false;        // expansion terminated exactly
  bool overflow_truncation = false;        // q exceeded 128-bit range

  const Convergent& back() const { return convergents.back(); }
  std::size_t levels() const { return convergents.size(); }
};

struct FrequencyClass {
  double beta_hat = 0;
  std::optional<std::pair<double, double>> diophantine_witness;  // (c, tau)
};

// All convergents with q_k <= max_q via the Gauss map. Terminating (rational
// within working precision) inputs are flagged, not rejected.
inline Frequency expand(long double alpha, int128 max_q) {
  if (!(alpha > 0 && alpha < 1)) throw std::domain_error("expand: alpha must lie in (0,1)");
  if (max_q < 1) throw std::domain_error("expand: max_q must be >= 1");
  Frequency f;
  f.alpha = alpha;
  f.convergents.push_back({0, 1});

  int128 pk1 = 1, qk1 = 0;  // (p_{-1}, q_{-1})
  int128 pk = 0, qk = 1;    // (p_0, q_0)
  long double x = alpha;
  // below 1/x's representable accuracy the tail digits are noise
  const long double eps = 64 * LDBL_EPSILON;
  while (true) {
    if (x < eps) {
      f.rational_truncation = true;
      break;
    }
    long double inv = 1.0L / x;
    int128 a = static_cast<int128>(inv);
    long double frac = inv - static_cast<long double>(a);
    if (frac < eps * inv) {  // inv is an integer within precision
      f.rational_truncation = true;
      frac = 0;
    }
    if (a < 1) a = 1;
    int128 qn, pn;
    bool ovq = __builtin_mul_overflow(a, qk, &qn) || __builtin_add_overflow(qn, qk1, &qn);
    bool ovp = __builtin_mul_overflow(a, pk, &pn) || __builtin_add_overflow(pn, pk1, &pn);
    if (ovq || ovp) {
      f.overflow_truncation = true;
      break;
    }
    if (qn > max_q) break;
    f.partial_quotients.push_back(a);
    f.convergents.push_back({pn, qn});
    pk1 = pk;
    qk1 = qk;
    pk = pn;
    qk = qn;
    if (f.rational_truncation) break;
    x = frac;
  }
  return f;
}

// Tail max of log(q_{k+1})/q_k over k >= tail_start, the finite-run stand-in
// for the limsup. Also reports a Diophantine witness when q_{n+1} <= c q_n^tau
// holds over the stored tail with modest (c, tau).
inline FrequencyClass beta_estimate(const Frequency& f, std::size_t tail_start = 3) {
  if (f.levels() < tail_start + 2) throw std::domain_error("beta_estimate: insufficient tail");
  FrequencyClass fc;
  double beta = 0;
  for (std::size_t k = tail_start; k + 1 < f.levels(); ++k) {
    double v = static_cast<double>(std::log(to_ld(f.convergents[k + 1].q)) / to_ld(f.convergents[k].q));
    beta = std::max(beta, v);
  }
  fc.beta_hat = beta;
  const double tau = 2.0;
  double c = 0;
  for (std::size_t k = tail_start; k + 1 < f.levels(); ++k) {
    long double qn = to_ld(f.convergents[k].q), qn1 = to_ld(f.convergents[k + 1].q);
    c = std::max(c, static_cast<double>(qn1 / std::pow(qn, (long double)tau)));
  }
  if (c > 0 && c <= 16.0) fc.diophantine_witness = std::make_pair(c, tau);
  return fc;
}

// Evaluate [0; a_1, a_2, ...] bottom-up.
inline long double cf_value(const std::vector<int128>& a) {
  long double x = 0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) x = 1.0L / (to_ld(*it) + x);
  return x;
}

// Frequency with beta(alpha) ~ beta_target: after a seeded small prefix, each
// new quotient is a_{k+1} = max(1, round(exp(beta_target q_k)/q_k)), which
// makes log(q_{k+1})/q_k track beta_target until the 128-bit width runs out
// (flagged truncation). depth counts quotients in total.
inline Frequency synth(double beta_target, int depth, std::uint64_t seed) {
  if (beta_target < 0) throw std::domain_error("synth: beta_target must be >= 0");
  if (depth < 3) throw std::domain_error("synth: depth must be >= 3");
  std::mt19937_64 rng(seed);
  std::vector<int128> a;
  // short prefix with small quotients keeps q_prefix small enough that the
  // first beta-rate quotient stays recoverable from alpha at 80-bit precision
  const int prefix = 2;
  for (int k = 0; k < prefix && k < depth; ++k) a.push_back(uniform_int(rng, 1, 2));

  int128 qk1 = 0, qk = 1;
  for (const auto& ai : a) {
    int128 qn = ai * qk + qk1;
    qk1 = qk;
    qk = qn;
  }
  bool overflow = false;
  while (static_cast<int>(a.size()) < depth) {
    long double want = std::exp(beta_target * to_ld(qk)) / to_ld(qk);
    if (want > 1.6e38L) {  // next quotient alone exceeds 128-bit range
      overflow = true;
      break;
    }
    int128 ai = static_cast<int128>(std::roundl(want));
    if (ai < 1) ai = 1;
    int128 qn;
    if (__builtin_mul_overflow(ai, qk, &qn) || __builtin_add_overflow(qn, qk1, &qn)) {
      overflow = true;
      break;
    }
    a.push_back(ai);
    qk1 = qk;
    qk = qn;
  }

  Frequency f = expand(cf_value(a), qk);
  f.overflow_truncation = overflow;
  return f;
}

inline Frequency golden_mean(int128 max_q = 100000) {
  return expand((std::sqrt(5.0L) - 1) / 2, max_q);
}
inline Frequency sqrt2_minus_1(int128 max_q = 100000) {
  return expand(std::sqrt(2.0L) - 1, max_q);
}

// Smallest k in [1, k_max] with x + k alpha within `radius` of `center` on
// R/Z, or nullopt. Orbit advanced in long double so the accumulated error
// stays below 1e-14 for k up to 1e8.
inline std::optional<std::int64_t> min_return_time(const Frequency& f, long double x,
                                                   long double center, long double radius,
                                                   std::int64_t k_max) {
  if (radius <= 0) throw std::domain_error("min_return_time: radius must be > 0");
  if (k_max < 1) throw std::domain_error("min_return_time: k_max must be >= 1");
  long double y = wrap01(x);
  for (std::int64_t k = 1; k <= k_max; ++k) {
    y += f.alpha;
    if (y >= 1) y -= 1;
    if (torus_dist(y, center) < radius) return k;
  }
  return std::nullopt;
}

}  // namespace qpsc
