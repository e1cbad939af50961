// Experiment runner for the quasi-periodic Schrödinger cocycle laboratory.
// Subcommands: freq, lyapunov, ids, thouless, ldt, induct, holder, ap-check.
// Exit codes: 0 success, 2 configuration error, 3 numerical-domain error,
// 4 assertion failure in --assert mode.

#include <charconv>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qpsc/cocycle.hpp"
#include "qpsc/frequency.hpp"
#include "qpsc/induction.hpp"
#include "qpsc/ldt.hpp"
#include "qpsc/products.hpp"
#include "qpsc/regularity.hpp"
#include "qpsc/rng.hpp"
#include "qpsc/spectral.hpp"

using json = nlohmann::json;
using namespace qpsc;

namespace {

constexpr const char* kVersion = "qpsc 0.1.0";

// shortest round-trip decimal representation, for bitwise-stable outputs
std::string fmt(double x) {
  char buf[40];
  auto r = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, r.ptr);
}
std::string fmt(long double x) { return fmt(static_cast<double>(x)); }
std::string fmt(std::int64_t x) { return std::to_string(x); }

struct GlobalOpts {
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out;
  std::string manifest;
  bool assert_mode = false;
};

// echo of every option that shapes the result, written into the manifest and
// reusable through --config
struct ConfigEcho {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> kv;
  void add(const std::string& k, const std::string& v) { kv.emplace_back(k, v); }
};

std::ofstream open_or_die(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw CLI::ValidationError("--out", "cannot open output file: " + path);
  return os;
}

// output stream selection: explicit per-subcommand path, else --out, else stdout
class OutputTarget {
 public:
  OutputTarget(const std::string& sub_path, const GlobalOpts& g) {
    std::string path = !sub_path.empty() ? sub_path : g.out;
    if (!path.empty()) {
      file_ = open_or_die(path);
      os_ = &file_;
    } else {
      os_ = &std::cout;
    }
  }
  std::ostream& os() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_ = nullptr;
};

Frequency parse_alpha(const std::string& spec, int128 max_q = 100000) {
  if (spec == "golden") return golden_mean(max_q);
  if (spec == "sqrt2m1") return sqrt2_minus_1(max_q);
  if (spec.rfind("synth:", 0) == 0) {
    double beta = 1.0;
    int depth = 8;
    std::uint64_t seed = 1;
    std::stringstream ss(spec.substr(6));
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto eq = item.find('=');
      if (eq == std::string::npos) throw CLI::ValidationError("--alpha", "bad synth spec: " + item);
      std::string key = item.substr(0, eq), val = item.substr(eq + 1);
      if (key == "beta") beta = std::stod(val);
      else if (key == "seed") seed = std::stoull(val);
      else if (key == "depth") depth = std::stoi(val);
      else throw CLI::ValidationError("--alpha", "unknown synth key: " + key);
    }
    return synth(beta, depth, seed);
  }
  try {
    long double a = std::stold(spec);
    return expand(a, max_q);
  } catch (const std::invalid_argument&) {
    throw CLI::ValidationError("--alpha", "unrecognized frequency spec: " + spec);
  }
}

Potential parse_potential(const std::string& spec) {
  if (spec == "amo") return Potential::amo();
  if (spec.rfind("cosdef:eps2=", 0) == 0)
    return Potential::cos_deformed(std::stod(spec.substr(12)));
  if (spec.rfind("table:file=", 0) == 0) {
    std::ifstream in(spec.substr(11));
    if (!in) throw CLI::ValidationError("--v", "cannot open table file");
    std::vector<double> vals;
    double x;
    while (in >> x) vals.push_back(x);
    return Potential::tabulated(std::move(vals));
  }
  throw CLI::ValidationError("--v", "unrecognized potential spec: " + spec);
}

std::vector<double> parse_range(const std::string& spec) {
  // "a,b,steps" -> inclusive uniform grid
  double a, b;
  int steps;
  char c1, c2;
  std::stringstream ss(spec);
  if (!(ss >> a >> c1 >> b >> c2 >> steps) || c1 != ',' || c2 != ',' || steps < 1)
    throw CLI::ValidationError("--E-range", "expected a,b,steps: " + spec);
  std::vector<double> out;
  for (int i = 0; i <= steps; ++i) out.push_back(a + (b - a) * i / steps);
  return out;
}

template <class T>
std::vector<T> parse_list(const std::string& spec) {
  std::vector<T> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if constexpr (std::is_integral_v<T>) out.push_back(static_cast<T>(std::stoll(item)));
    else out.push_back(static_cast<T>(std::stod(item)));
  }
  if (out.empty()) throw CLI::ValidationError("list", "empty list: " + spec);
  return out;
}

void write_manifest(const GlobalOpts& g, const ConfigEcho& echo, double wall_s,
                    const Frequency* freq) {
  if (g.manifest.empty()) return;
  json m;
  m["version"] = kVersion;
  m["subcommand"] = echo.subcommand;
  json cfg = json::object();
  for (const auto& [k, v] : echo.kv) cfg[k] = v;
  m["config"] = cfg;
  m["wall_time_s"] = wall_s;
  if (freq) {
    json cs = json::array();
    for (const auto& c : freq->convergents) cs.push_back({int128_str(c.p), int128_str(c.q)});
    m["convergents"] = cs;
  }
  std::ofstream os(g.manifest);
  os << m.dump(2) << "\n";
}

// ---- subcommand payloads ----

struct FreqArgs {
  std::string alpha = "golden";
  std::int64_t max_q = 100000;
  std::string json_path;
  bool json_out = false;
};

int run_freq(const FreqArgs& a, const GlobalOpts& g, ConfigEcho& echo, Frequency& used) {
  Frequency f = parse_alpha(a.alpha, a.max_q);
  used = f;
  // short (truncated) expansions shrink the tail start so the estimate still
  // sees the last stored growth rates
  double beta = 0.0;
  if (f.levels() >= 3) beta = beta_estimate(f, std::min<std::size_t>(3, f.levels() - 2)).beta_hat;
  OutputTarget out(a.json_path, g);
  json j;
  j["alpha"] = fmt(f.alpha);
  j["partial_quotients"] = json::array();
  for (auto q : f.partial_quotients) j["partial_quotients"].push_back(int128_str(q));
  j["convergents"] = json::array();
  for (const auto& c : f.convergents) j["convergents"].push_back({int128_str(c.p), int128_str(c.q)});
  j["beta_hat"] = beta;
  out.os() << j.dump(2) << "\n";
  echo.add("alpha", a.alpha);
  echo.add("max-q", fmt(a.max_q));
  return 0;
}

struct LyapArgs {
  std::string v = "amo";
  double lambda = 0;
  std::string alpha = "golden";
  std::optional<double> E;
  std::string E_range;
  std::int64_t n = 10000;
  int phases = 16;
  std::string method = "birkhoff";
  double growth = 8;
  int levels = 2;
  std::string csv_path;
};

int run_lyapunov(const LyapArgs& a, const GlobalOpts& g, ConfigEcho& echo, Frequency& used) {
  CocycleParams p;
  p.potential = parse_potential(a.v);
  p.lambda = a.lambda;
  p.freq = parse_alpha(a.alpha);
  used = p.freq;
  std::vector<double> Es;
  if (!a.E_range.empty()) Es = parse_range(a.E_range);
  else if (a.E) Es = {*a.E};
  else throw CLI::ValidationError("--E", "need --E or --E-range");

  OutputTarget out(a.csv_path, g);
  out.os() << "E,n,phases,method,L,stderr\n";
  for (double E : Es) {
    p.E = E;
    LyapunovEstimate est =
        a.method == "avalanche"
            ? lyapunov_avalanche(p, a.n, a.growth, a.levels, a.phases, g.seed, g.threads)
            : lyapunov_birkhoff(p, a.n, a.phases, g.seed, g.threads);
    out.os() << fmt(E) << ',' << est.n << ',' << est.phases << ','
             << (a.method == "avalanche" ? "avalanche" : "birkhoff") << ',' << fmt(est.value)
             << ',' << fmt(est.stderr_) << "\n";
  }
  echo.add("v", a.v);
  echo.add("lambda", fmt(a.lambda));
  echo.add("alpha", a.alpha);
  if (a.E) echo.add("E", fmt(*a.E));
  if (!a.E_range.empty()) echo.add("E-range", a.E_range);
  echo.add("n", fmt(a.n));
  echo.add("phases", fmt(static_cast<std::int64_t>(a.phases)));
  echo.add("method", a.method);
  echo.add("growth", fmt(a.growth));
  echo.add("levels", fmt(static_cast<std::int64_t>(a.levels)));
  return 0;
}

struct IdsArgs {
  std::string v = "amo";
  double lambda = 0;
  std::string alpha = "golden";
  std::string E_range = "-3,3,100";
  std::int64_t n = 1000;
  int phases = 8;
  std::string csv_path;
};

int run_ids(const IdsArgs& a, const GlobalOpts& g, ConfigEcho& echo, Frequency& used) {
  CocycleParams p;
  p.potential = parse_potential(a.v);
  p.lambda = a.lambda;
  p.freq = parse_alpha(a.alpha);
  used = p.freq;
  OutputTarget out(a.csv_path, g);
  out.os() << "E,N\n";
  for (double E : parse_range(a.E_range)) {
    IDSEstimate est = ids_dirichlet(p, E, a.n, a.phases, g.seed, g.threads);
    out.os() << fmt(E) << ',' << fmt(est.value) << "\n";
  }
  echo.add("v", a.v);
  echo.add("lambda", fmt(a.lambda));
  echo.add("alpha", a.alpha);
  echo.add("E-range", a.E_range);
  echo.add("n", fmt(a.n));
  echo.add("phases", fmt(static_cast<std::int64_t>(a.phases)));
  return 0;
}

struct ThoulessArgs {
  double E = 0;
  std::string ids_csv;
  std::string v = "amo";
  double lambda = 0;
  std::string alpha = "golden";
  std::int64_t n = 10000;
  int phases = 16;
};

int run_thouless(const ThoulessArgs& a, const GlobalOpts& g, ConfigEcho& echo, Frequency& used) {
  std::ifstream in(a.ids_csv);
  if (!in) throw CLI::ValidationError("--ids-csv", "cannot open " + a.ids_csv);
  std::vector<IDSEstimate> grid;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    IDSEstimate e;
    e.E = std::stod(line.substr(0, comma));
    e.value = std::stod(line.substr(comma + 1));
    grid.push_back(e);
  }
  CocycleParams p;
  p.potential = parse_potential(a.v);
  p.lambda = a.lambda;
  p.E = a.E;
  p.freq = parse_alpha(a.alpha);
  used = p.freq;
  double l_direct = lyapunov_birkhoff(p, a.n, a.phases, g.seed, g.threads).value;
  double l_thouless = thouless_check(a.E, grid);
  OutputTarget out("", g);
  out.os() << "L_direct=" << fmt(l_direct) << " L_thouless=" << fmt(l_thouless)
           << " diff=" << fmt(std::abs(l_direct - l_thouless)) << "\n";
  echo.add("E", fmt(a.E));
  echo.add("ids-csv", a.ids_csv);
  echo.add("v", a.v);
  echo.add("lambda", fmt(a.lambda));
  echo.add("alpha", a.alpha);
  echo.add("n", fmt(a.n));
  echo.add("phases", fmt(static_cast<std::int64_t>(a.phases)));
  return 0;
}

struct LdtArgs {
  std::string v = "amo";
  std::string lambdas = "10";
  double E = 0;
  std::string alpha = "golden";
  std::string scales = "50,100,200,400,800";
  double kappa = 0.9;
  int phases = 100000;
  std::string csv_path;
};

int run_ldt(const LdtArgs& a, const GlobalOpts& g, ConfigEcho& echo, Frequency& used) {
  CocycleParams p;
  p.potential = parse_potential(a.v);
  p.E = a.E;
  p.freq = parse_alpha(a.alpha);
  used = p.freq;
  auto lambdas = parse_list<double>(a.lambdas);
  auto scales = parse_list<std::int64_t>(a.scales);
  OutputTarget out(a.csv_path, g);
  out.os() << "lambda,i,kappa,phases,fraction,delta_hat_running\n";
  bool monotone_ok = true;
  for (double lam : lambdas) {
    p.lambda = lam;
    double llam = std::log(lam);
    double sxx = 0, sxy = 0;
    double prev_fraction = 2.0;
    for (std::int64_t i : scales) {
      double f = deviation_fraction(p, i, a.kappa, a.phases, g.seed, g.threads);
      if (f > prev_fraction + 3.0 / std::sqrt(static_cast<double>(a.phases))) monotone_ok = false;
      prev_fraction = f;
      if (f > 0) {
        double x = -static_cast<double>(i) * llam;
        sxx += x * x;
        sxy += x * std::log(f);
      }
      double running = sxx > 0 ? sxy / sxx : std::nan("");
      out.os() << fmt(lam) << ',' << i << ',' << fmt(a.kappa) << ',' << a.phases << ',' << fmt(f)
               << ',' << fmt(running) << "\n";
    }
  }
  echo.add("v", a.v);
  echo.add("lambda", a.lambdas);
  echo.add("E", fmt(a.E));
  echo.add("alpha", a.alpha);
  echo.add("scales", a.scales);
  echo.add("kappa", fmt(a.kappa));
  echo.add("phases", fmt(static_cast<std::int64_t>(a.phases)));
  return (g.assert_mode && !monotone_ok) ? 4 : 0;
}

struct InductArgs {
  std::string v = "amo";
  double lambda = 10;
  double t = 0;
  std::string alpha = "golden";
  int levels = 4;
  int grid = 1024;  // 1025 points per interval, enough for type tags
  std::int64_t max_q = 10000;
  std::string json_path;
};

int run_induct(const InductArgs& a, const GlobalOpts& g, ConfigEcho& echo, Frequency& used) {
  InductionConfig cfg;
  cfg.params.potential = parse_potential(a.v);
  cfg.params.lambda = a.lambda;
  cfg.params.E = a.lambda * a.t;
  cfg.params.freq = parse_alpha(a.alpha);
  used = cfg.params.freq;
  cfg.grid_size = a.grid;
  cfg.max_levels = a.levels;
  cfg.max_q = a.max_q;
  cfg.threads = resolve_threads(g.threads);
  InductionRun run = run_induction(cfg);

  OutputTarget out(a.json_path, g);
  json doc;
  doc["potential_ok"] = run.potential_ok;
  doc["message"] = run.message;
  doc["initial_critical_points"] = run.initial.critical_points;
  doc["levels"] = json::array();
  for (const auto& lr : run.levels) {
    json l;
    l["level"] = lr.level;
    l["q"] = lr.q;
    l["case"] = to_string(lr.afd.case_tag);
    l["type"] = to_string(lr.afd.type_tag);
    l["critical_points"] = lr.afd.critical_points;
    l["r_plus_min"] = lr.rt.r_plus_min;
    l["r_minus_min"] = lr.rt.r_minus_min;
    l["growth_margin_min"] = lr.growth.min_ratio - lr.growth.exponent_soft;
    l["nondeg_c"] = lr.nondeg.c_fit;
    l["drift"] = lr.drift;
    doc["levels"].push_back(l);
  }
  out.os() << doc.dump(2) << "\n";
  echo.add("v", a.v);
  echo.add("lambda", fmt(a.lambda));
  echo.add("t", fmt(a.t));
  echo.add("alpha", a.alpha);
  echo.add("levels", fmt(static_cast<std::int64_t>(a.levels)));
  echo.add("grid", fmt(static_cast<std::int64_t>(a.grid)));
  echo.add("max-q", fmt(a.max_q));
  return 0;
}

struct HolderArgs {
  std::string input_csv;
  std::string scales = "0.0078125,0.015625,0.03125,0.0625,0.125";
  // pipeline mode
  std::string v = "amo";
  double lambda = 10;
  std::string alpha = "golden";
  std::string window = "-0.5,0.5";
  int grid_points = 401;
  std::int64_t n = 100000;
  int phases = 16;
  std::int64_t n_ids = 10000;
  int phases_ids = 32;
};

int run_holder(const HolderArgs& a, const GlobalOpts& g, ConfigEcho& echo, Frequency& used) {
  auto scales = parse_list<double>(a.scales);
  OutputTarget out("", g);
  auto print_fit = [&](const char* name, const HolderFit& fit) {
    out.os() << name << ": sigma_hat=" << fmt(fit.sigma_hat) << " log_C=" << fmt(fit.log_C)
             << " residual=" << fmt(fit.residual) << " scales_used=";
    for (std::size_t i = 0; i < fit.scales_used.size(); ++i)
      out.os() << (i ? ";" : "") << fmt(fit.scales_used[i]);
    if (fit.degenerate) out.os() << " degenerate";
    out.os() << "\n";
  };
  if (!a.input_csv.empty()) {
    std::ifstream in(a.input_csv);
    if (!in) throw CLI::ValidationError("--input-csv", "cannot open " + a.input_csv);
    std::vector<double> E, val;
    std::string line;
    std::getline(in, line);
    // locate the value column by header name: L or N curves both fit
    auto split = [](const std::string& s) {
      std::vector<std::string> f;
      std::stringstream ss(s);
      std::string item;
      while (std::getline(ss, item, ',')) f.push_back(item);
      return f;
    };
    auto header = split(line);
    std::size_t col = 1;
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == "L" || header[i] == "N" || header[i] == "value") col = i;
    while (std::getline(in, line)) {
      auto fields = split(line);
      if (fields.size() <= col) continue;
      E.push_back(std::stod(fields[0]));
      val.push_back(std::stod(fields[col]));
    }
    HolderFit fit = holder_fit(E, val, scales);
    print_fit("curve", fit);
    echo.add("input-csv", a.input_csv);
  } else {
    auto win = parse_list<double>(a.window);
    if (win.size() != 2) throw CLI::ValidationError("--window", "expected a,b");
    CocycleParams p;
    p.potential = parse_potential(a.v);
    p.lambda = a.lambda;
    p.freq = parse_alpha(a.alpha);
    used = p.freq;
    JointHolderReport rep = joint_report(p, win[0], win[1], a.grid_points, a.n, a.phases,
                                         a.n_ids, a.phases_ids, scales, g.seed, g.threads);
    print_fit("L", rep.L_fit);
    print_fit("N", rep.N_fit);
    out.os() << "cross_check_ok=" << (rep.cross_check_ok ? "1" : "0") << "\n";
    echo.add("v", a.v);
    echo.add("lambda", fmt(a.lambda));
    echo.add("alpha", a.alpha);
    echo.add("window", a.window);
    echo.add("grid-points", fmt(static_cast<std::int64_t>(a.grid_points)));
    echo.add("n", fmt(a.n));
    echo.add("phases", fmt(static_cast<std::int64_t>(a.phases)));
  }
  echo.add("scales", a.scales);
  return 0;
}

struct ApArgs {
  int m = 10;
  double mu = 1000;
  std::string ensemble = "random";
  int trials = 100;
  std::string csv_path;
};

int run_ap_check(const ApArgs& a, const GlobalOpts& g, ConfigEcho& echo) {
  std::mt19937_64 rng(g.seed);
  OutputTarget out(a.csv_path, g);
  out.os() << "trial,m,mu,cond8,cond9,defect,defect_over_bound\n";
  bool all_within = true;
  for (int trial = 0; trial < a.trials; ++trial) {
    std::vector<Sl2> B;
    for (int j = 0; j < a.m; ++j) {
      double norm = a.mu * std::exp(uniform(rng, 0.0, 1.0));
      if (a.ensemble == "aligned") {
        B.push_back(Sl2::diag(norm));
      } else if (a.ensemble == "rotated") {
        B.push_back(Sl2::rotation(0.01 * (j + 1)) * Sl2::diag(norm));
      } else {
        B.push_back(Sl2::rotation(uniform(rng, -0.3, 0.3)) * Sl2::diag(norm) *
                    Sl2::rotation(uniform(rng, -0.3, 0.3)));
      }
    }
    APReport rep = avalanche_check(B, a.mu);
    if (rep.cond8_ok && rep.cond9_ok && rep.defect > 20.0 * rep.bound) all_within = false;
    out.os() << trial << ',' << rep.m << ',' << fmt(rep.mu) << ',' << (rep.cond8_ok ? 1 : 0)
             << ',' << (rep.cond9_ok ? 1 : 0) << ',' << fmt(rep.defect) << ','
             << fmt(rep.defect_over_bound) << "\n";
  }
  echo.add("m", fmt(static_cast<std::int64_t>(a.m)));
  echo.add("mu", fmt(a.mu));
  echo.add("ensemble", a.ensemble);
  echo.add("trials", fmt(static_cast<std::int64_t>(a.trials)));
  return (g.assert_mode && !all_within) ? 4 : 0;
}

// --config preprocessing: load the stored config (or a manifest) and inject
// its key/value pairs ahead of the explicit flags, which then take precedence
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string cfg_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      cfg_path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      cfg_path = args[i].substr(9);
      args.erase(args.begin() + i);
      break;
    }
  }
  if (cfg_path.empty()) return args;
  std::ifstream in(cfg_path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + cfg_path);
  json j = json::parse(in);
  std::vector<std::string> merged;
  merged.push_back(j.at("subcommand").get<std::string>());
  for (auto& [k, v] : j.at("config").items()) {
    merged.push_back("--" + k);
    merged.push_back(v.get<std::string>());
  }
  // explicit args follow and win under TakeLast; drop a duplicated subcommand
  std::size_t start = (!args.empty() && !args[0].empty() && args[0][0] != '-') ? 1 : 0;
  if (start == 1 && args[0] != merged[0])
    throw CLI::ValidationError("--config", "subcommand mismatch with config file");
  merged.insert(merged.end(), args.begin() + start, args.end());
  return merged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for quasi-periodic Schrödinger cocycles"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  // global flags remain usable after the subcommand name (inherited by the
  // subcommands created below)
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--seed", g.seed, "seed for all pseudo-random choices");
  app.add_option("--threads", g.threads, "worker threads (0 = hardware)");
  app.add_option("--out", g.out, "default output path (stdout if empty)");
  app.add_option("--manifest", g.manifest, "write a run manifest JSON here");
  app.add_flag("--assert", g.assert_mode, "exit 4 when built-in acceptance checks fail");

  FreqArgs fa;
  auto* freq_cmd = app.add_subcommand("freq", "continued-fraction data for a frequency");
  freq_cmd->add_option("--alpha", fa.alpha, "decimal|golden|sqrt2m1|synth:beta=..,seed=..");
  freq_cmd->add_option("--max-q", fa.max_q, "largest stored denominator");
  freq_cmd->add_flag("--json", fa.json_out, "emit JSON (default format)");
  freq_cmd->add_option("--json-file", fa.json_path, "JSON output path");

  LyapArgs la;
  auto* lyap_cmd = app.add_subcommand("lyapunov", "finite-scale Lyapunov exponents");
  lyap_cmd->add_option("--v", la.v, "amo|cosdef:eps2=..|table:file=..");
  lyap_cmd->add_option("--lambda", la.lambda, "coupling");
  lyap_cmd->add_option("--alpha", la.alpha, "frequency spec");
  lyap_cmd->add_option("--E", la.E, "energy");
  lyap_cmd->add_option("--E-range", la.E_range, "a,b,steps");
  lyap_cmd->add_option("--n", la.n, "orbit length");
  lyap_cmd->add_option("--phases", la.phases, "phase grid size");
  lyap_cmd->add_option("--method", la.method)->check(CLI::IsMember({"birkhoff", "avalanche"}));
  lyap_cmd->add_option("--growth", la.growth, "scale growth factor (avalanche)");
  lyap_cmd->add_option("--levels", la.levels, "scale levels (avalanche)");
  lyap_cmd->add_option("--csv", la.csv_path, "CSV output path");

  IdsArgs ia;
  auto* ids_cmd = app.add_subcommand("ids", "integrated density of states");
  ids_cmd->add_option("--v", ia.v);
  ids_cmd->add_option("--lambda", ia.lambda);
  ids_cmd->add_option("--alpha", ia.alpha);
  ids_cmd->add_option("--E-range", ia.E_range, "a,b,steps");
  ids_cmd->add_option("--n", ia.n, "truncation size");
  ids_cmd->add_option("--phases", ia.phases);
  ids_cmd->add_option("--csv", ia.csv_path, "CSV output path");

  ThoulessArgs ta;
  auto* th_cmd = app.add_subcommand("thouless", "Thouless-formula consistency");
  th_cmd->add_option("--E", ta.E)->required();
  th_cmd->add_option("--ids-csv", ta.ids_csv)->required();
  th_cmd->add_option("--v", ta.v);
  th_cmd->add_option("--lambda", ta.lambda);
  th_cmd->add_option("--alpha", ta.alpha);
  th_cmd->add_option("--n", ta.n);
  th_cmd->add_option("--phases", ta.phases);

  LdtArgs da;
  auto* ldt_cmd = app.add_subcommand("ldt", "large-deviation fractions across scales");
  ldt_cmd->add_option("--v", da.v);
  ldt_cmd->add_option("--lambda", da.lambdas, "one or more couplings, comma separated");
  ldt_cmd->add_option("--E", da.E);
  ldt_cmd->add_option("--alpha", da.alpha);
  ldt_cmd->add_option("--scales", da.scales);
  ldt_cmd->add_option("--kappa", da.kappa);
  ldt_cmd->add_option("--phases", da.phases);
  ldt_cmd->add_option("--csv", da.csv_path, "CSV output path");

  InductArgs na;
  auto* ind_cmd = app.add_subcommand("induct", "critical-interval induction data");
  ind_cmd->add_option("--v", na.v);
  ind_cmd->add_option("--lambda", na.lambda);
  ind_cmd->add_option("--t", na.t, "energy over coupling");
  ind_cmd->add_option("--alpha", na.alpha);
  ind_cmd->add_option("--levels", na.levels);
  ind_cmd->add_option("--grid", na.grid);
  ind_cmd->add_option("--max-q", na.max_q);
  ind_cmd->add_option("--json", na.json_path, "JSON output path");

  HolderArgs ha;
  auto* hol_cmd = app.add_subcommand("holder", "Hölder exponent estimates");
  hol_cmd->add_option("--input-csv", ha.input_csv, "fit an existing E,value curve");
  hol_cmd->add_option("--scales", ha.scales, "dyadic gaps, comma separated");
  hol_cmd->add_option("--v", ha.v);
  hol_cmd->add_option("--lambda", ha.lambda);
  hol_cmd->add_option("--alpha", ha.alpha);
  hol_cmd->add_option("--window", ha.window, "a,b energy window");
  hol_cmd->add_option("--grid-points", ha.grid_points);
  hol_cmd->add_option("--n", ha.n);
  hol_cmd->add_option("--phases", ha.phases);
  hol_cmd->add_option("--n-ids", ha.n_ids);
  hol_cmd->add_option("--phases-ids", ha.phases_ids);

  ApArgs aa;
  auto* ap_cmd = app.add_subcommand("ap-check", "avalanche-principle ensemble check");
  ap_cmd->add_option("--m", aa.m, "chain length");
  ap_cmd->add_option("--mu", aa.mu, "norm floor");
  ap_cmd->add_option("--ensemble", aa.ensemble)->check(CLI::IsMember({"aligned", "rotated", "random"}));
  ap_cmd->add_option("--trials", aa.trials);
  ap_cmd->add_option("--csv", aa.csv_path, "CSV output path");

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  }
  try {
    std::vector<const char*> cargs;
    cargs.push_back("qpsc");
    for (const auto& s : args) cargs.push_back(s.c_str());
    app.parse(static_cast<int>(cargs.size()), const_cast<char**>(cargs.data()));
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForVersion") return app.exit(e);
    std::cerr << e.what() << "\n";
    return 2;
  }

  auto t0 = std::chrono::steady_clock::now();
  ConfigEcho echo;
  Frequency used;
  int rc = 0;
  try {
    if (freq_cmd->parsed()) {
      echo.subcommand = "freq";
      rc = run_freq(fa, g, echo, used);
    } else if (lyap_cmd->parsed()) {
      echo.subcommand = "lyapunov";
      rc = run_lyapunov(la, g, echo, used);
    } else if (ids_cmd->parsed()) {
      echo.subcommand = "ids";
      rc = run_ids(ia, g, echo, used);
    } else if (th_cmd->parsed()) {
      echo.subcommand = "thouless";
      rc = run_thouless(ta, g, echo, used);
    } else if (ldt_cmd->parsed()) {
      echo.subcommand = "ldt";
      rc = run_ldt(da, g, echo, used);
    } else if (ind_cmd->parsed()) {
      echo.subcommand = "induct";
      rc = run_induct(na, g, echo, used);
    } else if (hol_cmd->parsed()) {
      echo.subcommand = "holder";
      rc = run_holder(ha, g, echo, used);
    } else if (ap_cmd->parsed()) {
      echo.subcommand = "ap-check";
      rc = run_ap_check(aa, g, echo);
    }
  } catch (const CLI::Error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "numerical-domain error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }

  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  echo.add("seed", std::to_string(g.seed));
  echo.add("threads", std::to_string(g.threads));
  write_manifest(g, echo, wall, used.levels() ? &used : nullptr);
  return rc;
}
