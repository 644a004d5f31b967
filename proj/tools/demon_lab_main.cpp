// demon-lab: batch front door for the demonlab library.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "demonlab/experiments.hpp"
#include "demonlab/mazery.hpp"
#include "demonlab/params.hpp"
#include "demonlab/scheduling.hpp"

namespace {

using namespace demonlab;

using ConfigMap = std::map<std::string, std::string>;

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

ConfigMap load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot read config file: " + path);
  ConfigMap cfg;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto key = trim(line.substr(0, eq));
    if (!key.empty()) cfg[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

template <class T>
void from_string(const std::string& text, T& var, const std::string& key) {
  std::istringstream is(text);
  if constexpr (std::is_same_v<T, bool>) {
    if (text == "true") { var = true; return; }
    if (text == "false") { var = false; return; }
  }
  if (!(is >> var)) throw InvalidParameter("bad value for " + key + ": " + text);
}

// Config-file values fill in whatever the command line left at its default.
template <class T>
void merge(const ConfigMap& cfg, const CLI::Option* opt, const std::string& key,
           T& var) {
  if (opt && opt->count() > 0) return;
  auto it = cfg.find(key);
  if (it != cfg.end()) from_string(it->second, var, key);
}

template <class T>
std::vector<T> parse_list(const std::string& s, const std::string& key) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    T v;
    from_string(item, v, key);
    out.push_back(v);
  }
  if (out.empty()) throw InvalidParameter(key + ": empty list");
  return out;
}

template <class T>
std::string str(const T& v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void write_out(const std::string& out_path, const std::string& data) {
  if (out_path.empty()) {
    std::cout << data;
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw InvalidParameter("cannot write output file: " + out_path);
  f << data;
  if (!f) throw std::runtime_error("write failed: " + out_path);
}

struct Opts {
  int m = 3;
  std::string p = "0.2";
  long n = 64;
  std::string n_list;
  long trials = 1000;
  std::uint64_t seed = 0;
  bool loops = false;
  long horizon = 1000;
  double r0 = 4.0;
  int level = 1;
  std::string config;
  std::string out;
  int threads = 0;
  long window = 96;
  std::string estimator = "exact";
  long mc_samples = 4000;
  double w = 0.6;  // base-level trap bound; config key only
  std::string input;  // verify target
};

void announce(const std::string& sub,
              std::initializer_list<std::pair<std::string, std::string>> kv) {
  std::cerr << "run " << sub;
  for (const auto& [k, v] : kv) std::cerr << ' ' << k << '=' << v;
  std::cerr << '\n';
}

params::ExponentSet exponents_from(const ConfigMap& cfg, const Opts& o,
                                   const CLI::Option* r0_opt) {
  params::ExponentSet e;
  auto take = [&](const char* key, double& field) {
    auto it = cfg.find(key);
    if (it != cfg.end()) from_string(it->second, field, key);
  };
  take("delta", e.delta);
  take("gamma", e.gamma);
  take("phi", e.phi);
  take("tau", e.tau);
  take("tau_prime", e.tau_prime);
  take("omega", e.omega);
  take("chi", e.chi);
  take("lambda", e.lambda);
  take("lambda_cap", e.lambda_cap);
  take("hole_h", e.hole_h);
  take("c1", e.c1);
  take("c2", e.c2);
  take("c3", e.c3);
  take("r0", e.r0);
  if (r0_opt && r0_opt->count() > 0) e.r0 = o.r0;
  auto pf = cfg.find("paper_faithful");
  if (pf != cfg.end()) from_string(pf->second, e.paper_faithful, "paper_faithful");
  return e;
}

mazery::Mazery build_base(const Opts& o) {
  auto x = gen_walk(o.m, static_cast<std::size_t>(o.window + 1), o.loops,
                    RngStream(o.seed, 0));
  auto y = gen_walk(o.m, static_cast<std::size_t>(o.window + 1), o.loops,
                    RngStream(o.seed, 1));
  return mazery::base_mazery(x, y, o.window, o.w);
}

mazery::CondProbEstimator make_estimator(const Opts& o) {
  if (o.estimator != "exact" && o.estimator != "mc")
    throw InvalidParameter("estimator must be 'exact' or 'mc'");
  mazery::CondProbEstimator est;
  est.master_seed = o.seed;
  est.mc_samples = o.mc_samples;
  est.force_monte_carlo = o.estimator == "mc";
  return est;
}

// Shared by scaleup and verify so a dump can be reproduced byte for byte.
std::string scaleup_dump(const Opts& o, mazery::ConditionReport* report_out) {
  auto M = build_base(o);
  if (o.level <= 1) {
    if (report_out) *report_out = mazery::check_conditions(M, RngStream(o.seed, 0xc));
    return mazery::dump(M);
  }
  if (o.level > 2) throw InvalidParameter("scaleup supports --level 1 or 2");
  auto est = make_estimator(o);
  params::ExponentSet e;
  auto next = params::toy_params(128, 160, 150, 0.2, 0.06, 105, 0.3, 480, e);
  auto M2 = mazery::scale_up(M, est, next);
  if (report_out) *report_out = mazery::check_conditions(M2, RngStream(o.seed, 0xc));
  return mazery::dump(M2);
}

int cmd_simulate(const Opts& o) {
  auto ns = o.n_list.empty() ? std::vector<long>{o.n}
                             : parse_list<long>(o.n_list, "n-list");
  announce("simulate", {{"m", str(o.m)},
                        {"n-list", str(o.n_list.empty() ? str(o.n) : o.n_list)},
                        {"trials", str(o.trials)},
                        {"seed", str(o.seed)},
                        {"loops", str(o.loops)},
                        {"threads", str(o.threads)}});
  auto curve = experiments::blocking_curve(o.m, ns, o.trials, o.seed, o.loops,
                                           o.threads);
  write_out(o.out, experiments::to_csv("escape", curve, o.seed));
  if (curve.size() >= 4) {
    try {
      std::cerr << experiments::fit_report(
          experiments::first_blocking_mass(curve));
    } catch (const InvalidParameter&) {
      std::cerr << "tail fit skipped: too few positive mass points\n";
    }
  }
  return 0;
}

int cmd_binary(const Opts& o) {
  auto ps = parse_list<double>(o.p, "p");
  announce("binary", {{"p", o.p},
                      {"horizon", str(o.horizon)},
                      {"trials", str(o.trials)},
                      {"seed", str(o.seed)},
                      {"threads", str(o.threads)}});
  auto pts = experiments::sweep_p(ps, o.horizon, o.trials, o.seed, o.threads);
  write_out(o.out, experiments::to_csv("binary", pts, o.seed));
  return 0;
}

int cmd_schedule(const Opts& o) {
  announce("schedule", {{"m", str(o.m)},
                        {"n", str(o.n)},
                        {"seed", str(o.seed)},
                        {"loops", str(o.loops)}});
  auto x = gen_walk(o.m, static_cast<std::size_t>(o.n + 1), o.loops,
                    RngStream(o.seed, 0));
  auto y = gen_walk(o.m, static_cast<std::size_t>(o.n + 1), o.loops,
                    RngStream(o.seed, 1));
  if (x[0] == y[0])
    throw std::runtime_error("time-0 collision: X(0) = Y(0), no schedule exists");
  auto rs = reach_set(x, y, o.n);
  if (rs.frontier() < o.n)
    throw std::runtime_error("instance is blocked before n=" + str(o.n));
  auto sched = path_to_schedule(extract_path(rs));
  if (!verify_no_collision(x, y, sched))
    throw std::runtime_error("extracted schedule failed collision check");
  std::ostringstream os;
  for (std::size_t i = 0; i < sched.t0.size(); ++i)
    os << (i ? " " : "") << sched.t0[i];
  os << '\n';
  for (std::size_t i = 0; i < sched.t1.size(); ++i)
    os << (i ? " " : "") << sched.t1[i];
  os << '\n';
  write_out(o.out, os.str());
  std::cerr << "schedule verified, " << sched.t0.size() << "+" << sched.t1.size()
            << " delays\n";
  return 0;
}

int cmd_scaleup(const Opts& o) {
  announce("scaleup", {{"m", str(o.m)},
                       {"window", str(o.window)},
                       {"w", str(o.w)},
                       {"level", str(o.level)},
                       {"seed", str(o.seed)},
                       {"loops", str(o.loops)},
                       {"estimator", o.estimator},
                       {"mc-samples", str(o.mc_samples)}});
  mazery::ConditionReport report;
  auto text = scaleup_dump(o, &report);
  for (const auto& c : report.checks)
    std::cerr << "check " << c.name << ' ' << (c.pass ? "PASS" : "FAIL")
              << (c.detail.empty() ? "" : " " + c.detail) << '\n';
  write_out(o.out, text);
  return report.all_pass() ? 0 : 2;
}

int cmd_params(const Opts& o, const ConfigMap& cfg, const CLI::Option* r0_opt) {
  announce("params", {{"r0", str(o.r0)}, {"level", str(o.level)}});
  auto e = exponents_from(cfg, o, r0_opt);
  auto lp = params::level_params(e, o.level);
  std::ostringstream os;
  os.precision(10);
  os << "R=" << lp.rank_lb << "\n"
     << "R_star=" << lp.rank_star << "\n"
     << "R_hat=" << lp.rank_hat << "\n"
     << "T=" << lp.T << "\n"
     << "log2_T=" << lp.log2_T << "\n"
     << "delta=" << lp.delta << "\n"
     << "delta_star=" << lp.delta_star << "\n"
     << "f=" << lp.f << "\n"
     << "g=" << lp.g << "\n"
     << "g_prime=" << lp.g_prime << "\n"
     << "lambda1=" << lp.lambda1 << "\n"
     << "lambda2=" << lp.lambda2 << "\n"
     << "L1=" << lp.len1 << "\n"
     << "L2=" << lp.len2 << "\n"
     << "L3=" << lp.len3 << "\n"
     << "w=" << lp.w << "\n"
     << "sigma=" << lp.sigma << "\n"
     << "q=" << lp.q << "\n"
     << "p_bar=" << lp.p_bar << "\n"
     << "tau_bar=" << e.tau_bar() << "\n"
     << "overflow_level=" << lp.overflow_level << "\n";
  auto mc = params::min_colors(e);
  os << "min_colors_bound=" << mc.bound << "\n"
     << "min_colors_exact=" << (mc.overflow ? str(std::string("overflow"))
                                            : str(mc.exact))
     << "\n";
  write_out(o.out, os.str());
  return 0;
}

int cmd_check_inequalities(const Opts& o, const ConfigMap& cfg,
                           const CLI::Option* r0_opt) {
  announce("check-inequalities", {{"r0", str(o.r0)}});
  auto e = exponents_from(cfg, o, r0_opt);
  auto report = params::check_inequalities(e);
  std::ostringstream os;
  for (const auto& c : report.checks)
    os << c.name << ' ' << (c.pass ? "PASS" : "FAIL")
       << (c.detail.empty() ? "" : " " + c.detail) << '\n';
  write_out(o.out, os.str());
  return report.all_pass() ? 0 : 1;
}

int cmd_verify(const Opts& o) {
  announce("verify", {{"input", o.input},
                      {"m", str(o.m)},
                      {"n", str(o.n)},
                      {"window", str(o.window)},
                      {"seed", str(o.seed)}});
  std::ifstream in(o.input);
  if (!in) throw InvalidParameter("cannot read input file: " + o.input);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (text.rfind("mazery level=", 0) == 0) {
    // A dump is verified by reproducing it from the run parameters.
    auto fresh = scaleup_dump(o, nullptr);
    const bool ok = fresh == text;
    std::cerr << "mazery dump " << (ok ? "PASS" : "FAIL") << '\n';
    return ok ? 0 : 2;
  }
  std::istringstream is(text);
  std::string l0, l1;
  if (!std::getline(is, l0) || !std::getline(is, l1))
    throw InvalidParameter("schedule file needs two lines of delays");
  Schedule sched;
  auto read_line = [](const std::string& line, std::vector<long>& vec) {
    std::istringstream ls(line);
    long v;
    while (ls >> v) vec.push_back(v);
  };
  read_line(l0, sched.t0);
  read_line(l1, sched.t1);
  bool ok = !sched.t0.empty() && !sched.t1.empty() && sched.t0[0] == 0 &&
            sched.t1[0] == 0;
  for (auto* vec : {&sched.t0, &sched.t1})
    for (std::size_t i = 1; ok && i < vec->size(); ++i)
      ok = (*vec)[i] > (*vec)[i - 1];
  if (ok) {
    auto x = gen_walk(o.m, static_cast<std::size_t>(o.n + 1), o.loops,
                      RngStream(o.seed, 0));
    auto y = gen_walk(o.m, static_cast<std::size_t>(o.n + 1), o.loops,
                      RngStream(o.seed, 1));
    ok = verify_no_collision(x, y, sched);
  }
  std::cerr << "schedule " << (ok ? "PASS" : "FAIL") << '\n';
  return ok ? 0 : 2;
}

int cmd_diagnostics(const Opts& o) {
  announce("diagnostics", {{"m", str(o.m)},
                           {"window", str(o.window)},
                           {"w", str(o.w)},
                           {"trials", str(o.trials)},
                           {"seed", str(o.seed)}});
  auto M = build_base(o);
  auto lines = mazery::probability_diagnostics(M, o.trials, RngStream(o.seed, 0xd));
  std::ostringstream os;
  os.precision(6);
  for (const auto& d : lines)
    os << d.name << " estimate=" << d.estimate << " ci=[" << d.lo << ','
       << d.hi << "] bound=" << d.bound << ' ' << d.verdict << '\n';
  write_out(o.out, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"demon-lab: clairvoyant demon laboratory"};
  app.require_subcommand(0, 1);
  Opts o;
  if (const char* env = std::getenv("DEMON_LAB_SEED"))
    from_string(std::string(env), o.seed, "DEMON_LAB_SEED");

  auto* om = app.add_option("--m", o.m, "number of colors");
  auto* op = app.add_option("--p", o.p, "bit probability (comma list)");
  auto* on = app.add_option("--n", o.n, "square size / sequence horizon");
  auto* onl = app.add_option("--n-list", o.n_list, "comma list of n values");
  auto* ot = app.add_option("--trials", o.trials, "Monte Carlo trials");
  auto* os_ = app.add_option("--seed", o.seed, "master seed");
  auto* ol = app.add_flag("--loops", o.loops, "allow the walk to stand still");
  auto* oh = app.add_option("--horizon", o.horizon, "sweep horizon");
  auto* or0 = app.add_option("--r0", o.r0, "base rank R0");
  auto* olv = app.add_option("--level", o.level, "parameter / mazery level");
  app.add_option("--config", o.config, "key=value config file");
  auto* oo = app.add_option("--out", o.out, "output path (default stdout)");
  auto* oth = app.add_option("--threads", o.threads, "worker cap, 0 = cores");
  auto* ow = app.add_option("--window", o.window, "mazery window size");
  auto* oe = app.add_option("--estimator", o.estimator, "exact or mc");
  auto* omc = app.add_option("--mc-samples", o.mc_samples, "Monte Carlo samples");

  auto* sim = app.add_subcommand("simulate", "escape frequency curves");
  auto* bin = app.add_subcommand("binary", "binary-variant p sweep");
  auto* sch = app.add_subcommand("schedule", "extract and emit a delay schedule");
  auto* scu = app.add_subcommand("scaleup", "toy mazery scale-up with checks");
  auto* par = app.add_subcommand("params", "evaluate the level parameters");
  auto* chk = app.add_subcommand("check-inequalities", "exponent battery");
  auto* ver = app.add_subcommand("verify", "re-check a schedule or mazery dump");
  auto* dia = app.add_subcommand("diagnostics", "probability diagnostics");
  ver->add_option("input", o.input, "schedule or dump file")->required();
  for (auto* s : {sim, bin, sch, scu, par, chk, ver, dia}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    ConfigMap cfg;
    if (!o.config.empty()) cfg = load_config(o.config);
    merge(cfg, om, "m", o.m);
    merge(cfg, op, "p", o.p);
    merge(cfg, on, "n", o.n);
    merge(cfg, onl, "n_list", o.n_list);
    merge(cfg, ot, "trials", o.trials);
    merge(cfg, os_, "seed", o.seed);
    merge(cfg, ol, "loops", o.loops);
    merge(cfg, oh, "horizon", o.horizon);
    merge(cfg, or0, "r0", o.r0);
    merge(cfg, olv, "level", o.level);
    merge(cfg, oo, "out", o.out);
    merge(cfg, oth, "threads", o.threads);
    merge(cfg, ow, "window", o.window);
    merge(cfg, oe, "estimator", o.estimator);
    merge(cfg, omc, "mc_samples", o.mc_samples);
    merge(cfg, nullptr, "w", o.w);

    if (sim->parsed()) return cmd_simulate(o);
    if (bin->parsed()) return cmd_binary(o);
    if (sch->parsed()) return cmd_schedule(o);
    if (scu->parsed()) return cmd_scaleup(o);
    if (par->parsed()) return cmd_params(o, cfg, or0);
    if (chk->parsed()) return cmd_check_inequalities(o, cfg, or0);
    if (ver->parsed()) return cmd_verify(o);
    if (dia->parsed()) return cmd_diagnostics(o);
    std::cerr << app.help();
    return 1;
  } catch (const InvalidParameter& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
