#include "demonlab/params.hpp"

#include <cmath>
#include <limits>

#include "demonlab/sequences.hpp"

namespace demonlab::params {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate(const ExponentSet& e) {
  if (e.r0 <= 1) throw InvalidParameter("params: R0 must exceed 1");
  if (e.lambda <= 1) throw InvalidParameter("params: lambda must exceed 1");
  if (e.tau <= 1) throw InvalidParameter("params: tau must exceed 1");
  if (e.paper_faithful && std::abs(e.tau - (2.0 - e.phi)) > 1e-12)
    throw InvalidParameter("params: faithful mode requires tau = 2 - phi");
}

// exp2 with a flag for leaving double range.
double lin(double log2_v, bool& overflow) {
  double v = std::exp2(log2_v);
  if (std::isinf(v)) overflow = true;
  return v;
}

}  // namespace

double ExponentSet::log2_lambda() const { return std::log2(lambda); }

LevelParams level_params(const ExponentSet& exps, int k, double sigma1, double q1) {
  validate(exps);
  if (k < 1) throw InvalidParameter("level_params: level must be >= 1");

  LevelParams lp;
  lp.level = k;
  double sigma = sigma1, q = q1;
  const double l2l = exps.log2_lambda();
  for (int lvl = 1; lvl < k; ++lvl) {
    const double log2_T = exps.r0 * std::pow(exps.tau, lvl) * l2l;
    // Lambda g/f = Lambda T^{gamma-phi} and Delta* pbar = T^{tau delta - 1}
    // both shrink with T, so the recursions stay finite.
    sigma += exps.lambda_cap * std::exp2((exps.gamma - exps.phi) * log2_T);
    q += std::exp2((exps.tau * exps.delta - 1.0) * log2_T);
  }
  lp.sigma = sigma;
  lp.q = q;

  lp.rank_lb = exps.r0 * std::pow(exps.tau, k);
  lp.rank_star = exps.tau * lp.rank_lb;
  lp.rank_hat = exps.tau_prime * lp.rank_lb;
  lp.log2_T = lp.rank_lb * l2l;

  bool over = false;
  lp.T = lin(lp.log2_T, over);
  lp.delta = lin(exps.delta * lp.log2_T, over);
  lp.delta_star = lin(exps.tau * exps.delta * lp.log2_T, over);
  lp.f = lin(exps.phi * lp.log2_T, over);
  lp.g = lin(exps.gamma * lp.log2_T, over);
  lp.g_prime = 2.2 * lp.g;
  lp.lambda1 = 7.0 * lp.delta;
  lp.lambda2 = lp.g_prime;
  lp.len1 = 4.0 * lp.lambda1;
  lp.len2 = 4.0 * lp.lambda2;
  lp.len3 = lp.g;
  lp.w = std::exp2(-exps.omega * lp.log2_T);
  lp.p_bar = std::exp2(-lp.log2_T);
  if (over) {
    // Find the first level at which T itself leaves double range.
    int lvl = 1;
    while (exps.r0 * std::pow(exps.tau, lvl) * l2l < 1024.0) ++lvl;
    lp.overflow_level = lvl;
  }
  return lp;
}

LevelParams toy_params(double delta, double f, double g, double w, double q,
                       double rank_lb, double sigma, double delta_star,
                       const ExponentSet& exps) {
  if (!(delta <= g && g <= f))
    throw InvalidParameter("toy_params: need Delta <= g <= f");
  if (!(3.0 * f <= delta_star))
    throw InvalidParameter("toy_params: need 3f <= Delta*");
  if (!(sigma < 0.5)) throw InvalidParameter("toy_params: need sigma < 0.5");
  const double rank_star = exps.tau * rank_lb;
  if (rank_star > 2.0 * rank_lb - std::log(f) / std::log(exps.lambda) + 1e-9)
    throw InvalidParameter("toy_params: need R* <= 2R - log_lambda f");

  LevelParams lp;
  lp.level = 1;
  lp.rank_lb = rank_lb;
  lp.rank_star = rank_star;
  lp.rank_hat = exps.tau_prime * rank_lb;
  lp.log2_T = rank_lb * exps.log2_lambda();
  lp.T = std::exp2(lp.log2_T);
  lp.delta = delta;
  lp.delta_star = delta_star;
  lp.f = f;
  lp.g = g;
  lp.g_prime = 2.2 * g;
  lp.lambda1 = 7.0 * delta;
  lp.lambda2 = lp.g_prime;
  lp.len1 = 4.0 * lp.lambda1;
  lp.len2 = 4.0 * lp.lambda2;
  lp.len3 = g;
  lp.w = w;
  lp.sigma = sigma;
  lp.q = q;
  lp.p_bar = 1.0 / lp.T;
  return lp;
}

bool InequalityReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

InequalityReport check_inequalities(const ExponentSet& e) {
  const double tb = e.tau_bar();
  InequalityReport rep;
  auto add = [&](const std::string& name, bool pass, const std::string& detail) {
    rep.checks.push_back({name, detail, pass});
  };
  auto num = [](double v) { return std::to_string(v); };

  add("tau < tau' < tau^2", e.tau < e.tau_prime && e.tau_prime < e.tau * e.tau,
      num(e.tau) + " < " + num(e.tau_prime) + " < " + num(e.tau * e.tau));
  add("0 < delta < gamma < phi < 1",
      0 < e.delta && e.delta < e.gamma && e.gamma < e.phi && e.phi < 1,
      num(e.delta) + " < " + num(e.gamma) + " < " + num(e.phi));
  add("tau <= 2 - phi", e.tau <= 2.0 - e.phi, num(e.tau) + " <= " + num(2.0 - e.phi));
  add("phi < tau*delta", e.phi < e.tau * e.delta,
      num(e.phi) + " < " + num(e.tau * e.delta));
  add("gamma >= (delta+phi)/2", e.gamma >= (e.delta + e.phi) / 2.0,
      num(e.gamma) + " >= " + num((e.delta + e.phi) / 2.0));
  add("4(gamma+delta) < omega(4-tau)",
      4.0 * (e.gamma + e.delta) < e.omega * (4.0 - e.tau),
      num(4.0 * (e.gamma + e.delta)) + " < " + num(e.omega * (4.0 - e.tau)));
  add("tau < 2", e.tau < 2.0, num(e.tau) + " < 2");
  add("4gamma + 6delta + tau' < omega",
      4.0 * e.gamma + 6.0 * e.delta + e.tau_prime < e.omega,
      num(4.0 * e.gamma + 6.0 * e.delta + e.tau_prime) + " < " + num(e.omega));
  add("tau(delta+1) < tau'", e.tau * (e.delta + 1.0) < e.tau_prime,
      num(e.tau * (e.delta + 1.0)) + " < " + num(e.tau_prime));
  add("tau*chi < gamma - delta", e.tau * e.chi < e.gamma - e.delta,
      num(e.tau * e.chi) + " < " + num(e.gamma - e.delta));
  add("taubar*chi < 1 - tau*delta", tb * e.chi < 1.0 - e.tau * e.delta,
      num(tb * e.chi) + " < " + num(1.0 - e.tau * e.delta));
  add("taubar*chi < omega - 2tau*delta", tb * e.chi < e.omega - 2.0 * e.tau * e.delta,
      num(tb * e.chi) + " < " + num(e.omega - 2.0 * e.tau * e.delta));
  return rep;
}

MinColors min_colors(const ExponentSet& exps) {
  validate(exps);
  MinColors mc;
  const double log2_inv_w1 = exps.r0 * exps.tau * exps.omega * exps.log2_lambda();
  mc.bound_value = 2.0 * std::exp2(log2_inv_w1);
  mc.exact_value = std::exp2(log2_inv_w1) + 1.0;
  if (std::isinf(mc.bound_value) ||
      mc.bound_value >= static_cast<double>(std::numeric_limits<long long>::max())) {
    mc.overflow = true;
    return mc;
  }
  mc.bound = static_cast<long long>(std::ceil(mc.bound_value));
  mc.exact = static_cast<long long>(std::ceil(mc.exact_value));
  return mc;
}

long long min_colors_from_w(double w1) {
  if (!(w1 > 0 && w1 <= 1)) throw InvalidParameter("min_colors_from_w: w1 in (0,1]");
  return static_cast<long long>(std::ceil(1.0 / w1 + 1.0));
}

RankBounds rank_bounds(const ExponentSet& exps, int k) {
  if (k < 1) throw InvalidParameter("rank_bounds: level must be >= 1");
  RankBounds rb;
  rb.rank_lb = exps.r0 * std::pow(exps.tau, k);
  rb.rank_ub = exps.tau_bar() * rb.rank_lb;
  rb.lifetime = static_cast<int>(std::ceil(std::log(exps.tau_bar()) / std::log(exps.tau)));
  return rb;
}

double wall_prob_bound(const ExponentSet& exps, double r) {
  if (r <= 0) throw InvalidParameter("wall_prob_bound: rank must be positive");
  return exps.c2 * std::pow(r, -exps.c1) * std::pow(exps.lambda, -r);
}

double hole_prob_bound(const ExponentSet& exps, double r) {
  if (r <= 0) throw InvalidParameter("hole_prob_bound: rank must be positive");
  return exps.c3 * std::pow(exps.lambda, -exps.chi * r);
}

std::vector<long long> distance_classes(const ExponentSet& exps, int count) {
  if (count < 0 || count > 128)
    throw InvalidParameter("distance_classes: table length in [0,128]");
  std::vector<long long> d;
  d.reserve(static_cast<std::size_t>(count));
  const double l2l = exps.log2_lambda();
  for (int i = 0; i < count; ++i) {
    if (i == 0) {
      d.push_back(0);
    } else if (i == 1) {
      d.push_back(1);
    } else {
      const double v = std::exp2(i * l2l);
      const double r = std::round(v);
      // lambda^i can land a hair above an exact integer; treat it as exact.
      const double cv = std::abs(v - r) < 1e-9 * r ? r : std::ceil(v);
      if (cv >= 9.2e18)
        throw InvalidParameter("distance_classes: entry exceeds integer range");
      d.push_back(static_cast<long long>(cv));
    }
  }
  return d;
}

int distance_class_of(const ExponentSet& exps, double d, double f) {
  if (d < 0 || d > f) return -1;
  auto table = distance_classes(exps, 120);
  for (int i = 0; i + 1 < static_cast<int>(table.size()); ++i)
    if (d >= static_cast<double>(table[static_cast<std::size_t>(i)]) &&
        d < static_cast<double>(table[static_cast<std::size_t>(i) + 1]))
      return i;
  return -1;
}

}  // namespace demonlab::params
