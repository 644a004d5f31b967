#pragma once

#include <string>
#include <vector>

namespace demonlab::params {

// Scale-up exponents and constants with their published defaults.
struct ExponentSet {
  double delta = 0.15;
  double gamma = 0.2;
  double phi = 0.25;       // written varphi in most treatments
  double tau = 1.75;
  double tau_prime = 2.5;
  double omega = 4.5;
  double chi = 0.015;
  double lambda = 1.4142135623730951;  // sqrt(2)
  double lambda_cap = 500.0;           // Lambda, slope-constraint constant
  double hole_h = 12.0;                // H, channel constant
  double c1 = 1.0;
  double c2 = 0.29;  // below 1 - 1/lambda
  double c3 = 1.0;
  double r0 = 4.0;   // base rank
  bool paper_faithful = true;  // enforce tau = 2 - phi

  double tau_bar() const { return 2.0 * tau / (tau - 1.0); }
  double log2_lambda() const;
};

// Per-level numeric schedule. Large quantities are tracked in log2 so the
// sigma/q recursions stay meaningful long after the linear values leave
// double range; linear fields are +inf past that point.
struct LevelParams {
  int level = 1;
  double rank_lb = 0;      // R
  double rank_star = 0;    // R* = tau R (light/heavy threshold)
  double rank_hat = 0;     // emerging rank = tau' R
  double log2_T = 0;
  double T = 0;
  double delta = 0;        // window scale
  double delta_star = 0;   // next-level scale, Delta^tau
  double f = 0;
  double g = 0;
  double g_prime = 0;      // 2.2 g
  double lambda1 = 0;      // 7 Delta
  double lambda2 = 0;      // g'
  double len1 = 0, len2 = 0, len3 = 0;  // L1=4*lambda1, L2=4*lambda2, L3=g
  double w = 0;
  double sigma = 0;
  double q = 0;
  double p_bar = 0;        // T^-1
  int overflow_level = 0;  // first level whose linear values overflow; 0 = none
};

// Evaluate the level-k schedule (k >= 1) from the base recursions
// sigma_1 = sigma1, q_1 = q1.
LevelParams level_params(const ExponentSet& exps, int k, double sigma1 = 0.0,
                         double q1 = 0.05);

// Direct construction for desk-scale experiments; validity is relaxed to
// Delta <= g <= f, 3f <= Delta*, sigma < 0.5 and the compound-rank bound
// R* <= 2R - log_lambda f.
LevelParams toy_params(double delta, double f, double g, double w, double q,
                       double rank_lb, double sigma, double delta_star,
                       const ExponentSet& exps);

struct InequalityCheck {
  std::string name;
  std::string detail;
  bool pass = false;
};

struct InequalityReport {
  std::vector<InequalityCheck> checks;
  bool all_pass() const;
};

// The full exponent-inequality battery.
InequalityReport check_inequalities(const ExponentSet& exps);

struct MinColors {
  double bound_value = 0;    // 2 lambda^{R0 omega tau}
  long long bound = 0;       // rounded up
  double exact_value = 0;    // 1/w1 + 1
  long long exact = 0;       // ceil
  bool overflow = false;
};

MinColors min_colors(const ExponentSet& exps);

// ceil(1/w1 + 1) for an explicitly supplied base-level w1.
long long min_colors_from_w(double w1);

struct RankBounds {
  double rank_lb = 0;    // R_k
  double rank_ub = 0;    // tau_bar * R_k
  int lifetime = 0;      // ceil(log_tau tau_bar)
};

RankBounds rank_bounds(const ExponentSet& exps, int k);

// Wall probability upper bound p(r) = c2 r^-c1 lambda^-r.
double wall_prob_bound(const ExponentSet& exps, double r);

// Hole probability lower bound h(r) = c3 lambda^{-chi r}.
double hole_prob_bound(const ExponentSet& exps, double r);

// Distance classes d_0=0, d_1=1, d_i = ceil(lambda^i) for i >= 2.
std::vector<long long> distance_classes(const ExponentSet& exps, int count);

// Index i with d <= f such that d in [d_i, d_{i+1}); -1 if d > f or d < 0.
int distance_class_of(const ExponentSet& exps, double d, double f);

}  // namespace demonlab::params
