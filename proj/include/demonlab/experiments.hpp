#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "demonlab/percolation.hpp"
#include "demonlab/sequences.hpp"

namespace demonlab::experiments {

struct CurvePoint {
  double m_or_p = 0;
  long n = 0;
  long trials = 0;
  long successes = 0;
  double estimate = 0;
  double std_error = 0;
  double ci_low = 0;
  double ci_high = 0;
};

struct TailFit {
  double exponent = 0;   // slope of the regression
  double intercept = 0;
  double r_squared = 0;
  long points_used = 0;
};

// Escape frequency curves over n_list (ascending). Each trial draws a fresh
// walk pair from the per-trial stream pair (2*trial, 2*trial+1) and runs one
// escape record at max(n_list); aggregation is exact and independent of the
// thread count.
std::vector<CurvePoint> blocking_curve(int m, const std::vector<long>& n_list,
                                       long trials, std::uint64_t master_seed,
                                       bool loops, int threads = 0);

// Escape frequency at the horizon for each m.
std::vector<CurvePoint> sweep_m(const std::vector<int>& ms, long horizon,
                                long trials, std::uint64_t master_seed,
                                bool loops, int threads = 0);

// Binary-variant compatibility frequency at the horizon for each p.
std::vector<CurvePoint> sweep_p(const std::vector<double>& ps, long horizon,
                                long trials, std::uint64_t master_seed,
                                int threads = 0);

// First-blocking mass q_n = p_escape(prev n) - p_escape(n), common random
// numbers across the curve.
std::vector<std::pair<double, double>> first_blocking_mass(
    const std::vector<CurvePoint>& curve);

// Least squares of log q against log n (power law) or against n
// (exponential), over strictly positive masses; needs at least 3 points.
TailFit fit_power_law(const std::vector<std::pair<double, double>>& mass);
TailFit fit_exponential(const std::vector<std::pair<double, double>>& mass);

// Both fits side by side as plain-text key=value lines.
std::string fit_report(const std::vector<std::pair<double, double>>& mass);

// CSV with schema kind,m_or_p,n,trials,successes,estimate,ci_low,ci_high,seed.
std::string to_csv(const std::string& kind, const std::vector<CurvePoint>& pts,
                   std::uint64_t seed);

}  // namespace demonlab::experiments
