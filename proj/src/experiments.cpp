#include "demonlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <thread>

namespace demonlab::experiments {

namespace {

void wilson(long k, long n, double& lo, double& hi) {
  const double z = 1.959963984540054;
  const double p = static_cast<double>(k) / n;
  const double denom = 1.0 + z * z / n;
  const double center = (p + z * z / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1 - p) / n + z * z / (4.0 * n * n)) / denom;
  lo = k == 0 ? 0.0 : std::max(0.0, center - half);
  hi = k == n ? 1.0 : std::min(1.0, center + half);
}

CurvePoint make_point(double m_or_p, long n, long trials, long successes) {
  CurvePoint pt;
  pt.m_or_p = m_or_p;
  pt.n = n;
  pt.trials = trials;
  pt.successes = successes;
  pt.estimate = static_cast<double>(successes) / trials;
  pt.std_error = std::sqrt(pt.estimate * (1 - pt.estimate) / trials);
  wilson(successes, trials, pt.ci_low, pt.ci_high);
  return pt;
}

// Runs `trials` independent trials split over threads; counter(t, counts)
// adds trial t into a per-thread tally. Partial tallies are summed in block
// order, so the result does not depend on the thread count.
std::vector<long> run_trials(
    long trials, int threads, std::size_t slots,
    const std::function<void(long, std::vector<long>&)>& counter) {
  if (trials < 1) throw InvalidParameter("trials must be positive");
  int T = threads > 0 ? threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  if (T < 1) T = 1;
  T = static_cast<int>(std::min<long>(T, trials));
  const long chunk = (trials + T - 1) / T;
  std::vector<std::vector<long>> partial(static_cast<std::size_t>(T),
                                         std::vector<long>(slots, 0));
  std::vector<std::thread> pool;
  for (int w = 0; w < T; ++w) {
    pool.emplace_back([&, w] {
      const long begin = w * chunk;
      const long end = std::min(trials, begin + chunk);
      for (long t = begin; t < end; ++t)
        counter(t, partial[static_cast<std::size_t>(w)]);
    });
  }
  for (auto& th : pool) th.join();
  std::vector<long> total(slots, 0);
  for (const auto& part : partial)
    for (std::size_t i = 0; i < slots; ++i) total[i] += part[i];
  return total;
}

TailFit regress(const std::vector<std::pair<double, double>>& pts) {
  TailFit fit;
  fit.points_used = static_cast<long>(pts.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double n = static_cast<double>(pts.size());
  const double vxx = sxx - sx * sx / n;
  const double vxy = sxy - sx * sy / n;
  const double vyy = syy - sy * sy / n;
  fit.exponent = vxy / vxx;
  fit.intercept = (sy - fit.exponent * sx) / n;
  fit.r_squared = vyy > 0 ? vxy * vxy / (vxx * vyy) : 1.0;
  return fit;
}

std::vector<std::pair<double, double>> positive_logs(
    const std::vector<std::pair<double, double>>& mass, bool log_x) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [n, q] : mass)
    if (q > 0) pts.push_back({log_x ? std::log(n) : n, std::log(q)});
  if (pts.size() < 3)
    throw InvalidParameter("tail fit: need at least 3 positive mass points");
  return pts;
}

}  // namespace

std::vector<CurvePoint> blocking_curve(int m, const std::vector<long>& n_list,
                                       long trials, std::uint64_t master_seed,
                                       bool loops, int threads) {
  if (n_list.empty()) throw InvalidParameter("blocking_curve: empty n list");
  if (!std::is_sorted(n_list.begin(), n_list.end()))
    throw InvalidParameter("blocking_curve: n list must be ascending");
  const long n_max = n_list.back();
  auto counts = run_trials(
      trials, threads, n_list.size(), [&](long t, std::vector<long>& acc) {
        auto x = gen_walk(m, static_cast<std::size_t>(n_max + 1), loops,
                          RngStream(master_seed, 2 * static_cast<std::uint64_t>(t)));
        auto y = gen_walk(m, static_cast<std::size_t>(n_max + 1), loops,
                          RngStream(master_seed,
                                    2 * static_cast<std::uint64_t>(t) + 1));
        auto rec = escape_record(x, y, n_max);
        for (std::size_t i = 0; i < n_list.size(); ++i)
          if (rec.escape(n_list[i])) ++acc[i];
      });
  std::vector<CurvePoint> out;
  for (std::size_t i = 0; i < n_list.size(); ++i)
    out.push_back(make_point(m, n_list[i], trials, counts[i]));
  return out;
}

std::vector<CurvePoint> sweep_m(const std::vector<int>& ms, long horizon,
                                long trials, std::uint64_t master_seed,
                                bool loops, int threads) {
  if (ms.empty()) throw InvalidParameter("sweep: empty value list");
  std::vector<CurvePoint> out;
  for (int m : ms) {
    auto pts = blocking_curve(m, {horizon}, trials, master_seed, loops, threads);
    out.push_back(pts.front());
  }
  return out;
}

std::vector<CurvePoint> sweep_p(const std::vector<double>& ps, long horizon,
                                long trials, std::uint64_t master_seed,
                                int threads) {
  if (ps.empty()) throw InvalidParameter("sweep: empty value list");
  std::vector<CurvePoint> out;
  for (double p : ps) {
    auto counts = run_trials(
        trials, threads, 1, [&](long t, std::vector<long>& acc) {
          auto z0 = gen_bernoulli(
              p, static_cast<std::size_t>(horizon),
              RngStream(master_seed, 2 * static_cast<std::uint64_t>(t)));
          auto z1 = gen_bernoulli(
              p, static_cast<std::size_t>(horizon),
              RngStream(master_seed, 2 * static_cast<std::uint64_t>(t) + 1));
          if (binary_compatible(z0, z1, horizon)) ++acc[0];
        });
    auto pt = make_point(p, horizon, trials, counts[0]);
    out.push_back(pt);
  }
  return out;
}

std::vector<std::pair<double, double>> first_blocking_mass(
    const std::vector<CurvePoint>& curve) {
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 1; i < curve.size(); ++i)
    out.push_back({static_cast<double>(curve[i].n),
                   curve[i - 1].estimate - curve[i].estimate});
  return out;
}

TailFit fit_power_law(const std::vector<std::pair<double, double>>& mass) {
  return regress(positive_logs(mass, true));
}

TailFit fit_exponential(const std::vector<std::pair<double, double>>& mass) {
  return regress(positive_logs(mass, false));
}

std::string fit_report(const std::vector<std::pair<double, double>>& mass) {
  std::ostringstream os;
  os.precision(10);
  auto p = fit_power_law(mass);
  auto e = fit_exponential(mass);
  os << "power_exponent=" << p.exponent << "\n"
     << "power_intercept=" << p.intercept << "\n"
     << "power_r2=" << p.r_squared << "\n"
     << "exp_rate=" << e.exponent << "\n"
     << "exp_intercept=" << e.intercept << "\n"
     << "exp_r2=" << e.r_squared << "\n"
     << "points=" << p.points_used << "\n";
  return os.str();
}

std::string to_csv(const std::string& kind, const std::vector<CurvePoint>& pts,
                   std::uint64_t seed) {
  std::ostringstream os;
  os.precision(9);
  os << "kind,m_or_p,n,trials,successes,estimate,ci_low,ci_high,seed\n";
  for (const auto& p : pts)
    os << kind << ',' << p.m_or_p << ',' << p.n << ',' << p.trials << ','
       << p.successes << ',' << p.estimate << ',' << p.ci_low << ','
       << p.ci_high << ',' << seed << "\n";
  return os.str();
}

}  // namespace demonlab::experiments
