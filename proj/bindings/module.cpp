// Python bindings for the demonlab core.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "demonlab/experiments.hpp"
#include "demonlab/mazery.hpp"
#include "demonlab/params.hpp"
#include "demonlab/scheduling.hpp"

namespace py = pybind11;
using namespace demonlab;

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "clairvoyant demon laboratory";

  py::register_exception<InvalidParameter>(mod, "InvalidParameter",
                                           PyExc_ValueError);

  py::class_<ColorSequence>(mod, "ColorSequence")
      .def(py::init([](int m, std::vector<int> values, bool loops) {
             ColorSequence s;
             s.m = m;
             s.loops = loops;
             s.values = std::move(values);
             return s;
           }),
           py::arg("m"), py::arg("values"), py::arg("loops") = false)
      .def_readonly("m", &ColorSequence::m)
      .def_readonly("loops", &ColorSequence::loops)
      .def_readonly("values", &ColorSequence::values)
      .def("__len__", &ColorSequence::size)
      .def("__getitem__",
           [](const ColorSequence& s, std::size_t i) {
             if (i >= s.size()) throw py::index_error();
             return s[i];
           });

  py::class_<BitSequence>(mod, "BitSequence")
      .def_readonly("p", &BitSequence::p)
      .def_property_readonly(
          "values",
          [](const BitSequence& s) {
            return std::vector<int>(s.values.begin(), s.values.end());
          })
      .def("__len__", &BitSequence::size)
      .def("__getitem__",
           [](const BitSequence& s, std::size_t i) {
             if (i >= s.size()) throw py::index_error();
             return s[i];
           });

  mod.def("gen_walk",
          [](int m, std::size_t n, bool loops, std::uint64_t seed,
             std::uint64_t stream) {
            return gen_walk(m, n, loops, RngStream(seed, stream));
          },
          py::arg("m"), py::arg("n"), py::arg("loops") = false,
          py::arg("seed") = 0, py::arg("stream") = 0);
  mod.def("gen_bernoulli",
          [](double p, std::size_t n, std::uint64_t seed, std::uint64_t stream) {
            return gen_bernoulli(p, n, RngStream(seed, stream));
          },
          py::arg("p"), py::arg("n"), py::arg("seed") = 0,
          py::arg("stream") = 0);

  py::class_<ReachSet>(mod, "ReachSet")
      .def_property_readonly("n", &ReachSet::n)
      .def("reach", &ReachSet::reach)
      .def("open", &ReachSet::open)
      .def("frontier", &ReachSet::frontier);

  mod.def("reach_set", &reach_set, py::arg("x"), py::arg("y"), py::arg("n"));
  mod.def("escape_record",
          [](const ColorSequence& x, const ColorSequence& y, long n_max) {
            auto rec = escape_record(x, y, n_max);
            std::vector<bool> out;
            for (long n = 1; n <= n_max; ++n) out.push_back(rec.escape(n));
            return out;
          },
          py::arg("x"), py::arg("y"), py::arg("n_max"),
          "escape flags for n = 1..n_max");
  mod.def("binary_compatible", &binary_compatible, py::arg("z0"), py::arg("z1"),
          py::arg("n"));

  py::class_<Schedule>(mod, "Schedule")
      .def_readonly("t0", &Schedule::t0)
      .def_readonly("t1", &Schedule::t1);

  mod.def("extract_schedule",
          [](const ColorSequence& x, const ColorSequence& y, long n) {
            return path_to_schedule(extract_path(reach_set(x, y, n)));
          },
          py::arg("x"), py::arg("y"), py::arg("n"));
  mod.def("verify_no_collision", &verify_no_collision, py::arg("z0"),
          py::arg("z1"), py::arg("schedule"));

  py::class_<params::ExponentSet>(mod, "ExponentSet")
      .def(py::init<>())
      .def_readwrite("delta", &params::ExponentSet::delta)
      .def_readwrite("gamma", &params::ExponentSet::gamma)
      .def_readwrite("phi", &params::ExponentSet::phi)
      .def_readwrite("tau", &params::ExponentSet::tau)
      .def_readwrite("tau_prime", &params::ExponentSet::tau_prime)
      .def_readwrite("omega", &params::ExponentSet::omega)
      .def_readwrite("chi", &params::ExponentSet::chi)
      .def_readwrite("lam", &params::ExponentSet::lambda)
      .def_readwrite("r0", &params::ExponentSet::r0)
      .def_readwrite("paper_faithful", &params::ExponentSet::paper_faithful)
      .def("tau_bar", &params::ExponentSet::tau_bar);

  py::class_<params::LevelParams>(mod, "LevelParams")
      .def_readonly("level", &params::LevelParams::level)
      .def_readonly("rank_lb", &params::LevelParams::rank_lb)
      .def_readonly("rank_star", &params::LevelParams::rank_star)
      .def_readonly("rank_hat", &params::LevelParams::rank_hat)
      .def_readonly("delta", &params::LevelParams::delta)
      .def_readonly("delta_star", &params::LevelParams::delta_star)
      .def_readonly("f", &params::LevelParams::f)
      .def_readonly("g", &params::LevelParams::g)
      .def_readonly("w", &params::LevelParams::w)
      .def_readonly("sigma", &params::LevelParams::sigma)
      .def_readonly("q", &params::LevelParams::q)
      .def_readonly("T", &params::LevelParams::T)
      .def_readonly("log2_T", &params::LevelParams::log2_T)
      .def_readonly("overflow_level", &params::LevelParams::overflow_level);

  mod.def("level_params", &params::level_params, py::arg("exps"), py::arg("k"),
          py::arg("sigma1") = 0.0, py::arg("q1") = 0.05);
  mod.def("toy_params", &params::toy_params, py::arg("delta"), py::arg("f"),
          py::arg("g"), py::arg("w"), py::arg("q"), py::arg("rank_lb"),
          py::arg("sigma"), py::arg("delta_star"), py::arg("exps"));
  mod.def("check_inequalities", [](const params::ExponentSet& e) {
    auto rep = params::check_inequalities(e);
    std::vector<std::tuple<std::string, bool, std::string>> out;
    for (const auto& c : rep.checks) out.push_back({c.name, c.pass, c.detail});
    return out;
  });
  mod.def("min_colors", [](const params::ExponentSet& e) {
    auto mc = params::min_colors(e);
    return std::make_tuple(mc.bound, mc.exact, mc.overflow);
  });
  mod.def("distance_classes", &params::distance_classes, py::arg("exps"),
          py::arg("count"));

  py::class_<mazery::Mazery>(mod, "Mazery")
      .def_readonly("level", &mazery::Mazery::level)
      .def_readonly("m", &mazery::Mazery::m)
      .def_readonly("lo", &mazery::Mazery::lo)
      .def_readonly("hi", &mazery::Mazery::hi)
      .def_property_readonly("n_traps",
                             [](const mazery::Mazery& M) { return M.traps.size(); })
      .def("n_walls",
           [](const mazery::Mazery& M, int dir) {
             return M.walls(static_cast<mazery::Dir>(dir)).size();
           },
           py::arg("dir"))
      .def("dump", [](const mazery::Mazery& M) { return mazery::dump(M); });

  mod.def("base_mazery",
          [](const ColorSequence& x, const ColorSequence& y, long window,
             double w) { return mazery::base_mazery(x, y, window, w); },
          py::arg("x"), py::arg("y"), py::arg("window"), py::arg("w"));
  mod.def("scale_up",
          [](const mazery::Mazery& M, const params::LevelParams& next,
             std::uint64_t seed, bool monte_carlo, long mc_samples) {
            mazery::CondProbEstimator est;
            est.master_seed = seed;
            est.force_monte_carlo = monte_carlo;
            est.mc_samples = mc_samples;
            return mazery::scale_up(M, est, next);
          },
          py::arg("mazery"), py::arg("next"), py::arg("seed") = 0,
          py::arg("monte_carlo") = false, py::arg("mc_samples") = 4000);
  mod.def("check_conditions",
          [](const mazery::Mazery& M, std::uint64_t seed) {
            auto rep = mazery::check_conditions(M, RngStream(seed, 0xc));
            std::vector<std::tuple<std::string, bool, std::string>> out;
            for (const auto& c : rep.checks)
              out.push_back({c.name, c.pass, c.detail});
            return out;
          },
          py::arg("mazery"), py::arg("seed") = 0);

  py::class_<experiments::CurvePoint>(mod, "CurvePoint")
      .def_readonly("m_or_p", &experiments::CurvePoint::m_or_p)
      .def_readonly("n", &experiments::CurvePoint::n)
      .def_readonly("trials", &experiments::CurvePoint::trials)
      .def_readonly("successes", &experiments::CurvePoint::successes)
      .def_readonly("estimate", &experiments::CurvePoint::estimate)
      .def_readonly("ci_low", &experiments::CurvePoint::ci_low)
      .def_readonly("ci_high", &experiments::CurvePoint::ci_high);

  py::class_<experiments::TailFit>(mod, "TailFit")
      .def_readonly("exponent", &experiments::TailFit::exponent)
      .def_readonly("intercept", &experiments::TailFit::intercept)
      .def_readonly("r_squared", &experiments::TailFit::r_squared)
      .def_readonly("points_used", &experiments::TailFit::points_used);

  mod.def("blocking_curve", &experiments::blocking_curve, py::arg("m"),
          py::arg("n_list"), py::arg("trials"), py::arg("seed"),
          py::arg("loops") = false, py::arg("threads") = 0);
  mod.def("sweep_p", &experiments::sweep_p, py::arg("ps"), py::arg("horizon"),
          py::arg("trials"), py::arg("seed"), py::arg("threads") = 0);
  mod.def("first_blocking_mass", &experiments::first_blocking_mass);
  mod.def("fit_power_law", &experiments::fit_power_law);
  mod.def("fit_exponential", &experiments::fit_exponential);
  mod.def("to_csv", &experiments::to_csv, py::arg("kind"), py::arg("points"),
          py::arg("seed"));
}
