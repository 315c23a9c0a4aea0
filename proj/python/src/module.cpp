#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "slfv/cli.hpp"
#include "slfv/error.hpp"
#include "slfv/geometry.hpp"
#include "slfv/model.hpp"
#include "slfv/montecarlo.hpp"
#include "slfv/theory.hpp"

namespace py = pybind11;
using namespace slfv;

namespace {

ParentCountLaw law_from(const py::object& obj) {
  if (py::isinstance<py::int_>(obj)) return ParentCountLaw::point_mass(obj.cast<unsigned>());
  if (py::isinstance<py::dict>(obj)) {
    std::vector<double> w;
    for (auto [k, v] : obj.cast<py::dict>()) {
      const auto j = py::int_(py::str(k)).cast<std::size_t>();
      if (j < 1) throw InvalidInput("parent counts start at 1");
      if (w.size() < j) w.resize(j, 0.0);
      w[j - 1] = v.cast<double>();
    }
    return ParentCountLaw(std::move(w));
  }
  return ParentCountLaw(obj.cast<std::vector<double>>());
}

EstimatorConfig estimator(std::size_t replicates, std::uint64_t seed, double horizon, std::vector<double> t_grid,
                          std::vector<double> phase2_grid, unsigned workers) {
  EstimatorConfig c;
  c.replicates = replicates;
  c.seed = seed;
  c.horizon = horizon;
  c.t_grid = std::move(t_grid);
  c.phase2_grid = std::move(phase2_grid);
  c.workers = workers;
  check_config(c);
  return c;
}

py::dict proportion(const ProportionEstimate& p) {
  py::dict d;
  d["estimate"] = p.estimate;
  d["ci_lo"] = p.ci_lo;
  d["ci_hi"] = p.ci_hi;
  d["n"] = p.n;
  d["censored"] = p.censored;
  return d;
}

py::list points(const std::vector<SurvivalPoint>& pts) {
  py::list out;
  for (const auto& pt : pts) {
    py::dict d = proportion(pt.survival);
    d["t"] = pt.t_exponent;
    d["threshold"] = pt.threshold;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_slfv, m) {
  m.doc() = "Spatial Lambda-Fleming-Viot ancestry with recombination";

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](double L, double alpha, double R_s, double R_B, double u_s, double u_B, double rho, double r,
                       py::object lambda_s, py::object lambda_B, std::optional<double> beta, bool large_events) {
             ModelParams p;
             p.side = L;
             p.alpha = alpha;
             p.small_radius = R_s;
             p.large_radius_base = R_B;
             p.small_impact = u_s;
             p.large_impact = u_B;
             p.rho = rho;
             p.recombination = r;
             p.small_parents = law_from(lambda_s);
             p.large_parents = law_from(lambda_B);
             p.beta = beta;
             p.large_events = large_events;
             return p;
           }),
           py::arg("L") = 256.0, py::arg("alpha") = 0.5, py::arg("R_s") = 1.0, py::arg("R_B") = 1.0,
           py::arg("u_s") = 0.3, py::arg("u_B") = 0.3, py::arg("rho") = 64.0, py::arg("r") = 0.1,
           py::arg("lambda_s") = py::int_(2), py::arg("lambda_B") = py::int_(2), py::arg("beta") = py::none(),
           py::arg("large_events") = true)
      .def_readwrite("L", &ModelParams::side)
      .def_readwrite("alpha", &ModelParams::alpha)
      .def_readwrite("R_s", &ModelParams::small_radius)
      .def_readwrite("R_B", &ModelParams::large_radius_base)
      .def_readwrite("u_s", &ModelParams::small_impact)
      .def_readwrite("u_B", &ModelParams::large_impact)
      .def_readwrite("rho", &ModelParams::rho)
      .def_readwrite("r", &ModelParams::recombination)
      .def_readwrite("beta", &ModelParams::beta)
      .def_readwrite("large_events", &ModelParams::large_events);

  m.def("validate", [](const ModelParams& p) {
    const auto report = validate(p);
    return py::make_tuple(report.violations, report.warnings);
  });

  m.def("derive_scales", [](const ModelParams& p) {
    const auto s = derive_scales(p);
    py::dict d;
    d["large_radius"] = s.large_radius;
    d["small_rate_per_block"] = s.small_rate_per_block;
    d["large_rate_per_block"] = s.large_rate_per_block;
    d["sigma2"] = s.sigma2;
    d["gamma_finite"] = s.gamma_finite;
    d["gamma_star"] = s.gamma_star;
    d["d_star"] = s.d_star;
    d["equilibrium_scale"] = s.equilibrium_scale;
    d["timescale_1"] = s.timescale(1.0);
    return d;
  });
  m.def("timescale", [](const ModelParams& p, double t) { return derive_scales(p).timescale(t); });

  m.def("lens_area", &lens_area, py::arg("R"), py::arg("d"));
  m.def("sigma2", &sigma2);
  m.def("gamma_finite", &gamma_finite);
  m.def("gamma_star", &gamma_star, py::arg("L"), py::arg("r"));
  m.def("d_star", &d_star);

  auto th = m.def_submodule("theory", "Closed-form laws and IBD integrals");
  th.def("single_locus_survival_phase1", &theory::single_locus_survival_phase1, py::arg("t"), py::arg("alpha"),
         py::arg("beta"));
  th.def("single_locus_survival_phase2", &theory::single_locus_survival_phase2, py::arg("t"), py::arg("alpha"),
         py::arg("beta"));
  th.def("joint_survival_fast_phase1", &theory::joint_survival_fast_phase1, py::arg("t"), py::arg("alpha"),
         py::arg("beta"));
  th.def("joint_survival_slow_phase1", &theory::joint_survival_slow_phase1, py::arg("t"), py::arg("alpha"),
         py::arg("beta"), py::arg("gamma"));
  th.def(
      "ibd_single",
      [](double beta, double theta, double L, double alpha, double c_L, bool large_events, bool full) {
        const theory::IbdModel model{L, alpha, c_L, large_events};
        return theory::ibd_single(beta, theta, model, full ? theory::IbdTerms::full : theory::IbdTerms::leading).value;
      },
      py::arg("beta"), py::arg("theta"), py::arg("L") = 1e5, py::arg("alpha") = 0.1, py::arg("c_L") = 0.01,
      py::arg("large_events") = true, py::arg("full") = false);
  th.def(
      "ibd_double",
      [](double beta, double theta1, double theta2, double gamma, double L, double alpha, double c_L,
         bool large_events) {
        const theory::IbdModel model{L, alpha, c_L, large_events};
        return theory::ibd_double(beta, theta1, theta2, gamma, model).value;
      },
      py::arg("beta"), py::arg("theta1"), py::arg("theta2"), py::arg("gamma"), py::arg("L") = 1e5,
      py::arg("alpha") = 0.1, py::arg("c_L") = 0.01, py::arg("large_events") = true);
  th.def(
      "vanishing_point",
      [](double theta, double L, double alpha, double c_L, bool large_events, double threshold) {
        const theory::IbdModel model{L, alpha, c_L, large_events};
        return theory::vanishing_point([&](double b) { return theory::ibd_decay_factor(b, theta, model); },
                                       threshold, model.effective_alpha(), 1.0);
      },
      py::arg("theta"), py::arg("L") = 1e5, py::arg("alpha") = 0.1, py::arg("c_L") = 0.01,
      py::arg("large_events") = true, py::arg("threshold") = 0.01);

  m.def(
      "estimate_survival",
      [](const ModelParams& p, const std::string& kind, std::size_t replicates, std::uint64_t seed,
         std::vector<double> t_grid, std::vector<double> phase2_grid, double horizon, unsigned workers) {
        SurvivalKind k;
        if (kind == "single") k = SurvivalKind::single;
        else if (kind == "joint_min") k = SurvivalKind::joint_min;
        else if (kind == "per_locus") k = SurvivalKind::per_locus;
        else throw InvalidInput("kind must be single, joint_min or per_locus");
        const auto c = estimator(replicates, seed, horizon, std::move(t_grid), std::move(phase2_grid), workers);
        std::vector<SurvivalCurve> curves;
        {
          py::gil_scoped_release release;
          curves = estimate_survival(k, p, c);
        }
        py::dict out;
        for (const auto& curve : curves) {
          py::dict d;
          d["points"] = points(curve.points);
          d["phase2_points"] = points(curve.phase2_points);
          out[py::str(curve.name)] = d;
        }
        return out;
      },
      py::arg("params"), py::arg("kind") = "single", py::arg("replicates") = 1000, py::arg("seed") = 1,
      py::arg("t_grid") = std::vector<double>{}, py::arg("phase2_grid") = std::vector<double>{},
      py::arg("horizon") = 0.0, py::arg("workers") = 1u);

  m.def(
      "estimate_equal_coalescence",
      [](const ModelParams& p, std::size_t replicates, std::uint64_t seed, double horizon, unsigned workers) {
        const auto c = estimator(replicates, seed, horizon, {}, {}, workers);
        ProportionEstimate e;
        {
          py::gil_scoped_release release;
          e = estimate_equal_coalescence(p, c);
        }
        return proportion(e);
      },
      py::arg("params"), py::arg("replicates") = 1000, py::arg("seed") = 1, py::arg("horizon") = 0.0,
      py::arg("workers") = 1u);

  m.def(
      "coalescence_times",
      [](const ModelParams& p, std::size_t replicates, std::uint64_t seed, double horizon, unsigned workers) {
        const auto c = estimator(replicates, seed, horizon, {}, {}, workers);
        std::vector<PairRun> runs;
        {
          py::gil_scoped_release release;
          runs = simulate_pairs(p, sampling_separation(p), c);
        }
        std::vector<double> times;
        std::vector<bool> censored;
        for (const auto& r : runs) {
          times.push_back(r.coalescence.value);
          censored.push_back(r.coalescence.censored);
        }
        return py::make_tuple(times, censored);
      },
      py::arg("params"), py::arg("replicates") = 1000, py::arg("seed") = 1, py::arg("horizon") = 0.0,
      py::arg("workers") = 1u);

  m.def(
      "pairing_distribution",
      [](const ModelParams& p, const std::string& layout, double scale, std::size_t replicates, std::uint64_t seed,
         double horizon, unsigned workers) {
        PairingLayout l;
        if (layout == "square") l = PairingLayout::square;
        else if (layout == "far_random") l = PairingLayout::far_random;
        else throw InvalidInput("layout must be square or far_random");
        const auto c = estimator(replicates, seed, horizon, {}, {}, workers);
        PairingDistribution dist;
        {
          py::gil_scoped_release release;
          dist = estimate_pairing_distribution(p, l, scale, c);
        }
        py::dict d;
        d["counts"] = dist.counts;
        d["multiple"] = dist.multiple;
        d["censored"] = dist.censored;
        d["p_uniform"] = dist.p_uniform;
        d["p_sides"] = dist.p_sides;
        d["p_diagonals"] = dist.p_diagonals;
        return d;
      },
      py::arg("params"), py::arg("layout") = "square", py::arg("scale") = 64.0, py::arg("replicates") = 1000,
      py::arg("seed") = 1, py::arg("horizon") = 0.0, py::arg("workers") = 1u);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the slfv command line in-process; returns (exit code, stdout, stderr).");
}
