#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "irsfd/bench.hpp"
#include "irsfd/cli.hpp"
#include "irsfd/io.hpp"
#include "irsfd/metrics.hpp"
#include "irsfd/mm.hpp"
#include "irsfd/socp.hpp"

namespace py = pybind11;
using namespace irsfd;

namespace {

// Dictionaries cross the boundary as JSON text; the Python wrapper handles
// the conversion.
struct Instance {
  SystemConfig cfg;
  Geometry geo;
  ChannelSet ch;
  BeamState init;
};

Instance make_instance(const std::string& cfg_json, const std::string& geo_json,
                       std::optional<std::uint64_t> seed) {
  Instance in;
  in.cfg = config_from_json(parse_json_text(cfg_json, "config"));
  in.geo = geometry_from_json(parse_json_text(geo_json, "geometry"));
  validate(in.cfg);
  const std::uint64_t s = seed.value_or(in.cfg.seed);
  Rng rng(s);
  if (in.geo.user_xy.empty())
    in.geo.user_xy = random_geometry(in.cfg.n_users, in.geo.irs_xy[0], rng).user_xy;
  validate(in.geo, in.cfg.n_users);
  in.ch = generate_channels(in.cfg, in.geo, rng);
  Rng init_rng(derive_seed(s, {1}));
  in.init = init_state(in.cfg, init_rng);
  return in;
}

BeamState state_of(const Instance& in, const std::optional<CMat>& f,
                   const std::optional<CVec>& phi) {
  return {f.value_or(in.init.f), phi.value_or(in.init.phi)};
}

py::dict report_dict(const RateReport& r) {
  py::dict d;
  d["gamma_d"] = r.gamma_d;
  d["gamma_u"] = r.gamma_u;
  d["rate_d"] = r.rate_d;
  d["rate_u"] = r.rate_u;
  d["wmr"] = r.wmr;
  return d;
}

}  // namespace

PYBIND11_MODULE(_irsfd, m) {
  m.doc() = "Joint precoder and IRS phase optimization for full-duplex max-min weighted rate";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  m.def("default_config_json", [] { return to_json(default_config()).dump(); });

  py::class_<Instance>(m, "Instance")
      .def(py::init(&make_instance), py::arg("config_json") = "{}",
           py::arg("geometry_json") = "{}", py::arg("seed") = py::none())
      .def_property_readonly("config_json", [](const Instance& i) { return to_json(i.cfg).dump(); })
      .def_property_readonly("geometry_json", [](const Instance& i) { return to_json(i.geo).dump(); })
      .def_property_readonly("g_t", [](const Instance& i) { return i.ch.g_t; })
      .def_property_readonly("g_r", [](const Instance& i) { return i.ch.g_r; })
      .def_property_readonly("h_t", [](const Instance& i) { return i.ch.h_t; })
      .def_property_readonly("h_r", [](const Instance& i) { return i.ch.h_r; })
      .def_property_readonly("init_f", [](const Instance& i) { return i.init.f; })
      .def_property_readonly("init_phi", [](const Instance& i) { return i.init.phi; });

  m.def(
      "rate_report",
      [](const Instance& in, std::optional<CMat> f, std::optional<CVec> phi) {
        const BeamState s = state_of(in, f, phi);
        return report_dict(rate_report(s, optimal_aux(s, in.ch, in.cfg), in.ch, in.cfg));
      },
      py::arg("instance"), py::arg("f") = py::none(), py::arg("phi") = py::none());

  m.def(
      "run",
      [](const std::string& scheme, const Instance& in, std::optional<CMat> f,
         std::optional<CVec> phi) {
        const Scheme sch = parse_scheme(scheme);
        RunTrace tr;
        {
          py::gil_scoped_release release;
          tr = run_scheme_trace(sch, in.cfg, in.ch, state_of(in, f, phi));
        }
        py::dict d;
        d["objective"] = tr.objective;
        d["mu_path"] = tr.mu_path;
        d["iters"] = tr.iters;
        d["converged"] = tr.converged;
        d["wall_time_s"] = tr.wall_time;
        d["f"] = tr.final.f;
        d["phi"] = tr.final.phi;
        return d;
      },
      py::arg("scheme"), py::arg("instance"), py::arg("f") = py::none(),
      py::arg("phi") = py::none());

  m.def(
      "oracle",
      [](const Instance& in, int grid) {
        py::gil_scoped_release release;
        return brute_force_oracle(in.cfg, in.ch, grid);
      },
      py::arg("instance"), py::arg("grid") = 32);

  m.def(
      "sweep_json",
      [](const std::string& spec_json, int threads) {
        const SweepSpec spec = sweep_from_json(parse_json_text(spec_json, "sweep"));
        SweepResult res;
        {
          py::gil_scoped_release release;
          res = run_sweep(spec, threads);
        }
        return to_json(res).dump();
      },
      py::arg("spec_json"), py::arg("threads") = 1);

  m.def(
      "solve_subproblem_json",
      [](const std::string& sub_json, double tol) {
        const SolveReport r = solve_subproblem(subproblem_from_json(parse_json_text(sub_json, "subproblem")), tol);
        py::dict d;
        d["x"] = r.x_opt;
        d["obj"] = r.obj;
        d["delta"] = r.delta;
        d["kkt_residual"] = r.kkt_residual;
        d["duality_gap"] = r.duality_gap;
        d["iterations"] = r.iterations;
        d["kept_incumbent"] = r.kept_incumbent;
        d["duals"] = r.duals;
        return d;
      },
      py::arg("subproblem_json"), py::arg("tol") = 1e-7);

  m.def("smoothed_min", &smoothed_min, py::arg("h"), py::arg("mu"));
  m.def("quantize_phases_2bit", &quantize_phases_2bit, py::arg("phi"));

  m.def(
      "cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "irsfd");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
