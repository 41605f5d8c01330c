#include "irsfd/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "irsfd/bench.hpp"
#include "irsfd/io.hpp"
#include "irsfd/metrics.hpp"
#include "irsfd/socp.hpp"

namespace irsfd {

namespace {

struct RunDoc {
  SystemConfig cfg = default_config();
  Geometry geo;
};

RunDoc load_run_doc(const std::string& path) {
  RunDoc d;
  if (path.empty()) return d;
  const json j = read_json_file(path);
  if (!j.is_object()) throw ConfigError(path, "expected a JSON object");
  for (const auto& [k, v] : j.items())
    if (k != "config" && k != "geometry") throw ConfigError(k, "unknown key in run document");
  if (j.contains("config")) d.cfg = config_from_json(j.at("config"));
  if (j.contains("geometry")) d.geo = geometry_from_json(j.at("geometry"));
  return d;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

std::string trace_csv(const RunTrace& tr) {
  std::string s = "iter,wmr_nat,mu\n";
  for (std::size_t i = 0; i < tr.objective.size(); ++i) {
    s += std::to_string(i) + ',' + format_double(tr.objective[i]) + ',';
    if (i > 0 && i - 1 < tr.mu_path.size()) s += format_double(tr.mu_path[i - 1]);
    s += '\n';
  }
  return s;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Joint precoder and IRS phase optimization for max-min weighted rate"};
  app.require_subcommand(1);

  std::string config_path, out_path, format = "json", scheme_name;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  int grid = 32;
  bool timing = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--seed", seed, "64-bit seed");
    sub->add_option("--out", out_path, "output file (default: stdout)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--scheme", scheme_name, "scheme name");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  };
  CLI::App* converge = app.add_subcommand("converge", "single run with per-iteration trace");
  add_common(converge);
  converge->add_flag("--timing", timing, "include wall time (output no longer byte-stable)");
  CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep from a JSON spec");
  add_common(sweep);
  CLI::App* oracle = app.add_subcommand("oracle", "tiny-instance comparison with exhaustive search");
  add_common(oracle);
  oracle->add_option("--grid", grid, "phases per element")->check(CLI::Range(1, 64));
  CLI::App* defaults = app.add_subcommand("defaults", "print the default parameter table");
  add_common(defaults);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*defaults) {
      json j = {{"config", to_json(default_config())}, {"geometry", to_json(fixed_user_geometry(10.0))}};
      j["geometry"].erase("user_xy");
      j["units"] = {{"power", "W"}, {"distance", "m"}, {"bandwidth", "Hz"}, {"rate", "nat/s/Hz"}};
      emit(j.dump(2) + "\n", out_path, out);
      return 0;
    }

    if (*converge) {
      RunDoc d = load_run_doc(config_path);
      const std::uint64_t s = seed.value_or(d.cfg.seed);
      const Scheme sch = scheme_name.empty() ? Scheme::bcd_mm : parse_scheme(scheme_name);
      Rng rng(s);
      if (d.geo.user_xy.empty())
        d.geo.user_xy = random_geometry(d.cfg.n_users, d.geo.irs_xy[0], rng).user_xy;
      validate(d.geo, d.cfg.n_users);
      const ChannelSet ch = generate_channels(d.cfg, d.geo, rng);
      Rng init_rng(derive_seed(s, {1}));
      const BeamState init = init_state(d.cfg, init_rng);
      const RunTrace tr = run_scheme_trace(sch, d.cfg, ch, init);
      if (format == "csv") {
        emit(trace_csv(tr), out_path, out);
      } else {
        json j = to_json(tr, timing);
        j["scheme"] = to_string(sch);
        j["seed"] = s;
        emit(j.dump(2) + "\n", out_path, out);
      }
      return 0;
    }

    if (*sweep) {
      if (config_path.empty()) throw ConfigError("config", "sweep requires --config");
      SweepSpec spec = sweep_from_json(read_json_file(config_path));
      if (seed) spec.seed = *seed;
      if (!scheme_name.empty()) spec.schemes = {parse_scheme(scheme_name)};
      const SweepResult res = run_sweep(spec, threads);
      emit(format == "csv" ? records_to_csv(res.records) : to_json(res).dump(2) + "\n", out_path,
           out);
      int failures = 0;
      for (const auto& r : res.summary) failures += r.failures;
      if (failures > 0) err << "sweep: " << failures << " record(s) failed\n";
      return 0;
    }

    if (*oracle) {
      RunDoc d = load_run_doc(config_path);
      SystemConfig cfg = config_path.empty() ? with_users(default_config(), 1) : d.cfg;
      if (config_path.empty()) {
        cfg.n_tx = cfg.n_rx = 2;
        cfg.n_elements = 2;
      }
      validate(cfg);
      const std::uint64_t s = seed.value_or(cfg.seed);
      Rng rng(s);
      Geometry geo = d.geo;
      if (geo.user_xy.empty()) geo.user_xy = random_geometry(cfg.n_users, geo.irs_xy[0], rng).user_xy;
      validate(geo, cfg.n_users);
      const ChannelSet ch = generate_channels(cfg, geo, rng);
      Rng init_rng(derive_seed(s, {1}));
      const BeamState init = init_state(cfg, init_rng);
      const double best = brute_force_oracle(cfg, ch, grid);
      json j = {{"seed", s}, {"grid", grid}, {"oracle_wmr", best}};
      for (Scheme sch : {Scheme::bcd_mm, Scheme::bcd_socp}) {
        const double w = run_scheme_trace(sch, cfg, ch, init).objective.back();
        j[std::string(to_string(sch)) + "_wmr"] = w;
        j[std::string(to_string(sch)) + "_ratio"] = best > 0.0 ? w / best : 0.0;
      }
      if (format == "csv") {
        std::string text = "seed,grid,oracle_wmr,bcd_mm_wmr,bcd_socp_wmr\n";
        text += std::to_string(s) + ',' + std::to_string(grid) + ',' + format_double(best) + ',' +
                format_double(j["bcd_mm_wmr"].get<double>()) + ',' +
                format_double(j["bcd_socp_wmr"].get<double>()) + '\n';
        emit(text, out_path, out);
      } else {
        emit(j.dump(2) + "\n", out_path, out);
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace irsfd
