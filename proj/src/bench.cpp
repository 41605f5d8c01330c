#include "irsfd/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <regex>
#include <thread>

#include "irsfd/metrics.hpp"
#include "irsfd/socp.hpp"

namespace irsfd {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

RunTrace precoder_only(const SystemConfig& cfg, const ChannelSet& ch, const BeamState& init,
                       PrecoderStepKind step) {
  RunOptions o;
  o.optimize_phase = false;
  o.precoder_step = step;
  return run_bcd_mm(cfg, ch, init, o);
}

ExperimentRecord record_from(Scheme s, const RunTrace& tr) {
  ExperimentRecord r;
  r.scheme = to_string(s);
  r.final_wmr = tr.objective.back();
  r.iters = tr.iters;
  r.wall_ms = 1e3 * tr.wall_time;
  return r;
}

RunTrace two_bit_from(const SystemConfig& cfg, const ChannelSet& ch, const RunTrace& cont) {
  const BeamState start{cont.final.f, quantize_phases_2bit(cont.final.phi)};
  RunTrace tr = precoder_only(cfg, ch, start, PrecoderStepKind::mm);
  tr.iters += cont.iters;
  tr.wall_time += cont.wall_time;
  return tr;
}

}  // namespace

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::bcd_mm: return "bcd_mm";
    case Scheme::bcd_socp: return "bcd_socp";
    case Scheme::socp_mm: return "socp_mm";
    case Scheme::rand_phase: return "rand_phase";
    case Scheme::two_bit: return "two_bit";
  }
  return "?";
}

Scheme parse_scheme(const std::string& name) {
  for (Scheme s : {Scheme::bcd_mm, Scheme::bcd_socp, Scheme::socp_mm, Scheme::rand_phase,
                   Scheme::two_bit})
    if (name == to_string(s)) return s;
  throw ConfigError("scheme", "unknown scheme '" + name + "'");
}

CVec quantize_phases_2bit(const CVec& phi) {
  CVec out(phi.size());
  for (Eigen::Index i = 0; i < phi.size(); ++i) {
    double a = std::arg(phi(i));
    if (a < 0.0) a += kTwoPi;
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int q = 0; q < 4; ++q) {
      const double diff = std::abs(a - q * std::numbers::pi / 2.0);
      const double d = std::min(diff, kTwoPi - diff);
      // Candidates are scanned in increasing angle, so keeping the earlier
      // one on a tie selects the smaller angle.
      if (d < best_d - 1e-12) {
        best_d = d;
        best = q;
      }
    }
    out(i) = std::polar(1.0, best * std::numbers::pi / 2.0);
  }
  return out;
}

RunTrace run_scheme_trace(Scheme s, const SystemConfig& cfg, const ChannelSet& ch,
                          const BeamState& init) {
  switch (s) {
    case Scheme::bcd_mm: return run_bcd_mm(cfg, ch, init);
    case Scheme::bcd_socp: return run_bcd_socp(cfg, ch, init);
    case Scheme::socp_mm: {
      RunOptions o;
      o.precoder_step = PrecoderStepKind::socp;
      return run_bcd_mm(cfg, ch, init, o);
    }
    case Scheme::rand_phase: return precoder_only(cfg, ch, init, PrecoderStepKind::mm);
    case Scheme::two_bit: return two_bit_from(cfg, ch, run_bcd_mm(cfg, ch, init));
  }
  throw DomainError("run_scheme_trace: unknown scheme");
}

ExperimentRecord run_scheme(Scheme s, const SystemConfig& cfg, const ChannelSet& ch, Rng& rng) {
  const BeamState init = init_state(cfg, rng);
  return record_from(s, run_scheme_trace(s, cfg, ch, init));
}

std::vector<ExperimentRecord> run_schemes(const std::vector<Scheme>& schemes,
                                          const SystemConfig& cfg, const ChannelSet& ch,
                                          const BeamState& init) {
  std::vector<ExperimentRecord> out;
  std::optional<RunTrace> mm;
  auto joint = [&]() -> const RunTrace& {
    if (!mm) mm = run_bcd_mm(cfg, ch, init);
    return *mm;
  };
  for (Scheme s : schemes) {
    try {
      if (s == Scheme::bcd_mm)
        out.push_back(record_from(s, joint()));
      else if (s == Scheme::two_bit)
        out.push_back(record_from(s, two_bit_from(cfg, ch, joint())));
      else
        out.push_back(record_from(s, run_scheme_trace(s, cfg, ch, init)));
    } catch (const std::exception& e) {
      ExperimentRecord r;
      r.scheme = to_string(s);
      r.final_wmr = nan();
      r.failed = true;
      r.error = e.what();
      out.push_back(std::move(r));
    }
  }
  return out;
}

double brute_force_oracle(const SystemConfig& cfg, const ChannelSet& ch, int grid_per_element) {
  const int m = cfg.n_elements;
  if (m < 1 || m > 3) throw DomainError("brute_force_oracle: requires 1 <= M <= 3");
  if (grid_per_element < 1 || grid_per_element > 64)
    throw DomainError("brute_force_oracle: requires 1 <= grid <= 64");
  long combos = 1;
  for (int i = 0; i < m; ++i) combos *= grid_per_element;

  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  for (long c = 0; c < combos; ++c) {
    long rest = c;
    for (int i = 0; i < m; ++i) {
      idx[static_cast<std::size_t>(i)] = static_cast<int>(rest % grid_per_element);
      rest /= grid_per_element;
    }
    BeamState s;
    s.phi.resize(m);
    for (int i = 0; i < m; ++i)
      s.phi(i) = std::polar(1.0, kTwoPi * idx[static_cast<std::size_t>(i)] / grid_per_element);
    // Maximum-ratio start with equal power per user.
    const Cascade casc = cascade(s.phi, ch);
    s.f = CMat::Zero(cfg.n_tx, cfg.n_users);
    for (int k = 0; k < cfg.n_users; ++k) {
      const double nrm = casc.gd[static_cast<std::size_t>(k)].norm();
      if (nrm > 0.0)
        s.f.col(k) = std::sqrt(cfg.p_max / cfg.n_users) * casc.gd[static_cast<std::size_t>(k)] / nrm;
    }
    RunOptions o;
    o.optimize_phase = false;
    o.precoder_step = PrecoderStepKind::socp;
    o.record_timing = false;
    best = std::max(best, run_bcd_mm(cfg, ch, s, o).objective.back());
  }
  return best;
}

double approx_large_scale_gain(double x_irs, double x_uec, double exponent) {
  if (!(x_irs > 0.0) || !(x_irs < x_uec))
    throw DomainError("approx_large_scale_gain: requires 0 < x_irs < x_uec");
  return -60.0 - 10.0 * exponent * std::log10(x_irs) - 10.0 * exponent * std::log10(x_uec - x_irs);
}

const char* to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::x_irs: return "x_irs";
    case SweepVariable::rho_s: return "rho_s";
    case SweepVariable::weights: return "weights";
    case SweepVariable::pl_exponent: return "pl_exponent";
    case SweepVariable::rician_kappa: return "rician_kappa";
    case SweepVariable::n_elements: return "n_elements";
  }
  return "?";
}

SweepVariable parse_variable(const std::string& name) {
  for (SweepVariable v : {SweepVariable::x_irs, SweepVariable::rho_s, SweepVariable::weights,
                          SweepVariable::pl_exponent, SweepVariable::rician_kappa,
                          SweepVariable::n_elements})
    if (name == to_string(v)) return v;
  throw ConfigError("variable", "unknown sweep variable '" + name + "'");
}

bool apply_sweep_value(SweepVariable v, const SweepValue& value, SystemConfig& cfg,
                       Geometry& geo) {
  const auto k = static_cast<std::size_t>(cfg.n_users);
  bool fixed = false;
  switch (v) {
    case SweepVariable::x_irs: geo.irs_xy = {value.number, 20.0}; break;
    case SweepVariable::rho_s: cfg.rho_s = value.number; break;
    case SweepVariable::pl_exponent: cfg.pl_exponent_irs = value.number; break;
    case SweepVariable::rician_kappa: cfg.rician_kappa = value.number; break;
    case SweepVariable::n_elements: {
      const double n = value.number;
      if (!(n >= 1.0) || n != std::floor(n) || n > 4096.0)
        throw ConfigError("values", "n_elements must be a positive integer");
      cfg.n_elements = static_cast<int>(n);
      break;
    }
    case SweepVariable::weights: {
      static const std::regex ud("U([0-9.]+)D([0-9.]+)");
      std::smatch mt;
      if (std::regex_match(value.label, mt, ud)) {
        cfg.weights_ul.assign(k, std::stod(mt[1].str()));
        cfg.weights_dl.assign(k, std::stod(mt[2].str()));
      } else if (value.label == "equal" || value.label == "user2_active") {
        if (k != 3) throw ConfigError("values", "'" + value.label + "' requires three users");
        const std::vector<double> w =
            value.label == "equal" ? std::vector<double>{1, 1, 1} : std::vector<double>{2, 1, 2};
        cfg.weights_ul = w;
        cfg.weights_dl = w;
        const Geometry f = fixed_user_geometry(geo.irs_xy[0]);
        geo.user_xy = f.user_xy;
        fixed = true;
      } else {
        throw ConfigError("values", "unknown weight pattern '" + value.label + "'");
      }
      break;
    }
  }
  validate(cfg);
  return fixed;
}

SummaryRow summarize(const std::vector<double>& values) {
  SummaryRow r;
  double sum = 0.0;
  for (double x : values) {
    if (std::isfinite(x)) {
      sum += x;
      ++r.n;
    } else {
      ++r.failures;
    }
  }
  if (r.n == 0) {
    r.mean = r.std_error = nan();
    return r;
  }
  r.mean = sum / r.n;
  double ss = 0.0;
  for (double x : values)
    if (std::isfinite(x)) ss += (x - r.mean) * (x - r.mean);
  r.std_error = r.n > 1 ? std::sqrt(ss / (r.n - 1) / r.n) : 0.0;
  return r;
}

SweepResult run_sweep(const SweepSpec& spec, int threads) {
  if (spec.values.empty()) throw ConfigError("values", "must not be empty");
  if (spec.realizations < 1) throw ConfigError("realizations", "must be >= 1");
  if (spec.schemes.empty()) throw ConfigError("schemes", "must not be empty");
  validate(spec.base_config);

  const std::size_t n_values = spec.values.size();
  const auto n_real = static_cast<std::size_t>(spec.realizations);
  const std::size_t n_tasks = n_values * n_real;
  std::vector<std::vector<ExperimentRecord>> slots(n_tasks);

  auto work = [&](std::size_t task) {
    const std::size_t vi = task / n_real;
    const std::size_t r = task % n_real;
    const std::uint64_t sub = derive_seed(spec.seed, {vi, r});
    const SweepValue& value = spec.values[vi];
    std::vector<ExperimentRecord> recs;
    try {
      SystemConfig cfg = spec.base_config;
      Geometry geo = spec.base_geometry;
      const bool fixed = apply_sweep_value(spec.variable, value, cfg, geo);
      Rng rng(sub);
      if (!fixed) geo.user_xy = random_geometry(cfg.n_users, geo.irs_xy[0], rng).user_xy;
      validate(geo, cfg.n_users);
      const ChannelSet ch = generate_channels(cfg, geo, rng);
      Rng init_rng(derive_seed(sub, {1}));
      const BeamState init = init_state(cfg, init_rng);
      recs = run_schemes(spec.schemes, cfg, ch, init);
    } catch (const std::exception& e) {
      recs.clear();
      for (Scheme s : spec.schemes) {
        ExperimentRecord rec;
        rec.scheme = to_string(s);
        rec.final_wmr = nan();
        rec.failed = true;
        rec.error = e.what();
        recs.push_back(std::move(rec));
      }
    }
    for (auto& rec : recs) {
      rec.variable = to_string(spec.variable);
      rec.value = value.label;
      rec.number = value.number;
      rec.seed = sub;
    }
    slots[task] = std::move(recs);
  };

  const int n_threads = std::max(1, std::min<int>(threads, static_cast<int>(n_tasks)));
  if (n_threads == 1) {
    for (std::size_t t = 0; t < n_tasks; ++t) work(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i)
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < n_tasks; t = next++) work(t);
      });
    for (auto& th : pool) th.join();
  }

  SweepResult res;
  for (auto& s : slots)
    for (auto& rec : s) res.records.push_back(std::move(rec));

  const std::size_t n_schemes = spec.schemes.size();
  for (std::size_t vi = 0; vi < n_values; ++vi) {
    for (std::size_t si = 0; si < n_schemes; ++si) {
      std::vector<double> vals;
      for (std::size_t r = 0; r < n_real; ++r)
        vals.push_back(res.records[(vi * n_real + r) * n_schemes + si].final_wmr);
      SummaryRow row = summarize(vals);
      row.scheme = to_string(spec.schemes[si]);
      row.value = spec.values[vi].label;
      row.number = spec.values[vi].number;
      res.summary.push_back(std::move(row));
    }
  }
  return res;
}

}  // namespace irsfd
