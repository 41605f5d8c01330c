#include "irsfd/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace irsfd {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

json complex_vec(const CVec& v) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    re.push_back(v(i).real());
    im.push_back(v(i).imag());
  }
  return {{"re", re}, {"im", im}};
}

json complex_mat(const CMat& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json rr = json::array(), ri = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  return {{"re", re}, {"im", im}};
}

CVec complex_vec_from(const json& j, const char* field) {
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (re.size() != im.size()) throw ConfigError(field, "re/im length mismatch");
  CVec v(static_cast<Eigen::Index>(re.size()));
  for (std::size_t i = 0; i < re.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = cd(re[i].get<double>(), im[i].get<double>());
  return v;
}

CMat complex_mat_from(const json& j, const char* field) {
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  const std::size_t rows = re.size();
  const std::size_t cols = rows ? re[0].size() : 0;
  if (im.size() != rows) throw ConfigError(field, "re/im shape mismatch");
  CMat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (re[r].size() != cols || im[r].size() != cols)
      throw ConfigError(field, "ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          cd(re[r][c].get<double>(), im[r][c].get<double>());
  }
  return m;
}

void check_keys(const json& j, const std::set<std::string>& allowed, const char* where) {
  if (!j.is_object()) throw ConfigError(where, "expected a JSON object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError(k, std::string("unknown key in ") + where);
}

template <class T>
T get_field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(key, std::string("invalid value: ") + e.what());
  }
}

template <class T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = get_field<T>(j, key);
}

Point2 point_from(const json& j, const char* key) {
  const auto v = get_field<std::vector<double>>(j, key);
  if (v.size() != 2) throw ConfigError(key, "expected [x, y]");
  return {v[0], v[1]};
}

}  // namespace

json to_json(const SystemConfig& c) {
  return {{"n_tx", c.n_tx},
          {"n_rx", c.n_rx},
          {"n_users", c.n_users},
          {"n_elements", c.n_elements},
          {"p_max", c.p_max},
          {"p_user", c.p_user},
          {"rho_s", c.rho_s},
          {"noise_user", c.noise_user},
          {"noise_bs", c.noise_bs},
          {"weights_dl", c.weights_dl},
          {"weights_ul", c.weights_ul},
          {"mu0", c.mu0},
          {"iota", c.iota},
          {"mu_max", c.mu_max},
          {"eps", c.eps},
          {"n_max", c.n_max},
          {"rician_kappa", c.rician_kappa},
          {"pl_exponent_irs", c.pl_exponent_irs},
          {"bandwidth_hz", c.bandwidth_hz},
          {"socp_tol", c.socp_tol},
          {"seed", c.seed}};
}

json to_json(const Geometry& g) {
  json users = json::array();
  for (const auto& u : g.user_xy) users.push_back({u[0], u[1]});
  return {{"bs_xy", {g.bs_xy[0], g.bs_xy[1]}},
          {"irs_xy", {g.irs_xy[0], g.irs_xy[1]}},
          {"user_xy", users},
          {"bs_height", g.bs_height},
          {"irs_height", g.irs_height},
          {"user_height", g.user_height}};
}

json to_json(const RunTrace& tr, bool include_timing) {
  json j = {{"iters", tr.iters},
            {"converged", tr.converged},
            {"final_wmr", tr.objective.empty() ? 0.0 : tr.objective.back()},
            {"objective", tr.objective},
            {"surrogate", tr.surrogate},
            {"mu_path", tr.mu_path},
            {"precoder_rejections", tr.precoder_rejections},
            {"phase_rejections", tr.phase_rejections},
            {"squarem_fallbacks", tr.squarem_fallbacks},
            {"final_phi", complex_vec(tr.final.phi)},
            {"final_f", complex_mat(tr.final.f)}};
  if (include_timing) j["wall_time_s"] = tr.wall_time;
  return j;
}

json to_json(const SweepResult& res) {
  json recs = json::array();
  for (const auto& r : res.records) {
    json o = {{"scheme", r.scheme}, {"variable", r.variable}, {"value", r.value},
              {"number", r.number}, {"seed", r.seed},         {"iters", r.iters},
              {"wall_ms", r.wall_ms}, {"failed", r.failed}};
    o["wmr_nat"] = std::isfinite(r.final_wmr) ? json(r.final_wmr) : json(nullptr);
    if (r.failed) o["error"] = r.error;
    recs.push_back(std::move(o));
  }
  json summ = json::array();
  for (const auto& s : res.summary) {
    json o = {{"scheme", s.scheme}, {"value", s.value}, {"number", s.number},
              {"n", s.n},           {"failures", s.failures}};
    o["mean"] = std::isfinite(s.mean) ? json(s.mean) : json(nullptr);
    o["std_error"] = std::isfinite(s.std_error) ? json(s.std_error) : json(nullptr);
    summ.push_back(std::move(o));
  }
  return {{"records", recs}, {"summary", summ}};
}

json to_json(const ConvexSubproblem& p) {
  json qs = json::array();
  for (const auto& q : p.quadratics)
    qs.push_back({{"a", complex_vec(q.a)}, {"A", complex_mat(q.a_mat)}, {"const", q.constant}});
  json j = {{"kind", p.kind == SubproblemKind::precoder ? "precoder" : "phase_relaxed"},
            {"ball_radius", p.ball_radius},
            {"quadratics", qs}};
  if (p.incumbent) j["incumbent"] = complex_vec(*p.incumbent);
  return j;
}

SystemConfig config_from_json(const json& j, SystemConfig c) {
  check_keys(j,
             {"n_tx", "n_rx", "n_users", "n_elements", "p_max", "p_user", "rho_s", "noise_user",
              "noise_bs", "weights_dl", "weights_ul", "mu0", "iota", "mu_max", "eps", "n_max",
              "rician_kappa", "pl_exponent_irs", "bandwidth_hz", "socp_tol", "seed"},
             "config");
  maybe(j, "bandwidth_hz", c.bandwidth_hz);
  if (j.contains("n_users") || j.contains("bandwidth_hz")) {
    int n = c.n_users;
    maybe(j, "n_users", n);
    if (n < 1) throw ConfigError("n_users", "must be >= 1");
    if (!(c.bandwidth_hz > 0.0)) throw ConfigError("bandwidth_hz", "must be > 0");
    c = with_users(c, n);
  }
  maybe(j, "n_tx", c.n_tx);
  maybe(j, "n_rx", c.n_rx);
  maybe(j, "n_elements", c.n_elements);
  maybe(j, "p_max", c.p_max);
  maybe(j, "p_user", c.p_user);
  maybe(j, "rho_s", c.rho_s);
  maybe(j, "noise_user", c.noise_user);
  maybe(j, "noise_bs", c.noise_bs);
  maybe(j, "weights_dl", c.weights_dl);
  maybe(j, "weights_ul", c.weights_ul);
  maybe(j, "mu0", c.mu0);
  maybe(j, "iota", c.iota);
  maybe(j, "mu_max", c.mu_max);
  maybe(j, "eps", c.eps);
  maybe(j, "n_max", c.n_max);
  maybe(j, "rician_kappa", c.rician_kappa);
  maybe(j, "pl_exponent_irs", c.pl_exponent_irs);
  maybe(j, "socp_tol", c.socp_tol);
  maybe(j, "seed", c.seed);
  validate(c);
  return c;
}

Geometry geometry_from_json(const json& j, Geometry g) {
  check_keys(j, {"bs_xy", "irs_xy", "user_xy", "bs_height", "irs_height", "user_height"},
             "geometry");
  if (j.contains("bs_xy")) g.bs_xy = point_from(j, "bs_xy");
  if (j.contains("irs_xy")) g.irs_xy = point_from(j, "irs_xy");
  if (j.contains("user_xy")) {
    const auto pts = get_field<std::vector<std::vector<double>>>(j, "user_xy");
    g.user_xy.clear();
    for (const auto& p : pts) {
      if (p.size() != 2) throw ConfigError("user_xy", "expected [x, y] pairs");
      g.user_xy.push_back({p[0], p[1]});
    }
  }
  maybe(j, "bs_height", g.bs_height);
  maybe(j, "irs_height", g.irs_height);
  maybe(j, "user_height", g.user_height);
  return g;
}

SweepSpec sweep_from_json(const json& j) {
  check_keys(j, {"variable", "values", "realizations", "schemes", "seed", "config", "geometry"},
             "sweep");
  SweepSpec s;
  if (!j.contains("variable")) throw ConfigError("variable", "missing");
  s.variable = parse_variable(get_field<std::string>(j, "variable"));
  if (!j.contains("values") || !j.at("values").is_array())
    throw ConfigError("values", "missing or not a list");
  for (const auto& v : j.at("values")) {
    if (v.is_number())
      s.values.push_back({format_double(v.get<double>()), v.get<double>()});
    else if (v.is_string())
      s.values.push_back({v.get<std::string>(), 0.0});
    else
      throw ConfigError("values", "entries must be numbers or strings");
  }
  if (s.values.empty()) throw ConfigError("values", "must not be empty");
  maybe(j, "realizations", s.realizations);
  if (s.realizations < 1) throw ConfigError("realizations", "must be >= 1");
  if (j.contains("schemes")) {
    s.schemes.clear();
    for (const auto& name : get_field<std::vector<std::string>>(j, "schemes"))
      s.schemes.push_back(parse_scheme(name));
    if (s.schemes.empty()) throw ConfigError("schemes", "must not be empty");
  }
  maybe(j, "seed", s.seed);
  if (j.contains("config")) s.base_config = config_from_json(j.at("config"));
  if (j.contains("geometry")) s.base_geometry = geometry_from_json(j.at("geometry"));
  return s;
}

ConvexSubproblem subproblem_from_json(const json& j) {
  check_keys(j, {"kind", "ball_radius", "quadratics", "incumbent"}, "subproblem");
  ConvexSubproblem p;
  const auto kind = get_field<std::string>(j, "kind");
  if (kind == "precoder")
    p.kind = SubproblemKind::precoder;
  else if (kind == "phase_relaxed")
    p.kind = SubproblemKind::phase_relaxed;
  else
    throw ConfigError("kind", "expected precoder or phase_relaxed");
  maybe(j, "ball_radius", p.ball_radius);
  for (const auto& q : j.at("quadratics"))
    p.quadratics.push_back({complex_vec_from(q.at("a"), "a"), complex_mat_from(q.at("A"), "A"),
                            q.at("const").get<double>()});
  if (j.contains("incumbent")) p.incumbent = complex_vec_from(j.at("incumbent"), "incumbent");
  return p;
}

json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line and column.
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(source, "JSON syntax error at line " + std::to_string(line) + ", column " +
                                  std::to_string(col));
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

std::string records_to_csv(const std::vector<ExperimentRecord>& records) {
  std::string out = csv_header();
  out += '\n';
  for (const auto& r : records) {
    out += r.scheme + ',' + r.variable + ',' + r.value + ',' + std::to_string(r.seed) + ',' +
           format_double(r.final_wmr) + ',' + std::to_string(r.iters) + ',' +
           format_double(r.wall_ms) + '\n';
  }
  return out;
}

}  // namespace irsfd
