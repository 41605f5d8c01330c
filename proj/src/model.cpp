#include "irsfd/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace irsfd {

namespace {

void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

void require_list(const std::vector<double>& v, std::size_t n, const char* field, double lo,
                  bool strict) {
  require(v.size() == n, field, "expected " + std::to_string(n) + " entries, got " +
                                    std::to_string(v.size()));
  for (double x : v) {
    const bool ok = std::isfinite(x) && (strict ? x > lo : x >= lo);
    require(ok, field, "entry " + std::to_string(x) + " out of range");
  }
}

void resize_broadcast(std::vector<double>& v, int n, double fallback) {
  const double fill = v.empty() ? fallback : v.front();
  v.resize(static_cast<std::size_t>(n), fill);
}

}  // namespace

double thermal_noise_watts(double bandwidth_hz, double density_dbm_hz) {
  const double dbm = density_dbm_hz + 10.0 * std::log10(bandwidth_hz);
  return std::pow(10.0, dbm / 10.0) * 1e-3;
}

double effective_noise_watts(double bandwidth_hz) {
  return 1.1 * thermal_noise_watts(bandwidth_hz);
}

SystemConfig default_config() {
  SystemConfig cfg;
  const double n = effective_noise_watts(cfg.bandwidth_hz);
  cfg.noise_user.assign(static_cast<std::size_t>(cfg.n_users), n);
  cfg.noise_bs = n;
  return cfg;
}

SystemConfig with_users(SystemConfig cfg, int n_users) {
  cfg.n_users = n_users;
  resize_broadcast(cfg.p_user, n_users, 0.05);
  resize_broadcast(cfg.weights_dl, n_users, 1.0);
  resize_broadcast(cfg.weights_ul, n_users, 1.0);
  const double n = effective_noise_watts(cfg.bandwidth_hz);
  cfg.noise_user.assign(static_cast<std::size_t>(n_users), n);
  cfg.noise_bs = n;
  return cfg;
}

void validate(const SystemConfig& cfg) {
  require(cfg.n_tx > 1, "n_tx", "must be > 1");
  require(cfg.n_rx > 1, "n_rx", "must be > 1");
  require(cfg.n_users >= 1, "n_users", "must be >= 1");
  require(cfg.n_elements >= 1, "n_elements", "must be >= 1");
  require(std::isfinite(cfg.p_max) && cfg.p_max > 0.0, "p_max", "must be > 0");
  const auto k = static_cast<std::size_t>(cfg.n_users);
  require_list(cfg.p_user, k, "p_user", 0.0, true);
  require(cfg.rho_s >= 0.0 && cfg.rho_s <= 1.0, "rho_s", "must lie in [0, 1]");
  require_list(cfg.noise_user, k, "noise_user", 0.0, true);
  require(std::isfinite(cfg.noise_bs) && cfg.noise_bs > 0.0, "noise_bs", "must be > 0");
  require_list(cfg.weights_dl, k, "weights_dl", 1.0, false);
  require_list(cfg.weights_ul, k, "weights_ul", 1.0, false);
  require(cfg.mu0 > 0.0, "mu0", "must be > 0");
  require(cfg.iota > 1.0, "iota", "must be > 1");
  require(cfg.mu_max > 0.0, "mu_max", "must be > 0");
  require(cfg.mu0 <= cfg.mu_max, "mu0", "must not exceed mu_max");
  require(cfg.eps > 0.0, "eps", "must be > 0");
  require(cfg.n_max >= 0, "n_max", "must be >= 0");
  require(cfg.rician_kappa >= 0.0, "rician_kappa", "must be >= 0");
  require(std::isfinite(cfg.pl_exponent_irs), "pl_exponent_irs", "must be finite");
  require(cfg.bandwidth_hz > 0.0, "bandwidth_hz", "must be > 0");
  require(cfg.socp_tol > 0.0, "socp_tol", "must be > 0");
}

void validate(const Geometry& geo, int n_users) {
  require(geo.user_xy.size() == static_cast<std::size_t>(n_users), "user_xy",
          "expected " + std::to_string(n_users) + " user positions");
  require(distance_3d(geo.bs_xy, geo.bs_height, geo.irs_xy, geo.irs_height) > 0.0, "irs_xy",
          "BS-IRS distance is zero");
  for (const auto& u : geo.user_xy)
    require(distance_3d(geo.irs_xy, geo.irs_height, u, geo.user_height) > 0.0, "user_xy",
            "IRS-user distance is zero");
}

Geometry random_geometry(int n_users, double x_irs, Rng& rng) {
  Geometry geo;
  geo.irs_xy = {x_irs, 20.0};
  geo.user_xy.reserve(static_cast<std::size_t>(n_users));
  for (int k = 0; k < n_users; ++k) {
    const double x = rng.uniform(100.0, 140.0);
    const double y = rng.uniform(-10.0, 10.0);
    geo.user_xy.push_back({x, y});
  }
  return geo;
}

Geometry fixed_user_geometry(double x_irs) {
  Geometry geo;
  geo.irs_xy = {x_irs, 20.0};
  geo.user_xy = {{100.0, 10.0}, {120.0, 0.0}, {140.0, -10.0}};
  return geo;
}

double distance_3d(const Point2& a, double ha, const Point2& b, double hb) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = ha - hb;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double path_loss_db(double exponent, double distance_m) {
  if (!(distance_m > 0.0)) throw DomainError("path_loss_db: distance must be positive");
  return -30.0 - 10.0 * exponent * std::log10(distance_m);
}

CVec steering_vector(int count, double angle) {
  CVec v(count);
  const double s = std::numbers::pi * std::sin(angle);
  for (int w = 0; w < count; ++w) v(w) = std::polar(1.0, s * w);
  return v;
}

CMat rician_matrix(const CMat& los, double kappa, Rng& rng) {
  if (!(kappa >= 0.0)) throw DomainError("rician_matrix: kappa must be nonnegative");
  const double a = std::isinf(kappa) ? 1.0 : std::sqrt(kappa / (kappa + 1.0));
  const double b = std::isinf(kappa) ? 0.0 : std::sqrt(1.0 / (kappa + 1.0));
  CMat out(los.rows(), los.cols());
  for (Eigen::Index j = 0; j < los.cols(); ++j)
    for (Eigen::Index i = 0; i < los.rows(); ++i)
      out(i, j) = a * los(i, j) + b * rng.complex_normal();
  return out;
}

namespace {

CMat draw_link(int rx_count, int tx_count, double kappa, double amplitude, Rng& rng) {
  const double two_pi = 2.0 * std::numbers::pi;
  const double aoa = rng.uniform(0.0, two_pi);
  const double aod = rng.uniform(0.0, two_pi);
  const CMat los = steering_vector(rx_count, aoa) * steering_vector(tx_count, aod).adjoint();
  return amplitude * rician_matrix(los, kappa, rng);
}

CVec draw_vector_link(int count, double kappa, double amplitude, Rng& rng) {
  const double aoa = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const CMat los = steering_vector(count, aoa);
  return amplitude * rician_matrix(los, kappa, rng).col(0);
}

}  // namespace

ChannelSet generate_channels(const SystemConfig& cfg, const Geometry& geo, Rng& rng) {
  const int m = cfg.n_elements;
  const double alpha = cfg.pl_exponent_irs;
  const double d_bi = distance_3d(geo.bs_xy, geo.bs_height, geo.irs_xy, geo.irs_height);
  const double amp_bi = std::sqrt(db_to_linear(path_loss_db(alpha, d_bi)));

  ChannelSet ch;
  ch.g_t = draw_link(m, cfg.n_tx, cfg.rician_kappa, amp_bi, rng);
  ch.g_r = draw_link(m, cfg.n_rx, cfg.rician_kappa, amp_bi, rng);

  const auto k = static_cast<std::size_t>(cfg.n_users);
  if (geo.user_xy.size() < k) throw DomainError("generate_channels: missing user positions");
  std::vector<double> amp_iu(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double d = distance_3d(geo.irs_xy, geo.irs_height, geo.user_xy[i], geo.user_height);
    amp_iu[i] = std::sqrt(db_to_linear(path_loss_db(alpha, d)));
  }
  ch.h_t.reserve(k);
  ch.h_r.reserve(k);
  for (std::size_t i = 0; i < k; ++i)
    ch.h_t.push_back(draw_vector_link(m, cfg.rician_kappa, amp_iu[i], rng));
  for (std::size_t i = 0; i < k; ++i)
    ch.h_r.push_back(draw_vector_link(m, cfg.rician_kappa, amp_iu[i], rng));
  return ch;
}

BeamState init_state(const SystemConfig& cfg, Rng& rng) {
  BeamState s;
  s.phi.resize(cfg.n_elements);
  for (int i = 0; i < cfg.n_elements; ++i)
    s.phi(i) = std::polar(1.0, rng.uniform(0.0, 2.0 * std::numbers::pi));
  s.f.resize(cfg.n_tx, cfg.n_users);
  for (Eigen::Index j = 0; j < s.f.cols(); ++j)
    for (Eigen::Index i = 0; i < s.f.rows(); ++i) s.f(i, j) = rng.complex_normal();
  const double power = s.f.squaredNorm();
  if (cfg.p_max <= 0.0 || power == 0.0)
    s.f.setZero();
  else
    s.f *= std::sqrt(cfg.p_max / power);
  return s;
}

}  // namespace irsfd
