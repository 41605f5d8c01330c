#include "irsfd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace irsfd {

namespace {

double rho_for(const SystemConfig& cfg, int k, int m) { return k == m ? cfg.rho_s : 1.0; }

// Self/co-channel interference plus noise seen by downlink user k.
double downlink_floor(int k, const Cascade& c, const SystemConfig& cfg) {
  double t = cfg.noise_user[static_cast<std::size_t>(k)];
  for (int m = 0; m < cfg.n_users; ++m)
    t += rho_for(cfg, k, m) * cfg.p_user[static_cast<std::size_t>(m)] * std::norm(c.si(k, m));
  return t;
}

CMat uplink_covariance(const Cascade& c, const SystemConfig& cfg) {
  const auto n = c.q.empty() ? 0 : c.q.front().size();
  CMat r = cfg.noise_bs * CMat::Identity(n, n);
  for (int m = 0; m < cfg.n_users; ++m)
    r.noalias() += cfg.p_user[static_cast<std::size_t>(m)] * c.q[m] * c.q[m].adjoint();
  return r;
}

double uplink_sinr(int k, const CVec& u, const Cascade& c, const SystemConfig& cfg) {
  const double un = u.squaredNorm();
  if (un == 0.0) throw DomainError("sinr_uplink: receiver vector is zero");
  double sig = 0.0;
  double den = cfg.noise_bs * un;
  for (int m = 0; m < cfg.n_users; ++m) {
    const double p = cfg.p_user[static_cast<std::size_t>(m)] * std::norm(u.dot(c.q[m]));
    if (m == k)
      sig = p;
    else
      den += p;
  }
  return sig / den;
}

double downlink_mse(int k, cd u, const CMat& f, const Cascade& c, const SystemConfig& cfg) {
  const CVec a = f.adjoint() * c.gd[k];  // conj of gd^H f_m
  const double u2 = std::norm(u);
  const double total = a.squaredNorm() + downlink_floor(k, c, cfg);
  return u2 * total - 2.0 * std::real(std::conj(u) * std::conj(a(k))) + 1.0;
}

double uplink_mse(int k, const CVec& u, const Cascade& c, const SystemConfig& cfg) {
  double e = cfg.noise_bs * u.squaredNorm() + 1.0;
  for (int m = 0; m < cfg.n_users; ++m)
    e += cfg.p_user[static_cast<std::size_t>(m)] * std::norm(u.dot(c.q[m]));
  e -= 2.0 * std::sqrt(cfg.p_user[static_cast<std::size_t>(k)]) * std::real(u.dot(c.q[k]));
  return e;
}

double weight_of(double e) {
  if (!(e > 0.0)) throw DomainError("update_weights: mean squared error must be positive");
  return 1.0 / e;
}

}  // namespace

Cascade cascade(const CVec& phi, const ChannelSet& ch) {
  const auto k = ch.h_t.size();
  Cascade c;
  c.gd.reserve(k);
  c.q.reserve(k);
  const CMat gt_h = ch.g_t.adjoint();
  const CMat gr_h = ch.g_r.adjoint();
  for (std::size_t i = 0; i < k; ++i) {
    // G_t^H Phi^H h_r
    c.gd.push_back(gt_h * phi.conjugate().cwiseProduct(ch.h_r[i]));
    c.q.push_back(gr_h * phi.cwiseProduct(ch.h_t[i]));
  }
  c.si.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t m = 0; m < k; ++m)
      c.si(i, m) = ch.h_r[i].dot(phi.cwiseProduct(ch.h_t[m]));
  return c;
}

double sinr_downlink(int k, const BeamState& s, const ChannelSet& ch, const SystemConfig& cfg) {
  const Cascade c = cascade(s.phi, ch);
  const CVec a = s.f.adjoint() * c.gd[k];
  const double sig = std::norm(a(k));
  return sig / (a.squaredNorm() - sig + downlink_floor(k, c, cfg));
}

double sinr_uplink(int k, const CVec& u, const CVec& phi, const ChannelSet& ch,
                   const SystemConfig& cfg) {
  return uplink_sinr(k, u, cascade(phi, ch), cfg);
}

RateReport rate_report(const BeamState& s, const AuxState& aux, const ChannelSet& ch,
                       const SystemConfig& cfg) {
  const Cascade c = cascade(s.phi, ch);
  const auto n = static_cast<std::size_t>(cfg.n_users);
  RateReport r;
  r.gamma_d.resize(n);
  r.gamma_u.resize(n);
  r.rate_d.resize(n);
  r.rate_u.resize(n);
  r.wmr = std::numeric_limits<double>::infinity();
  for (int k = 0; k < cfg.n_users; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const CVec a = s.f.adjoint() * c.gd[k];
    const double sig = std::norm(a(k));
    r.gamma_d[i] = sig / (a.squaredNorm() - sig + downlink_floor(k, c, cfg));
    const CVec& u = aux.u_u[i];
    r.gamma_u[i] = u.squaredNorm() == 0.0 ? 0.0 : uplink_sinr(k, u, c, cfg);
    r.rate_d[i] = std::log1p(r.gamma_d[i]);
    r.rate_u[i] = std::log1p(r.gamma_u[i]);
    r.wmr = std::min({r.wmr, cfg.weights_dl[i] * r.rate_d[i], cfg.weights_ul[i] * r.rate_u[i]});
  }
  if (n == 0) r.wmr = 0.0;
  return r;
}

double weighted_min_rate(const BeamState& s, const ChannelSet& ch, const SystemConfig& cfg) {
  return rate_report(s, update_decoders(s, ch, cfg), ch, cfg).wmr;
}

double mse_downlink(int k, const BeamState& s, const AuxState& aux, const ChannelSet& ch,
                    const SystemConfig& cfg) {
  return downlink_mse(k, aux.u_d[static_cast<std::size_t>(k)], s.f, cascade(s.phi, ch), cfg);
}

double mse_uplink(int k, const BeamState& s, const AuxState& aux, const ChannelSet& ch,
                  const SystemConfig& cfg) {
  return uplink_mse(k, aux.u_u[static_cast<std::size_t>(k)], cascade(s.phi, ch), cfg);
}

CVec solve_hpd(const CMat& r, const CVec& b, double tol) {
  Eigen::LLT<CMat> llt(r);
  if (llt.info() != Eigen::Success) throw NumericalError("solve_hpd: matrix not positive definite");
  CVec x = llt.solve(b);
  const double scale = r.norm() * x.norm() + b.norm();
  const double res = (r * x - b).norm();
  if (!std::isfinite(res) || (scale > 0.0 && res > tol * scale))
    throw NumericalError("solve_hpd: residual " + std::to_string(res / scale) +
                         " exceeds tolerance");
  return x;
}

AuxState update_decoders(const BeamState& s, const ChannelSet& ch, const SystemConfig& cfg) {
  const Cascade c = cascade(s.phi, ch);
  const auto n = static_cast<std::size_t>(cfg.n_users);
  AuxState aux;
  aux.u_d.resize(n);
  aux.u_u.resize(n);
  for (int k = 0; k < cfg.n_users; ++k) {
    const CVec a = s.f.adjoint() * c.gd[k];
    aux.u_d[static_cast<std::size_t>(k)] =
        std::conj(a(k)) / (a.squaredNorm() + downlink_floor(k, c, cfg));
  }
  const CMat r = uplink_covariance(c, cfg);
  for (int k = 0; k < cfg.n_users; ++k) {
    const auto i = static_cast<std::size_t>(k);
    aux.u_u[i] = std::sqrt(cfg.p_user[i]) * solve_hpd(r, c.q[k]);
  }
  return aux;
}

Weights update_weights(const BeamState& s, const AuxState& aux, const ChannelSet& ch,
                       const SystemConfig& cfg) {
  const Cascade c = cascade(s.phi, ch);
  const auto n = static_cast<std::size_t>(cfg.n_users);
  Weights w;
  w.w_d.resize(n);
  w.w_u.resize(n);
  for (int k = 0; k < cfg.n_users; ++k) {
    const auto i = static_cast<std::size_t>(k);
    w.w_d[i] = weight_of(downlink_mse(k, aux.u_d[i], s.f, c, cfg));
    w.w_u[i] = weight_of(uplink_mse(k, aux.u_u[i], c, cfg));
  }
  return w;
}

AuxState optimal_aux(const BeamState& s, const ChannelSet& ch, const SystemConfig& cfg) {
  AuxState aux = update_decoders(s, ch, cfg);
  Weights w = update_weights(s, aux, ch, cfg);
  aux.w_d = std::move(w.w_d);
  aux.w_u = std::move(w.w_u);
  return aux;
}

double surrogate_rate(Link l, int k, const BeamState& s, const AuxState& aux,
                      const ChannelSet& ch, const SystemConfig& cfg) {
  const auto i = static_cast<std::size_t>(k);
  const double w = l == Link::downlink ? aux.w_d[i] : aux.w_u[i];
  if (!(w > 0.0)) throw DomainError("surrogate_rate: weight must be positive");
  const double e = l == Link::downlink ? mse_downlink(k, s, aux, ch, cfg)
                                       : mse_uplink(k, s, aux, ch, cfg);
  return std::log(w) - w * e + 1.0;
}

}  // namespace irsfd
