#include "irsfd/quadratics.hpp"

#include <cmath>

#include "irsfd/metrics.hpp"

namespace irsfd {

namespace {

CMat hermitian_part(const CMat& a) { return 0.5 * (a + a.adjoint()); }

double weighted_surrogate(double omega, double w, double e) {
  return omega * (std::log(w) - w * e + 1.0);
}

}  // namespace

std::vector<PrecoderQuadratic> build_precoder_quadratics(const AuxState& aux, const CVec& phi,
                                                         const ChannelSet& ch,
                                                         const SystemConfig& cfg) {
  const Cascade c = cascade(phi, ch);
  const int n_users = cfg.n_users;
  BeamState zero{CMat::Zero(cfg.n_tx, n_users), phi};
  std::vector<PrecoderQuadratic> out(static_cast<std::size_t>(n_users));
  for (int k = 0; k < n_users; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const double ow = cfg.weights_dl[i] * aux.w_d[i];
    const cd u = aux.u_d[i];
    PrecoderQuadratic& q = out[i];
    q.b = hermitian_part(ow * std::norm(u) * c.gd[k] * c.gd[k].adjoint());
    q.c = CMat::Zero(cfg.n_tx, n_users);
    q.c.col(k) = ow * u * c.gd[k];
    // Value at F = 0 by direct evaluation; the quadratic and linear parts vanish there.
    q.constant = weighted_surrogate(cfg.weights_dl[i], aux.w_d[i],
                                    mse_downlink(k, zero, aux, ch, cfg));
  }
  return out;
}

std::vector<PhaseQuadratic> build_phase_quadratics(const AuxState& aux, const CMat& f,
                                                   const ChannelSet& ch,
                                                   const SystemConfig& cfg) {
  const int n_users = cfg.n_users;
  const Eigen::Index m_el = ch.g_t.rows();
  BeamState zero{f, CVec::Zero(m_el)};
  std::vector<PhaseQuadratic> out;
  out.reserve(static_cast<std::size_t>(2 * n_users));

  const CMat gf = ch.g_t * f;  // column m is G_t f_m
  for (int k = 0; k < n_users; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const double ow = cfg.weights_dl[i] * aux.w_d[i];
    const cd u = aux.u_d[i];
    const CVec hr_c = ch.h_r[i].conjugate();
    CMat acc = CMat::Zero(m_el, m_el);
    CVec zk;
    for (int m = 0; m < n_users; ++m) {
      const auto j = static_cast<std::size_t>(m);
      const CVec z = hr_c.cwiseProduct(gf.col(m));
      const double rho = m == k ? cfg.rho_s : 1.0;
      const CVec s = std::sqrt(rho * cfg.p_user[j]) * hr_c.cwiseProduct(ch.h_t[j]);
      acc.noalias() += z.conjugate() * z.transpose();
      acc.noalias() += s.conjugate() * s.transpose();
      if (m == k) zk = z;
    }
    PhaseQuadratic q;
    q.link = Link::downlink;
    q.user = k;
    q.a_mat = hermitian_part(ow * std::norm(u) * acc);
    q.a_vec = ow * u * zk.conjugate();
    q.constant = weighted_surrogate(cfg.weights_dl[i], aux.w_d[i],
                                    mse_downlink(k, zero, aux, ch, cfg));
    out.push_back(std::move(q));
  }

  for (int k = 0; k < n_users; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const double ow = cfg.weights_ul[i] * aux.w_u[i];
    const CVec y_c = (ch.g_r * aux.u_u[i]).conjugate();
    CMat acc = CMat::Zero(m_el, m_el);
    CVec zk;
    for (int m = 0; m < n_users; ++m) {
      const auto j = static_cast<std::size_t>(m);
      const CVec z = y_c.cwiseProduct(ch.h_t[j]);
      acc.noalias() += cfg.p_user[j] * (z.conjugate() * z.transpose());
      if (m == k) zk = z;
    }
    PhaseQuadratic q;
    q.link = Link::uplink;
    q.user = k;
    q.a_mat = hermitian_part(ow * acc);
    q.a_vec = ow * std::sqrt(cfg.p_user[i]) * zk.conjugate();
    q.constant = weighted_surrogate(cfg.weights_ul[i], aux.w_u[i],
                                    mse_uplink(k, zero, aux, ch, cfg));
    out.push_back(std::move(q));
  }
  return out;
}

double eval_quadratic(const PrecoderQuadratic& q, const CMat& f) {
  const double lin = 2.0 * std::real((q.c.adjoint() * f).trace());
  const double quad = std::real((f.adjoint() * q.b * f).trace());
  return lin - quad + q.constant;
}

double eval_quadratic(const PhaseQuadratic& q, const CVec& phi) {
  const double lin = 2.0 * std::real(q.a_vec.dot(phi));
  const double quad = std::real(phi.dot(q.a_mat * phi));
  return lin - quad + q.constant;
}

std::vector<double> eval_all(const std::vector<PrecoderQuadratic>& qs, const CMat& f) {
  std::vector<double> h;
  h.reserve(qs.size());
  for (const auto& q : qs) h.push_back(eval_quadratic(q, f));
  return h;
}

std::vector<double> eval_all(const std::vector<PhaseQuadratic>& qs, const CVec& phi) {
  std::vector<double> h;
  h.reserve(qs.size());
  for (const auto& q : qs) h.push_back(eval_quadratic(q, phi));
  return h;
}

}  // namespace irsfd
