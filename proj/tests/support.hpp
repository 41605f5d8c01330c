#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "irsfd/metrics.hpp"
#include "irsfd/model.hpp"
#include "irsfd/rng.hpp"

namespace irsfd::testing {

struct Instance {
  SystemConfig cfg;
  Geometry geo;
  ChannelSet ch;
  BeamState state;
};

inline Instance make_instance(std::uint64_t seed, SystemConfig cfg = default_config()) {
  Instance in;
  in.cfg = cfg;
  Rng rng(seed);
  in.geo = random_geometry(cfg.n_users, 10.0, rng);
  in.ch = generate_channels(cfg, in.geo, rng);
  Rng init_rng(derive_seed(seed, {1}));
  in.state = init_state(cfg, init_rng);
  return in;
}

inline CVec random_cvec(Eigen::Index n, Rng& rng) {
  CVec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.complex_normal();
  return v;
}

inline CMat random_cmat(Eigen::Index r, Eigen::Index c, Rng& rng) {
  CMat m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = rng.complex_normal();
  return m;
}

inline CVec random_phases(Eigen::Index n, Rng& rng) {
  CVec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = std::polar(1.0, rng.uniform(0.0, 6.283185307179586));
  return v;
}

// Random precoder with Tr[F^H F] = radius2 * U(0,1).
inline CMat random_feasible_f(const SystemConfig& cfg, Rng& rng) {
  CMat f = random_cmat(cfg.n_tx, cfg.n_users, rng);
  return f * std::sqrt(cfg.p_max * rng.uniform() / f.squaredNorm());
}

// Signal-model oracle written against the explicit diagonal reflection
// matrix and term-by-term sums, independent of the library's cascade helper.
struct Oracle {
  const SystemConfig& cfg;
  const ChannelSet& ch;

  CMat Phi(const CVec& phi) const { return phi.asDiagonal(); }

  double gamma_d(int k, const BeamState& s) const {
    const CMat P = Phi(s.phi);
    const auto uk = static_cast<std::size_t>(k);
    const Eigen::RowVectorXcd hk = ch.h_r[uk].adjoint() * P * ch.g_t;
    const double sig = std::norm((hk * s.f.col(k))(0));
    double den = cfg.noise_user[uk];
    for (int m = 0; m < cfg.n_users; ++m) {
      const auto um = static_cast<std::size_t>(m);
      if (m != k) den += std::norm((hk * s.f.col(m))(0));
      const double rho = m == k ? cfg.rho_s : 1.0;
      den += rho * cfg.p_user[um] * std::norm((ch.h_r[uk].adjoint() * P * ch.h_t[um])(0));
    }
    return sig / den;
  }

  // MMSE-receiver SINR: P_k q_k^H R_k^{-1} q_k with interference-plus-noise
  // covariance R_k.
  double gamma_u_mmse(int k, const CVec& phi) const {
    const CMat P = Phi(phi);
    const Eigen::Index nr = ch.g_r.cols();
    CMat r = cfg.noise_bs * CMat::Identity(nr, nr);
    std::vector<CVec> q;
    for (int m = 0; m < cfg.n_users; ++m)
      q.push_back(ch.g_r.adjoint() * P * ch.h_t[static_cast<std::size_t>(m)]);
    for (int m = 0; m < cfg.n_users; ++m)
      if (m != k) r += cfg.p_user[static_cast<std::size_t>(m)] * q[m] * q[m].adjoint();
    const auto uk = static_cast<std::size_t>(k);
    return cfg.p_user[uk] * std::real(q[uk].dot(r.inverse() * q[uk]));
  }
};

}  // namespace irsfd::testing
