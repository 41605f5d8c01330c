#pragma once

#include <vector>

#include "irsfd/model.hpp"
#include "irsfd/types.hpp"

namespace irsfd {

/// Per-user SINRs, natural-log rates and the weighted minimum rate.
struct RateReport {
  std::vector<double> gamma_d, gamma_u;
  std::vector<double> rate_d, rate_u;
  double wmr = 0.0;
};

/// Cascaded channels for a fixed phi, shared by every metric.
///   gd[k]    N_t vector with gd[k]^H f = h_r,k^H Phi G_t f
///   si(k,m)  h_r,k^H Phi h_t,m (user m's uplink leaking into user k)
///   q[m]     G_r^H Phi h_t,m (uplink effective channel at the BS)
struct Cascade {
  std::vector<CVec> gd;
  CMat si;
  std::vector<CVec> q;
};

Cascade cascade(const CVec& phi, const ChannelSet& ch);

double sinr_downlink(int k, const BeamState& s, const ChannelSet& ch, const SystemConfig& cfg);
double sinr_uplink(int k, const CVec& u, const CVec& phi, const ChannelSet& ch,
                   const SystemConfig& cfg);

/// Rates with the uplink receivers stored in `aux`. A zero receiver yields a
/// zero uplink SINR.
RateReport rate_report(const BeamState& s, const AuxState& aux, const ChannelSet& ch,
                       const SystemConfig& cfg);

/// Weighted minimum rate with MMSE receivers (the problem objective).
double weighted_min_rate(const BeamState& s, const ChannelSet& ch, const SystemConfig& cfg);

double mse_downlink(int k, const BeamState& s, const AuxState& aux, const ChannelSet& ch,
                    const SystemConfig& cfg);
double mse_uplink(int k, const BeamState& s, const AuxState& aux, const ChannelSet& ch,
                  const SystemConfig& cfg);

/// MMSE decoders; the returned AuxState has empty weight lists.
AuxState update_decoders(const BeamState& s, const ChannelSet& ch, const SystemConfig& cfg);

struct Weights {
  std::vector<double> w_d, w_u;
};

/// w = 1/e per link and user.
Weights update_weights(const BeamState& s, const AuxState& aux, const ChannelSet& ch,
                       const SystemConfig& cfg);

/// Decoders followed by weights.
AuxState optimal_aux(const BeamState& s, const ChannelSet& ch, const SystemConfig& cfg);

/// log(w) - w e + 1 for the given link and user (unweighted).
double surrogate_rate(Link l, int k, const BeamState& s, const AuxState& aux,
                      const ChannelSet& ch, const SystemConfig& cfg);

/// Solves R x = b for Hermitian positive-definite R by Cholesky, throwing
/// NumericalError when the relative backward error exceeds `tol`.
CVec solve_hpd(const CMat& r, const CVec& b, double tol = 1e-10);

}  // namespace irsfd
