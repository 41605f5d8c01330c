#pragma once

#include <vector>

#include "irsfd/model.hpp"
#include "irsfd/types.hpp"

namespace irsfd {

/// h(F) = 2 Re Tr[C^H F] - Tr[F^H B F] + constant
struct PrecoderQuadratic {
  CMat b;  // N_t x N_t, Hermitian PSD
  CMat c;  // N_t x K
  double constant = 0.0;
};

/// h(phi) = 2 Re{a^H phi} - phi^H A phi + constant
struct PhaseQuadratic {
  CVec a_vec;
  CMat a_mat;
  double constant = 0.0;
  Link link = Link::downlink;
  int user = 0;
};

/// One quadratic per downlink user; each equals the weighted surrogate rate
/// omega * (log w - w e + 1) as a function of F.
std::vector<PrecoderQuadratic> build_precoder_quadratics(const AuxState& aux, const CVec& phi,
                                                         const ChannelSet& ch,
                                                         const SystemConfig& cfg);

/// 2K quadratics in phi: downlink users 0..K-1 first, then uplink users.
std::vector<PhaseQuadratic> build_phase_quadratics(const AuxState& aux, const CMat& f,
                                                   const ChannelSet& ch,
                                                   const SystemConfig& cfg);

double eval_quadratic(const PrecoderQuadratic& q, const CMat& f);
double eval_quadratic(const PhaseQuadratic& q, const CVec& phi);

std::vector<double> eval_all(const std::vector<PrecoderQuadratic>& qs, const CMat& f);
std::vector<double> eval_all(const std::vector<PhaseQuadratic>& qs, const CVec& phi);

}  // namespace irsfd
