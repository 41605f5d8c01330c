#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "irsfd/model.hpp"
#include "irsfd/quadratics.hpp"
#include "irsfd/types.hpp"

namespace irsfd {

/// -(1/mu) log sum_i exp(-mu h_i), evaluated with the minimum factored out.
double smoothed_min(const std::vector<double>& h, double mu);

/// exp(-mu h_i) / sum_j exp(-mu h_j), shifted for overflow safety.
std::vector<double> softmax_weights(const std::vector<double>& h, double mu);

/// Largest eigenvalue of a Hermitian PSD matrix: power iteration (relative
/// tolerance 1e-8, at most 500 steps) with a dense eigensolver fallback.
double largest_eigenvalue(const CMat& a);

/// Curvature bounds that depend only on the quadratics, so they can be
/// computed once per outer iteration and reused across SQUAREM map calls.
struct PrecoderCurvature {
  double tp1_max = 0.0;
  double tp2_max = 0.0;
};
PrecoderCurvature precoder_curvature(const std::vector<PrecoderQuadratic>& quads, double p_max);

struct PhaseCurvature {
  double lambda_max = 0.0;  // max over quadratics of lambda_max(A)
  double spread_max = 0.0;  // max of ||a||^2 + M lambda_max(A)^2 + 2 ||A a||_1
};
PhaseCurvature phase_curvature(const std::vector<PhaseQuadratic>& quads);

/// Quadratic lower bound 2 Re Tr[V^H F] + alpha ||F||^2 + constant of the
/// smoothed downlink minimum, touching it at `anchor`.
struct PrecoderMinorizer {
  CMat v;
  double alpha = 0.0;
  double constant = 0.0;
  CMat anchor;
};

PrecoderMinorizer precoder_minorizer(const std::vector<PrecoderQuadratic>& quads,
                                     const CMat& f_n, double mu, double p_max);
PrecoderMinorizer precoder_minorizer(const std::vector<PrecoderQuadratic>& quads,
                                     const PrecoderCurvature& curv, const CMat& f_n, double mu);
double eval_minorizer(const PrecoderMinorizer& m, const CMat& f);

/// Maximizer of the minorizer over the power ball. When V and alpha both
/// vanish the anchor is returned and `degenerate` (if given) is set.
CMat mm_precoder_step(const PrecoderMinorizer& m, double p_max, bool* degenerate = nullptr);

/// Linear lower bound 2 Re{v^H phi} + constant of the smoothed minimum over
/// all 2K quadratics, valid on the unit-modulus set and touching at `anchor`.
struct PhaseMinorizer {
  CVec v;
  double beta = 0.0;
  double constant = 0.0;
  CVec anchor;
};

PhaseMinorizer phase_minorizer(const std::vector<PhaseQuadratic>& quads, const CVec& phi_n,
                               double mu);
PhaseMinorizer phase_minorizer(const std::vector<PhaseQuadratic>& quads,
                               const PhaseCurvature& curv, const CVec& phi_n, double mu);
double eval_minorizer(const PhaseMinorizer& m, const CVec& phi);

/// Element-wise phase alignment with v; entries with |v_m| < 1e-300 keep
/// their previous value.
CVec mm_phase_step(const PhaseMinorizer& m, const CVec& phi_n);

/// Projections used by the accelerated steps.
CMat project_power(const CMat& f, double p_max);
CVec project_unit_modulus(const CVec& phi);

/// Details of one SQUAREM step, for diagnostics and safeguards.
template <class X>
struct SquaremDetail {
  X x1, x2;
  double step = -1.0;   // final step factor
  int backtracks = 0;
  bool used_x2 = false;  // plain double map returned
};

/// One squared-extrapolation step. The step factor is shrunk towards -1 by
/// (s - 1)/2 until the projected extrapolation does not lower `objective`
/// below its value at x_n; after 50 shrinks, or when the second difference
/// vanishes, the double map x2 is returned.
template <class X, class Map, class Project, class Objective>
X squarem_step(const X& x_n, Map&& iterate_map, Project&& project, Objective&& objective,
               SquaremDetail<X>* detail = nullptr) {
  X x1 = iterate_map(x_n);
  X x2 = iterate_map(x1);
  const X q1 = x1 - x_n;
  const X q2 = x2 - x1 - q1;
  auto finish = [&](X out, double step, int bt, bool used_x2) {
    if (detail) {
      detail->x1 = std::move(x1);
      detail->x2 = x2;
      detail->step = step;
      detail->backtracks = bt;
      detail->used_x2 = used_x2;
    }
    return out;
  };
  const double n2 = q2.norm();
  if (n2 < 1e-14) return finish(x2, -1.0, 0, true);
  double step = -q1.norm() / n2;
  const double base = objective(x_n);
  for (int bt = 0; bt <= 50; ++bt) {
    if (std::abs(step + 1.0) <= 1e-9) return finish(x2, step, bt, true);
    X cand = project(X(x_n - 2.0 * step * q1 + step * step * q2));
    if (objective(cand) >= base) return finish(std::move(cand), step, bt, false);
    step = (step - 1.0) / 2.0;
  }
  return finish(x2, step, 50, true);
}

enum class PrecoderStepKind { mm, socp };

struct RunOptions {
  bool optimize_phase = true;
  PrecoderStepKind precoder_step = PrecoderStepKind::mm;
  bool record_timing = true;
};

/// One optimizer run. objective[0] is the weighted minimum rate of the
/// initial state and objective[n] the value after outer iteration n.
struct RunTrace {
  std::vector<double> objective;
  std::vector<double> surrogate;  // smoothed phase objective after each iteration
  std::vector<double> mu_path;    // mu used in each iteration
  int iters = 0;
  double wall_time = 0.0;  // seconds
  BeamState final;
  AuxState final_aux;
  bool converged = false;
  int precoder_rejections = 0;  // block updates discarded by the safeguard
  int phase_rejections = 0;
  int squarem_fallbacks = 0;
};

/// Block coordinate ascent with MM/SQUAREM updates for F and phi.
RunTrace run_bcd_mm(const SystemConfig& cfg, const ChannelSet& ch, const BeamState& init,
                    const RunOptions& opts = {});

}  // namespace irsfd
