#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "irsfd/mm.hpp"
#include "irsfd/model.hpp"
#include "irsfd/quadratics.hpp"
#include "irsfd/types.hpp"

namespace irsfd {

/// Concave quadratic 2 Re{a^H x} - x^H A x + constant in a complex vector x.
struct ComplexQuadratic {
  CVec a;
  CMat a_mat;
  double constant = 0.0;
};

enum class SubproblemKind { precoder, phase_relaxed };

/// max delta s.t. h_i(x) >= delta for every quadratic, plus either the ball
/// ||x||^2 <= radius^2 (precoder, x = vec(F)) or |x_m| <= 1 for every entry
/// (phase_relaxed, radius ignored).
///
/// Internally x is realified as y = [Re x; Im x]; a Hermitian A becomes the
/// symmetric [[Re A, -Im A], [Im A, Re A]] and a becomes [Re a; Im a].
struct ConvexSubproblem {
  SubproblemKind kind = SubproblemKind::precoder;
  std::vector<ComplexQuadratic> quadratics;
  double ball_radius = 1.0;
  std::optional<CVec> incumbent;  // optional feasible warm start
};

struct SolveReport {
  CVec x_opt;
  double obj = 0.0;    // min_i h_i(x_opt)
  double delta = 0.0;  // epigraph variable at termination
  double kkt_residual = 0.0;
  double duality_gap = 0.0;
  int iterations = 0;  // Newton steps
  bool kept_incumbent = false;
  std::vector<double> duals;  // one per quadratic constraint
};

/// Thrown when the barrier method fails to certify the requested tolerance.
/// Carries the best iterate found.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, SolveReport best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const SolveReport& best() const noexcept { return best_; }

 private:
  SolveReport best_;
};

double eval_quadratic(const ComplexQuadratic& q, const CVec& x);

/// Dense log-barrier Newton method. KKT residual is the largest of the
/// stationarity measure g^T H^{-1} g / t (Newton decrement of the centering
/// problem), the duality gap estimate and the primal infeasibility.
/// With an incumbent the result never has a smaller min_i h_i than it.
SolveReport solve_subproblem(const ConvexSubproblem& p, double tol = 1e-7);

/// vec(F) form of the precoder quadratics: A = I_K (x) B, a = vec(C).
ConvexSubproblem precoder_subproblem(const std::vector<PrecoderQuadratic>& quads, double p_max,
                                     const CMat* incumbent = nullptr);
ConvexSubproblem phase_subproblem(const std::vector<PhaseQuadratic>& quads,
                                  const CVec* incumbent = nullptr);

SolveReport solve_precoder_subproblem(const std::vector<PrecoderQuadratic>& quads, double p_max,
                                      double tol = 1e-7, const CMat* incumbent = nullptr);
SolveReport solve_phase_subproblem_relaxed(const std::vector<PhaseQuadratic>& quads,
                                           double tol = 1e-7, const CVec* incumbent = nullptr);

/// Reshapes vec(F) back into an n_tx x n_users matrix.
CMat unvec(const CVec& x, Eigen::Index n_tx, Eigen::Index n_users);

/// exp(j angle(phi_tilde)) element-wise (angle 0 for zero entries), kept only
/// if it does not lower the minimum of the quadratics relative to phi_n.
CVec project_and_accept(const CVec& phi_tilde, const CVec& phi_n,
                        const std::vector<PhaseQuadratic>& quads);

/// Block coordinate ascent with convex subproblem solves for both blocks.
RunTrace run_bcd_socp(const SystemConfig& cfg, const ChannelSet& ch, const BeamState& init,
                      const RunOptions& opts = {});

}  // namespace irsfd
