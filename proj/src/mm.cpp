#include "irsfd/mm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "irsfd/metrics.hpp"
#include "irsfd/socp.hpp"

namespace irsfd {

double smoothed_min(const std::vector<double>& h, double mu) {
  if (h.empty()) throw DomainError("smoothed_min: empty input");
  const double m = *std::min_element(h.begin(), h.end());
  double s = 0.0;
  for (double x : h) s += std::exp(-mu * (x - m));
  return m - std::log(s) / mu;
}

std::vector<double> softmax_weights(const std::vector<double>& h, double mu) {
  if (h.empty()) return {};
  const double m = *std::min_element(h.begin(), h.end());
  std::vector<double> g(h.size());
  double s = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) s += g[i] = std::exp(-mu * (h[i] - m));
  for (double& x : g) x /= s;
  return g;
}

double largest_eigenvalue(const CMat& a) {
  const Eigen::Index n = a.rows();
  if (n == 0 || a.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  CVec x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = cd(1.0, 0.1 * static_cast<double>(i + 1));
  x.normalize();
  double lam = 0.0;
  for (int it = 0; it < 500; ++it) {
    const CVec y = a * x;
    const double next = std::real(x.dot(y));
    const double ny = y.norm();
    if (ny == 0.0) break;
    x = y / ny;
    if (it > 0 && std::abs(next - lam) <= 1e-8 * std::abs(next)) return next;
    lam = next;
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

PrecoderCurvature precoder_curvature(const std::vector<PrecoderQuadratic>& quads, double p_max) {
  PrecoderCurvature c;
  const double sp = std::sqrt(p_max);
  for (const auto& q : quads) {
    // B is rank one, so its trace is its largest eigenvalue.
    const double tp1 = std::real(q.b.trace());
    const double tp2 = p_max * tp1 * tp1 + q.c.squaredNorm() + 2.0 * sp * (q.b * q.c).norm();
    c.tp1_max = std::max(c.tp1_max, tp1);
    c.tp2_max = std::max(c.tp2_max, tp2);
  }
  return c;
}

PhaseCurvature phase_curvature(const std::vector<PhaseQuadratic>& quads) {
  PhaseCurvature c;
  for (const auto& q : quads) {
    const double lam = largest_eigenvalue(q.a_mat);
    const double m = static_cast<double>(q.a_vec.size());
    const double spread =
        q.a_vec.squaredNorm() + m * lam * lam + 2.0 * (q.a_mat * q.a_vec).cwiseAbs().sum();
    c.lambda_max = std::max(c.lambda_max, lam);
    c.spread_max = std::max(c.spread_max, spread);
  }
  return c;
}

PrecoderMinorizer precoder_minorizer(const std::vector<PrecoderQuadratic>& quads,
                                     const CMat& f_n, double mu, double p_max) {
  return precoder_minorizer(quads, precoder_curvature(quads, p_max), f_n, mu);
}

PrecoderMinorizer precoder_minorizer(const std::vector<PrecoderQuadratic>& quads,
                                     const PrecoderCurvature& curv, const CMat& f_n, double mu) {
  const std::vector<double> h = eval_all(quads, f_n);
  const std::vector<double> g = softmax_weights(h, mu);
  CMat d = CMat::Zero(f_n.rows(), f_n.cols());
  for (std::size_t k = 0; k < quads.size(); ++k) d += g[k] * (quads[k].c - quads[k].b * f_n);
  PrecoderMinorizer m;
  m.alpha = -curv.tp1_max - 2.0 * mu * curv.tp2_max;
  m.v = d - m.alpha * f_n;
  m.constant = smoothed_min(h, mu) - 2.0 * std::real((m.v.adjoint() * f_n).trace()) -
               m.alpha * f_n.squaredNorm();
  m.anchor = f_n;
  return m;
}

double eval_minorizer(const PrecoderMinorizer& m, const CMat& f) {
  return 2.0 * std::real((m.v.adjoint() * f).trace()) + m.alpha * f.squaredNorm() + m.constant;
}

CMat mm_precoder_step(const PrecoderMinorizer& m, double p_max, bool* degenerate) {
  const double vv = m.v.squaredNorm();
  if (degenerate) *degenerate = false;
  if (m.alpha == 0.0) {
    if (vv == 0.0) {
      if (degenerate) *degenerate = true;
      return m.anchor;
    }
    return std::sqrt(p_max / vv) * m.v;
  }
  if (vv / (m.alpha * m.alpha) <= p_max) return -m.v / m.alpha;
  // Boundary case: F = V / (zeta - alpha) with zeta > 0, i.e. aligned with V.
  return std::sqrt(p_max / vv) * m.v;
}

PhaseMinorizer phase_minorizer(const std::vector<PhaseQuadratic>& quads, const CVec& phi_n,
                               double mu) {
  return phase_minorizer(quads, phase_curvature(quads), phi_n, mu);
}

PhaseMinorizer phase_minorizer(const std::vector<PhaseQuadratic>& quads,
                               const PhaseCurvature& curv, const CVec& phi_n, double mu) {
  const std::vector<double> h = eval_all(quads, phi_n);
  const std::vector<double> g = softmax_weights(h, mu);
  CVec d = CVec::Zero(phi_n.size());
  for (std::size_t i = 0; i < quads.size(); ++i)
    d += g[i] * (quads[i].a_vec - quads[i].a_mat * phi_n);
  PhaseMinorizer m;
  m.beta = -2.0 * mu * curv.spread_max - curv.lambda_max;
  m.v = d - m.beta * phi_n;
  m.constant = smoothed_min(h, mu) - 2.0 * std::real(m.v.dot(phi_n));
  m.anchor = phi_n;
  return m;
}

double eval_minorizer(const PhaseMinorizer& m, const CVec& phi) {
  return 2.0 * std::real(m.v.dot(phi)) + m.constant;
}

CVec mm_phase_step(const PhaseMinorizer& m, const CVec& phi_n) {
  CVec out(phi_n.size());
  for (Eigen::Index i = 0; i < phi_n.size(); ++i)
    out(i) = std::abs(m.v(i)) < 1e-300 ? phi_n(i) : std::polar(1.0, std::arg(m.v(i)));
  return out;
}

CMat project_power(const CMat& f, double p_max) {
  const double p = f.squaredNorm();
  if (p <= p_max) return f;
  return std::sqrt(p_max / p) * f;
}

CVec project_unit_modulus(const CVec& phi) {
  CVec out(phi.size());
  for (Eigen::Index i = 0; i < phi.size(); ++i) out(i) = std::polar(1.0, std::arg(phi(i)));
  return out;
}

namespace {

// Objective of the original problem at s, with optimal decoders and weights.
double true_wmr(const BeamState& s, const ChannelSet& ch, const SystemConfig& cfg) {
  return rate_report(s, optimal_aux(s, ch, cfg), ch, cfg).wmr;
}

bool relative_change_below(double now, double prev, double eps) {
  const double diff = std::abs(now - prev);
  return prev == 0.0 ? diff < eps : diff / std::abs(prev) < eps;
}

}  // namespace

RunTrace run_bcd_mm(const SystemConfig& cfg, const ChannelSet& ch, const BeamState& init,
                    const RunOptions& opts) {
  validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  RunTrace tr;
  BeamState s = init;
  AuxState aux = optimal_aux(s, ch, cfg);
  double wmr = rate_report(s, aux, ch, cfg).wmr;
  if (!std::isfinite(wmr)) throw NumericalError("run_bcd_mm: non-finite objective at iteration 0");
  tr.objective.push_back(wmr);
  double mu = cfg.mu0;
  const double p_max = cfg.p_max;

  for (int n = 1; n <= cfg.n_max; ++n) {
    tr.mu_path.push_back(mu);
    bool f_moved = false;
    bool phi_moved = false;

    // Precoder block. A candidate is kept only if the true objective does not
    // decrease, which makes the trace monotone regardless of smoothing.
    {
      const auto pq = build_precoder_quadratics(aux, s.phi, ch, cfg);
      auto guard = [&](const CMat& f) { return true_wmr({f, s.phi}, ch, cfg); };
      const double base = wmr;
      std::vector<CMat> cands;
      if (opts.precoder_step == PrecoderStepKind::mm) {
        const PrecoderCurvature curv = precoder_curvature(pq, p_max);
        auto map = [&](const CMat& f) {
          return mm_precoder_step(precoder_minorizer(pq, curv, f, mu), p_max);
        };
        auto proj = [&](const CMat& f) { return project_power(f, p_max); };
        auto obj = [&](const CMat& f) { return smoothed_min(eval_all(pq, f), mu); };
        SquaremDetail<CMat> det;
        cands.push_back(squarem_step(s.f, map, proj, obj, &det));
        if (det.used_x2) ++tr.squarem_fallbacks;
        cands.push_back(std::move(det.x2));
        cands.push_back(std::move(det.x1));
      } else {
        try {
          cands.push_back(unvec(solve_precoder_subproblem(pq, p_max, cfg.socp_tol, &s.f).x_opt,
                                cfg.n_tx, cfg.n_users));
        } catch (const SolverError& e) {
          if (e.best().x_opt.size() > 0)
            cands.push_back(project_power(unvec(e.best().x_opt, cfg.n_tx, cfg.n_users), p_max));
        }
      }
      for (auto& c : cands) {
        if (c.allFinite() && guard(c) >= base) {
          f_moved = (c - s.f).norm() > 0.0;
          s.f = std::move(c);
          break;
        }
      }
      if (!f_moved) ++tr.precoder_rejections;
    }

    if (opts.optimize_phase) {
      const auto qq = build_phase_quadratics(aux, s.f, ch, cfg);
      auto guard = [&](const CVec& p) { return true_wmr({s.f, p}, ch, cfg); };
      const double base = guard(s.phi);
      const PhaseCurvature curv = phase_curvature(qq);
      auto map = [&](const CVec& p) { return mm_phase_step(phase_minorizer(qq, curv, p, mu), p); };
      auto obj = [&](const CVec& p) { return smoothed_min(eval_all(qq, p), mu); };
      SquaremDetail<CVec> det;
      std::vector<CVec> cands;
      cands.push_back(squarem_step(s.phi, map, project_unit_modulus, obj, &det));
      if (det.used_x2) ++tr.squarem_fallbacks;
      cands.push_back(std::move(det.x2));
      cands.push_back(std::move(det.x1));
      for (auto& c : cands) {
        if (c.allFinite() && guard(c) >= base) {
          phi_moved = (c - s.phi).norm() > 0.0;
          s.phi = std::move(c);
          break;
        }
      }
      if (!phi_moved) ++tr.phase_rejections;
      tr.surrogate.push_back(smoothed_min(eval_all(qq, s.phi), mu));
    }

    const double mu_used = mu;
    mu = std::min(std::max(std::pow(mu, cfg.iota), mu), cfg.mu_max);

    aux = optimal_aux(s, ch, cfg);
    const double next = rate_report(s, aux, ch, cfg).wmr;
    if (!std::isfinite(next))
      throw NumericalError("run_bcd_mm: non-finite objective at iteration " + std::to_string(n));
    tr.objective.push_back(next);
    tr.iters = n;
    const double prev = wmr;
    wmr = next;

    // The relative-change test only applies once the smoothing schedule has
    // reached its cap; before that the smoothed problem is still moving.
    const bool uses_mu = opts.optimize_phase || opts.precoder_step == PrecoderStepKind::mm;
    if ((!uses_mu || mu_used >= cfg.mu_max) && relative_change_below(wmr, prev, cfg.eps)) {
      tr.converged = true;
      break;
    }
  }

  tr.final = s;
  tr.final_aux = aux;
  if (opts.record_timing)
    tr.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return tr;
}

}  // namespace irsfd
