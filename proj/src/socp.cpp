#include "irsfd/socp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "irsfd/metrics.hpp"

namespace irsfd {

namespace {

struct RealQuadratic {
  RMat q;
  RVec g;
  double c;
};

RealQuadratic realify(const ComplexQuadratic& cq) {
  const Eigen::Index n = cq.a.size();
  RealQuadratic r;
  r.q.resize(2 * n, 2 * n);
  const RMat ar = cq.a_mat.real();
  const RMat ai = cq.a_mat.imag();
  r.q << ar, -ai, ai, ar;
  r.q = 0.5 * (r.q + r.q.transpose());
  r.g.resize(2 * n);
  r.g << cq.a.real(), cq.a.imag();
  r.c = cq.constant;
  return r;
}

CVec complexify(const RVec& y) {
  const Eigen::Index n = y.size() / 2;
  CVec x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = cd(y(i), y(i + n));
  return x;
}

RVec realify(const CVec& x) {
  RVec y(2 * x.size());
  y << x.real(), x.imag();
  return y;
}

// Barrier state for max delta s.t. h_i(y) >= delta, b_j(y) >= 0.
class Barrier {
 public:
  Barrier(const ConvexSubproblem& p)
      : kind_(p.kind), radius2_(p.ball_radius * p.ball_radius) {
    for (const auto& q : p.quadratics) quads_.push_back(realify(q));
    if (!quads_.empty()) n_ = quads_.front().g.size();
  }

  Eigen::Index dim() const { return n_; }
  int n_quads() const { return static_cast<int>(quads_.size()); }
  int n_balls() const { return kind_ == SubproblemKind::precoder ? 1 : static_cast<int>(n_ / 2); }
  int n_terms() const { return n_quads() + n_balls(); }

  double h(int i, const RVec& y) const {
    const auto& q = quads_[static_cast<std::size_t>(i)];
    return 2.0 * q.g.dot(y) - y.dot(q.q * y) + q.c;
  }

  double min_h(const RVec& y) const {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_quads(); ++i) m = std::min(m, h(i, y));
    return m;
  }

  double ball(int j, const RVec& y) const {
    if (kind_ == SubproblemKind::precoder) return radius2_ - y.squaredNorm();
    const Eigen::Index m = n_ / 2;
    return 1.0 - y(j) * y(j) - y(j + m) * y(j + m);
  }

  // Barrier value; +inf outside the domain.
  double value(const RVec& z, double t) const {
    const RVec y = z.head(n_);
    const double delta = z(n_);
    double v = -t * delta;
    for (int i = 0; i < n_quads(); ++i) {
      const double s = h(i, y) - delta;
      if (!(s > 0.0)) return std::numeric_limits<double>::infinity();
      v -= std::log(s);
    }
    for (int j = 0; j < n_balls(); ++j) {
      const double b = ball(j, y);
      if (!(b > 0.0)) return std::numeric_limits<double>::infinity();
      v -= std::log(b);
    }
    return v;
  }

  void derivatives(const RVec& z, double t, RVec& grad, RMat& hess) const {
    const RVec y = z.head(n_);
    const double delta = z(n_);
    grad = RVec::Zero(n_ + 1);
    hess = RMat::Zero(n_ + 1, n_ + 1);
    grad(n_) = -t;
    for (const auto& q : quads_) {
      const RVec qy = q.q * y;
      const double s = 2.0 * q.g.dot(y) - y.dot(qy) + q.c - delta;
      const RVec dh = 2.0 * (q.g - qy);
      const double is = 1.0 / s;
      grad.head(n_) -= is * dh;
      grad(n_) += is;
      hess.topLeftCorner(n_, n_).noalias() += (is * is) * dh * dh.transpose();
      hess.topLeftCorner(n_, n_) += (2.0 * is) * q.q;
      hess.col(n_).head(n_) -= (is * is) * dh;
      hess(n_, n_) += is * is;
    }
    if (kind_ == SubproblemKind::precoder) {
      const double b = radius2_ - y.squaredNorm();
      const double ib = 1.0 / b;
      grad.head(n_) += (2.0 * ib) * y;
      hess.topLeftCorner(n_, n_).noalias() += (4.0 * ib * ib) * y * y.transpose();
      hess.topLeftCorner(n_, n_).diagonal().array() += 2.0 * ib;
    } else {
      const Eigen::Index m = n_ / 2;
      for (Eigen::Index j = 0; j < m; ++j) {
        const double a = y(j), c = y(j + m);
        const double ib = 1.0 / (1.0 - a * a - c * c);
        grad(j) += 2.0 * ib * a;
        grad(j + m) += 2.0 * ib * c;
        hess(j, j) += 4.0 * ib * ib * a * a + 2.0 * ib;
        hess(j + m, j + m) += 4.0 * ib * ib * c * c + 2.0 * ib;
        hess(j, j + m) += 4.0 * ib * ib * a * c;
        hess(j + m, j) += 4.0 * ib * ib * a * c;
      }
    }
    hess.row(n_).head(n_) = hess.col(n_).head(n_).transpose();
  }

  // Starting point strictly inside every constraint.
  RVec start(const std::optional<CVec>& incumbent, double tol) const {
    RVec y = RVec::Zero(n_);
    if (incumbent && incumbent->size() * 2 == n_) {
      y = realify(*incumbent);
      const double shrink = 1.0 - 1e-4;
      if (kind_ == SubproblemKind::precoder) {
        const double r = std::sqrt(radius2_);
        const double nrm = y.norm();
        if (nrm > shrink * r) y *= shrink * r / nrm;
      } else {
        const Eigen::Index m = n_ / 2;
        for (Eigen::Index j = 0; j < m; ++j) {
          const double mod = std::hypot(y(j), y(j + m));
          if (mod > shrink) {
            y(j) *= shrink / mod;
            y(j + m) *= shrink / mod;
          }
        }
      }
    }
    RVec z(n_ + 1);
    z.head(n_) = y;
    const double mh = min_h(y);
    z(n_) = mh - std::max(tol, 1e-6 * (1.0 + std::abs(mh)));
    return z;
  }

 private:
  SubproblemKind kind_;
  double radius2_;
  std::vector<RealQuadratic> quads_;
  Eigen::Index n_ = 0;
};

SolveReport make_report(const Barrier& bar, const ConvexSubproblem& p, const RVec& z, double t,
                        const RVec& grad, const RMat& hess, int iters) {
  const Eigen::Index n = bar.dim();
  SolveReport r;
  const RVec y = z.head(n);
  r.x_opt = complexify(y);
  r.delta = z(n);
  r.obj = std::numeric_limits<double>::infinity();
  for (const auto& q : p.quadratics) r.obj = std::min(r.obj, eval_quadratic(q, r.x_opt));
  r.duality_gap = static_cast<double>(bar.n_terms()) / t;
  double infeas = 0.0;
  for (int i = 0; i < bar.n_quads(); ++i) {
    const double s = bar.h(i, y) - r.delta;
    infeas = std::max(infeas, -s);
    r.duals.push_back(1.0 / (t * s));
  }
  for (int j = 0; j < bar.n_balls(); ++j) infeas = std::max(infeas, -bar.ball(j, y));
  // Stationarity in the local Hessian norm; invariant to the bad scaling near the
  // unit-modulus boundary, unlike a plain gradient norm.
  const double stat = grad.dot(hess.ldlt().solve(grad)) / t;
  r.kkt_residual = std::max({stat, r.duality_gap, infeas});
  r.iterations = iters;
  return r;
}

}  // namespace

double eval_quadratic(const ComplexQuadratic& q, const CVec& x) {
  return 2.0 * std::real(q.a.dot(x)) - std::real(x.dot(q.a_mat * x)) + q.constant;
}

SolveReport solve_subproblem(const ConvexSubproblem& p, double tol) {
  if (p.quadratics.empty()) throw DomainError("solve_subproblem: no constraints");
  const Barrier bar(p);
  RVec z = bar.start(p.incumbent, tol);
  const double m_terms = static_cast<double>(bar.n_terms());

  double t = 1.0;
  int iters = 0;
  RVec grad;
  RMat hess;
  constexpr int kMaxNewton = 80;
  constexpr int kMaxStages = 40;
  for (int stage = 0; stage < kMaxStages; ++stage) {
    for (int it = 0; it < kMaxNewton; ++it) {
      bar.derivatives(z, t, grad, hess);
      const Eigen::LDLT<RMat> ldlt(hess);
      RVec dz = ldlt.solve(-grad);
      if (!dz.allFinite()) break;
      const double dec = -grad.dot(dz);
      if (dec / 2.0 <= 1e-12) break;
      const double f0 = bar.value(z, t);
      double step = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        const RVec cand = z + step * dz;
        const double f1 = bar.value(cand, t);
        if (f1 <= f0 - 0.25 * step * dec) {
          z = cand;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      ++iters;
      if (!moved) break;
    }
    if (m_terms / t <= tol) break;
    t *= 10.0;
  }
  bar.derivatives(z, t, grad, hess);
  SolveReport rep = make_report(bar, p, z, t, grad, hess, iters);

  if (p.incumbent) {
    double inc = std::numeric_limits<double>::infinity();
    for (const auto& q : p.quadratics) inc = std::min(inc, eval_quadratic(q, *p.incumbent));
    if (inc > rep.obj) {
      rep.x_opt = *p.incumbent;
      rep.obj = inc;
      rep.kept_incumbent = true;
    }
  }
  if (!(rep.kkt_residual <= tol) || !rep.x_opt.allFinite())
    throw SolverError("solve_subproblem: KKT residual " + std::to_string(rep.kkt_residual) +
                          " above tolerance",
                      rep);
  return rep;
}

ConvexSubproblem precoder_subproblem(const std::vector<PrecoderQuadratic>& quads, double p_max,
                                     const CMat* incumbent) {
  ConvexSubproblem p;
  p.kind = SubproblemKind::precoder;
  p.ball_radius = std::sqrt(p_max);
  for (const auto& q : quads) {
    const Eigen::Index nt = q.b.rows();
    const Eigen::Index k = q.c.cols();
    ComplexQuadratic cq;
    cq.a = q.c.reshaped();
    cq.a_mat = CMat::Zero(nt * k, nt * k);
    for (Eigen::Index j = 0; j < k; ++j) cq.a_mat.block(j * nt, j * nt, nt, nt) = q.b;
    cq.constant = q.constant;
    p.quadratics.push_back(std::move(cq));
  }
  if (incumbent) p.incumbent = CVec(incumbent->reshaped());
  return p;
}

ConvexSubproblem phase_subproblem(const std::vector<PhaseQuadratic>& quads,
                                  const CVec* incumbent) {
  ConvexSubproblem p;
  p.kind = SubproblemKind::phase_relaxed;
  for (const auto& q : quads) p.quadratics.push_back({q.a_vec, q.a_mat, q.constant});
  if (incumbent) p.incumbent = *incumbent;
  return p;
}

SolveReport solve_precoder_subproblem(const std::vector<PrecoderQuadratic>& quads, double p_max,
                                      double tol, const CMat* incumbent) {
  return solve_subproblem(precoder_subproblem(quads, p_max, incumbent), tol);
}

SolveReport solve_phase_subproblem_relaxed(const std::vector<PhaseQuadratic>& quads, double tol,
                                           const CVec* incumbent) {
  return solve_subproblem(phase_subproblem(quads, incumbent), tol);
}

CMat unvec(const CVec& x, Eigen::Index n_tx, Eigen::Index n_users) {
  return x.reshaped(n_tx, n_users);
}

CVec project_and_accept(const CVec& phi_tilde, const CVec& phi_n,
                        const std::vector<PhaseQuadratic>& quads) {
  CVec hat(phi_tilde.size());
  for (Eigen::Index i = 0; i < phi_tilde.size(); ++i)
    hat(i) = phi_tilde(i) == cd(0.0, 0.0) ? cd(1.0, 0.0) : std::polar(1.0, std::arg(phi_tilde(i)));
  const auto before = eval_all(quads, phi_n);
  const auto after = eval_all(quads, hat);
  const double b = *std::min_element(before.begin(), before.end());
  const double a = *std::min_element(after.begin(), after.end());
  return a >= b ? hat : phi_n;
}

RunTrace run_bcd_socp(const SystemConfig& cfg, const ChannelSet& ch, const BeamState& init,
                      const RunOptions& opts) {
  validate(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  RunTrace tr;
  BeamState s = init;
  AuxState aux = optimal_aux(s, ch, cfg);
  double wmr = rate_report(s, aux, ch, cfg).wmr;
  if (!std::isfinite(wmr))
    throw NumericalError("run_bcd_socp: non-finite objective at iteration 0");
  tr.objective.push_back(wmr);

  auto min_of = [](const std::vector<double>& v) {
    return *std::min_element(v.begin(), v.end());
  };

  for (int n = 1; n <= cfg.n_max; ++n) {
    bool f_moved = false;
    bool phi_moved = false;
    try {
      const auto pq = build_precoder_quadratics(aux, s.phi, ch, cfg);
      double floor_u = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < aux.w_u.size(); ++k)
        floor_u = std::min(floor_u, cfg.weights_ul[k] * std::log(aux.w_u[k]));
      const SolveReport rep = solve_precoder_subproblem(pq, cfg.p_max, cfg.socp_tol, &s.f);
      const CMat cand = project_power(unvec(rep.x_opt, cfg.n_tx, cfg.n_users), cfg.p_max);
      const double before = std::min(min_of(eval_all(pq, s.f)), floor_u);
      const double after = std::min(min_of(eval_all(pq, cand)), floor_u);
      if (after >= before) {
        f_moved = (cand - s.f).norm() > 0.0;
        s.f = cand;
      }
      if (!f_moved) ++tr.precoder_rejections;

      if (opts.optimize_phase) {
        const auto qq = build_phase_quadratics(aux, s.f, ch, cfg);
        const SolveReport prep = solve_phase_subproblem_relaxed(qq, cfg.socp_tol, &s.phi);
        const CVec next = project_and_accept(prep.x_opt, s.phi, qq);
        phi_moved = (next - s.phi).norm() > 0.0;
        s.phi = next;
        if (!phi_moved) ++tr.phase_rejections;
      }
    } catch (const SolverError& e) {
      throw SolverError("run_bcd_socp: iteration " + std::to_string(n) + ": " + e.what(),
                        e.best());
    }

    aux = optimal_aux(s, ch, cfg);
    const double next = rate_report(s, aux, ch, cfg).wmr;
    if (!std::isfinite(next))
      throw NumericalError("run_bcd_socp: non-finite objective at iteration " +
                           std::to_string(n));
    tr.objective.push_back(next);
    tr.iters = n;
    const double prev = wmr;
    wmr = next;
    const double diff = std::abs(wmr - prev);
    const bool small = prev == 0.0 ? diff < cfg.eps : diff / std::abs(prev) < cfg.eps;
    if (small || (!f_moved && !phi_moved)) {
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
