#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "irsfd/socp.hpp"
#include "support.hpp"

using namespace irsfd;

namespace {

double min_h(const ConvexSubproblem& p, const CVec& x) {
  double m = 1e300;
  for (const auto& q : p.quadratics) m = std::min(m, eval_quadratic(q, x));
  return m;
}

// Zooming grid search: a full grid over the box, then two refinements of
// the same resolution around the best cell.
double zoom_grid(std::vector<double> lo, std::vector<double> hi, int pts,
                 const std::function<double(const std::vector<double>&)>& f) {
  const std::size_t d = lo.size();
  double best = -1e300;
  std::vector<double> arg(d);
  for (int level = 0; level < 3; ++level) {
    std::vector<int> idx(d, 0);
    std::vector<double> x(d);
    while (true) {
      for (std::size_t i = 0; i < d; ++i)
        x[i] = lo[i] + (hi[i] - lo[i]) * idx[i] / (pts - 1);
      const double v = f(x);
      if (v > best) {
        best = v;
        arg = x;
      }
      std::size_t i = 0;
      while (i < d && ++idx[i] == pts) idx[i++] = 0;
      if (i == d) break;
    }
    for (std::size_t i = 0; i < d; ++i) {
      const double w = 2.0 * (hi[i] - lo[i]) / (pts - 1);
      lo[i] = arg[i] - w;
      hi[i] = arg[i] + w;
    }
  }
  return best;
}

ComplexQuadratic real_quadratic(const RVec& a, const RMat& am, double c) {
  return {a.cast<cd>(), am.cast<cd>(), c};
}

}  // namespace

TEST_CASE("precoder-shaped instance against a polar grid") {
  // Real data: the imaginary part only costs power, so the optimum is real
  // and lies in the plane, parameterized by radius and angle.
  Rng rng(5);
  for (int t = 0; t < 5; ++t) {
    ConvexSubproblem p;
    p.kind = SubproblemKind::precoder;
    p.ball_radius = 1.3;
    for (int k = 0; k < 2; ++k) {
      RVec a(2);
      a << rng.normal(), rng.normal();
      RMat b(2, 2);
      b << rng.normal(), rng.normal(), rng.normal(), rng.normal();
      p.quadratics.push_back(real_quadratic(a, 0.3 * b * b.transpose(), rng.uniform(-0.5, 0.5)));
    }
    const SolveReport r = solve_subproblem(p, 1e-7);
    const double grid = zoom_grid({0.0, 0.0}, {1.3, 2.0 * std::numbers::pi}, 400, [&](const auto& x) {
      const double rad = std::clamp(x[0], 0.0, 1.3);
      CVec v(2);
      v << rad * std::cos(x[1]), rad * std::sin(x[1]);
      return min_h(p, v);
    });
    CHECK(std::abs(r.obj - grid) <= 1e-3 * std::max(1.0, std::abs(grid)));
    CHECK(r.obj >= grid - 1e-6);
  }
}

TEST_CASE("relaxed phase instance against a four-dimensional grid") {
  const SystemConfig cfg = [] {
    SystemConfig c = with_users(default_config(), 1);
    c.n_tx = c.n_rx = 2;
    c.n_elements = 2;
    return c;
  }();
  for (std::uint64_t seed : {3u, 4u}) {
    const auto in = testing::make_instance(seed, cfg);
    const AuxState aux = optimal_aux(in.state, in.ch, in.cfg);
    const auto qq = build_phase_quadratics(aux, in.state.f, in.ch, in.cfg);
    const ConvexSubproblem p = phase_subproblem(qq);
    const SolveReport r = solve_subproblem(p, 1e-7);
    const double two_pi = 2.0 * std::numbers::pi;
    const double grid = zoom_grid({0.0, 0.0, 0.0, 0.0}, {two_pi, two_pi, 1.0, 1.0}, 28, [&](const auto& x) {
      CVec v(2);
      v << std::polar(std::clamp(x[2], 0.0, 1.0), x[0]), std::polar(std::clamp(x[3], 0.0, 1.0), x[1]);
      return min_h(p, v);
    });
    CHECK(std::abs(r.obj - grid) <= 1e-3 * std::max(1.0, std::abs(grid)));
    CHECK(r.obj >= grid - 1e-6);
  }
}

TEST_CASE("closed-form relaxed phase cases") {
  SUBCASE("linear objective aligns each entry") {
    Rng rng(2);
    ConvexSubproblem p;
    p.kind = SubproblemKind::phase_relaxed;
    const CVec a = testing::random_cvec(5, rng);
    p.quadratics.push_back({a, CMat::Zero(5, 5), 0.0});
    const SolveReport r = solve_subproblem(p, 1e-7);
    for (int m = 0; m < 5; ++m) {
      CHECK(std::abs(r.x_opt(m)) == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(std::abs(std::arg(r.x_opt(m) / a(m))) < 1e-5);
    }
    CHECK(r.obj == doctest::Approx(2.0 * a.cwiseAbs().sum()).epsilon(1e-7));
  }
  SUBCASE("pure curvature puts the optimum at the origin") {
    Rng rng(3);
    const CMat x = testing::random_cmat(4, 4, rng);
    ConvexSubproblem p;
    p.kind = SubproblemKind::phase_relaxed;
    p.quadratics.push_back({CVec::Zero(4), x * x.adjoint(), 0.75});
    const SolveReport r = solve_subproblem(p, 1e-7);
    CHECK(r.x_opt.norm() < 1e-3);
    CHECK(r.obj == doctest::Approx(0.75).epsilon(1e-7));
  }
  SUBCASE("no constraints is an error") {
    CHECK_THROWS_AS(solve_subproblem(ConvexSubproblem{}, 1e-7), DomainError);
  }
}

TEST_CASE("solver certificates on random subproblems") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto in = testing::make_instance(seed);
    Rng rng(seed);
    in.state.f = testing::random_feasible_f(in.cfg, rng);
    const AuxState aux = optimal_aux(in.state, in.ch, in.cfg);
    const auto pq = build_precoder_quadratics(aux, in.state.phi, in.ch, in.cfg);
    const SolveReport r = solve_precoder_subproblem(pq, in.cfg.p_max, 1e-7, &in.state.f);
    CHECK(r.kkt_residual <= 1e-7);
    const CMat f = unvec(r.x_opt, 4, 3);
    const auto h = eval_all(pq, f);
    const double mh = *std::min_element(h.begin(), h.end());
    CHECK(std::abs(r.delta - mh) <= 1e-6);
    const auto h0 = eval_all(pq, in.state.f);
    CHECK(mh >= *std::min_element(h0.begin(), h0.end()));
    CHECK(f.squaredNorm() <= in.cfg.p_max * (1.0 + 1e-9));

    const auto qq = build_phase_quadratics(aux, in.state.f, in.ch, in.cfg);
    const SolveReport s = solve_phase_subproblem_relaxed(qq, 1e-7, &in.state.phi);
    CHECK(s.kkt_residual <= 1e-7);
    const auto g = eval_all(qq, s.x_opt);
    CHECK(std::abs(s.delta - *std::min_element(g.begin(), g.end())) <= 1e-6);
    const auto g0 = eval_all(qq, in.state.phi);
    CHECK(s.obj >= *std::min_element(g0.begin(), g0.end()));
    for (int m = 0; m < 16; ++m) CHECK(std::abs(s.x_opt(m)) <= 1.0 + 1e-9);
    CHECK(s.duals.size() == 6);
  }
}

TEST_CASE("inactive power constraint means unconstrained stationarity") {
  // One concave quadratic with its peak well inside the ball.
  ConvexSubproblem p;
  p.kind = SubproblemKind::precoder;
  p.ball_radius = 10.0;
  CVec a(2);
  a << cd(0.3, -0.1), cd(0.2, 0.4);
  CMat am = CMat::Identity(2, 2);
  p.quadratics.push_back({a, am, 0.1});
  const SolveReport r = solve_subproblem(p, 1e-7);
  // Gradient 2(a - A x) vanishes at the peak.
  CHECK((a - am * r.x_opt).norm() <= 1e-6);
}

TEST_CASE("unreachable tolerance raises with the best iterate") {
  auto in = testing::make_instance(3);
  const AuxState aux = optimal_aux(in.state, in.ch, in.cfg);
  const auto pq = build_precoder_quadratics(aux, in.state.phi, in.ch, in.cfg);
  try {
    solve_precoder_subproblem(pq, in.cfg.p_max, 0.0, &in.state.f);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.best().x_opt.size() == 12);
    CHECK(e.best().kkt_residual > 0.0);
  }
}

TEST_CASE("projection and acceptance") {
  auto in = testing::make_instance(14);
  const AuxState aux = optimal_aux(in.state, in.ch, in.cfg);
  const auto qq = build_phase_quadratics(aux, in.state.f, in.ch, in.cfg);
  const CVec& now = in.state.phi;
  auto mh = [&](const CVec& x) {
    const auto h = eval_all(qq, x);
    return *std::min_element(h.begin(), h.end());
  };
  SUBCASE("unit-modulus input is returned as is") {
    Rng rng(1);
    const CVec u = testing::random_phases(16, rng);
    const CVec out = project_and_accept(u, u, qq);
    CHECK((out - u).norm() < 1e-15);
  }
  SUBCASE("improving projection is accepted, degrading one is not") {
    Rng rng(2);
    int accepted = 0, rejected = 0;
    for (int t = 0; t < 40; ++t) {
      const CVec cand = 0.5 * testing::random_phases(16, rng);
      const CVec out = project_and_accept(cand, now, qq);
      const CVec hat = project_unit_modulus(cand);
      if (mh(hat) >= mh(now)) {
        CHECK((out - hat).norm() < 1e-15);
        ++accepted;
      } else {
        CHECK(out == now);
        ++rejected;
      }
      for (int m = 0; m < 16; ++m) CHECK(std::abs(out(m)) == doctest::Approx(1.0).epsilon(1e-15));
    }
    CHECK(rejected > 0);
    // The relaxed optimum itself should usually project to an improvement.
    const SolveReport r = solve_phase_subproblem_relaxed(qq, 1e-7, &in.state.phi);
    const CVec out = project_and_accept(r.x_opt, now, qq);
    CHECK(mh(out) >= mh(now));
    (void)accepted;
  }
}

TEST_CASE("BCD-SOCP run") {
  for (std::uint64_t seed : {1u, 2u}) {
    auto in = testing::make_instance(seed);
    const RunTrace tr = run_bcd_socp(in.cfg, in.ch, in.state);
    for (std::size_t i = 1; i < tr.objective.size(); ++i)
      CHECK(tr.objective[i] >= tr.objective[i - 1] - 1e-9);
    CHECK(tr.converged);
    CHECK(tr.final.f.squaredNorm() <= in.cfg.p_max * (1.0 + 1e-9));
  }
  auto in = testing::make_instance(5);
  in.cfg.n_max = 1;
  const RunTrace one = run_bcd_socp(in.cfg, in.ch, in.state);
  CHECK(one.objective.size() == 2);
  CHECK(one.objective[1] >= one.objective[0] - 1e-9);
}
