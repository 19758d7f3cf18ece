#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "instances.hpp"
#include "pdpath/solver.hpp"
#include "reference_solvers.hpp"
#include "test_util.hpp"

using namespace pdpath;

TEST_CASE("smooth terms satisfy their Lipschitz and gradient contracts") {
  testutil::Rng rng(640);
  const LinearMap K = LinearMap::dense(3, 4, rng.uniform_vec(12, -1.0, 1.0));
  std::vector<SmoothTerm> terms = {
      SmoothTerm::quadratic_distance(rng.uniform_vec(4, -1.0, 1.0)),
      SmoothTerm::least_squares(K, rng.uniform_vec(3, -1.0, 1.0))};
  for (const auto& f : terms) {
    for (int k = 0; k < 50; ++k) {
      const Vec x = rng.uniform_vec(f.dim, -2.0, 2.0);
      const Vec y = rng.uniform_vec(f.dim, -2.0, 2.0);
      Vec gx = f.gradient(x), gy = f.gradient(y);
      double dg = 0.0, dxy = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        dg += (gx[i] - gy[i]) * (gx[i] - gy[i]);
        dxy += (x[i] - y[i]) * (x[i] - y[i]);
      }
      CHECK(std::sqrt(dg) <= f.lipschitz * std::sqrt(dxy) * (1.0 + 1e-12));

      // central difference along a random direction
      Vec d = rng.uniform_vec(f.dim, -1.0, 1.0);
      const double nd = norm2(d);
      for (auto& di : d) di /= nd;
      const double eps = 1e-6;
      Vec xp = x, xm = x;
      for (std::size_t i = 0; i < x.size(); ++i) {
        xp[i] += eps * d[i];
        xm[i] -= eps * d[i];
      }
      const double fd = (f.value(xp) - f.value(xm)) / (2.0 * eps);
      const double an = dot(gx, d);
      CHECK(fd == doctest::Approx(an).epsilon(1e-5));
    }
  }
}

TEST_CASE("validate_steps arithmetic") {
  const StepCheck ok = validate_steps(0.5, 0.1, 1.0, 1.0);
  CHECK(ok.ok);
  CHECK(ok.slack == doctest::Approx(1.4));

  const StepCheck bad = validate_steps(1.0, 1.0, 2.0, 1.0);
  CHECK_FALSE(bad.ok);
  CHECK(bad.slack == doctest::Approx(-1.0));

  // alpha = 1/L with L = 4 and ||A|| = sqrt(8): admissible beta < 0.25
  const double normA = std::sqrt(8.0);
  CHECK(validate_steps(0.25, 0.2499, 4.0, normA).ok);
  CHECK_FALSE(validate_steps(0.25, 0.25, 4.0, normA).ok);  // boundary strict

  CHECK_FALSE(validate_steps(-1.0, 0.1, 0.0, 1.0).ok);
  CHECK_FALSE(validate_steps(0.1, 0.0, 0.0, 1.0).ok);
}

TEST_CASE("default steps are admissible") {
  for (auto p : {instances::toy1d(), instances::lasso2d(), instances::tv4x4(0.3),
                 instances::dense_random(7)}) {
    const StepSizes s = default_steps(p);
    CHECK(validate_steps(s.alpha, s.beta, p.f.lipschitz, p.A.norm_bound()).ok);
  }
}

TEST_CASE("pd_step hand-executed on the 1d instance") {
  const ProblemSpec p = instances::toy1d();  // lambda 1, mu 0.1
  const StepSizes s{0.5, 0.5};
  const IterateState st{{1.0}, {0.0}, 0};

  const IterateState next = pd_step(st, p, s, 1.0, 0.1);
  CHECK(next.u[0] == doctest::Approx(0.5));  // 1 - 0.5*1 - 0.05*0
  CHECK(next.v[0] == doctest::Approx(0.0));  // clamp(0 + 5*(2*0.5 - 1)) = 0
  CHECK(next.n == 1);
}

TEST_CASE("pd_step_dual_first hand-executed on the 1d instance") {
  const ProblemSpec p = instances::toy1d();
  const StepSizes s{0.5, 0.5};
  const IterateState st{{1.0}, {0.0}, 0};

  const IterateState next = pd_step_dual_first(st, p, s, 1.0, 0.1);
  CHECK(next.v[0] == doctest::Approx(1.0));  // clamp(0 + 5*1) = 1
  CHECK(next.u[0] == doctest::Approx(0.4));  // 1 - 0.5 - 0.05*(2*1 - 0)
}

TEST_CASE("fixed point of the 1d instance is left unchanged") {
  const ProblemSpec p = instances::toy1d();
  const StepSizes s{0.5, 0.5};
  const IterateState hat{{0.0}, {0.0}, 0};

  CHECK(fixed_point_residual(hat, p, s) <= 1e-12);
  const IterateState a = pd_step(hat, p, s, p.lambda, p.mu);
  CHECK(a.u[0] == 0.0);
  CHECK(a.v[0] == 0.0);
  const IterateState b = pd_step_dual_first(hat, p, s, p.lambda, p.mu);
  CHECK(b.u[0] == 0.0);
  CHECK(b.v[0] == 0.0);

  // a random state is not a fixed point
  const IterateState random{{0.7}, {0.3}, 0};
  CHECK(fixed_point_residual(random, p, s) > 0.0);
}

TEST_CASE("A = 0 reduces to the proximal gradient algorithm exactly") {
  const ProblemSpec p = instances::lasso2d();
  const StepSizes s = default_steps(p);
  const Schedule sched{ParamSchedule::geometric(2.0, 1.0, 0.9),
                       ParamSchedule::constant(1.0)};

  TraceConfig trace;
  trace.snapshot_every = 1;
  const Trajectory traj = run(p, sched, s, 50, 0.0, trace);

  const auto ref = reference::proximal_gradient(
      p.f, p.g, sched.lambda, s.alpha, Vec(2, 0.0), 50);
  REQUIRE(traj.snapshots.size() == ref.size());
  for (std::size_t k = 0; k < ref.size(); ++k)
    CHECK(traj.snapshots[k].u == ref[k]);  // bitwise

  // the dual variable never influences u when A = 0
  IterateState odd{{0.3, -0.4}, {5.0, -7.0}, 0};
  IterateState even{{0.3, -0.4}, {0.0, 0.0}, 0};
  const auto su = pd_step(odd, p, s, 1.0, 1.0).u;
  CHECK(su == pd_step(even, p, s, 1.0, 1.0).u);

  // the dual-first variant decouples the same way: identical primal path
  IterateState a = initial_state(p);
  IterateState b = initial_state(p);
  for (long n = 0; n < 30; ++n) {
    a = pd_step(a, p, s, sched.lambda(n), 1.0);
    b = pd_step_dual_first(b, p, s, sched.lambda(n), 1.0);
    CHECK(a.u == b.u);
  }
}

TEST_CASE("f = 0 reduces to Chambolle-Pock exactly") {
  testutil::Rng rng(31);
  const Vec entries = rng.uniform_vec(4, -1.0, 1.0);
  const ProblemSpec p(SmoothTerm::zero(2), ProxFunction::l1(2),
                      ProxFunction::group_l21(2, 2),
                      LinearMap::dense(2, 2, entries), 0.4, 0.8);
  const StepSizes s = default_steps(p);
  const Schedule sched{ParamSchedule::constant(0.4),
                       ParamSchedule::geometric(1.6, 0.8, 0.8)};

  TraceConfig trace;
  trace.snapshot_every = 1;
  const Trajectory traj = run(p, sched, s, 40, 0.0, trace);

  const auto ref = reference::chambolle_pock(p.g, p.h, p.A, sched, s.alpha,
                                             s.beta, Vec(2, 0.0), Vec(2, 0.0), 40);
  REQUIRE(traj.snapshots.size() == ref.u.size());
  for (std::size_t k = 0; k < ref.u.size(); ++k) {
    CHECK(traj.snapshots[k].u == ref.u[k]);
    CHECK(traj.snapshots[k].v == ref.v[k]);
  }

  // g = 0 case on top: u_{n+1} = u_n - alpha*mu_n*A^T v_n (one step by hand)
  const ProblemSpec q(SmoothTerm::zero(2), ProxFunction::zero(2),
                      ProxFunction::group_l21(2, 2),
                      LinearMap::dense(2, 2, entries), 1.0, 0.8);
  IterateState st{{0.5, -0.5}, {0.25, 0.5}, 0};
  const Vec atv = q.A.adjoint(st.v);
  const IterateState nx = pd_step(st, q, s, 1.0, 0.8);
  for (int i = 0; i < 2; ++i)
    CHECK(nx.u[i] == doctest::Approx(st.u[i] - s.alpha * 0.8 * atv[i]));
}

TEST_CASE("constant schedule run matches the fixed-parameter baseline bitwise") {
  const ProblemSpec p = instances::dense_random(11);
  const StepSizes s = default_steps(p);
  TraceConfig trace;
  trace.snapshot_every = 1;

  const Trajectory cont =
      run(p, Schedule::constant(p.lambda, p.mu), s, 100, 0.0, trace);
  const Trajectory base = run_fixed(p, s, 100, 0.0, trace);

  REQUIRE(cont.snapshots.size() == base.snapshots.size());
  for (std::size_t k = 0; k < cont.snapshots.size(); ++k) {
    CHECK(cont.snapshots[k].u == base.snapshots[k].u);
    CHECK(cont.snapshots[k].v == base.snapshots[k].v);
  }
}

TEST_CASE("lasso2d run converges to the soft-threshold solution") {
  const ProblemSpec p = instances::lasso2d();
  const StepSizes s = default_steps(p);
  const Trajectory traj =
      run(p, Schedule::constant(1.0, 1.0), s, 2000, 1e-13);
  CHECK(traj.converged);
  CHECK(traj.final_state.u[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(traj.final_state.u[1]) <= 1e-9);
}

TEST_CASE("tv4x4 objective agrees with a long Chambolle-Pock reference run") {
  const double mu = 0.3;
  const ProblemSpec p = instances::tv4x4(mu);
  const StepSizes s = default_steps(p);

  const Trajectory traj = run(p, Schedule::constant(1.0, mu), s, 20000, 1e-10);
  const Vec u_ref =
      reference::cp_tv_reference(instances::tv4x4_data(), p.A, mu, 200000);

  const double f_ours = p.objective(traj.final_state.u);
  const double f_ref = p.objective(u_ref);
  CHECK(std::abs(f_ours - f_ref) <= 1e-8);
}

TEST_CASE("residual trends down along a converging run") {
  const ProblemSpec p = instances::tv4x4(0.3);
  const StepSizes s = default_steps(p);
  const Trajectory traj = run(p, Schedule::constant(1.0, 0.3), s, 3000, 0.0);
  const auto& rows = traj.rows;
  REQUIRE(rows.size() > 100);
  CHECK(rows.back().residual < 1e-6);
  CHECK(rows.back().residual < rows[1].residual);
  // windowed trend: each 500-iteration block improves on the previous
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t start = 1; start + 500 < rows.size(); start += 500) {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = start; i < start + 500; ++i)
      lo = std::min(lo, rows[i].residual);
    CHECK(lo < prev);
    prev = lo;
  }
}

TEST_CASE("m_norm formula and positivity") {
  const StepSizes s{0.5, 0.1};
  const LinearMap zero = LinearMap::zero(2, 2);
  CHECK(m_norm({0.0, 0.0}, {0.0, 0.0}, 1.0, s, zero) == 0.0);

  // A = 0: block-diagonal form
  const Vec xu{1.0, 2.0}, xv{3.0, -1.0};
  const double expected =
      std::sqrt(dot(xu, xu) / (1.0 * 0.5) + 1.0 / 0.1 * dot(xv, xv));
  CHECK(m_norm(xu, xv, 1.0, s, zero) == doctest::Approx(expected));

  testutil::Rng rng(77);
  const LinearMap A = LinearMap::dense(2, 2, rng.uniform_vec(4, -1.0, 1.0));
  const double mu = 0.7;
  const StepSizes good{0.4, 0.9 * (1.0 / 0.4) / (A.norm_bound() * A.norm_bound())};
  for (int k = 0; k < 1000; ++k) {
    const Vec u = rng.uniform_vec(2, -1.0, 1.0);
    const Vec v = rng.uniform_vec(2, -1.0, 1.0);
    if (norm2(u) + norm2(v) == 0.0) continue;
    CHECK(m_norm(u, v, mu, good, A) > 0.0);
  }
}

TEST_CASE("m_norm rejects inadmissible steps via an eigenvector witness") {
  testutil::Rng rng(78);
  const LinearMap A = LinearMap::dense(2, 2, rng.uniform_vec(4, -1.0, 1.0));
  const double mu = 1.0, alpha = 1.0;
  const double b = A.norm_bound();
  const StepSizes bad{alpha, 2.0 / (alpha * b * b)};  // 1/(alpha beta) = b^2/2 < ||A||^2

  // assemble M = [[I/(mu alpha), -A^T], [-A, mu/beta I]] and take the most
  // negative eigenvector as the witness
  std::vector<double> M(16, 0.0);
  Vec e(2, 0.0);
  std::vector<Vec> cols;
  for (int j = 0; j < 2; ++j) {
    e.assign(2, 0.0);
    e[j] = 1.0;
    cols.push_back(A.apply(e));
  }
  for (int i = 0; i < 2; ++i) {
    M[i * 4 + i] = 1.0 / (mu * alpha);
    M[(i + 2) * 4 + (i + 2)] = mu / bad.beta;
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      M[(i + 2) * 4 + j] = -cols[j][i];  // -A
      M[j * 4 + (i + 2)] = -cols[j][i];  // -A^T
    }
  std::vector<double> vecs;
  const auto evals = testutil::symmetric_eigenvalues(M, 4, &vecs);
  REQUIRE(evals.front() < 0.0);
  const Vec wu{vecs[0 * 4 + 0], vecs[1 * 4 + 0]};
  const Vec wv{vecs[2 * 4 + 0], vecs[3 * 4 + 0]};
  CHECK_THROWS_AS(m_norm(wu, wv, mu, bad, A), std::domain_error);
}

TEST_CASE("M-distance to the limit stays bounded by the schedule budget") {
  const ProblemSpec p = instances::tv4x4(0.2);
  const StepSizes s = default_steps(p);
  const Schedule sched{ParamSchedule::constant(1.0),
                       ParamSchedule::geometric(2.0, 0.2, 0.95)};

  TraceConfig trace;
  trace.snapshot_every = 1;
  const Trajectory traj = run(p, sched, s, 4000, 0.0, trace);
  const Vec& u_star = traj.final_state.u;
  const Vec& v_star = traj.final_state.v;

  const double budget = sched.lambda.certificate_total() +
                        sched.mu.certificate_total();
  Vec du(u_star.size()), dv(v_star.size());
  auto mdist = [&](const Snapshot& snap) {
    for (std::size_t i = 0; i < du.size(); ++i) du[i] = snap.u[i] - u_star[i];
    for (std::size_t j = 0; j < dv.size(); ++j) dv[j] = snap.v[j] - v_star[j];
    return m_norm(du, dv, p.mu, s, p.A);
  };
  const double initial = mdist(traj.snapshots.front());
  double sup = 0.0;
  for (const auto& snap : traj.snapshots) sup = std::max(sup, mdist(snap));
  CHECK(sup <= 5.0 * (initial + budget));
}

TEST_CASE("run refuses inadmissible steps and aborts on non-finite values") {
  const ProblemSpec p = instances::lasso2d();
  const StepSizes bad{10.0, 10.0};  // violates beta B^2 < 1/alpha - L/2
  CHECK_THROWS_AS(run(p, Schedule::constant(1.0, 1.0), bad, 10, 0.0),
                  std::invalid_argument);

  SmoothTerm exploding = SmoothTerm::zero(2);
  exploding.value = [](const Vec&) { return 0.0; };
  exploding.gradient = [](const Vec&) {
    return Vec{std::numeric_limits<double>::infinity(), 0.0};
  };
  const ProblemSpec q(exploding, ProxFunction::l1(2), ProxFunction::l1(2),
                      LinearMap::identity(2), 1.0, 1.0);
  const StepSizes s = default_steps(q);
  CHECK_THROWS_WITH_AS(run(q, Schedule::constant(1.0, 1.0), s, 10, 0.0),
                       doctest::Contains("iteration 0"), std::runtime_error);
}

TEST_CASE("trace config records and snapshots at the requested stride") {
  const ProblemSpec p = instances::lasso2d();
  const StepSizes s = default_steps(p);
  TraceConfig trace;
  trace.record_every = 7;
  trace.snapshot_every = 10;
  const Trajectory traj = run(p, Schedule::constant(1.0, 1.0), s, 100, 0.0, trace);
  CHECK(traj.rows.front().n == 0);
  CHECK(traj.rows.back().n == 100);
  for (const auto& row : traj.rows)
    CHECK((row.n % 7 == 0 || row.n == 100));
  for (const auto& snap : traj.snapshots) CHECK(snap.n % 10 == 0);
  CHECK(traj.iterations == 100);
}

TEST_CASE("baseline objective is within 1e-6 relative of the best solver") {
  const ProblemSpec p = instances::tv4x4(0.25);
  const StepSizes s = default_steps(p);

  const Trajectory base = run_fixed(p, s, 1000, 0.0);
  const double f_base = p.objective(base.final_state.u);

  const Schedule geo{ParamSchedule::constant(1.0),
                     ParamSchedule::geometric(1.0, 0.25, 0.9)};
  const Trajectory cont = run(p, geo, s, 1000, 0.0);
  const double f_cont = p.objective(cont.final_state.u);

  IterateState st = initial_state(p);
  for (long n = 0; n < 1000; ++n) st = pd_step_dual_first(st, p, s, 1.0, 0.25);
  const double f_dual = p.objective(st.u);

  const double best = std::min({f_base, f_cont, f_dual});
  CHECK(f_base <= best * (1.0 + 1e-6) + 1e-12);
}
