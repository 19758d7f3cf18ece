#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <limits>

#include "instances.hpp"
#include "pdpath/io.hpp"
#include "pdpath/pareto.hpp"
#include "test_util.hpp"

using namespace pdpath;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

ParetoRecord make_rec(double t1, double t2, double sig, double lam = 1.0,
                      double mu = 1.0) {
  ParetoRecord r;
  r.tau1 = t1;
  r.tau2 = t2;
  r.sigma = sig;
  r.lambda = lam;
  r.mu = mu;
  r.feasible = std::isfinite(t1) && std::isfinite(t2);
  return r;
}

/// 1D instance used throughout: f = 0.5(u-2)^2, g = |u|, h = |u|, A = id.
ProblemSpec scalar_instance(double lambda, double mu) {
  return ProblemSpec(SmoothTerm::quadratic_distance({2.0}), ProxFunction::l1(1),
                     ProxFunction::l1(1), LinearMap::identity(1), lambda, mu);
}

}  // namespace

TEST_CASE("record evaluates the three terms at the minimizer") {
  // minimizer of 0.5(u-2)^2 + 0.5|u| + 0.7|u| is the soft threshold 0.8
  const ProblemSpec p = scalar_instance(0.5, 0.7);
  const ParetoRecord r = record({0.8}, p, 0.5, 0.7, 42);
  CHECK(r.tau1 == doctest::Approx(0.8));
  CHECK(r.tau2 == doctest::Approx(0.8));
  CHECK(r.sigma == doctest::Approx(0.72));
  CHECK(r.feasible);
  CHECK(r.n == 42);
}

TEST_CASE("record flags box violations as infeasible") {
  const ProblemSpec p(SmoothTerm::quadratic_distance({0.0, 0.0}),
                      ProxFunction::box_indicator(2, 0.0, 1.0),
                      ProxFunction::l1(2), LinearMap::identity(2), 1.0, 1.0);
  const ParetoRecord r = record({1.5, 0.5}, p, 1.0, 1.0, 0);
  CHECK(r.tau1 == kInf);
  CHECK_FALSE(r.feasible);
}

TEST_CASE("check_monotone on hand-built pairs") {
  CHECK(check_monotone({make_rec(1, 1, 5), make_rec(2, 2, 4)}, 1e-9).empty());

  const auto v = check_monotone({make_rec(1, 1, 5), make_rec(2, 2, 6)}, 1e-9);
  REQUIRE(v.size() == 1);
  CHECK(v[0].slack == doctest::Approx(1.0));

  // incomparable pairs are skipped
  CHECK(check_monotone({make_rec(1, 3, 5), make_rec(2, 1, 9)}, 1e-9).empty());
}

TEST_CASE("check_convex on a 2d slice") {
  // collinear in (tau2, sigma): no violation
  CHECK(check_convex({make_rec(0, 1, 1), make_rec(0, 2, 0.5), make_rec(0, 3, 0)},
                     1e-9)
            .empty());

  // midpoint above the chord: 0.9 > 0.5
  const auto v = check_convex(
      {make_rec(0, 1, 1), make_rec(0, 2, 0.9), make_rec(0, 3, 0)}, 1e-9);
  REQUIRE(v.size() == 1);
  CHECK(v[0].gap == doctest::Approx(0.4));

  CHECK(check_convex({make_rec(0, 1, 1), make_rec(0, 2, 0.5)}, 1e-9).empty());
}

TEST_CASE("check_convex on a full 3d sample") {
  // samples of the convex decreasing surface sigma = (tau1-2)^2 + (tau2-2)^2
  std::vector<ParetoRecord> recs;
  for (double t1 : {0.0, 0.5, 1.0, 1.5, 2.0})
    for (double t2 : {0.0, 0.5, 1.0, 1.5, 2.0})
      recs.push_back(
          make_rec(t1, t2, (t1 - 2) * (t1 - 2) + (t2 - 2) * (t2 - 2)));
  CHECK(check_convex(recs, 1e-7).empty());

  // lift an interior sample above the hull
  recs[12].sigma += 0.3;  // (1.0, 1.0)
  const auto v = check_convex(recs, 1e-7);
  REQUIRE(!v.empty());
  bool found = false;
  for (const auto& viol : v) found = found || viol.i == 12;
  CHECK(found);
}

TEST_CASE("subgradient inequality on converged records") {
  const ProblemSpec p = scalar_instance(0.5, 0.7);
  const ParetoRecord rec = record({0.8}, p, 0.5, 0.7, 0);

  // against itself: 0 >= -tol
  CHECK(subgradient_check(rec, {rec}, 1e-9));

  // another converged record at different weights
  const ProblemSpec p2 = scalar_instance(0.3, 0.3);
  const ParetoRecord rec2 = record({1.4}, p2, 0.3, 0.3, 0);  // soft(2, 0.6)
  CHECK(subgradient_check(rec, {rec, rec2}, 1e-9));
  CHECK(subgradient_check(rec2, {rec, rec2}, 1e-9));

  // a record pushed below the supporting plane fails
  ParetoRecord cheat = rec2;
  cheat.sigma -= 1.0;
  CHECK_FALSE(subgradient_check(rec, {rec, cheat}, 1e-9));
}

TEST_CASE("value function oracle on 1d instances") {
  GridSpec grid;
  grid.lo = {-3.0};
  grid.hi = {3.0};
  grid.points_per_dim = 1201;  // spacing 0.005, contains u = 1 exactly

  const ProblemSpec p0(SmoothTerm::quadratic_distance({0.0}), ProxFunction::l1(1),
                       ProxFunction::l1(1), LinearMap::identity(1), 1.0, 1.0);
  CHECK(value_function_oracle(p0, 1.0, 1.0, grid) == doctest::Approx(0.0));

  const ProblemSpec p2 = scalar_instance(1.0, 1.0);
  CHECK(value_function_oracle(p2, 1.0, 1.0, grid) == doctest::Approx(0.5));

  // empty feasible set
  CHECK(value_function_oracle(p2, -1.0, 1.0, grid) == kInf);
}

TEST_CASE("strong duality spot check on the 1d instance") {
  const double lambda = 0.5, mu = 0.7;
  const ProblemSpec p = scalar_instance(lambda, mu);
  const Vec u_hat{0.8};
  const ParetoRecord rec = record(u_hat, p, lambda, mu, 0);

  GridSpec grid;
  grid.lo = {-3.0};
  grid.hi = {3.0};
  grid.points_per_dim = 6001;  // spacing 1e-3

  const double dual =
      dual_function_oracle(p, rec.tau1, rec.tau2, lambda, mu, grid);
  CHECK(std::abs(dual - rec.sigma) <= 5e-3);  // within grid resolution

  const double phi = value_function_oracle(p, rec.tau1, rec.tau2, grid);
  CHECK(std::abs(phi - rec.sigma) <= 5e-3);
}

TEST_CASE("records_from trajectory rows") {
  const ProblemSpec p = instances::lasso2d();
  const StepSizes s = default_steps(p);
  const Trajectory traj = run(p, Schedule::constant(1.0, 1.0), s, 20, 0.0);
  const auto recs = records_from(traj);
  REQUIRE(recs.size() == traj.rows.size());
  CHECK(recs[5].tau1 == traj.rows[5].g);
  CHECK(recs[5].tau2 == traj.rows[5].hAu);
  CHECK(recs[5].sigma == traj.rows[5].f);
}

TEST_CASE("records csv round trip") {
  const ProblemSpec p = instances::lasso2d();
  const StepSizes s = default_steps(p);
  const Trajectory traj = run(p, Schedule::constant(1.0, 1.0), s, 15, 0.0);
  auto recs = records_from(traj);
  recs[3].feasible = false;  // exercise the flag column

  const std::string path = "test_pareto_records.csv";
  write_records_csv(path, recs);
  const auto back = read_records_csv(path);
  std::remove(path.c_str());

  REQUIRE(back.size() == recs.size());
  for (std::size_t k = 0; k < recs.size(); ++k) {
    CHECK(back[k].n == recs[k].n);
    CHECK(back[k].lambda == recs[k].lambda);
    CHECK(back[k].mu == recs[k].mu);
    CHECK(back[k].tau1 == recs[k].tau1);
    CHECK(back[k].tau2 == recs[k].tau2);
    CHECK(back[k].sigma == recs[k].sigma);
    CHECK(back[k].feasible == recs[k].feasible);
  }
}

TEST_CASE("value function oracle refuses dim > 3") {
  const ProblemSpec p(SmoothTerm::quadratic_distance(Vec(4, 0.0)),
                      ProxFunction::l1(4), ProxFunction::l1(4),
                      LinearMap::identity(4), 1.0, 1.0);
  GridSpec grid;
  grid.lo = Vec(4, -1.0);
  grid.hi = Vec(4, 1.0);
  CHECK_THROWS_AS(value_function_oracle(p, 1.0, 1.0, grid),
                  std::invalid_argument);
}
