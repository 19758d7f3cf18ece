#pragma once

#include <cstddef>
#include <vector>

#include "pdpath/solver.hpp"
#include "pdpath/vec.hpp"

namespace pdpath {

/// One sampled point of the trade-off surface: penalty values
/// tau1 = g(u), tau2 = h(Au) and fidelity sigma = f(u), tagged with the
/// penalty weights in force when u was produced.
struct ParetoRecord {
  double tau1 = 0.0;
  double tau2 = 0.0;
  double sigma = 0.0;
  double lambda = 0.0;
  double mu = 0.0;
  long n = 0;
  bool feasible = true;  // false when tau1 or tau2 is +inf
};

ParetoRecord record(const Vec& u, const ProblemSpec& p, double lambda_n,
                    double mu_n, long n);

/// Records for every stored trajectory row.
std::vector<ParetoRecord> records_from(const Trajectory& traj);

struct MonotoneViolation {
  std::size_t i = 0;  // record with componentwise-larger tau but larger sigma
  std::size_t j = 0;
  double slack = 0.0;  // sigma_i - sigma_j > 0
};

/// The value function is non-increasing: for every comparable pair with
/// tau_i >= tau_j componentwise, sigma_i <= sigma_j + tol must hold.
/// Incomparable pairs and infeasible records are skipped.
std::vector<MonotoneViolation> check_monotone(
    const std::vector<ParetoRecord>& records, double tol = 1e-5);

struct ConvexityViolation {
  std::size_t i = 0;
  double gap = 0.0;  // height of the point above the chord/hull
};

/// The value function is convex: no sampled point may lie above a convex
/// combination of other samples (checked along tau2 when all tau1 agree,
/// otherwise against segments and triangles in the tau plane, which is
/// exact for the lower hull by Caratheodory).
std::vector<ConvexityViolation> check_convex(
    const std::vector<ParetoRecord>& records, double tol = 1e-5);

/// Sampled-subgradient inequality at a converged record: every other sample
/// tau~ must satisfy sigma(tau~) >= sigma(tau) - lambda*(tau1~ - tau1)
/// - mu*(tau2~ - tau2) - tol.
bool subgradient_check(const ParetoRecord& rec,
                       const std::vector<ParetoRecord>& all, double tol);

struct GridSpec {
  Vec lo;
  Vec hi;
  long points_per_dim = 101;

  double spacing() const;  // largest per-axis spacing
};

/// Brute-force value function phi(tau) = min f(u) s.t. g(u) <= tau1,
/// h(Au) <= tau2 over the grid; +inf when no grid point is feasible.
/// Refuses primal dimension > 3.
double value_function_oracle(const ProblemSpec& p, double tau1, double tau2,
                             const GridSpec& grid);

/// Brute-force Lagrange dual value
/// f~(lambda, mu) = min_u f(u) + lambda*(g(u)-tau1) + mu*(h(Au)-tau2).
double dual_function_oracle(const ProblemSpec& p, double tau1, double tau2,
                            double lambda, double mu, const GridSpec& grid);

}  // namespace pdpath
