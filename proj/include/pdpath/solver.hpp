#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pdpath/continuation.hpp"
#include "pdpath/linops.hpp"
#include "pdpath/prox.hpp"
#include "pdpath/vec.hpp"

namespace pdpath {

/// Differentiable term f with Lipschitz-continuous gradient (constant
/// `lipschitz`; 0 means f is affine or absent).
struct SmoothTerm {
  std::size_t dim = 0;
  double lipschitz = 0.0;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;

  static SmoothTerm zero(std::size_t dim);

  /// 0.5 * ||u - y||^2, L = 1.
  static SmoothTerm quadratic_distance(Vec y);

  /// 0.5 * ||K u - y||^2, gradient K^T(K u - y), L = norm_bound(K)^2.
  static SmoothTerm least_squares(LinearMap K, Vec y);
};

/// The composite problem: minimize f(u) + lambda*g(u) + mu*h(A u) over u,
/// with target weights lambda, mu > 0. Dimension chain is validated at
/// construction: g.dim = A.in_dim, h.dim = A.out_dim.
struct ProblemSpec {
  SmoothTerm f;
  ProxFunction g;
  ProxFunction h;
  LinearMap A;
  double lambda;
  double mu;

  ProblemSpec(SmoothTerm f_, ProxFunction g_, ProxFunction h_, LinearMap A_,
              double lambda_, double mu_);

  std::size_t primal_dim() const { return A.in_dim(); }
  std::size_t dual_dim() const { return A.out_dim(); }

  /// f(u) + lam*g(u) + mu_val*h(Au).
  double objective(const Vec& u, double lam, double mu_val) const;
  double objective(const Vec& u) const { return objective(u, lambda, mu); }
};

struct StepSizes {
  double alpha;
  double beta;
};

struct StepCheck {
  bool ok = false;
  double slack = 0.0;  // 1/alpha - L/2 - beta*normA^2
  std::string message;
};

/// Strict admissibility check: alpha > 0, beta > 0, and
/// beta * normA^2 < 1/alpha - L/2. A violation is a value, not an error.
StepCheck validate_steps(double alpha, double beta, double lipschitz,
                         double norm_a);

/// alpha = 1/L (1 when L = 0) and beta at 90% of the admissible bound.
StepSizes default_steps(const ProblemSpec& p);

struct IterateState {
  Vec u;
  Vec v;
  long n = 0;
};

IterateState initial_state(const ProblemSpec& p);  // u = 0, v = 0

/// One primal-dual step at penalty weights (lambda_n, mu_n): primal prox
/// step first, then the dual step at the extrapolated point 2u+ - u.
/// Aborts with a diagnostic if a non-finite value appears.
IterateState pd_step(const IterateState& state, const ProblemSpec& p,
                     const StepSizes& s, double lambda_n, double mu_n);

/// Variant with the dual update first; the primal line then uses the
/// extrapolated dual point 2v+ - v.
IterateState pd_step_dual_first(const IterateState& state, const ProblemSpec& p,
                                const StepSizes& s, double lambda_n,
                                double mu_n);

/// l2 distance between (u,v) and its image under one pd_step at the target
/// weights (p.lambda, p.mu); zero exactly at solutions of the fixed-point
/// equations.
double fixed_point_residual(const IterateState& state, const ProblemSpec& p,
                            const StepSizes& s);

/// Norm induced by M = [[1/(mu*alpha) I, -A^T], [-A, mu/beta I]]:
/// sqrt( ||x_u||^2/(mu*alpha) + mu/beta ||x_v||^2 - 2 <A x_u, x_v> ).
/// Positive definite whenever validate_steps holds; a non-positive value on
/// a nonzero input is reported as a step-condition violation.
double m_norm(const Vec& x_u, const Vec& x_v, double mu_val, const StepSizes& s,
              const LinearMap& A);

struct TraceConfig {
  long snapshot_every = 0;  // 0 = keep no (u,v) snapshots
  long record_every = 1;    // per-iteration rows (always keeps first + last)
};

struct TrajectoryRow {
  long n = 0;
  double lambda_n = 0.0;
  double mu_n = 0.0;
  double f = 0.0;
  double g = 0.0;
  double hAu = 0.0;
  double objective_target = 0.0;  // F at the problem's target (lambda, mu)
  double residual = 0.0;
};

struct Snapshot {
  long n;
  Vec u;
  Vec v;
};

struct Trajectory {
  std::vector<TrajectoryRow> rows;
  std::vector<Snapshot> snapshots;
  IterateState final_state;
  StepSizes steps{0.0, 0.0};
  long iterations = 0;
  bool converged = false;
};

/// Run the continuation iteration with (lambda_n, mu_n) from `schedule`.
/// Stops after max_iters steps or once fixed_point_residual < tol (the
/// residual is measured at the target weights, where the limit lives).
/// Refuses to start on an inadmissible step pair.
Trajectory run(const ProblemSpec& p, const Schedule& schedule,
               const StepSizes& s, long max_iters, double tol,
               const TraceConfig& trace = {},
               const std::optional<IterateState>& warm_start = std::nullopt);

/// Fixed-parameter baseline: the same two prox lines with the target
/// weights lambda, mu on every iteration. Kept as a separate loop so the
/// constant-schedule equivalence is a real cross-check, not a tautology.
Trajectory run_fixed(const ProblemSpec& p, const StepSizes& s, long max_iters,
                     double tol, const TraceConfig& trace = {},
                     const std::optional<IterateState>& warm_start = std::nullopt);

}  // namespace pdpath
