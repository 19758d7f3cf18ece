#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pdpath/continuation.hpp"
#include "pdpath/solver.hpp"
#include "pdpath/vec.hpp"

namespace pdpath {

/// Post-hoc reading of a continuation run as an inexact primal-dual method:
/// per-iteration primal accuracy eps_{n+1} = alpha*M1*|lambda_n - lambda|,
/// dual accuracy delta_{n+1} = beta*M2*|1/mu_n - 1/mu| and error term
/// e_{n+1} = (mu_n - mu) A^T v_n. Purely diagnostic; nothing here feeds back
/// into the solver.
struct InexactnessReport {
  std::vector<double> eps;       // eps[k] is eps_{k+1}
  std::vector<double> delta;     // empty when M2 is unavailable
  std::vector<double> err_norm;  // ||e_{k+1}||

  double M1 = 0.0;
  double M2 = 0.0;
  /// M2 is a supremum over a continuum; we report the sup over stored dual
  /// iterates plus a deterministic sample of dom(h*), i.e. a lower bound.
  bool m2_available = false;

  double sum_err = 0.0;
  double sum_sqrt_eps = 0.0;
  double sum_delta = 0.0;

  long excluded_infeasible = 0;  // +inf g values skipped in the M1 sup
};

/// M1 = sup_n |g(u_{n+1}) - g(u^(n))| where u^(n) replays the primal step
/// at the target lambda with the scheduled mu_n. Requires a trajectory with
/// snapshots stored at every iteration.
double estimate_M1(const Trajectory& traj, const ProblemSpec& p,
                   const StepSizes& s, const Schedule& schedule);

InexactnessReport compute_report(const Trajectory& traj, const ProblemSpec& p,
                                 const StepSizes& s, const Schedule& schedule);

/// Deterministic low-discrepancy sample of dom(h*) (Halton points mapped
/// into the product of unit balls). Only for bounded conjugate domains.
std::vector<Vec> sample_conjugate_domain(const ProxFunction& h,
                                         std::size_t count);

/// CSV with columns n,eps,delta,err_norm (delta blank when unavailable).
void write_report_csv(const std::string& path, const InexactnessReport& report);

/// JSON summary: the three sums, M1, M2 and availability flags.
nlohmann::json report_summary(const InexactnessReport& report);

/// Slack of the type-2 epsilon-subdifferential inclusion at iteration n:
/// min over the given dual points v of
///   (beta/mu) h*(v) - (beta/mu) h*(v_{n+1}) - <x, v - v_{n+1}> + delta_{n+1}
/// with x = v_n + (beta/mu) A (2 u_{n+1} - u_n) - v_{n+1}. Non-negative
/// slack means the inclusion holds on the sample.
double dual_inclusion_gap(const Trajectory& traj, const ProblemSpec& p,
                          const StepSizes& s, const Schedule& schedule,
                          const InexactnessReport& report, long n,
                          const std::vector<Vec>& dual_points);

}  // namespace pdpath
