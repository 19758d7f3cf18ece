#pragma once

#include <cstddef>
#include <memory>

#include <nlohmann/json_fwd.hpp>

namespace pdpath {

enum class ScheduleKind { Constant, Geometric, LogSpacedThenConstant };

/// One penalty-parameter sequence (x_n) with x_n > 0, x_n -> target and a
/// finite total deviation sum_n |x_n - target| attached at construction
/// (the summability certificate).
class ParamSchedule {
 public:
  static ParamSchedule constant(double value);

  /// x_n = target + (start - target) * rho^n. Requires rho in (0,1) strictly;
  /// rho outside that range is rejected as non-summable or divergent.
  static ParamSchedule geometric(double start, double target, double rho);

  /// x_n log-spaced from `from` to `to` over `count` values, then pinned at
  /// `to` forever, which makes the summability hypothesis hold over an
  /// infinite horizon and not just vacuously on a finite run.
  static ParamSchedule log_spaced_then_constant(double from, double to,
                                               long count);

  double operator()(long n) const;
  double target() const;
  ScheduleKind kind() const;

  /// Exact value of sum_{n=0..inf} |x_n - target|.
  double certificate_total() const;

  /// Analytic bound on sum_{n>=horizon} |x_n - target|.
  double tail_bound(long horizon) const;

 private:
  struct Impl;
  explicit ParamSchedule(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

/// Paired (lambda_n, mu_n) sequences driving the continuation solver.
struct Schedule {
  ParamSchedule lambda;
  ParamSchedule mu;

  static Schedule constant(double lambda_value, double mu_value) {
    return {ParamSchedule::constant(lambda_value),
            ParamSchedule::constant(mu_value)};
  }
};

struct CertificateReport {
  double lambda_partial_sum = 0.0;  // sum_{n<horizon} |lambda_n - lambda|
  double mu_partial_sum = 0.0;
  double lambda_tail_bound = 0.0;
  double mu_tail_bound = 0.0;
  /// Partial sum of sqrt|lambda_n - lambda|; the stronger condition needed
  /// by the inexact-prox reading. Reported, never enforced.
  double lambda_sqrt_partial_sum = 0.0;
  bool summable = true;
};

CertificateReport certify(const Schedule& s, long horizon);

/// Parse {"kind": "constant"|"geometric"|"log_spaced_then_constant", ...}.
ParamSchedule parse_param_schedule(const nlohmann::json& spec);

}  // namespace pdpath
