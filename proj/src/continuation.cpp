#include "pdpath/continuation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace pdpath {

struct ParamSchedule::Impl {
  ScheduleKind sched_kind;
  double target = 0.0;
  // geometric
  double start = 0.0, rho = 0.0;
  // log_spaced_then_constant
  double from = 0.0, to = 0.0;
  long count = 0;
  double total = 0.0;  // exact sum of deviations
};

ParamSchedule::ParamSchedule(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)) {}

ParamSchedule ParamSchedule::constant(double value) {
  if (!(value > 0.0))
    throw std::invalid_argument("schedule: values must be positive");
  auto impl = std::make_shared<Impl>();
  impl->sched_kind = ScheduleKind::Constant;
  impl->target = value;
  impl->total = 0.0;
  return ParamSchedule(impl);
}

ParamSchedule ParamSchedule::geometric(double start, double target, double rho) {
  if (!(start > 0.0) || !(target > 0.0))
    throw std::invalid_argument("geometric: start and target must be positive");
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument(
        "geometric: rho must lie in (0,1); the deviation series diverges "
        "otherwise");
  auto impl = std::make_shared<Impl>();
  impl->sched_kind = ScheduleKind::Geometric;
  impl->target = target;
  impl->start = start;
  impl->rho = rho;
  impl->total = std::abs(start - target) / (1.0 - rho);
  return ParamSchedule(impl);
}

ParamSchedule ParamSchedule::log_spaced_then_constant(double from, double to,
                                                      long count) {
  if (!(from > 0.0) || !(to > 0.0))
    throw std::invalid_argument("log_spaced: endpoints must be positive");
  if (count < 2) throw std::invalid_argument("log_spaced: count must be >= 2");
  auto impl = std::make_shared<Impl>();
  impl->sched_kind = ScheduleKind::LogSpacedThenConstant;
  impl->target = to;
  impl->from = from;
  impl->to = to;
  impl->count = count;
  const double lr = std::log(to / from);
  double total = 0.0;
  for (long n = 0; n + 1 < count; ++n) {  // x_{count-1} is pinned to `to`
    const double x =
        from * std::exp(lr * static_cast<double>(n) / static_cast<double>(count - 1));
    total += std::abs(x - to);
  }
  impl->total = total;
  return ParamSchedule(impl);
}

double ParamSchedule::operator()(long n) const {
  if (n < 0) throw std::invalid_argument("schedule index must be >= 0");
  switch (impl_->sched_kind) {
    case ScheduleKind::Constant:
      return impl_->target;
    case ScheduleKind::Geometric:
      return impl_->target +
             (impl_->start - impl_->target) * std::pow(impl_->rho, n);
    case ScheduleKind::LogSpacedThenConstant:
      if (n >= impl_->count - 1) return impl_->to;
      return impl_->from *
             std::exp(std::log(impl_->to / impl_->from) *
                      static_cast<double>(n) /
                      static_cast<double>(impl_->count - 1));
  }
  throw std::logic_error("unreachable");
}

double ParamSchedule::target() const { return impl_->target; }
ScheduleKind ParamSchedule::kind() const { return impl_->sched_kind; }
double ParamSchedule::certificate_total() const { return impl_->total; }

double ParamSchedule::tail_bound(long horizon) const {
  switch (impl_->sched_kind) {
    case ScheduleKind::Constant:
      return 0.0;
    case ScheduleKind::Geometric:
      return std::abs(impl_->start - impl_->target) *
             std::pow(impl_->rho, horizon) / (1.0 - impl_->rho);
    case ScheduleKind::LogSpacedThenConstant: {
      if (horizon >= impl_->count) return 0.0;
      double tail = 0.0;
      for (long n = horizon; n < impl_->count; ++n)
        tail += std::abs((*this)(n)-impl_->to);
      return tail;
    }
  }
  throw std::logic_error("unreachable");
}

CertificateReport certify(const Schedule& s, long horizon) {
  CertificateReport rep;
  for (long n = 0; n < horizon; ++n) {
    const double dl = std::abs(s.lambda(n) - s.lambda.target());
    rep.lambda_partial_sum += dl;
    rep.lambda_sqrt_partial_sum += std::sqrt(dl);
    rep.mu_partial_sum += std::abs(s.mu(n) - s.mu.target());
  }
  rep.lambda_tail_bound = s.lambda.tail_bound(horizon);
  rep.mu_tail_bound = s.mu.tail_bound(horizon);
  rep.summable = true;  // every constructor attaches a finite certificate
  return rep;
}

ParamSchedule parse_param_schedule(const nlohmann::json& spec) {
  const std::string kind = spec.at("kind").get<std::string>();
  if (kind == "constant")
    return ParamSchedule::constant(spec.at("value").get<double>());
  if (kind == "geometric")
    return ParamSchedule::geometric(spec.at("start").get<double>(),
                                    spec.at("target").get<double>(),
                                    spec.at("rho").get<double>());
  if (kind == "log_spaced_then_constant")
    return ParamSchedule::log_spaced_then_constant(
        spec.at("from").get<double>(), spec.at("to").get<double>(),
        spec.at("count").get<long>());
  throw std::invalid_argument("unknown schedule kind: " + kind);
}

}  // namespace pdpath
