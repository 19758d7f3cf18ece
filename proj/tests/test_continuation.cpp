#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pdpath/continuation.hpp"

using namespace pdpath;

TEST_CASE("geometric schedule and its certificate") {
  const ParamSchedule c = ParamSchedule::geometric(2.0, 2.0, 0.5);
  CHECK(c(0) == 2.0);
  CHECK(c(100) == 2.0);
  CHECK(c.certificate_total() == 0.0);

  const ParamSchedule g = ParamSchedule::geometric(1000.0, 0.001, 0.99);
  CHECK(g.certificate_total() == doctest::Approx(999.999 / 0.01));
  CHECK(g(0) == doctest::Approx(1000.0));

  CHECK_THROWS_AS(ParamSchedule::geometric(2.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ParamSchedule::geometric(2.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ParamSchedule::geometric(2.0, 1.0, 1.5), std::invalid_argument);
}

TEST_CASE("log_spaced_then_constant matches the experimental grid") {
  const ParamSchedule s = ParamSchedule::log_spaced_then_constant(1e3, 1e-3, 1000);
  CHECK(s(0) == doctest::Approx(1000.0));
  CHECK(s(999) == 0.001);   // pinned exactly at the target
  CHECK(s(5000) == 0.001);  // constant past the grid
  // constant ratio between consecutive values on the log-spaced part
  const double r0 = s(1) / s(0);
  for (long n = 1; n < 998; ++n)
    CHECK(s(n + 1) / s(n) == doctest::Approx(r0).epsilon(1e-9));

  const ParamSchedule flat = ParamSchedule::log_spaced_then_constant(2.0, 2.0, 10);
  CHECK(flat(0) == 2.0);
  CHECK(flat(9) == 2.0);
  CHECK(flat.certificate_total() == 0.0);

  // the 10-value grid of the fixed-mu sweep
  const ParamSchedule ten = ParamSchedule::log_spaced_then_constant(1e3, 1e-3, 10);
  CHECK(ten(0) == doctest::Approx(1e3));
  CHECK(ten(9) == 1e-3);
  CHECK(ten(4) / ten(5) == doctest::Approx(ten(1) / ten(2)).epsilon(1e-9));

  CHECK_THROWS_AS(ParamSchedule::log_spaced_then_constant(1.0, 1.0, 1),
                  std::invalid_argument);
}

TEST_CASE("certify partial sums and tails") {
  const Schedule constant = Schedule::constant(1.0, 2.0);
  const CertificateReport c0 = certify(constant, 100);
  CHECK(c0.lambda_partial_sum == 0.0);
  CHECK(c0.mu_partial_sum == 0.0);
  CHECK(c0.summable);

  Schedule geo{ParamSchedule::constant(1.0), ParamSchedule::geometric(2.0, 1.0, 0.5)};
  const CertificateReport cg = certify(geo, 50);
  CHECK(cg.mu_partial_sum == doctest::Approx(2.0 * (1.0 - std::pow(0.5, 50))));
  CHECK(cg.mu_tail_bound == doctest::Approx(std::pow(0.5, 50) / 0.5).epsilon(1e-9));
  CHECK(cg.mu_partial_sum + cg.mu_tail_bound ==
        doctest::Approx(geo.mu.certificate_total()));

  Schedule log_sched{ParamSchedule::constant(1.0),
                     ParamSchedule::log_spaced_then_constant(1e3, 1e-3, 1000)};
  const CertificateReport cl = certify(log_sched, 2000);
  CHECK(std::isfinite(cl.mu_partial_sum));
  CHECK(cl.mu_tail_bound == 0.0);
  CHECK(cl.mu_partial_sum == doctest::Approx(log_sched.mu.certificate_total()));
}

TEST_CASE("stronger sqrt condition is reported, not enforced") {
  Schedule geo{ParamSchedule::geometric(2.0, 1.0, 0.25), ParamSchedule::constant(1.0)};
  const CertificateReport rep = certify(geo, 200);
  // sum sqrt(0.25^n) = sum 0.5^n = 2 (up to absorption of 0.25^n into
  // target + deviation once the deviation drops below machine epsilon)
  CHECK(rep.lambda_sqrt_partial_sum == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("positivity and monotonicity of constructed schedules") {
  const ParamSchedule g = ParamSchedule::geometric(100.0, 0.5, 0.9);
  const ParamSchedule l = ParamSchedule::log_spaced_then_constant(10.0, 0.1, 50);
  for (long n = 0; n < 500; ++n) {
    CHECK(g(n) > 0.0);
    CHECK(l(n) > 0.0);
    if (n > 0) CHECK(g(n) <= g(n - 1));  // decreasing toward the target
    if (n > 0) CHECK(l(n) <= l(n - 1));
  }
}

TEST_CASE("schedules parse from json specs") {
  using nlohmann::json;
  const auto c = parse_param_schedule(json{{"kind", "constant"}, {"value", 2.5}});
  CHECK(c(3) == 2.5);

  const auto g = parse_param_schedule(
      json{{"kind", "geometric"}, {"start", 4.0}, {"target", 1.0}, {"rho", 0.5}});
  CHECK(g(1) == doctest::Approx(2.5));

  const auto l = parse_param_schedule(json{{"kind", "log_spaced_then_constant"},
                                           {"from", 100.0},
                                           {"to", 0.01},
                                           {"count", 100}});
  CHECK(l(0) == doctest::Approx(100.0));
  CHECK(l(99) == 0.01);

  CHECK_THROWS_AS(parse_param_schedule(json{{"kind", "linear"}}),
                  std::invalid_argument);
}
