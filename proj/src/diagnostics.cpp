#include "pdpath/diagnostics.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pdpath/io.hpp"

namespace pdpath {

namespace {

void require_dense_snapshots(const Trajectory& traj) {
  if (traj.snapshots.empty())
    throw std::invalid_argument("diagnostics: trajectory has no snapshots");
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k)
    if (traj.snapshots[k].n != static_cast<long>(k))
      throw std::invalid_argument(
          "diagnostics: trajectory must store (u_n, v_n) at every iteration "
          "(snapshot_every = 1)");
  if (traj.snapshots.back().n != traj.iterations)
    throw std::invalid_argument(
        "diagnostics: snapshot range does not cover the whole run");
}

// Primal step replayed at the target lambda with the scheduled mu_n.
Vec replay_primal(const Vec& u, const Vec& v, const ProblemSpec& p,
                  const StepSizes& s, double mu_n) {
  const Vec grad = p.f.gradient(u);
  const Vec atv = p.A.adjoint(v);
  const double amu = s.alpha * mu_n;
  Vec t(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    t[i] = (u[i] - s.alpha * grad[i]) - amu * atv[i];
  return p.g.prox(s.alpha * p.lambda, t);
}

std::size_t nth_prime(std::size_t k) {
  static const std::size_t primes[] = {
      2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,
      43,  47,  53,  59,  61,  67,  71,  73,  79,  83,  89,  97,  101,
      103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167,
      173, 179, 181, 191, 193, 197, 199, 211, 223, 227, 229};
  return primes[k % (sizeof(primes) / sizeof(primes[0]))];
}

double halton(std::size_t index, std::size_t base) {
  double f = 1.0, r = 0.0;
  std::size_t i = index;
  while (i > 0) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

}  // namespace

double estimate_M1(const Trajectory& traj, const ProblemSpec& p,
                   const StepSizes& s, const Schedule& schedule) {
  require_dense_snapshots(traj);
  double m1 = 0.0;
  long excluded = 0;
  for (long n = 0; n + 1 <= traj.iterations; ++n) {
    const auto& cur = traj.snapshots[static_cast<std::size_t>(n)];
    const auto& next = traj.snapshots[static_cast<std::size_t>(n + 1)];
    const Vec u_ref = replay_primal(cur.u, cur.v, p, s, schedule.mu(n));
    const double g_next = p.g.eval(next.u);
    const double g_ref = p.g.eval(u_ref);
    if (!std::isfinite(g_next) || !std::isfinite(g_ref)) {
      ++excluded;
      continue;
    }
    m1 = std::max(m1, std::abs(g_next - g_ref));
  }
  if (excluded > 0)
    std::cerr << "diagnostics: excluded " << excluded
              << " iterations with infinite g from the M1 estimate\n";
  return m1;
}

std::vector<Vec> sample_conjugate_domain(const ProxFunction& h,
                                         std::size_t count) {
  if (!h.conjugate_domain_bounded())
    throw std::invalid_argument(
        "sample_conjugate_domain: dom(h*) is unbounded for this kind");
  const std::size_t d = h.dim();
  const std::size_t group =
      h.kind() == ProxKind::GroupL21 ? h.group_size() : 1;
  std::vector<Vec> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Vec v(d, 0.0);
    if (h.kind() == ProxKind::Zero) {
      out.push_back(v);
      continue;
    }
    for (std::size_t i = 0; i < d; ++i)
      v[i] = 2.0 * halton(k + 1, nth_prime(i)) - 1.0;
    // keep each block inside its unit ball
    for (std::size_t b = 0; b < d; b += group) {
      double q = 0.0;
      for (std::size_t i = 0; i < group; ++i) q += v[b + i] * v[b + i];
      const double nb = std::sqrt(q);
      if (nb > 1.0)
        for (std::size_t i = 0; i < group; ++i) v[b + i] /= nb;
    }
    out.push_back(std::move(v));
  }
  return out;
}

InexactnessReport compute_report(const Trajectory& traj, const ProblemSpec& p,
                                 const StepSizes& s, const Schedule& schedule) {
  require_dense_snapshots(traj);
  InexactnessReport rep;

  rep.M1 = estimate_M1(traj, p, s, schedule);
  rep.m2_available = p.h.conjugate_domain_bounded();

  const double norm_a = p.A.norm_bound();
  const long N = traj.iterations;

  if (rep.m2_available) {
    // sup over stored dual iterates plus a deterministic sample of dom(h*)
    // of |h*(v_{n+1}) - h*(v)| + ||A|| ||2u_{n+1} - u_n|| ||v - v_{n+1}||.
    std::vector<Vec> pool = sample_conjugate_domain(p.h, 256);
    for (const auto& snap : traj.snapshots) pool.push_back(snap.v);
    double m2 = 0.0;
    for (long n = 0; n < N; ++n) {
      const auto& cur = traj.snapshots[static_cast<std::size_t>(n)];
      const auto& next = traj.snapshots[static_cast<std::size_t>(n + 1)];
      double ext = 0.0;
      for (std::size_t i = 0; i < cur.u.size(); ++i) {
        const double z = 2.0 * next.u[i] - cur.u[i];
        ext += z * z;
      }
      const double term = norm_a * std::sqrt(ext);
      const double h_next = p.h.conjugate_eval(next.v);
      for (const auto& v : pool) {
        double dist = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) {
          const double d = v[j] - next.v[j];
          dist += d * d;
        }
        const double q =
            std::abs(h_next - p.h.conjugate_eval(v)) + term * std::sqrt(dist);
        m2 = std::max(m2, q);
      }
    }
    rep.M2 = m2;
  }

  rep.eps.reserve(N);
  rep.err_norm.reserve(N);
  for (long n = 0; n < N; ++n) {
    const auto& cur = traj.snapshots[static_cast<std::size_t>(n)];
    const double dl = std::abs(schedule.lambda(n) - p.lambda);
    const double eps = s.alpha * rep.M1 * dl;
    rep.eps.push_back(eps);
    rep.sum_sqrt_eps += std::sqrt(eps);

    const double dmu = std::abs(schedule.mu(n) - p.mu);
    const double err = dmu == 0.0 ? 0.0 : dmu * norm2(p.A.adjoint(cur.v));
    rep.err_norm.push_back(err);
    rep.sum_err += err;

    if (rep.m2_available) {
      const double dinv = std::abs(1.0 / schedule.mu(n) - 1.0 / p.mu);
      const double delta = s.beta * rep.M2 * dinv;
      rep.delta.push_back(delta);
      rep.sum_delta += delta;
    }
  }
  return rep;
}

void write_report_csv(const std::string& path, const InexactnessReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "n,eps,delta,err_norm\n";
  for (std::size_t k = 0; k < report.eps.size(); ++k) {
    out << (k + 1) << ',' << format_double(report.eps[k]) << ',';
    if (report.m2_available && k < report.delta.size())
      out << format_double(report.delta[k]);
    out << ',' << format_double(report.err_norm[k]) << '\n';
  }
}

nlohmann::json report_summary(const InexactnessReport& report) {
  nlohmann::json j;
  j["M1"] = report.M1;
  j["M2"] = report.m2_available ? nlohmann::json(report.M2) : nlohmann::json();
  j["m2_available"] = report.m2_available;
  j["m2_is_lower_bound"] = true;  // sample sup over dom(h*), not the true sup
  j["sum_err"] = report.sum_err;
  j["sum_sqrt_eps"] = report.sum_sqrt_eps;
  j["sum_delta"] = report.m2_available ? nlohmann::json(report.sum_delta)
                                       : nlohmann::json();
  j["excluded_infeasible"] = report.excluded_infeasible;
  return j;
}

double dual_inclusion_gap(const Trajectory& traj, const ProblemSpec& p,
                          const StepSizes& s, const Schedule& schedule,
                          const InexactnessReport& report, long n,
                          const std::vector<Vec>& dual_points) {
  require_dense_snapshots(traj);
  if (n < 0 || n >= traj.iterations)
    throw std::invalid_argument("dual_inclusion_gap: iteration out of range");
  if (!report.m2_available || report.delta.empty())
    throw std::invalid_argument("dual_inclusion_gap: delta sequence unavailable");
  (void)schedule;

  const auto& cur = traj.snapshots[static_cast<std::size_t>(n)];
  const auto& next = traj.snapshots[static_cast<std::size_t>(n + 1)];
  const double bmu = s.beta / p.mu;

  Vec z(cur.u.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = 2.0 * next.u[i] - cur.u[i];
  const Vec az = p.A.apply(z);
  Vec x(cur.v.size());
  for (std::size_t j = 0; j < x.size(); ++j)
    x[j] = cur.v[j] + bmu * az[j] - next.v[j];

  const double h_next = p.h.conjugate_eval(next.v);
  const double delta = report.delta[static_cast<std::size_t>(n)];
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& v : dual_points) {
    double inner = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j)
      inner += x[j] * (v[j] - next.v[j]);
    const double lhs = bmu * p.h.conjugate_eval(v);
    const double rhs = bmu * h_next + inner - delta;
    gap = std::min(gap, lhs - rhs);
  }
  return gap;
}

}  // namespace pdpath
