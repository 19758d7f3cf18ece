#include "pdpath/solver.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace pdpath {

SmoothTerm SmoothTerm::zero(std::size_t dim) {
  SmoothTerm t;
  t.dim = dim;
  t.lipschitz = 0.0;
  t.value = [](const Vec&) { return 0.0; };
  t.gradient = [dim](const Vec&) { return Vec(dim, 0.0); };
  return t;
}

SmoothTerm SmoothTerm::quadratic_distance(Vec y) {
  SmoothTerm t;
  t.dim = y.size();
  t.lipschitz = 1.0;
  auto target = std::make_shared<Vec>(std::move(y));
  t.value = [target](const Vec& u) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double d = u[i] - (*target)[i];
      s += d * d;
    }
    return 0.5 * s;
  };
  t.gradient = [target](const Vec& u) {
    Vec g(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) g[i] = u[i] - (*target)[i];
    return g;
  };
  return t;
}

SmoothTerm SmoothTerm::least_squares(LinearMap K, Vec y) {
  if (K.out_dim() != y.size())
    throw std::invalid_argument("least_squares: K rows != length of y");
  SmoothTerm t;
  t.dim = K.in_dim();
  const double b = K.norm_bound();
  t.lipschitz = b * b;
  auto op = std::make_shared<LinearMap>(std::move(K));
  auto data = std::make_shared<Vec>(std::move(y));
  t.value = [op, data](const Vec& u) {
    Vec r = op->apply(u);
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double d = r[i] - (*data)[i];
      s += d * d;
    }
    return 0.5 * s;
  };
  t.gradient = [op, data](const Vec& u) {
    Vec r = op->apply(u);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= (*data)[i];
    return op->adjoint(r);
  };
  return t;
}

ProblemSpec::ProblemSpec(SmoothTerm f_, ProxFunction g_, ProxFunction h_,
                         LinearMap A_, double lambda_, double mu_)
    : f(std::move(f_)),
      g(std::move(g_)),
      h(std::move(h_)),
      A(std::move(A_)),
      lambda(lambda_),
      mu(mu_) {
  if (g.dim() != A.in_dim())
    throw std::invalid_argument("ProblemSpec: g.dim != A.in_dim (" +
                                std::to_string(g.dim()) + " vs " +
                                std::to_string(A.in_dim()) + ")");
  if (h.dim() != A.out_dim())
    throw std::invalid_argument("ProblemSpec: h.dim != A.out_dim (" +
                                std::to_string(h.dim()) + " vs " +
                                std::to_string(A.out_dim()) + ")");
  if (f.dim != A.in_dim())
    throw std::invalid_argument("ProblemSpec: f.dim != A.in_dim");
  if (!(lambda > 0.0) || !(mu > 0.0))
    throw std::invalid_argument("ProblemSpec: lambda and mu must be > 0");
}

double ProblemSpec::objective(const Vec& u, double lam, double mu_val) const {
  return f.value(u) + lam * g.eval(u) + mu_val * h.eval(A.apply(u));
}

StepCheck validate_steps(double alpha, double beta, double lipschitz,
                         double norm_a) {
  StepCheck c;
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    c.ok = false;
    c.slack = -std::numeric_limits<double>::infinity();
    c.message = "step sizes must be positive";
    return c;
  }
  c.slack = 1.0 / alpha - lipschitz / 2.0 - beta * norm_a * norm_a;
  c.ok = c.slack > 0.0;
  if (!c.ok)
    c.message = "beta*||A||^2 >= 1/alpha - L/2 (slack " +
                std::to_string(c.slack) + ")";
  return c;
}

StepSizes default_steps(const ProblemSpec& p) {
  const double L = p.f.lipschitz;
  const double alpha = L > 0.0 ? 1.0 / L : 1.0;
  const double bound = 1.0 / alpha - L / 2.0;
  const double B = p.A.norm_bound();
  const double beta = B > 0.0 ? 0.9 * bound / (B * B) : 0.9 * bound;
  return {alpha, beta};
}

IterateState initial_state(const ProblemSpec& p) {
  return {Vec(p.primal_dim(), 0.0), Vec(p.dual_dim(), 0.0), 0};
}

namespace {

[[noreturn]] void abort_non_finite(long n, const char* line) {
  throw std::runtime_error("solver: non-finite value at iteration " +
                           std::to_string(n) + " in the " + line + " update");
}

}  // namespace

IterateState pd_step(const IterateState& state, const ProblemSpec& p,
                     const StepSizes& s, double lambda_n, double mu_n) {
  if (!(lambda_n > 0.0) || !(mu_n > 0.0))
    throw std::invalid_argument("pd_step: lambda_n and mu_n must be > 0");
  const Vec& u = state.u;
  const Vec& v = state.v;

  // Primal: u+ = prox_{alpha*lambda_n*g}(u - alpha*grad_f(u) - alpha*mu_n*A^T v).
  // The arithmetic order (gradient, A^T v, subtraction, prox) is fixed so
  // special-case reductions stay bit-exact.
  const Vec grad = p.f.gradient(u);
  const Vec atv = p.A.adjoint(v);
  const double amu = s.alpha * mu_n;
  Vec t(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    t[i] = (u[i] - s.alpha * grad[i]) - amu * atv[i];
  Vec u_next = p.g.prox(s.alpha * lambda_n, t);
  if (!all_finite(u_next)) abort_non_finite(state.n, "primal");

  // Dual: v+ = prox_{(beta/mu_n) h*}(v + (beta/mu_n) A(2u+ - u)).
  const double bmu = s.beta / mu_n;
  Vec z(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) z[i] = 2.0 * u_next[i] - u[i];
  const Vec az = p.A.apply(z);
  Vec r(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) r[j] = v[j] + bmu * az[j];
  Vec v_next = p.h.conjugate_prox(bmu, r);
  if (!all_finite(v_next)) abort_non_finite(state.n, "dual");

  return {std::move(u_next), std::move(v_next), state.n + 1};
}

IterateState pd_step_dual_first(const IterateState& state, const ProblemSpec& p,
                                const StepSizes& s, double lambda_n,
                                double mu_n) {
  if (!(lambda_n > 0.0) || !(mu_n > 0.0))
    throw std::invalid_argument("pd_step: lambda_n and mu_n must be > 0");
  const Vec& u = state.u;
  const Vec& v = state.v;

  const double bmu = s.beta / mu_n;
  const Vec au = p.A.apply(u);
  Vec r(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) r[j] = v[j] + bmu * au[j];
  Vec v_next = p.h.conjugate_prox(bmu, r);
  if (!all_finite(v_next)) abort_non_finite(state.n, "dual");

  Vec w(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) w[j] = 2.0 * v_next[j] - v[j];
  const Vec grad = p.f.gradient(u);
  const Vec atw = p.A.adjoint(w);
  const double amu = s.alpha * mu_n;
  Vec t(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    t[i] = (u[i] - s.alpha * grad[i]) - amu * atw[i];
  Vec u_next = p.g.prox(s.alpha * lambda_n, t);
  if (!all_finite(u_next)) abort_non_finite(state.n, "primal");

  return {std::move(u_next), std::move(v_next), state.n + 1};
}

double fixed_point_residual(const IterateState& state, const ProblemSpec& p,
                            const StepSizes& s) {
  const IterateState next = pd_step(state, p, s, p.lambda, p.mu);
  double q = 0.0;
  for (std::size_t i = 0; i < state.u.size(); ++i) {
    const double d = state.u[i] - next.u[i];
    q += d * d;
  }
  for (std::size_t j = 0; j < state.v.size(); ++j) {
    const double d = state.v[j] - next.v[j];
    q += d * d;
  }
  return std::sqrt(q);
}

double m_norm(const Vec& x_u, const Vec& x_v, double mu_val, const StepSizes& s,
              const LinearMap& A) {
  if (!(mu_val > 0.0)) throw std::invalid_argument("m_norm: mu must be > 0");
  const Vec ax = A.apply(x_u);
  const double q = dot(x_u, x_u) / (mu_val * s.alpha) +
                   mu_val / s.beta * dot(x_v, x_v) - 2.0 * dot(ax, x_v);
  if (q < 0.0 || (q == 0.0 && (norm2(x_u) > 0.0 || norm2(x_v) > 0.0)))
    throw std::domain_error(
        "m_norm: quadratic form non-positive on a nonzero input; step sizes "
        "violate beta*||A||^2 < 1/alpha - L/2");
  return std::sqrt(q);
}

namespace {

TrajectoryRow make_row(const IterateState& st, const ProblemSpec& p,
                       const StepSizes& s, double lambda_n, double mu_n) {
  TrajectoryRow row;
  row.n = st.n;
  row.lambda_n = lambda_n;
  row.mu_n = mu_n;
  row.f = p.f.value(st.u);
  row.g = p.g.eval(st.u);
  row.hAu = p.h.eval(p.A.apply(st.u));
  row.objective_target = row.f + p.lambda * row.g + p.mu * row.hAu;
  row.residual = fixed_point_residual(st, p, s);
  return row;
}

void refuse_bad_steps(const ProblemSpec& p, const StepSizes& s) {
  const StepCheck c =
      validate_steps(s.alpha, s.beta, p.f.lipschitz, p.A.norm_bound());
  if (!c.ok)
    throw std::invalid_argument("solver: inadmissible step sizes: " + c.message);
}

}  // namespace

Trajectory run(const ProblemSpec& p, const Schedule& schedule,
               const StepSizes& s, long max_iters, double tol,
               const TraceConfig& trace,
               const std::optional<IterateState>& warm_start) {
  if (!(tol >= 0.0)) throw std::invalid_argument("run: tol must be >= 0");
  refuse_bad_steps(p, s);

  Trajectory traj;
  traj.steps = s;
  IterateState st = warm_start ? *warm_start : initial_state(p);
  st.n = 0;

  traj.rows.push_back(make_row(st, p, s, schedule.lambda(0), schedule.mu(0)));
  if (trace.snapshot_every > 0) traj.snapshots.push_back({0, st.u, st.v});

  for (long n = 0; n < max_iters; ++n) {
    const double lambda_n = schedule.lambda(n);
    const double mu_n = schedule.mu(n);
    st = pd_step(st, p, s, lambda_n, mu_n);
    ++traj.iterations;

    const bool record = trace.record_every > 0 &&
                        (st.n % trace.record_every == 0 || n + 1 == max_iters);
    double residual = -1.0;
    if (record) {
      traj.rows.push_back(make_row(st, p, s, lambda_n, mu_n));
      residual = traj.rows.back().residual;
    }
    if (trace.snapshot_every > 0 && (st.n % trace.snapshot_every == 0))
      traj.snapshots.push_back({st.n, st.u, st.v});

    if (tol > 0.0) {
      if (residual < 0.0) residual = fixed_point_residual(st, p, s);
      if (residual < tol) {
        traj.converged = true;
        if (!record) traj.rows.push_back(make_row(st, p, s, lambda_n, mu_n));
        break;
      }
    }
  }
  traj.final_state = std::move(st);
  return traj;
}

Trajectory run_fixed(const ProblemSpec& p, const StepSizes& s, long max_iters,
                     double tol, const TraceConfig& trace,
                     const std::optional<IterateState>& warm_start) {
  if (!(tol >= 0.0)) throw std::invalid_argument("run_fixed: tol must be >= 0");
  refuse_bad_steps(p, s);

  Trajectory traj;
  traj.steps = s;
  IterateState st = warm_start ? *warm_start : initial_state(p);
  st.n = 0;

  traj.rows.push_back(make_row(st, p, s, p.lambda, p.mu));
  if (trace.snapshot_every > 0) traj.snapshots.push_back({0, st.u, st.v});

  const double amu = s.alpha * p.mu;
  const double bmu = s.beta / p.mu;
  for (long n = 0; n < max_iters; ++n) {
    // The two lines of the fixed-parameter iteration, written out directly.
    const Vec grad = p.f.gradient(st.u);
    const Vec atv = p.A.adjoint(st.v);
    Vec t(st.u.size());
    for (std::size_t i = 0; i < st.u.size(); ++i)
      t[i] = (st.u[i] - s.alpha * grad[i]) - amu * atv[i];
    Vec u_next = p.g.prox(s.alpha * p.lambda, t);
    if (!all_finite(u_next)) abort_non_finite(st.n, "primal");

    Vec z(st.u.size());
    for (std::size_t i = 0; i < st.u.size(); ++i) z[i] = 2.0 * u_next[i] - st.u[i];
    const Vec az = p.A.apply(z);
    Vec r(st.v.size());
    for (std::size_t j = 0; j < st.v.size(); ++j) r[j] = st.v[j] + bmu * az[j];
    Vec v_next = p.h.conjugate_prox(bmu, r);
    if (!all_finite(v_next)) abort_non_finite(st.n, "dual");

    st = {std::move(u_next), std::move(v_next), st.n + 1};
    ++traj.iterations;

    const bool record = trace.record_every > 0 &&
                        (st.n % trace.record_every == 0 || n + 1 == max_iters);
    double residual = -1.0;
    if (record) {
      traj.rows.push_back(make_row(st, p, s, p.lambda, p.mu));
      residual = traj.rows.back().residual;
    }
    if (trace.snapshot_every > 0 && (st.n % trace.snapshot_every == 0))
      traj.snapshots.push_back({st.n, st.u, st.v});

    if (tol > 0.0) {
      if (residual < 0.0) residual = fixed_point_residual(st, p, s);
      if (residual < tol) {
        traj.converged = true;
        if (!record) traj.rows.push_back(make_row(st, p, s, p.lambda, p.mu));
        break;
      }
    }
  }
  traj.final_state = std::move(st);
  return traj;
}

}  // namespace pdpath
