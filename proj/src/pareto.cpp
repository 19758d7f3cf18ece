#include "pdpath/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pdpath {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ParetoRecord record(const Vec& u, const ProblemSpec& p, double lambda_n,
                    double mu_n, long n) {
  ParetoRecord r;
  r.tau1 = p.g.eval(u);
  r.tau2 = p.h.eval(p.A.apply(u));
  r.sigma = p.f.value(u);
  r.lambda = lambda_n;
  r.mu = mu_n;
  r.n = n;
  r.feasible = std::isfinite(r.tau1) && std::isfinite(r.tau2);
  return r;
}

std::vector<ParetoRecord> records_from(const Trajectory& traj) {
  std::vector<ParetoRecord> out;
  out.reserve(traj.rows.size());
  for (const auto& row : traj.rows) {
    ParetoRecord r;
    r.tau1 = row.g;
    r.tau2 = row.hAu;
    r.sigma = row.f;
    r.lambda = row.lambda_n;
    r.mu = row.mu_n;
    r.n = row.n;
    r.feasible = std::isfinite(r.tau1) && std::isfinite(r.tau2);
    out.push_back(r);
  }
  return out;
}

std::vector<MonotoneViolation> check_monotone(
    const std::vector<ParetoRecord>& records, double tol) {
  std::vector<MonotoneViolation> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!records[i].feasible) continue;
    for (std::size_t j = 0; j < records.size(); ++j) {
      if (i == j || !records[j].feasible) continue;
      // Larger budgets can only improve (lower) the achievable fidelity.
      if (records[i].tau1 >= records[j].tau1 &&
          records[i].tau2 >= records[j].tau2 &&
          records[i].sigma > records[j].sigma + tol)
        out.push_back({i, j, records[i].sigma - records[j].sigma});
    }
  }
  return out;
}

namespace {

// Height of point i above the segment (a,b) in the tau plane, or -inf when
// tau_i is not a convex combination of tau_a and tau_b.
double above_segment(const ParetoRecord& pi, const ParetoRecord& pa,
                     const ParetoRecord& pb) {
  const double dx = pb.tau1 - pa.tau1, dy = pb.tau2 - pa.tau2;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return -kInf;
  const double t =
      ((pi.tau1 - pa.tau1) * dx + (pi.tau2 - pa.tau2) * dy) / len2;
  if (t < 0.0 || t > 1.0) return -kInf;
  // require tau_i to actually lie on the segment (not just its projection)
  const double px = pa.tau1 + t * dx, py = pa.tau2 + t * dy;
  const double off = std::hypot(pi.tau1 - px, pi.tau2 - py);
  if (off > 1e-9 * (1.0 + std::sqrt(len2))) return -kInf;
  return pi.sigma - ((1.0 - t) * pa.sigma + t * pb.sigma);
}

// Height of point i above the triangle (a,b,c), or -inf when tau_i is
// outside it (barycentric coordinates with a small non-negativity slack).
double above_triangle(const ParetoRecord& pi, const ParetoRecord& pa,
                      const ParetoRecord& pb, const ParetoRecord& pc) {
  const double x1 = pa.tau1, y1 = pa.tau2;
  const double x2 = pb.tau1, y2 = pb.tau2;
  const double x3 = pc.tau1, y3 = pc.tau2;
  const double det = (y2 - y3) * (x1 - x3) + (x3 - x2) * (y1 - y3);
  const double scale = std::max({std::abs(x1 - x3), std::abs(x2 - x3),
                                 std::abs(y1 - y3), std::abs(y2 - y3), 1.0});
  if (std::abs(det) < 1e-12 * scale * scale) return -kInf;  // degenerate
  const double w1 =
      ((y2 - y3) * (pi.tau1 - x3) + (x3 - x2) * (pi.tau2 - y3)) / det;
  const double w2 =
      ((y3 - y1) * (pi.tau1 - x3) + (x1 - x3) * (pi.tau2 - y3)) / det;
  const double w3 = 1.0 - w1 - w2;
  const double eps = 1e-12;
  if (w1 < -eps || w2 < -eps || w3 < -eps) return -kInf;
  return pi.sigma - (w1 * pa.sigma + w2 * pb.sigma + w3 * pc.sigma);
}

}  // namespace

std::vector<ConvexityViolation> check_convex(
    const std::vector<ParetoRecord>& records, double tol) {
  std::vector<ConvexityViolation> out;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < records.size(); ++i)
    if (records[i].feasible) idx.push_back(i);
  if (idx.size() < 3) return out;

  bool same_tau1 = true;
  for (std::size_t k = 1; k < idx.size(); ++k)
    if (std::abs(records[idx[k]].tau1 - records[idx[0]].tau1) > 1e-12) {
      same_tau1 = false;
      break;
    }

  if (same_tau1) {
    // 2D slice: sort along tau2 and test every point against every chord.
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return records[a].tau2 < records[b].tau2;
    });
    for (std::size_t m = 0; m < idx.size(); ++m) {
      double worst = 0.0;
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t c = m + 1; c < idx.size(); ++c) {
          const ParetoRecord& pa = records[idx[a]];
          const ParetoRecord& pb = records[idx[m]];
          const ParetoRecord& pc = records[idx[c]];
          const double span = pc.tau2 - pa.tau2;
          if (span <= 0.0) continue;
          const double t = (pb.tau2 - pa.tau2) / span;
          const double chord = (1.0 - t) * pa.sigma + t * pc.sigma;
          worst = std::max(worst, pb.sigma - chord);
        }
      if (worst > tol) out.push_back({idx[m], worst});
    }
    return out;
  }

  // Full 3D set: a point sits above the lower hull iff it sits above some
  // segment or triangle of other samples containing its tau.
  for (std::size_t m = 0; m < idx.size(); ++m) {
    const ParetoRecord& pm = records[idx[m]];
    double worst = 0.0;
    for (std::size_t a = 0; a < idx.size(); ++a) {
      if (a == m) continue;
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        if (b == m) continue;
        worst = std::max(
            worst, above_segment(pm, records[idx[a]], records[idx[b]]));
        for (std::size_t c = b + 1; c < idx.size(); ++c) {
          if (c == m) continue;
          worst = std::max(worst, above_triangle(pm, records[idx[a]],
                                                 records[idx[b]],
                                                 records[idx[c]]));
        }
      }
    }
    if (worst > tol) out.push_back({idx[m], worst});
  }
  return out;
}

bool subgradient_check(const ParetoRecord& rec,
                       const std::vector<ParetoRecord>& all, double tol) {
  for (const auto& other : all) {
    if (!other.feasible) continue;
    const double bound = rec.sigma - rec.lambda * (other.tau1 - rec.tau1) -
                         rec.mu * (other.tau2 - rec.tau2);
    if (other.sigma < bound - tol) return false;
  }
  return true;
}

double GridSpec::spacing() const {
  double h = 0.0;
  for (std::size_t i = 0; i < lo.size(); ++i)
    h = std::max(h, (hi[i] - lo[i]) / static_cast<double>(points_per_dim - 1));
  return h;
}

namespace {

template <typename Fn>
void for_each_grid_point(const GridSpec& grid, std::size_t d, Fn&& fn) {
  if (grid.lo.size() != d || grid.hi.size() != d)
    throw std::invalid_argument("grid bounds must match the primal dimension");
  if (grid.points_per_dim < 2)
    throw std::invalid_argument("grid needs at least 2 points per axis");
  Vec u(d, 0.0);
  long total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= grid.points_per_dim;
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    for (std::size_t i = 0; i < d; ++i) {
      const long k = rem % grid.points_per_dim;
      rem /= grid.points_per_dim;
      u[i] = grid.lo[i] + (grid.hi[i] - grid.lo[i]) * static_cast<double>(k) /
                              static_cast<double>(grid.points_per_dim - 1);
    }
    fn(u);
  }
}

}  // namespace

double value_function_oracle(const ProblemSpec& p, double tau1, double tau2,
                             const GridSpec& grid) {
  const std::size_t d = p.primal_dim();
  if (d > 3)
    throw std::invalid_argument("value_function_oracle: refuses dim > 3");
  double best = kInf;
  for_each_grid_point(grid, d, [&](const Vec& u) {
    if (p.g.eval(u) > tau1) return;
    if (p.h.eval(p.A.apply(u)) > tau2) return;
    best = std::min(best, p.f.value(u));
  });
  return best;  // +inf when the feasible set misses the grid entirely
}

double dual_function_oracle(const ProblemSpec& p, double tau1, double tau2,
                            double lambda, double mu, const GridSpec& grid) {
  const std::size_t d = p.primal_dim();
  if (d > 3)
    throw std::invalid_argument("dual_function_oracle: refuses dim > 3");
  double best = kInf;
  for_each_grid_point(grid, d, [&](const Vec& u) {
    const double gu = p.g.eval(u);
    if (gu == kInf) return;
    const double hau = p.h.eval(p.A.apply(u));
    if (hau == kInf) return;
    best = std::min(best,
                    p.f.value(u) + lambda * (gu - tau1) + mu * (hau - tau2));
  });
  return best;
}

}  // namespace pdpath
