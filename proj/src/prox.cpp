#include "pdpath/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pdpath {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_dim(const Vec& u, std::size_t dim, const char* what) {
  if (u.size() != dim)
    throw std::invalid_argument(std::string(what) + ": got vector of length " +
                                std::to_string(u.size()) + ", expected " +
                                std::to_string(dim));
}

void check_scale(double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("prox: scale must be > 0");
}

}  // namespace

struct ProxFunction::Impl {
  ProxKind fn_kind;
  std::size_t dim = 0;
  double lo = 0.0, hi = 0.0;      // box
  std::size_t group = 1;          // group_l21
  Vec center;                     // squared_l2
};

ProxFunction::ProxFunction(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)) {}

std::size_t ProxFunction::dim() const { return impl_->dim; }
ProxKind ProxFunction::kind() const { return impl_->fn_kind; }

std::size_t ProxFunction::group_size() const {
  if (impl_->fn_kind != ProxKind::GroupL21)
    throw std::logic_error("group_size: not a group_l21 function");
  return impl_->group;
}

double ProxFunction::box_lo() const {
  if (impl_->fn_kind != ProxKind::BoxIndicator)
    throw std::logic_error("box_lo: not a box indicator");
  return impl_->lo;
}

double ProxFunction::box_hi() const {
  if (impl_->fn_kind != ProxKind::BoxIndicator)
    throw std::logic_error("box_hi: not a box indicator");
  return impl_->hi;
}

ProxFunction ProxFunction::zero(std::size_t dim) {
  auto impl = std::make_shared<Impl>();
  impl->fn_kind = ProxKind::Zero;
  impl->dim = dim;
  return ProxFunction(impl);
}

ProxFunction ProxFunction::box_indicator(std::size_t dim, double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("box_indicator: lo > hi");
  auto impl = std::make_shared<Impl>();
  impl->fn_kind = ProxKind::BoxIndicator;
  impl->dim = dim;
  impl->lo = lo;
  impl->hi = hi;
  return ProxFunction(impl);
}

ProxFunction ProxFunction::l1(std::size_t dim) {
  auto impl = std::make_shared<Impl>();
  impl->fn_kind = ProxKind::L1;
  impl->dim = dim;
  return ProxFunction(impl);
}

ProxFunction ProxFunction::group_l21(std::size_t dim, std::size_t group_size) {
  if (group_size == 0 || dim % group_size != 0)
    throw std::invalid_argument("group_l21: group_size must divide dim");
  auto impl = std::make_shared<Impl>();
  impl->fn_kind = ProxKind::GroupL21;
  impl->dim = dim;
  impl->group = group_size;
  return ProxFunction(impl);
}

ProxFunction ProxFunction::squared_l2(Vec center) {
  auto impl = std::make_shared<Impl>();
  impl->fn_kind = ProxKind::SquaredL2;
  impl->dim = center.size();
  impl->center = std::move(center);
  return ProxFunction(impl);
}

double ProxFunction::eval(const Vec& u) const {
  check_dim(u, impl_->dim, "eval");
  switch (impl_->fn_kind) {
    case ProxKind::Zero:
      return 0.0;
    case ProxKind::BoxIndicator:
      for (double ui : u)
        if (ui < impl_->lo || ui > impl_->hi) return kInf;
      return 0.0;
    case ProxKind::L1: {
      double s = 0.0;
      for (double ui : u) s += std::abs(ui);
      return s;
    }
    case ProxKind::GroupL21: {
      double s = 0.0;
      for (std::size_t b = 0; b < impl_->dim; b += impl_->group) {
        double q = 0.0;
        for (std::size_t i = 0; i < impl_->group; ++i) q += u[b + i] * u[b + i];
        s += std::sqrt(q);
      }
      return s;
    }
    case ProxKind::SquaredL2: {
      double s = 0.0;
      for (std::size_t i = 0; i < impl_->dim; ++i) {
        const double d = u[i] - impl_->center[i];
        s += d * d;
      }
      return 0.5 * s;
    }
  }
  throw std::logic_error("unreachable");
}

Vec ProxFunction::prox(double scale, const Vec& a) const {
  check_scale(scale);
  check_dim(a, impl_->dim, "prox");
  Vec out(a.size());
  switch (impl_->fn_kind) {
    case ProxKind::Zero:
      return a;
    case ProxKind::BoxIndicator:
      for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = std::min(std::max(a[i], impl_->lo), impl_->hi);
      return out;
    case ProxKind::L1:
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double m = std::abs(a[i]) - scale;
        out[i] = m > 0.0 ? (a[i] > 0.0 ? m : -m) : 0.0;
      }
      return out;
    case ProxKind::GroupL21:
      for (std::size_t b = 0; b < impl_->dim; b += impl_->group) {
        double q = 0.0;
        for (std::size_t i = 0; i < impl_->group; ++i) q += a[b + i] * a[b + i];
        const double nb = std::sqrt(q);
        const double shrink = nb > scale ? (nb - scale) / nb : 0.0;
        for (std::size_t i = 0; i < impl_->group; ++i)
          out[b + i] = shrink * a[b + i];
      }
      return out;
    case ProxKind::SquaredL2:
      for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = (a[i] + scale * impl_->center[i]) / (1.0 + scale);
      return out;
  }
  throw std::logic_error("unreachable");
}

Vec moreau_conjugate_prox(const ProxFunction& F, double scale, const Vec& a) {
  check_scale(scale);
  Vec scaled_a(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) scaled_a[i] = a[i] / scale;
  Vec p = F.prox(1.0 / scale, scaled_a);
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - scale * p[i];
  return out;
}

Vec ProxFunction::conjugate_prox(double scale, const Vec& a) const {
  check_scale(scale);
  check_dim(a, impl_->dim, "conjugate_prox");
  switch (impl_->fn_kind) {
    case ProxKind::Zero:
      // F* = indicator of {0}.
      return Vec(a.size(), 0.0);
    case ProxKind::L1: {
      // F* = indicator of [-1,1]^d, prox is the scale-independent clamp.
      Vec out(a.size());
      for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = std::min(std::max(a[i], -1.0), 1.0);
      return out;
    }
    case ProxKind::GroupL21: {
      // Blockwise projection onto the unit Euclidean ball. This is the
      // solver's dual hot path, so we avoid the Moreau round-trip.
      Vec out(a.size());
      for (std::size_t b = 0; b < impl_->dim; b += impl_->group) {
        double q = 0.0;
        for (std::size_t i = 0; i < impl_->group; ++i) q += a[b + i] * a[b + i];
        const double nb = std::sqrt(q);
        const double f = nb > 1.0 ? 1.0 / nb : 1.0;
        for (std::size_t i = 0; i < impl_->group; ++i) out[b + i] = f * a[b + i];
      }
      return out;
    }
    case ProxKind::SquaredL2: {
      // F*(v) = 0.5||v||^2 + <center, v>.
      Vec out(a.size());
      for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = (a[i] - scale * impl_->center[i]) / (1.0 + scale);
      return out;
    }
    case ProxKind::BoxIndicator:
      return moreau_conjugate_prox(*this, scale, a);
  }
  throw std::logic_error("unreachable");
}

double ProxFunction::conjugate_eval(const Vec& v) const {
  check_dim(v, impl_->dim, "conjugate_eval");
  // Indicator-type conjugates admit a relative 1e-12 membership slack so
  // that exact projections (norm 1 up to rounding) evaluate to 0, not +inf.
  constexpr double kBallTol = 1.0 + 1e-12;
  switch (impl_->fn_kind) {
    case ProxKind::Zero:
      for (double vi : v)
        if (std::abs(vi) > 1e-300) return kInf;
      return 0.0;
    case ProxKind::L1:
      for (double vi : v)
        if (std::abs(vi) > kBallTol) return kInf;
      return 0.0;
    case ProxKind::GroupL21:
      for (std::size_t b = 0; b < impl_->dim; b += impl_->group) {
        double q = 0.0;
        for (std::size_t i = 0; i < impl_->group; ++i) q += v[b + i] * v[b + i];
        if (std::sqrt(q) > kBallTol) return kInf;
      }
      return 0.0;
    case ProxKind::BoxIndicator: {
      // Support function of the box.
      double s = 0.0;
      for (double vi : v) s += vi > 0.0 ? impl_->hi * vi : impl_->lo * vi;
      return s;
    }
    case ProxKind::SquaredL2: {
      double s = 0.0;
      for (std::size_t i = 0; i < impl_->dim; ++i)
        s += 0.5 * v[i] * v[i] + impl_->center[i] * v[i];
      return s;
    }
  }
  throw std::logic_error("unreachable");
}

bool ProxFunction::conjugate_domain_bounded() const {
  switch (impl_->fn_kind) {
    case ProxKind::Zero:
    case ProxKind::L1:
    case ProxKind::GroupL21:
      return true;
    case ProxKind::BoxIndicator:
    case ProxKind::SquaredL2:
      return false;
  }
  return false;
}

Vec prox_oracle(const ProxFunction& F, double scale, const Vec& a,
                double grid_radius, double grid_step) {
  check_scale(scale);
  const std::size_t d = a.size();
  if (d != F.dim()) throw std::invalid_argument("prox_oracle: dim mismatch");
  if (d > 3) throw std::invalid_argument("prox_oracle: refuses dim > 3");
  if (!(grid_radius > 0.0) || !(grid_step > 0.0))
    throw std::invalid_argument("prox_oracle: radius and step must be > 0");

  const long half = static_cast<long>(std::floor(grid_radius / grid_step));
  const long side = 2 * half + 1;
  Vec best(d, 0.0), u(d, 0.0);
  double best_val = kInf;
  long total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= side;
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    for (std::size_t i = 0; i < d; ++i) {
      const long k = rem % side - half;
      rem /= side;
      u[i] = a[i] + static_cast<double>(k) * grid_step;
    }
    const double fu = F.eval(u);
    if (fu == kInf) continue;
    double q = 0.0;
    for (std::size_t i = 0; i < d; ++i) q += (u[i] - a[i]) * (u[i] - a[i]);
    const double val = 0.5 * q + scale * fu;
    if (val < best_val) {
      best_val = val;
      best = u;
    }
  }
  if (best_val == kInf)
    throw std::runtime_error("prox_oracle: no feasible grid point");
  return best;
}

}  // namespace pdpath
