#pragma once

#include <cstddef>
#include <memory>

#include "pdpath/vec.hpp"

namespace pdpath {

enum class ProxKind { Zero, BoxIndicator, L1, GroupL21, SquaredL2 };

/// Proper convex closed function with an exact scaled proximal map.
/// Values live in R u {+inf}; +inf is a distinguished value (indicator
/// outside its set), never the result of arithmetic overflow, and eval
/// never returns NaN. Immutable and shareable across threads.
class ProxFunction {
 public:
  static ProxFunction zero(std::size_t dim);
  static ProxFunction box_indicator(std::size_t dim, double lo, double hi);
  static ProxFunction l1(std::size_t dim);

  /// Sum of Euclidean norms over consecutive blocks of `group_size`
  /// coordinates (the l2,1 norm; isotropic TV when composed with grad2d).
  static ProxFunction group_l21(std::size_t dim, std::size_t group_size);

  /// 0.5 * ||u - center||^2.
  static ProxFunction squared_l2(Vec center);

  std::size_t dim() const;
  ProxKind kind() const;
  std::size_t group_size() const;  // GroupL21 only
  double box_lo() const;           // BoxIndicator only
  double box_hi() const;

  /// Exact function value; indicators use strict membership (no epsilon).
  double eval(const Vec& u) const;

  /// prox_{scale * F}(a), the unique minimizer of 0.5||u-a||^2 + scale*F(u).
  Vec prox(double scale, const Vec& a) const;

  /// prox_{scale * F*}(a) for the Fenchel conjugate F*. Kinds whose
  /// conjugate prox is a simple projection (l1 -> clamp to [-1,1],
  /// group_l21 -> blockwise unit-ball projection, zero -> 0) use it
  /// directly; the rest go through the Moreau identity.
  Vec conjugate_prox(double scale, const Vec& a) const;

  /// F*(v). Indicator-of-a-set conjugates return 0 inside / +inf outside.
  double conjugate_eval(const Vec& v) const;

  /// True when dom(F*) is bounded (l1, group_l21, zero).
  bool conjugate_domain_bounded() const;

 private:
  struct Impl;
  explicit ProxFunction(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

/// Conjugate prox through the Moreau identity,
///   prox_{sF*}(a) = a - s * prox_{F/s}(a/s),
/// independent of any direct-projection shortcut in conjugate_prox.
Vec moreau_conjugate_prox(const ProxFunction& F, double scale, const Vec& a);

/// Exhaustive minimization of 0.5||u-a||^2 + scale*F(u) over the grid
/// a + [-grid_radius, grid_radius]^dim with spacing grid_step. Test oracle;
/// refuses dim > 3.
Vec prox_oracle(const ProxFunction& F, double scale, const Vec& a,
                double grid_radius, double grid_step);

}  // namespace pdpath
