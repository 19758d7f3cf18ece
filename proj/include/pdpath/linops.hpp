#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "pdpath/vec.hpp"

namespace pdpath {

enum class OpKind { Dense, Conv2d, Grad2d, Zero, Identity, Scaled };

/// Result of a spectral-norm estimate. `tight` is false when power iteration
/// ran out of iterations and the returned value carries the extra 1.05
/// safety factor.
struct NormBound {
  double value = 0.0;
  bool tight = true;
};

/// Immutable linear operator with an adjoint and a certified upper bound on
/// its spectral norm. Cheap to copy (shared immutable state) and safe to
/// share across threads; apply/adjoint are pure.
class LinearMap {
 public:
  static LinearMap identity(std::size_t dim);
  static LinearMap zero(std::size_t in_dim, std::size_t out_dim);

  /// Dense matrix, entries row-major, rows x cols.
  static LinearMap dense(std::size_t rows, std::size_t cols, Vec entries);

  /// Dense matrix from a header-free row-major CSV file.
  static LinearMap dense_from_csv(const std::string& path);

  /// Forward-difference image gradient on an H x W grid, Neumann boundary
  /// (replicated edge, so the difference across the boundary is zero).
  /// Output interleaves the two components per pixel in row-major order:
  /// out[2p] is the horizontal difference and out[2p+1] the vertical one,
  /// so group_l21 with group size 2 on the output is the isotropic TV.
  static LinearMap grad2d(std::size_t height, std::size_t width);

  /// 2D convolution of an H x W image with a kh x kw kernel (row-major).
  /// Periodic boundary by default; zero padding otherwise. The kernel center
  /// is at (kh/2, kw/2).
  static LinearMap conv2d(std::size_t height, std::size_t width,
                          std::size_t kh, std::size_t kw, Vec kernel,
                          bool periodic = true);

  static LinearMap scaled(double factor, const LinearMap& inner);

  std::size_t in_dim() const;
  std::size_t out_dim() const;
  OpKind kind() const;

  Vec apply(const Vec& x) const;
  Vec adjoint(const Vec& y) const;

  /// Certified bound B with ||A x|| <= B ||x||, computed at construction
  /// (analytic where available, otherwise power iteration with a 1.01
  /// safety factor).
  double norm_bound() const;
  bool norm_bound_tight() const;

  struct Impl;
  explicit LinearMap(std::shared_ptr<const Impl> impl);  // internal

 private:
  std::shared_ptr<const Impl> impl_;
};

/// Power-iteration estimate of ||A|| (largest singular value), iterating on
/// A^T A from a seeded deterministic start vector until the relative change
/// drops below tol. Converged estimates carry a 1.01 safety factor; running
/// out of iterations returns the current estimate * 1.05 flagged loose.
NormBound power_iteration_norm(const LinearMap& A, double tol = 1e-9,
                               int max_iters = 10000);

/// Norm bound per operator kind: analytic values where known (grad2d ->
/// sqrt(8), zero -> 0, identity -> 1, conv2d -> l1 mass of the kernel),
/// power iteration for dense.
NormBound norm_bound(const LinearMap& A, double tol = 1e-9,
                     int max_iters = 10000);

}  // namespace pdpath
