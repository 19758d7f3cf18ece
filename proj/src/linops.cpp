#include "pdpath/linops.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pdpath {

namespace {

void check_length(const Vec& x, std::size_t expected, const char* what) {
  if (x.size() != expected)
    throw std::invalid_argument(std::string(what) + ": got vector of length " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(expected));
}

constexpr std::uint64_t kPowerIterationSeed = 0x9e3779b97f4a7c15ULL;

}  // namespace

struct LinearMap::Impl {
  OpKind op_kind;
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  NormBound bound;

  // dense
  Vec entries;  // row-major, out_dim x in_dim

  // conv2d / grad2d geometry
  std::size_t height = 0, width = 0;
  std::size_t kh = 0, kw = 0;
  Vec kernel;
  bool periodic = true;

  // scaled
  double factor = 1.0;
  std::shared_ptr<const Impl> inner;

  Vec apply(const Vec& x) const;
  Vec adjoint(const Vec& y) const;
  Vec convolve(const Vec& x, const Vec& k, bool flip) const;
};

LinearMap::LinearMap(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

std::size_t LinearMap::in_dim() const { return impl_->in_dim; }
std::size_t LinearMap::out_dim() const { return impl_->out_dim; }
OpKind LinearMap::kind() const { return impl_->op_kind; }
double LinearMap::norm_bound() const { return impl_->bound.value; }
bool LinearMap::norm_bound_tight() const { return impl_->bound.tight; }

Vec LinearMap::apply(const Vec& x) const {
  check_length(x, impl_->in_dim, "apply");
  return impl_->apply(x);
}

Vec LinearMap::adjoint(const Vec& y) const {
  check_length(y, impl_->out_dim, "adjoint");
  return impl_->adjoint(y);
}

Vec LinearMap::Impl::convolve(const Vec& x, const Vec& k, bool flip) const {
  // Direct convolution; kernel center at (kh/2, kw/2). With `flip` the kernel
  // is rotated 180 degrees, which under periodic boundary is exactly the
  // adjoint convolution.
  const std::size_t H = height, W = width;
  const long ch = static_cast<long>(kh / 2), cw = static_cast<long>(kw / 2);
  Vec out(H * W, 0.0);
  for (std::size_t i = 0; i < H; ++i) {
    for (std::size_t j = 0; j < W; ++j) {
      double acc = 0.0;
      for (std::size_t a = 0; a < kh; ++a) {
        for (std::size_t b = 0; b < kw; ++b) {
          const double kv = flip ? k[(kh - 1 - a) * kw + (kw - 1 - b)]
                                 : k[a * kw + b];
          long ii = static_cast<long>(i) + static_cast<long>(a) - ch;
          long jj = static_cast<long>(j) + static_cast<long>(b) - cw;
          if (periodic) {
            ii = ((ii % static_cast<long>(H)) + static_cast<long>(H)) %
                 static_cast<long>(H);
            jj = ((jj % static_cast<long>(W)) + static_cast<long>(W)) %
                 static_cast<long>(W);
          } else if (ii < 0 || ii >= static_cast<long>(H) || jj < 0 ||
                     jj >= static_cast<long>(W)) {
            continue;
          }
          acc += kv * x[static_cast<std::size_t>(ii) * W +
                        static_cast<std::size_t>(jj)];
        }
      }
      out[i * W + j] = acc;
    }
  }
  return out;
}

Vec LinearMap::Impl::apply(const Vec& x) const {
  switch (op_kind) {
    case OpKind::Identity:
      return x;
    case OpKind::Zero:
      return Vec(out_dim, 0.0);
    case OpKind::Dense: {
      Vec out(out_dim, 0.0);
      for (std::size_t r = 0; r < out_dim; ++r) {
        double acc = 0.0;
        const double* row = entries.data() + r * in_dim;
        for (std::size_t c = 0; c < in_dim; ++c) acc += row[c] * x[c];
        out[r] = acc;
      }
      return out;
    }
    case OpKind::Grad2d: {
      const std::size_t H = height, W = width;
      Vec out(2 * H * W, 0.0);
      for (std::size_t i = 0; i < H; ++i)
        for (std::size_t j = 0; j < W; ++j) {
          const std::size_t p = i * W + j;
          out[2 * p] = (j + 1 < W) ? x[p + 1] - x[p] : 0.0;      // horizontal
          out[2 * p + 1] = (i + 1 < H) ? x[p + W] - x[p] : 0.0;  // vertical
        }
      return out;
    }
    case OpKind::Conv2d:
      return convolve(x, kernel, /*flip=*/false);
    case OpKind::Scaled: {
      Vec out = inner->apply(x);
      for (auto& v : out) v *= factor;
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

Vec LinearMap::Impl::adjoint(const Vec& y) const {
  switch (op_kind) {
    case OpKind::Identity:
      return y;
    case OpKind::Zero:
      return Vec(in_dim, 0.0);
    case OpKind::Dense: {
      Vec out(in_dim, 0.0);
      for (std::size_t r = 0; r < out_dim; ++r) {
        const double* row = entries.data() + r * in_dim;
        const double yr = y[r];
        for (std::size_t c = 0; c < in_dim; ++c) out[c] += row[c] * yr;
      }
      return out;
    }
    case OpKind::Grad2d: {
      // Negative divergence matching the forward differences above.
      const std::size_t H = height, W = width;
      Vec out(H * W, 0.0);
      for (std::size_t i = 0; i < H; ++i)
        for (std::size_t j = 0; j < W; ++j) {
          const std::size_t p = i * W + j;
          if (j + 1 < W) {
            out[p] -= y[2 * p];
            out[p + 1] += y[2 * p];
          }
          if (i + 1 < H) {
            out[p] -= y[2 * p + 1];
            out[p + W] += y[2 * p + 1];
          }
        }
      return out;
    }
    case OpKind::Conv2d: {
      if (periodic) return convolve(y, kernel, /*flip=*/true);
      // Zero padding: adjoint is correlation with the kernel (scatter form).
      const std::size_t H = height, W = width;
      const long ch = static_cast<long>(kh / 2), cw = static_cast<long>(kw / 2);
      Vec out(H * W, 0.0);
      for (std::size_t i = 0; i < H; ++i)
        for (std::size_t j = 0; j < W; ++j) {
          const double yv = y[i * W + j];
          if (yv == 0.0) continue;
          for (std::size_t a = 0; a < kh; ++a)
            for (std::size_t b = 0; b < kw; ++b) {
              const long ii = static_cast<long>(i) + static_cast<long>(a) - ch;
              const long jj = static_cast<long>(j) + static_cast<long>(b) - cw;
              if (ii < 0 || ii >= static_cast<long>(H) || jj < 0 ||
                  jj >= static_cast<long>(W))
                continue;
              out[static_cast<std::size_t>(ii) * W +
                  static_cast<std::size_t>(jj)] += kernel[a * kw + b] * yv;
            }
        }
      return out;
    }
    case OpKind::Scaled: {
      Vec out = inner->adjoint(y);
      for (auto& v : out) v *= factor;
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

NormBound power_iteration_norm(const LinearMap& A, double tol, int max_iters) {
  if (tol <= 0) throw std::invalid_argument("power_iteration_norm: tol must be > 0");
  NormalSampler sampler(kPowerIterationSeed);
  Vec x = sampler.normal_vec(A.in_dim());
  const double nx = norm2(x);
  if (nx == 0.0 || A.in_dim() == 0) return {0.0, true};
  for (auto& v : x) v /= nx;

  double est = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Vec y = A.apply(x);
    const double ny = norm2(y);
    if (ny == 0.0) return {0.0, true};  // start vector in the null space: A ~ 0 there
    Vec w = A.adjoint(y);
    const double nw = norm2(w);
    const double next = ny;  // ||A x|| with ||x|| = 1
    const double change = std::abs(next - est) / std::max(next, 1e-300);
    est = next;
    if (it > 0 && change < tol) return {est * 1.01, true};
    if (nw == 0.0) return {est * 1.01, true};
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = w[i] / nw;
  }
  return {est * 1.05, false};
}

NormBound norm_bound(const LinearMap& A, double tol, int max_iters) {
  switch (A.kind()) {
    case OpKind::Zero:
      return {0.0, true};
    case OpKind::Identity:
      return {1.0, true};
    case OpKind::Grad2d:
      // Classical bound for the 2D forward-difference operator.
      return {std::sqrt(8.0), true};
    case OpKind::Conv2d:
    case OpKind::Scaled:
      return {A.norm_bound(), A.norm_bound_tight()};
    case OpKind::Dense:
      return power_iteration_norm(A, tol, max_iters);
  }
  throw std::logic_error("unreachable");
}

namespace {

// Computes and stores the certified norm bound, then freezes the operator.
LinearMap finish(std::shared_ptr<LinearMap::Impl> impl) {
  switch (impl->op_kind) {
    case OpKind::Zero:
      impl->bound = {0.0, true};
      break;
    case OpKind::Identity:
      impl->bound = {1.0, true};
      break;
    case OpKind::Grad2d:
      impl->bound = {std::sqrt(8.0), true};
      break;
    case OpKind::Conv2d: {
      // Young's inequality: ||k * x|| <= ||k||_1 ||x||, valid for periodic
      // and zero-padded boundaries alike.
      double l1 = 0.0;
      for (double k : impl->kernel) l1 += std::abs(k);
      impl->bound = {l1, true};
      break;
    }
    case OpKind::Scaled:
      impl->bound = {std::abs(impl->factor) * impl->inner->bound.value,
                     impl->inner->bound.tight};
      break;
    case OpKind::Dense: {
      LinearMap probe(impl);  // bound field not read by power iteration
      impl->bound = power_iteration_norm(probe, 1e-9, 10000);
      break;
    }
  }
  return LinearMap(impl);
}

}  // namespace

LinearMap LinearMap::identity(std::size_t dim) {
  auto impl = std::make_shared<Impl>();
  impl->op_kind = OpKind::Identity;
  impl->in_dim = impl->out_dim = dim;
  return finish(std::move(impl));
}

LinearMap LinearMap::zero(std::size_t in_dim, std::size_t out_dim) {
  auto impl = std::make_shared<Impl>();
  impl->op_kind = OpKind::Zero;
  impl->in_dim = in_dim;
  impl->out_dim = out_dim;
  return finish(std::move(impl));
}

LinearMap LinearMap::dense(std::size_t rows, std::size_t cols, Vec entries) {
  if (entries.size() != rows * cols)
    throw std::invalid_argument("dense: expected " + std::to_string(rows * cols) +
                                " entries, got " + std::to_string(entries.size()));
  auto impl = std::make_shared<Impl>();
  impl->op_kind = OpKind::Dense;
  impl->in_dim = cols;
  impl->out_dim = rows;
  impl->entries = std::move(entries);
  return finish(std::move(impl));
}

LinearMap LinearMap::dense_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("dense_from_csv: cannot open " + path);
  Vec entries;
  std::size_t rows = 0, cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t n = 0;
    while (std::getline(ss, cell, ',')) {
      entries.push_back(std::stod(cell));
      ++n;
    }
    if (rows == 0)
      cols = n;
    else if (n != cols)
      throw std::runtime_error("dense_from_csv: ragged row " +
                               std::to_string(rows) + " in " + path);
    ++rows;
  }
  if (rows == 0) throw std::runtime_error("dense_from_csv: empty file " + path);
  return dense(rows, cols, std::move(entries));
}

LinearMap LinearMap::grad2d(std::size_t height, std::size_t width) {
  if (height < 1 || width < 1)
    throw std::invalid_argument("grad2d: degenerate image size");
  auto impl = std::make_shared<Impl>();
  impl->op_kind = OpKind::Grad2d;
  impl->height = height;
  impl->width = width;
  impl->in_dim = height * width;
  impl->out_dim = 2 * height * width;
  return finish(std::move(impl));
}

LinearMap LinearMap::conv2d(std::size_t height, std::size_t width,
                            std::size_t kh, std::size_t kw, Vec kernel,
                            bool periodic) {
  if (kernel.size() != kh * kw)
    throw std::invalid_argument("conv2d: kernel size mismatch");
  if (kh > height || kw > width)
    throw std::invalid_argument("conv2d: kernel larger than image (" +
                                std::to_string(kh) + "x" + std::to_string(kw) +
                                " vs " + std::to_string(height) + "x" +
                                std::to_string(width) + ")");
  auto impl = std::make_shared<Impl>();
  impl->op_kind = OpKind::Conv2d;
  impl->height = height;
  impl->width = width;
  impl->kh = kh;
  impl->kw = kw;
  impl->kernel = std::move(kernel);
  impl->periodic = periodic;
  impl->in_dim = impl->out_dim = height * width;
  return finish(std::move(impl));
}

LinearMap LinearMap::scaled(double factor, const LinearMap& inner) {
  auto impl = std::make_shared<Impl>();
  impl->op_kind = OpKind::Scaled;
  impl->factor = factor;
  impl->inner = inner.impl_;
  impl->in_dim = inner.in_dim();
  impl->out_dim = inner.out_dim();
  return finish(std::move(impl));
}

}  // namespace pdpath
