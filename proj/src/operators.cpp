#include "wcpd/operators.hpp"

#include "wcpd/random.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <utility>

namespace wcpd {

LinearMap::LinearMap(std::string name, Index in_dim, Index out_dim, Fn apply, Fn adjoint, double norm_bound)
  : name_(std::move(name))
  , in_(in_dim)
  , out_(out_dim)
  , apply_(std::move(apply))
  , adjoint_(std::move(adjoint))
  , norm_(norm_bound)
{
  if (in_ < 1 || out_ < 1) { throw std::invalid_argument("LinearMap: dimensions must be positive"); }
  if (!(norm_bound >= 0.0)) { throw std::invalid_argument("LinearMap: norm bound must be nonnegative"); }
}

Vec LinearMap::apply(Vec const &x) const
{
  if (x.size() != in_) {
    throw std::invalid_argument(name_ + ": apply expects dimension " + std::to_string(in_) + ", got " +
                                std::to_string(x.size()));
  }
  return apply_(x);
}

Vec LinearMap::adjoint(Vec const &y) const
{
  if (y.size() != out_) {
    throw std::invalid_argument(name_ + ": adjoint expects dimension " + std::to_string(out_) + ", got " +
                                std::to_string(y.size()));
  }
  return adjoint_(y);
}

LinearMap LinearMap::with_norm_bound(double bound) const
{
  LinearMap copy = *this;
  if (!(bound >= 0.0)) { throw std::invalid_argument("LinearMap: norm bound must be nonnegative"); }
  copy.norm_ = bound;
  return copy;
}

LinearMap LinearMap::with_scalar_factor(double s) const
{
  LinearMap copy = *this;
  copy.scalar_ = s;
  return copy;
}

LinearMap matrix_map(Mat A, std::uint64_t seed, int iters)
{
  if (A.rows() == 0 || A.cols() == 0) { throw std::invalid_argument("matrix_map: empty matrix"); }
  if (!A.allFinite()) { throw std::invalid_argument("matrix_map: non-finite entries"); }
  auto const shared = std::make_shared<Mat const>(std::move(A));
  LinearMap map(
    "matrix", shared->cols(), shared->rows(), [shared](Vec const &x) -> Vec { return (*shared) * x; },
    [shared](Vec const &y) -> Vec { return shared->transpose() * y; }, 0.0);
  return map.with_norm_bound(power_iteration(map, iters, seed));
}

LinearMap identity_map(Index n)
{
  return LinearMap("identity", n, n, [](Vec const &x) { return x; }, [](Vec const &y) { return y; }, 1.0)
    .with_scalar_factor(1.0);
}

LinearMap scalar_map(Index n, double s)
{
  if (!std::isfinite(s)) { throw std::invalid_argument("scalar_map: non-finite factor"); }
  return LinearMap(
           "scalar", n, n, [s](Vec const &x) -> Vec { return s * x; }, [s](Vec const &y) -> Vec { return s * y; },
           std::abs(s))
    .with_scalar_factor(s);
}

LinearMap grad_map(Index n)
{
  if (n < 1) { throw std::invalid_argument("grad_map: side length must be positive"); }
  auto apply = [n](Vec const &x) -> Vec {
    Index const np = n * n;
    Vec g = Vec::Zero(2 * np);
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        Index const k = i * n + j;
        if (i + 1 < n) { g[k] = x[k + n] - x[k]; }
        if (j + 1 < n) { g[np + k] = x[k + 1] - x[k]; }
      }
    }
    return g;
  };
  auto adjoint = [n](Vec const &p) -> Vec { return -divergence(n, p); };
  // ||grad||^2 <= 8 for forward differences.
  return LinearMap("grad", n * n, 2 * n * n, apply, adjoint, std::sqrt(8.0));
}

Vec divergence(Index n, Vec const &p)
{
  Index const np = n * n;
  if (p.size() != 2 * np) { throw std::invalid_argument("divergence: expected 2n^2 entries"); }
  Vec d(np);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      Index const k = i * n + j;
      double v = 0.0;
      if (i + 1 < n) { v += p[k]; }
      if (i > 0) { v -= p[k - n]; }
      if (j + 1 < n) { v += p[np + k]; }
      if (j > 0) { v -= p[np + k - 1]; }
      d[k] = v;
    }
  }
  return d;
}

std::vector<double> gaussian_kernel(double std_dev)
{
  if (!(std_dev > 0.0) || !std::isfinite(std_dev)) {
    throw std::invalid_argument("gaussian_kernel: standard deviation must be positive");
  }
  auto const radius = static_cast<Index>(std::ceil(3.0 * std_dev));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (Index t = -radius; t <= radius; ++t) {
    double const w = std::exp(-0.5 * static_cast<double>(t * t) / (std_dev * std_dev));
    k[static_cast<std::size_t>(t + radius)] = w;
    sum += w;
  }
  for (auto &w : k) { w /= sum; }
  return k;
}

namespace {

// Separable 2D convolution with a symmetric kernel, zero outside the image.
Vec convolve_separable(Index n, std::vector<double> const &k, Vec const &x)
{
  auto const radius = static_cast<Index>(k.size() / 2);
  Vec tmp = Vec::Zero(n * n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      double acc = 0.0;
      for (Index t = -radius; t <= radius; ++t) {
        Index const jj = j + t;
        if (jj >= 0 && jj < n) { acc += k[static_cast<std::size_t>(t + radius)] * x[i * n + jj]; }
      }
      tmp[i * n + j] = acc;
    }
  }
  Vec out = Vec::Zero(n * n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      double acc = 0.0;
      for (Index t = -radius; t <= radius; ++t) {
        Index const ii = i + t;
        if (ii >= 0 && ii < n) { acc += k[static_cast<std::size_t>(t + radius)] * tmp[ii * n + j]; }
      }
      out[i * n + j] = acc;
    }
  }
  return out;
}

} // namespace

LinearMap gaussian_blur_map(Index n, double std_dev)
{
  if (n < 1) { throw std::invalid_argument("gaussian_blur_map: side length must be positive"); }
  auto const kernel = std::make_shared<std::vector<double> const>(gaussian_kernel(std_dev));
  auto conv = [n, kernel](Vec const &x) -> Vec { return convolve_separable(n, *kernel, x); };
  // Symmetric kernel: self-adjoint. Nonnegative kernel with unit mass: ||A|| <= 1.
  return LinearMap("gaussian_blur", n * n, n * n, conv, conv, 1.0);
}

std::vector<double> power_iteration_history(LinearMap const &map, int iters, std::uint64_t seed)
{
  if (iters < 1) { throw std::invalid_argument("power_iteration: iters must be >= 1"); }
  Rng rng(seed);
  Vec v(map.in_dim());
  for (Index i = 0; i < v.size(); ++i) { v[i] = rng.uniform(-1.0, 1.0); }
  std::vector<double> history;
  history.reserve(static_cast<std::size_t>(iters));
  double nv = v.norm();
  if (nv == 0.0) { return std::vector<double>(static_cast<std::size_t>(iters), 0.0); }
  v /= nv;
  for (int it = 0; it < iters; ++it) {
    Vec const Lv = map.apply(v);
    history.push_back(Lv.squaredNorm());
    Vec w = map.adjoint(Lv);
    double const nw = w.norm();
    if (nw == 0.0) {
      history.resize(static_cast<std::size_t>(iters), history.back());
      break;
    }
    v = w / nw;
  }
  return history;
}

double power_iteration(LinearMap const &map, int iters, std::uint64_t seed)
{
  auto const history = power_iteration_history(map, iters, seed);
  return std::sqrt(history.back()) * kNormSafetyFactor;
}

} // namespace wcpd
