#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace wcpd {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Bounded linear operator L : R^in -> R^out with its adjoint and an upper
/// estimate of the operator norm. Immutable once built; apply/adjoint are
/// pure and may be called concurrently.
class LinearMap
{
public:
  using Fn = std::function<Vec(Vec const &)>;

  LinearMap(std::string name, Index in_dim, Index out_dim, Fn apply, Fn adjoint, double norm_bound);

  Vec apply(Vec const &x) const;
  Vec adjoint(Vec const &y) const;

  Index in_dim() const { return in_; }
  Index out_dim() const { return out_; }
  double norm_bound() const { return norm_; }
  std::string const &name() const { return name_; }

  /// Set when the map is s*I (identity and scalar maps).
  std::optional<double> scalar_factor() const { return scalar_; }

  LinearMap with_norm_bound(double bound) const;
  LinearMap with_scalar_factor(double s) const;

private:
  std::string name_;
  Index in_, out_;
  Fn apply_, adjoint_;
  double norm_;
  std::optional<double> scalar_;
};

LinearMap matrix_map(Mat A, std::uint64_t seed = 0x5eed, int iters = 200);
LinearMap identity_map(Index n);
LinearMap scalar_map(Index n, double s);

/// Forward-difference image gradient on an n x n row-major image. The output
/// stacks the vertical differences (first n^2 entries) above the horizontal
/// ones. The adjoint is minus the discrete divergence.
LinearMap grad_map(Index n);

/// Discrete divergence (backward differences, truncated at the boundary),
/// the negative adjoint of grad_map.
Vec divergence(Index n, Vec const &p);

/// Convolution with a normalized Gaussian truncated at radius ceil(3*std),
/// zero padding outside the image.
LinearMap gaussian_blur_map(Index n, double std_dev);

/// Normalized 1D kernel used by gaussian_blur_map, length 2*radius+1.
std::vector<double> gaussian_kernel(double std_dev);

/// Estimate of ||L|| from power iteration on L*L started at a seeded random
/// vector, inflated by 1 + 1e-6. Zero map gives 0.
double power_iteration(LinearMap const &map, int iters, std::uint64_t seed);

/// Rayleigh quotients ||L v_k||^2 of the normalized power iterates.
std::vector<double> power_iteration_history(LinearMap const &map, int iters, std::uint64_t seed);

inline constexpr double kNormSafetyFactor = 1.0 + 1e-6;

} // namespace wcpd
