#pragma once

#include "wcpd/image.hpp"
#include "wcpd/random.hpp"
#include "wcpd/saddle.hpp"
#include "wcpd/solver.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wcpd {

enum class StartKind
{
  Zeros,
  RandomBox,      ///< each coordinate uniform in [-half_width, half_width)
  ScaledSolution, ///< x0 = E0+ * x*/|x*|, y0 = 0 (precomputed into `given`)
};

struct StartPolicy
{
  StartKind kind = StartKind::Zeros;
  double half_width = 0.0;
  PrimalDual given; ///< used by ScaledSolution
};

struct ImageData
{
  ImageGrid clean;
  ImageGrid observed;
};

struct ExperimentSpec
{
  ExperimentSpec(std::string n, SaddleProblem p) : name(std::move(n)), problem(std::move(p)) {}

  std::string name;
  SaddleProblem problem;
  StepConfig steps;
  Regime regime = Regime::DualFirst;
  bool enforce_regime = true; ///< false: only the base step predicates are checked
  StartPolicy start;
  int iters = 1000;
  std::optional<std::uint64_t> seed;
  std::optional<double> mu; ///< sharpness constant for this example
  std::optional<Vec> x_star;
  std::optional<ImageData> image;
};

PrimalDual make_start(ExperimentSpec const &spec, Rng &rng);

/// Independent seed for the k-th start of a multi-start run.
std::uint64_t start_seed(std::uint64_t seed, std::uint64_t k);

// One-dimensional saddle examples -----------------------------------------

/// K(x,y) = |x| - |y| (L = 0), S = {(0,0)}.
ExperimentSpec example_abs_split();
/// K(x,y) = |x| + xy - y^2/8, S = {(0,0)}.
ExperimentSpec example_quadratic_dual();
/// K(x,y) = |x| + xy - |y|, S = {(0,0)}; sigma=0.75, tau=0.25, theta=1,
/// 2001 iterations from a random start in [-10,10]^2.
ExperimentSpec example_abs_bilinear();

enum class StartSide
{
  Inside,  ///< [-0.3199, 0.3199]^2
  Outside, ///< [-10, 10]^2
};

/// K(x,y) = |x| + |x^2 - c| + xy - |y| - |y^2 - c| with c = 2, S = {(0,0)};
/// sigma=0.35, tau=0.25, theta=1, mu=0.9.
ExperimentSpec example_wc_quartic(StartSide side = StartSide::Inside);
/// The same Lagrangian with c = 1; not inf-sharp with constant 1.
ExperimentSpec example_wc_quartic_variant();

inline constexpr double kInsideHalfWidth = 0.3199;
inline constexpr double kOutsideHalfWidth = 10.0;

// Noise -----------------------------------------------------------------

struct NoiseSpec
{
  enum class Kind
  {
    Gaussian,      ///< level * N(0,1)
    UniformScaled, ///< scale * U[-level, level)
    Constant,      ///< level
  };
  Kind kind = Kind::Constant;
  double level = 0.0;
  double scale = 1.0;

  static NoiseSpec gaussian(double eps) { return {Kind::Gaussian, eps, 1.0}; }
  static NoiseSpec uniform_scaled(double range, double scale) { return {Kind::UniformScaled, range, scale}; }
  static NoiseSpec constant(double c) { return {Kind::Constant, c, 1.0}; }
};

Vec make_noise(NoiseSpec const &noise, std::uint64_t seed, Index dim);
Vec make_noise(NoiseSpec const &noise, Rng &rng, Index dim);

// Sparse recovery -------------------------------------------------------

enum class L1Noise
{
  Constant,      ///< delta = level (0.1)
  UniformScaled, ///< delta = |A x*| U[-level, level)
};

struct L1Options
{
  Index n = 300;
  Index m = 200;
  double density = 0.1;
  L1Noise noise = L1Noise::Constant;
  double noise_level = 0.1;
  std::optional<StartKind> start; ///< defaults: zeros (convex), scaled solution (weakly convex)
};

/// min |x|_1 + 1/2 |Ax - b|^2 with A Gaussian and a sparse nonnegative x*.
ExperimentSpec l1_convex(L1Options const &opts, std::uint64_t seed);
/// min | |x|^2 - |x*|^2 | + 1/2 |Ax - b|^2 on the same data.
ExperimentSpec l1_weakly_convex(L1Options const &opts, std::uint64_t seed);

/// sigma = 0.1, tau = min(0.99, 1/(|A|^2 sigma)) shrunk so sqrt(sigma tau)|A| < 1.
StepConfig sparse_recovery_steps(double norm_A);

/// E0+ for the scaled-solution start: mu = 0.99, rho = 2, eps0^2 = 1e-7.
double warm_start_radius(double norm_A, StepConfig const &cfg);

// Imaging ---------------------------------------------------------------

enum class DeblurModel
{
  Convex,       ///< 1/2 |Ax - b|^2 + |x|_1
  WeaklyConvex, ///< | |x|^2 - |x0|^2 | + 1/2 |Ax - b|^2
};

ExperimentSpec deblur_spec(ImageGrid const &clean, DeblurModel model, double blur_std, double noise_eps,
                           std::uint64_t seed);

enum class TvModel
{
  Convex, ///< lambda/2 |x - b|^2
  WC1,    ///< lambda | |x|^2 - t |, scalar target t
  WC2,    ///< | |x|^2 - |x0|^2 | + lambda/2 |x - b|^2
  WC3,    ///< |x - x0|_1 + lambda/2 |x - b|^2
  WC4,    ///< |x^2 - x0^2|_1 + lambda/2 |x - b|^2
};

TvModel tv_model_from_string(std::string const &s);
std::string to_string(TvModel m);
std::string to_string(DeblurModel m);
DeblurModel deblur_model_from_string(std::string const &s);

struct TvOptions
{
  TvModel model = TvModel::Convex;
  std::optional<double> lambda;      ///< default 8, or 1 for WC1
  double noise_sigma = 0.1;
  std::optional<double> wc1_target;  ///< default |b|^2
};

/// f(x) + |grad x|_{2,1} in the saddle form with g* the pointwise unit-ball
/// indicator on the gradient field.
ExperimentSpec tv_spec(ImageGrid const &clean, TvOptions const &opts, std::uint64_t seed);

/// Image with pixels x on the experiment's grid.
ImageGrid as_image(ExperimentSpec const &spec, Vec const &x);

// Registry --------------------------------------------------------------

struct ExperimentOptions
{
  std::optional<std::uint64_t> seed;
  L1Options l1;
  std::optional<StartSide> side;
};

/// Names accepted by build_experiment.
std::vector<std::string> experiment_names();
bool requires_seed(std::string const &name);

/// Throws std::out_of_range for unknown names and std::invalid_argument when
/// a randomized experiment is built without a seed.
ExperimentSpec build_experiment(std::string const &name, ExperimentOptions const &opts);

} // namespace wcpd
