#include "wcpd/problems.hpp"

#include "wcpd/errors.hpp"
#include "wcpd/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wcpd {

namespace {

Vec zeros1() { return Vec::Zero(1); }

PrimalDual origin() { return {zeros1(), zeros1()}; }

SaddleProblem scalar_problem(ProxFunction f, ProxFunction gstar, double coupling)
{
  LinearMap L = coupling == 1.0 ? identity_map(1) : scalar_map(1, coupling);
  return SaddleProblem{std::move(f), std::move(gstar), std::move(L), std::nullopt, {origin()}, {zeros1()}, {zeros1()}};
}

ExperimentSpec scalar_example(std::string name, SaddleProblem p, StepConfig steps, double half_width)
{
  ExperimentSpec spec{std::move(name), std::move(p)};
  spec.steps = steps;
  spec.regime = Regime::DualFirst;
  spec.start = {StartKind::RandomBox, half_width, {}};
  spec.iters = 2001;
  return spec;
}

/// |u| + |u^2 - c| as an exact piecewise quadratic.
ProxFunction abs_plus_abs_quadratic(std::string name, double c)
{
  PiecewiseQuadratic pq;
  pq.add_abs({0.0, 1.0, 0.0});
  pq.add_abs({1.0, 0.0, -c});
  return piecewise_function(std::move(name), std::move(pq));
}

ExperimentSpec quartic_example(std::string name, double c, StartSide side)
{
  auto p = scalar_problem(abs_plus_abs_quadratic("|x|+|x^2-c|", c), abs_plus_abs_quadratic("|y|+|y^2-c|", c), 1.0);
  double const hw = side == StartSide::Inside ? kInsideHalfWidth : kOutsideHalfWidth;
  auto spec = scalar_example(std::move(name), std::move(p), {0.35, 0.25, 1.0}, hw);
  spec.mu = 0.9;
  return spec;
}

/// Vector with round(density * n) entries uniform in [0, 1) at random positions.
Vec sparse_vector(Index n, double density, Rng &rng)
{
  auto const k = static_cast<Index>(std::llround(density * static_cast<double>(n)));
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  Vec x = Vec::Zero(n);
  for (Index i = 0; i < k; ++i) {
    auto const j = static_cast<std::size_t>(i) + static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
    x[idx[static_cast<std::size_t>(i)]] = rng.uniform();
  }
  return x;
}

struct SparseData
{
  Mat A;
  Vec x_star;
  Vec b;
};

SparseData sparse_data(L1Options const &opts, std::uint64_t seed)
{
  if (opts.n < 1 || opts.m < 1) { throw std::invalid_argument("l1: n and m must be positive"); }
  if (!(opts.density > 0.0 && opts.density <= 1.0)) { throw std::invalid_argument("l1: density must be in (0, 1]"); }
  Rng rng(seed);
  SparseData d;
  d.A.resize(opts.m, opts.n);
  for (Index j = 0; j < opts.n; ++j) {
    for (Index i = 0; i < opts.m; ++i) { d.A(i, j) = rng.normal(); }
  }
  d.x_star = sparse_vector(opts.n, opts.density, rng);
  Vec const clean = d.A * d.x_star;
  NoiseSpec const noise = opts.noise == L1Noise::Constant ? NoiseSpec::constant(opts.noise_level)
                                                         : NoiseSpec::uniform_scaled(opts.noise_level, clean.norm());
  d.b = clean + make_noise(noise, rng, opts.m);
  return d;
}

ExperimentSpec sparse_spec(std::string name, ProxFunction f, L1Options const &opts, std::uint64_t seed,
                           StartKind default_start)
{
  auto d = sparse_data(opts, seed);
  LinearMap L = matrix_map(d.A, seed);
  ProxFunction g = quad_fit(d.b, 1.0);
  SaddleProblem p{std::move(f), conjugate(g), L, g, {}, {d.x_star}, {}};

  ExperimentSpec spec{std::move(name), std::move(p)};
  spec.steps = sparse_recovery_steps(L.norm_bound());
  spec.regime = Regime::PrimalFirst;
  spec.enforce_regime = false;
  spec.iters = 5000;
  spec.seed = seed;
  spec.x_star = d.x_star;
  spec.start.kind = opts.start.value_or(default_start);
  if (spec.start.kind == StartKind::ScaledSolution) {
    double const e0 = warm_start_radius(L.norm_bound(), spec.steps);
    double const nx = d.x_star.norm();
    Vec x0 = nx > 0.0 ? Vec(e0 * d.x_star / nx) : Vec::Zero(opts.n);
    spec.start.given = {std::move(x0), Vec::Zero(opts.m)};
  } else if (spec.start.kind == StartKind::RandomBox) {
    throw std::invalid_argument("l1: random starts are not supported; use zeros or scaled");
  }
  return spec;
}

ImageGrid with_pixels(ImageGrid const &like, Vec px)
{
  ImageGrid img(like.n, std::move(px));
  img.maxval = like.maxval;
  return img;
}

} // namespace

PrimalDual make_start(ExperimentSpec const &spec, Rng &rng)
{
  Index const nx = spec.problem.L.in_dim();
  Index const ny = spec.problem.L.out_dim();
  switch (spec.start.kind) {
  case StartKind::Zeros: return {Vec::Zero(nx), Vec::Zero(ny)};
  case StartKind::ScaledSolution: return spec.start.given;
  case StartKind::RandomBox: {
    double const h = spec.start.half_width;
    PrimalDual z{Vec(nx), Vec(ny)};
    for (Index i = 0; i < nx; ++i) { z.x[i] = rng.uniform(-h, h); }
    for (Index i = 0; i < ny; ++i) { z.y[i] = rng.uniform(-h, h); }
    return z;
  }
  }
  throw std::logic_error("make_start: unknown start kind");
}

std::uint64_t start_seed(std::uint64_t seed, std::uint64_t k) { return seed + 0x9e3779b97f4a7c15ULL * k; }

ExperimentSpec example_abs_split()
{
  auto p = scalar_problem(abs_value(), abs_value(), 0.0);
  auto spec = scalar_example("example1", std::move(p), {0.75, 0.25, 1.0}, kOutsideHalfWidth);
  spec.mu = 1.0;
  return spec;
}

ExperimentSpec example_quadratic_dual()
{
  auto p = scalar_problem(abs_value(), quad_fit(zeros1(), 0.25), 1.0);
  return scalar_example("example2", std::move(p), {0.75, 0.25, 1.0}, kOutsideHalfWidth);
}

ExperimentSpec example_abs_bilinear()
{
  auto p = scalar_problem(abs_value(), abs_value(), 1.0);
  auto spec = scalar_example("example3", std::move(p), {0.75, 0.25, 1.0}, kOutsideHalfWidth);
  spec.mu = 1.0;
  return spec;
}

ExperimentSpec example_wc_quartic(StartSide side) { return quartic_example("example4", 2.0, side); }

ExperimentSpec example_wc_quartic_variant()
{
  auto spec = quartic_example("example4-variant", 1.0, StartSide::Outside);
  spec.mu = 1.0;
  return spec;
}

Vec make_noise(NoiseSpec const &noise, Rng &rng, Index dim)
{
  Vec out(dim);
  for (Index i = 0; i < dim; ++i) {
    switch (noise.kind) {
    case NoiseSpec::Kind::Gaussian: out[i] = noise.level * rng.normal(); break;
    case NoiseSpec::Kind::UniformScaled: out[i] = noise.scale * rng.uniform(-noise.level, noise.level); break;
    case NoiseSpec::Kind::Constant: out[i] = noise.level; break;
    }
  }
  return out;
}

Vec make_noise(NoiseSpec const &noise, std::uint64_t seed, Index dim)
{
  Rng rng(seed);
  return make_noise(noise, rng, dim);
}

StepConfig sparse_recovery_steps(double norm_A)
{
  double const sigma = 0.1;
  double tau = 0.99;
  if (norm_A > 0.0) { tau = std::min(0.99, (1.0 - 1e-6) / (norm_A * norm_A * sigma)); }
  return {sigma, tau, 1.0};
}

double warm_start_radius(double norm_A, StepConfig const &cfg)
{
  auto const e = epsilon_bounds(0.99, 2.0, norm_A, cfg.sigma, cfg.tau, std::sqrt(1e-7));
  if (!e.feasible) { throw StepsizeViolation("warm start: epsilon condition infeasible for these steps"); }
  return e.E_plus;
}

ExperimentSpec l1_convex(L1Options const &opts, std::uint64_t seed)
{
  return sparse_spec("l1", l1_norm(), opts, seed, StartKind::Zeros);
}

ExperimentSpec l1_weakly_convex(L1Options const &opts, std::uint64_t seed)
{
  // The target |x*|^2 is rebuilt from the same seed as the data.
  auto const d = sparse_data(opts, seed);
  return sparse_spec("l1wc", abs_norm_sq_shift(d.x_star.squaredNorm()), opts, seed, StartKind::ScaledSolution);
}

ExperimentSpec deblur_spec(ImageGrid const &clean, DeblurModel model, double blur_std, double noise_eps,
                           std::uint64_t seed)
{
  Index const n = clean.n;
  LinearMap L = gaussian_blur_map(n, blur_std);
  Vec const b = L.apply(clean.pixels) + make_noise(NoiseSpec::gaussian(noise_eps), seed, n * n);
  ProxFunction f = model == DeblurModel::Convex ? l1_norm() : abs_norm_sq_shift(clean.pixels.squaredNorm());
  ProxFunction g = quad_fit(b, 1.0);
  SaddleProblem p{std::move(f), conjugate(g), L, g, {}, {}, {}};

  ExperimentSpec spec{"deblur-" + to_string(model), std::move(p)};
  spec.steps = sparse_recovery_steps(L.norm_bound());
  spec.regime = Regime::PrimalFirst;
  spec.enforce_regime = false;
  spec.iters = 1000;
  spec.seed = seed;
  spec.image = ImageData{clean, with_pixels(clean, b)};
  return spec;
}

TvModel tv_model_from_string(std::string const &s)
{
  if (s == "convex") { return TvModel::Convex; }
  if (s == "wc1") { return TvModel::WC1; }
  if (s == "wc2") { return TvModel::WC2; }
  if (s == "wc3") { return TvModel::WC3; }
  if (s == "wc4") { return TvModel::WC4; }
  throw std::invalid_argument("unknown TV model '" + s + "' (expected convex, wc1, wc2, wc3, wc4)");
}

std::string to_string(TvModel m)
{
  switch (m) {
  case TvModel::Convex: return "convex";
  case TvModel::WC1: return "wc1";
  case TvModel::WC2: return "wc2";
  case TvModel::WC3: return "wc3";
  case TvModel::WC4: return "wc4";
  }
  return "unknown";
}

std::string to_string(DeblurModel m) { return m == DeblurModel::Convex ? "convex" : "wc"; }

DeblurModel deblur_model_from_string(std::string const &s)
{
  if (s == "convex") { return DeblurModel::Convex; }
  if (s == "wc") { return DeblurModel::WeaklyConvex; }
  throw std::invalid_argument("unknown deblur model '" + s + "' (expected convex, wc)");
}

ExperimentSpec tv_spec(ImageGrid const &clean, TvOptions const &opts, std::uint64_t seed)
{
  Index const n = clean.n;
  Index const pixels = n * n;
  Vec const b = clean.pixels + make_noise(NoiseSpec::gaussian(opts.noise_sigma), seed, pixels);
  Vec const &x0 = clean.pixels;
  double const lambda = opts.lambda.value_or(opts.model == TvModel::WC1 ? 1.0 : 8.0);
  if (!(lambda > 0.0)) { throw std::invalid_argument("tv: lambda must be positive"); }

  std::optional<ProxFunction> f;
  switch (opts.model) {
  case TvModel::Convex: f = quad_fit(b, lambda); break;
  case TvModel::WC1: f = scaled(abs_norm_sq_shift(opts.wc1_target.value_or(b.squaredNorm())), lambda); break;
  case TvModel::WC2: f = plus_quadratic(abs_norm_sq_shift(x0.squaredNorm()), lambda, b); break;
  case TvModel::WC3: f = plus_quadratic(shifted_l1(x0), lambda, b); break;
  case TvModel::WC4: f = plus_quadratic(elementwise_sq_l1(x0), lambda, b); break;
  }

  LinearMap L = grad_map(n);
  SaddleProblem p{*f, linf_ball_indicator(pixels), L, pairwise_l2_sum(pixels), {}, {}, {}};
  ExperimentSpec spec{"tv-" + to_string(opts.model), std::move(p)};
  spec.steps = sparse_recovery_steps(L.norm_bound());
  spec.regime = Regime::PrimalFirst;
  spec.enforce_regime = false;
  spec.iters = 2000;
  spec.seed = seed;
  spec.image = ImageData{clean, with_pixels(clean, b)};
  return spec;
}

ImageGrid as_image(ExperimentSpec const &spec, Vec const &x)
{
  if (!spec.image) { throw std::invalid_argument("as_image: experiment has no image"); }
  return with_pixels(spec.image->clean, x);
}

std::vector<std::string> experiment_names()
{
  return {"example1", "example2", "example3", "example4", "example4-variant", "l1", "l1wc"};
}

bool requires_seed(std::string const &name)
{
  auto const names = experiment_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

ExperimentSpec build_experiment(std::string const &name, ExperimentOptions const &opts)
{
  auto const names = experiment_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw std::out_of_range("unknown experiment '" + name + "'");
  }
  if (requires_seed(name) && !opts.seed) {
    throw std::invalid_argument("experiment '" + name + "' is randomized and needs an explicit seed");
  }
  ExperimentSpec spec = [&] {
    if (name == "example1") { return example_abs_split(); }
    if (name == "example2") { return example_quadratic_dual(); }
    if (name == "example3") { return example_abs_bilinear(); }
    if (name == "example4") { return example_wc_quartic(opts.side.value_or(StartSide::Inside)); }
    if (name == "example4-variant") { return example_wc_quartic_variant(); }
    if (name == "l1") { return l1_convex(opts.l1, *opts.seed); }
    return l1_weakly_convex(opts.l1, *opts.seed);
  }();
  spec.seed = opts.seed;
  return spec;
}

} // namespace wcpd
