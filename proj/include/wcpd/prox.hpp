#pragma once

#include "wcpd/operators.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace wcpd {

struct Interval
{
  double lo;
  double hi;
};

/// Product of closed intervals; singletons have lo == hi.
using SubdiffBox = std::vector<Interval>;

/// Euclidean distance from y to a box.
double dist_to_box(Vec const &y, SubdiffBox const &box);

/// A function oracle h with weak-convexity modulus rho (h + rho/2 |.|^2 is
/// convex), its proximal map and optionally its convex subdifferential.
///
/// prox(gamma, v) = argmin_u h(u) + |u - v|^2 / (2 gamma) is only requested
/// for gamma * rho < 1, where the subproblem is strongly convex; other
/// gammas raise StepsizeViolation.
class ProxFunction
{
public:
  using EvalFn = std::function<double(Vec const &)>;
  using ProxFn = std::function<Vec(double, Vec const &)>;
  using SubdiffFn = std::function<SubdiffBox(Vec const &)>;

  ProxFunction(std::string name, double rho, EvalFn eval, ProxFn prox = {}, SubdiffFn subdiff = {});

  double operator()(Vec const &x) const { return eval_(x); }
  double rho() const { return rho_; }
  std::string const &name() const { return name_; }

  bool has_prox() const { return static_cast<bool>(prox_); }
  Vec prox(double gamma, Vec const &v) const;
  double prox(double gamma, double v) const;

  bool has_subdiff() const { return static_cast<bool>(subdiff_); }
  SubdiffBox subdiff(Vec const &x) const;

  /// Closed-form conjugate h*, when the catalog knows it.
  bool has_conjugate_eval() const { return static_cast<bool>(conj_); }
  double conjugate_eval(Vec const &y) const;
  ProxFunction with_conjugate_eval(EvalFn conj) const;

private:
  std::string name_;
  double rho_;
  EvalFn eval_;
  ProxFn prox_;
  SubdiffFn subdiff_;
  EvalFn conj_;
};

double soft_threshold(double v, double t);

// Catalog ---------------------------------------------------------------

ProxFunction zero_function();
/// |x| on the real line.
ProxFunction abs_value();
/// ||x||_1; subdifferential is [-1,1] on zero coordinates and {sign} elsewhere.
ProxFunction l1_norm();
/// (weight/2) ||x - b||^2.
ProxFunction quad_fit(Vec b, double weight = 1.0);
/// | ||x||^2 - c |, 2-weakly convex. Radial closed-form prox.
ProxFunction abs_norm_sq_shift(double c);
/// |(x - a)(x - b)| on the real line, 2-weakly convex.
ProxFunction abs_quadratic(double a, double b);
/// Indicator of { y : |(y_k, y_{k+pairs})| <= radius for every k }.
ProxFunction linf_ball_indicator(Index pairs, double radius = 1.0);
/// sum_k |(w_k, w_{k+pairs})|, the isotropic total-variation norm on a
/// stacked gradient field. Conjugate is linf_ball_indicator(pairs).
ProxFunction pairwise_l2_sum(Index pairs);
/// weight * ||x - x0||_1.
ProxFunction shifted_l1(Vec x0, double weight = 1.0);
/// weight * sum_i |x_i^2 - x0_i^2|, (2*weight)-weakly convex.
ProxFunction elementwise_sq_l1(Vec x0, double weight = 1.0);

// Combinators -----------------------------------------------------------

/// w * f for w > 0.
ProxFunction scaled(ProxFunction const &f, double w);
/// f + (lambda/2) ||x - b||^2. Its prox is the prox of f at a shifted point
/// with the reduced step gamma / (1 + lambda*gamma).
ProxFunction plus_quadratic(ProxFunction const &f, double lambda, Vec b);
/// prox of gamma g* through the Moreau identity, g convex.
Vec prox_conjugate(ProxFunction const &g, double gamma, Vec const &v);
/// g* as a ProxFunction; evaluation requires the catalog conjugate.
ProxFunction conjugate(ProxFunction const &g);

// Scalar machinery ------------------------------------------------------

/// Exact prox of |(u-a)(u-b)| (a <= b) by enumerating the three smooth
/// branches and the kinks. Requires 2*gamma < 1.
double prox_abs_quadratic(double a, double b, double gamma, double v);

/// Global minimizer of f(u) + (u - v)^2 / (2 gamma) over [lo, hi] by a grid
/// scan followed by golden-section refinement of the best local minima.
double brute_force_prox(std::function<double(double)> const &f, double gamma, double v, double lo, double hi,
                        double tol = 1e-9);

} // namespace wcpd
