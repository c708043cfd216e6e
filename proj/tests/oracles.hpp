#pragma once

// Straight-line transcriptions of the convergence constants, written
// independently of the library so tests catch transposed terms.

#include <algorithm>
#include <cmath>

namespace wcpd::oracle {

struct Constants
{
  double A, A1, radius_dual, radius_primal;
};

inline Constants constants(double rho, double mu, double L, double sigma, double tau, double theta)
{
  double const st = std::sqrt(sigma * tau);
  double const a_dual_1 = (1 - st * L) / (2 * tau);
  double const a_dual_2 = (1 - sigma * rho - theta * st * L) / (2 * sigma);
  double const a_primal_1 = (1 - theta * st * L) / (2 * tau);
  double const a_primal_2 = (1 - sigma * rho - st * L) / (2 * sigma);
  double const A = a_dual_1 < a_dual_2 ? a_dual_1 : a_dual_2;
  double const A1 = a_primal_1 < a_primal_2 ? a_primal_1 : a_primal_2;
  double const big = 1 / (2 * sigma) > 1 / (2 * tau) ? 1 / (2 * sigma) : 1 / (2 * tau);
  return {A, A1, mu / (big - A), mu / (big - A1)};
}

inline double rate_B(double A, double mu, double dist0, double sigma, double tau)
{
  double const big = 1 / (2 * sigma) > 1 / (2 * tau) ? 1 / (2 * sigma) : 1 / (2 * tau);
  return big / (A + mu / dist0);
}

/// E+ and E- for the scaled-solution start.
inline void e_bounds(double mu, double rho, double L, double sigma, double tau, double eps2, double &plus,
                     double &minus)
{
  double const c = sigma * rho + std::sqrt(sigma * tau) * L;
  double const root = std::sqrt(mu * mu - eps2 * c / (sigma * tau));
  plus = sigma * (mu + root) / c;
  minus = sigma * (mu - root) / c;
}

/// Right-hand side of the one-step estimate of the dual-first iteration at
/// a reference point (x, y), for scalar problems with |L| = normL.
inline double one_step_rhs_dual_first(double x, double y, double xn, double yn, double x1, double y1, double sigma,
                                      double tau, double theta, double rho, double normL)
{
  double const st = std::sqrt(sigma * tau) * normL;
  auto sq = [](double v) { return v * v; };
  return (1 - st) / (2 * tau) * sq(y - y1) - 1 / (2 * tau) * sq(y - yn) + (1 - theta * st) / (2 * tau) * sq(yn - y1) +
         (1 - sigma * rho - theta * st) / (2 * sigma) * sq(x - x1) - 1 / (2 * sigma) * sq(x - xn) +
         (1 - st) / (2 * sigma) * sq(xn - x1);
}

} // namespace wcpd::oracle
