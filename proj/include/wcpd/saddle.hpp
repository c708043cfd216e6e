#pragma once

#include "wcpd/operators.hpp"
#include "wcpd/prox.hpp"
#include "wcpd/steps.hpp"

#include <atomic>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace wcpd {

struct PrimalDual
{
  Vec x;
  Vec y;
};

/// min_x max_y  f(x) + <Lx, y> - g*(y), with optional known solution sets.
struct SaddleProblem
{
  ProxFunction f;
  ProxFunction gstar;
  LinearMap L;
  std::optional<ProxFunction> g; ///< primal form of g, for objectives and eps_n
  std::vector<PrimalDual> saddle_set;
  std::vector<Vec> primal_solutions;
  std::vector<Vec> dual_solutions;
};

/// Checks dims of f/g*/L against the listed points; throws invalid_argument.
void check_dims(SaddleProblem const &p, Vec const &x, Vec const &y);

double lagrangian(SaddleProblem const &p, Vec const &x, Vec const &y);

/// Counts H evaluations that came out below -1e-12, which means the listed
/// saddle set is wrong. Such values are clamped to zero.
struct GapDiagnostics
{
  std::atomic<std::uint64_t> negative_h{0};
};

double gap_H(SaddleProblem const &p, Vec const &x, Vec const &y, GapDiagnostics *diag = nullptr);

/// Axis-aligned box in the (x, y) plane, for problems with scalar x and y.
struct Box2
{
  double x_lo, x_hi, y_lo, y_hi;
};

/// Grid points lo + (hi - lo) k / K, k = 0..K, with K = ceil((hi - lo) / step).
std::vector<double> grid_axis(double lo, double hi, double step);

/// Grid supremum of K(x, yh) - K(xh, y) over (xh, yh) in the box.
double gap_G(SaddleProblem const &p, double x, double y, Box2 const &box, double grid_step);

struct ContourPoint
{
  double x, y, value;
};

struct SharpnessReport
{
  double min_violation = 0.0; ///< min over the grid of H - mu*dist
  double witness_x = 0.0;
  double witness_y = 0.0;
  std::uint64_t negative_h_count = 0;
  std::size_t grid_points = 0;
  std::vector<ContourPoint> contour; ///< filled when requested, row-major in x
  bool sharp(double tol = 1e-9) const { return min_violation >= -tol; }
};

/// Scans H - mu*dist(., S) on the grid. Evaluation is split across threads,
/// but the minimum and witness match a left-to-right scan (lowest index wins).
SharpnessReport verify_inf_sharpness(SaddleProblem const &p, double mu, Box2 const &box, double grid_step,
                                     bool keep_contour = false, unsigned threads = 0);

double dist_to_set(PrimalDual const &z, std::vector<PrimalDual> const &set);
double dist_to_set(Vec const &x, std::vector<Vec> const &set);

/// Largest violation of K(x*, y) <= K(x*, y*) <= K(x, y*) over random probes
/// in a cube of the given half-width around each listed saddle point.
double saddle_violation(SaddleProblem const &p, int probes, double radius, std::uint64_t seed);

struct RadiusReport
{
  double A = 0.0;
  double A1 = 0.0;
  double ball_radius = 0.0;
  Regime regime = Regime::DualFirst;
  std::optional<double> B;

  double A_regime() const { return regime == Regime::DualFirst ? A : A1; }
};

RadiusReport radius_report(double rho, double mu, double norm_L, StepConfig const &cfg, Regime regime);

/// max{1/(2 sigma), 1/(2 tau)} / (A + mu/dist0). Throws OutOfBall unless
/// dist0 < ball_radius.
double rate_constant_B(RadiusReport const &report, double mu, double dist0, double sigma, double tau);

struct EpsilonBounds
{
  bool feasible = false;
  double E_plus = 0.0;
  double E_minus = 0.0;
};

EpsilonBounds epsilon_bounds(double mu, double rho, double norm_L, double sigma, double tau, double eps_n);

/// Interval of sigma where both the epsilon feasibility condition and the
/// primal-first step predicates hold, found by scanning then bisecting.
std::optional<std::pair<double, double>> feasible_sigma_interval(double mu, double rho, double norm_L, double tau,
                                                                 double eps_n, double tol = 1e-12);

/// F(x) = f(x) - (rho_g/2)|Lx|^2 and G(y) = g(y) + (rho_g/2)|y|^2 for a
/// rho_g-weakly convex g. F has a prox only when L is a multiple of I.
std::pair<ProxFunction, ProxFunction> reduce_fully_weakly_convex(ProxFunction const &f, ProxFunction const &g,
                                                                 LinearMap const &L);

/// Largest violation of the weak-convexity inequality with modulus rho for
/// gap_G over random (z1, z2, lambda) samples in the box.
double gap_weak_convexity_check(SaddleProblem const &p, double rho, int samples, std::uint64_t seed,
                                Box2 const &box, double grid_step);

} // namespace wcpd
